/* MSWASM toolchain
 * Copyright 2026 The MSWASM Toolchain Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Plain C version of corpus/heartbleed.msw. The copy trusts claimed_len, so a claim larger than
 * the payload reads whatever follows the payload buffer on the heap. Nothing stops it.
 *
 *   cc -O0 -o heartbleed corpus/reference/heartbleed.c && ./heartbleed 16 64
 *
 * prints the reply bytes, which include the bytes after the 16-byte payload (here the planted
 * secret), and exits 0. The payload shares one allocation with the data after it, so the read
 * stays inside the allocation and AddressSanitizer has nothing to report either. The interpreter
 * gives the payload its own segment and traps the equivalent module with a spatial trap.
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static void copy(unsigned char* dst, const unsigned char* src, unsigned n)
{
    for (unsigned i = 0; i < n; ++i)
        dst[i] = src[i];
}

int main(int argc, char** argv)
{
    const unsigned payload_len = argc > 1 ? (unsigned)atoi(argv[1]) : 16;
    const unsigned claimed_len = argc > 2 ? (unsigned)atoi(argv[2]) : 64;

    /* One allocation holds the payload followed by unrelated data. */
    unsigned char* heap = calloc(payload_len + 64, 1);
    unsigned char* payload = heap;
    memset(payload, 'A', payload_len);
    memcpy(heap + payload_len, "secret-key-material", 19);

    unsigned char* reply = calloc(claimed_len ? claimed_len : 1, 1);
    copy(reply, payload, claimed_len);

    for (unsigned i = 0; i < claimed_len; ++i)
        putchar(reply[i] >= 32 && reply[i] < 127 ? reply[i] : '.');
    putchar('\n');
    printf("last byte %d\n", claimed_len ? reply[claimed_len - 1] : 0);
    free(reply);
    free(heap);
    return 0;
}
