/* MSWASM toolchain
 * Copyright 2026 The MSWASM Toolchain Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * ABI of the C runtime that code emitted by `mswasm codegen` links against. Every accessor has
 * the contract of the matching runtime-store operation, including the trap kind it reports.
 * The runtime keeps one segment table per process and is not thread-safe.
 */

#ifndef MSWASM_RT_H
#define MSWASM_RT_H

#include <stddef.h>
#include <stdint.h>

#include "mswasm_rt_constants.h"

#ifdef __cplusplus
extern "C" {
#endif

/* A handle. `data` is the start of the segment's storage; the addressed byte is
 * data[base + offset + static_offset]. Field order and widths are fixed for wrapper interop. */
typedef struct Handle
{
    uint8_t* data;
    uint32_t base;
    int32_t offset;
    uint32_t bound;
    uint8_t valid;
    uint32_t id;
} Handle;

/* Trap kinds, numbered as the interpreter's TrapKind. */
typedef enum mswasm_rt_trap
{
    MSWASM_RT_TRAP_SPATIAL = 0,
    MSWASM_RT_TRAP_TEMPORAL = 1,
    MSWASM_RT_TRAP_INVALID_HANDLE = 2,
    MSWASM_RT_TRAP_TAG_FORGERY = 3,
    MSWASM_RT_TRAP_LINEAR_OOB = 4,
    MSWASM_RT_TRAP_INDIRECT_CALL_TYPE_MISMATCH = 5,
    MSWASM_RT_TRAP_UNREACHABLE = 6,
    MSWASM_RT_TRAP_MISALIGNED = 7,
    MSWASM_RT_TRAP_RESOURCE_EXHAUSTED = 8
} mswasm_rt_trap;

/* Trap handling. In abort builds rt_trap prints the kind and detail (more verbosely when the
 * MSWASM_RT_VERBOSE environment variable is set) and exits with MSWASM_RT_EXIT_TRAPPED. In
 * return-error builds it unwinds to the innermost MSWASM_RT_TRY. */
void rt_trap(mswasm_rt_trap kind, const char* detail);
/* Nonzero when the last MSWASM_RT_TRY caught a trap; its kind is rt_last_trap(). */
mswasm_rt_trap rt_last_trap(void);

#include <setjmp.h>
jmp_buf* rt_push_try(void);
void rt_pop_try(void);
#define MSWASM_RT_TRY(body)                                                                        \
    (setjmp(*rt_push_try()) == 0 ? ((body), rt_pop_try(), 0) : (rt_pop_try(), 1))

/* Runtime state. */
void rt_init(void);
/* Call-depth accounting; exceeding MSWASM_RT_MAX_CALL_DEPTH traps RESOURCE_EXHAUSTED. */
void rt_enter(void);
void rt_leave(void);

/* Segments. */
Handle rt_handle_null(void);
Handle rt_seg_alloc(uint32_t size);
void rt_seg_free(Handle h);
Handle rt_handle_add(Handle h, int32_t delta);
Handle rt_setbounds(Handle h, uint32_t len);

uint32_t rt_seg_load_i32(Handle h, uint32_t offset);
uint64_t rt_seg_load_i64(Handle h, uint32_t offset);
float rt_seg_load_f32(Handle h, uint32_t offset);
double rt_seg_load_f64(Handle h, uint32_t offset);
uint32_t rt_seg_load8_u(Handle h, uint32_t offset);
Handle rt_handle_load(Handle h, uint32_t offset);

void rt_seg_store_i32(Handle h, uint32_t v, uint32_t offset);
void rt_seg_store_i64(Handle h, uint64_t v, uint32_t offset);
void rt_seg_store_f32(Handle h, float v, uint32_t offset);
void rt_seg_store_f64(Handle h, double v, uint32_t offset);
void rt_seg_store8(Handle h, uint32_t v, uint32_t offset);
void rt_handle_store(Handle h, Handle v, uint32_t offset);

/* Registers `size` bytes of existing storage (a C global object) as a fresh segment. */
Handle rt_bind_object(void* storage, uint32_t size);
/* A fresh zeroed arena of `size` bytes standing for the physical address space. */
Handle rt_physical_memory(uint32_t size);

/* Wrapper support: native pointers become handles with infinite bounds and the sentinel id
 * MSWASM_RT_UNBOUNDED_SENTINEL_ID, for which liveness and bounds checks are bypassed. */
Handle rt_handle_from_native(void* p);
void* rt_handle_to_native(Handle h);

/* Linear memory (untagged, coarse bounds). */
typedef struct rt_memory
{
    uint8_t* data;
    uint32_t size;
} rt_memory;

void rt_memory_init(rt_memory* mem, uint32_t pages);
void rt_memory_init_data(rt_memory* mem, uint32_t offset, const uint8_t* bytes, uint32_t len);
uint32_t rt_linear_load_i32(rt_memory* mem, uint32_t addr, uint32_t offset);
uint64_t rt_linear_load_i64(rt_memory* mem, uint32_t addr, uint32_t offset);
float rt_linear_load_f32(rt_memory* mem, uint32_t addr, uint32_t offset);
double rt_linear_load_f64(rt_memory* mem, uint32_t addr, uint32_t offset);
uint32_t rt_linear_load8_u(rt_memory* mem, uint32_t addr, uint32_t offset);
void rt_linear_store_i32(rt_memory* mem, uint32_t addr, uint32_t v, uint32_t offset);
void rt_linear_store_i64(rt_memory* mem, uint32_t addr, uint64_t v, uint32_t offset);
void rt_linear_store_f32(rt_memory* mem, uint32_t addr, float v, uint32_t offset);
void rt_linear_store_f64(rt_memory* mem, uint32_t addr, double v, uint32_t offset);
void rt_linear_store8(rt_memory* mem, uint32_t addr, uint32_t v, uint32_t offset);

/* Function tables. An empty slot has fn == NULL. */
typedef void (*rt_anyfunc)(void);
typedef struct rt_funcref
{
    uint32_t type;
    rt_anyfunc fn;
} rt_funcref;

/* The function at table[index] if its type id equals `type`; traps
 * INDIRECT_CALL_TYPE_MISMATCH for an out-of-range index, an empty slot or another type. */
rt_anyfunc rt_indirect(const rt_funcref* table, uint32_t size, uint32_t index, uint32_t type);

#ifdef __cplusplus
}
#endif

#endif /* MSWASM_RT_H */
