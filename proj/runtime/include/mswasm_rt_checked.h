/* MSWASM toolchain
 * Copyright 2026 The MSWASM Toolchain Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Helpers used by code emitted in Checked C mode. Numeric segment accesses become a
 * dynamic_check over rt_access_ok followed by a ptr<T> dereference; the runtime still owns the
 * tag bookkeeping, so stores first retag the written bytes as data through rt_shatter.
 */

#ifndef MSWASM_RT_CHECKED_H
#define MSWASM_RT_CHECKED_H

#include "mswasm_rt.h"

#ifdef __cplusplus
extern "C" {
#endif

/* Nonzero when `width` bytes at h + offset are in bounds, aligned, live and untagged by
 * forgery. On failure it records the trap kind that the plain accessor would report. */
int rt_access_ok(Handle h, uint32_t offset, uint32_t width);
/* Marks `width` bytes at h + offset as data, invalidating any handle stored over them. */
void rt_shatter(Handle h, uint32_t offset, uint32_t width);

#define handle_load(h, offset) rt_handle_load((h), (offset))
#define handle_store(h, v, offset) rt_handle_store((h), (v), (offset))

#ifdef __cplusplus
}
#endif

#endif /* MSWASM_RT_CHECKED_H */
