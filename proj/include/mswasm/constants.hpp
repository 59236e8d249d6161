// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

// The build extracts these values to generate mswasm_rt_constants.h for the C runtime. Keep each
// definition on a single line.
namespace mswasm
{
/// Serialized size of a handle inside a segment; handle accesses must be aligned to it.
inline constexpr uint32_t handle_width = 16;

/// Allocation id reserved for the linear memory; never handed out by segalloc.
inline constexpr uint32_t linear_memory_id = 0;

/// Id carried by wrapper-produced handles around native pointers (liveness checks bypassed).
inline constexpr uint32_t unbounded_sentinel_id = 0xffffffff;

inline constexpr uint32_t page_size = 65536;

inline constexpr uint64_t default_fuel = 10'000'000;

/// Nested calls allowed before an invocation ends as resource exhausted.
inline constexpr uint32_t max_call_depth = 50'000;

/// Process exit codes shared by the CLI and compiled programs.
inline constexpr uint32_t exit_values = 0;
inline constexpr uint32_t exit_resource_exhausted = 1;
inline constexpr uint32_t exit_invalid = 2;
inline constexpr uint32_t exit_trapped = 3;
inline constexpr uint32_t exit_fuel_exhausted = 4;
inline constexpr uint32_t exit_stuck = 5;
inline constexpr uint32_t exit_usage = 64;

/// Default size of the arena bound to the `_physical_memory` import.
inline constexpr uint32_t default_arena_size = 65536;

/// Import name of the handle that integer-to-pointer casts are lowered onto.
inline constexpr const char* physical_memory_name = "_physical_memory";
}  // namespace mswasm
