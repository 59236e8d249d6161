// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/value.hpp"
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mswasm::cli
{
/// Settings read from a `--config` file of `key = value` lines.
struct Config
{
    std::optional<uint64_t> fuel;
    std::optional<uint32_t> arena_size;
    std::optional<uint32_t> handle_width;
};

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Parses `key = value` lines; `#` starts a comment. Throws UsageError on unknown keys,
/// malformed numbers or a handle_width other than the toolchain's.
Config parse_config(std::string_view text);

/// Parses a typed argument such as `i32:5`, `i64:-1`, `f32:1.5`, `f64:2` or `handle:null`. A bare
/// integer is an i32.
Value parse_value(std::string_view text);

/// Prints a value as parse_value accepts it (floats by bit pattern: `f32:0x3fc00000`).
std::string format_value(const Value& value);

/// Runs the tool; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
}  // namespace mswasm::cli
