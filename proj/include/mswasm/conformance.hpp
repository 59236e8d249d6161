// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mswasm
{
/// Malformed conformance table.
class ConformanceSyntaxError : public std::runtime_error
{
public:
    ConformanceSyntaxError(size_t line, const std::string& message)
      : std::runtime_error{"line " + std::to_string(line) + ": " + message}, line_{line}
    {}

    size_t line() const noexcept { return line_; }

private:
    size_t line_;
};

struct ConformanceFailure
{
    std::string case_name;
    size_t line = 0;
    std::string expected;
    std::string actual;
};

struct ConformanceReport
{
    size_t cases = 0;
    size_t steps = 0;
    std::vector<ConformanceFailure> failures;

    bool ok() const noexcept { return failures.empty(); }
};

/// Runs a conformance table (format in docs/text-format.md) against runtime-store. Each
/// `case` starts with a fresh store. Throws ConformanceSyntaxError on malformed lines.
ConformanceReport run_conformance_table(std::string_view text);
}  // namespace mswasm
