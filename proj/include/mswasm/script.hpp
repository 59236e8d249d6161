// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/constants.hpp"
#include "mswasm/interpreter.hpp"
#include "mswasm/text.hpp"
#include <string>
#include <vector>

namespace mswasm
{
struct ScriptOptions
{
    uint64_t fuel = default_fuel;
    /// Built-in host functions offered as ("env", name).
    std::vector<std::string> hosts = {"memcpy", "abort"};
    /// Size of the ("env", "_physical_memory") arena; 0 offers none.
    uint32_t arena_size = default_arena_size;
};

struct ScriptFailure
{
    SourceSpan span;
    std::string message;
};

struct ScriptReport
{
    size_t passed = 0;
    std::vector<ScriptFailure> failures;
    /// One line per command, e.g. "3:1: assert_return ok".
    std::vector<std::string> log;

    bool ok() const noexcept { return failures.empty(); }
};

/// Runs every command of `script` in one store. A module that fails to validate or link counts as
/// a failure unless an assert_invalid / assert_unlinkable expects it.
ScriptReport run_script(const Script& script, const ScriptOptions& options = {});
}  // namespace mswasm
