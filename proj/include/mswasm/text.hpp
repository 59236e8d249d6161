// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/ast.hpp"
#include "mswasm/trap.hpp"
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mswasm
{
struct SourceSpan
{
    size_t start = 0;
    size_t end = 0;
    /// 1-based.
    size_t line = 1;
    size_t column = 1;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& message, SourceSpan span);

    const SourceSpan& span() const noexcept { return span_; }
    /// Message without the location prefix.
    const std::string& message() const noexcept { return message_; }

private:
    SourceSpan span_;
    std::string message_;
};

/// Parses a `.msw` module. Throws ParseError.
Module parse_module(std::string_view text);

/// Parses a single instruction, e.g. "(segload i32 offset=4)". Throws ParseError.
Instr parse_instruction(std::string_view text);

struct Invocation
{
    /// Index of the target module in definition order; the latest module when absent.
    std::optional<uint32_t> module;
    std::string name;
    std::vector<Value> args;
    SourceSpan span;

    friend bool operator==(const Invocation&, const Invocation&) = default;
};

struct ModuleCommand
{
    Module module;
    SourceSpan span;
};

/// Makes the latest module's exports importable under `name`.
struct RegisterCommand
{
    std::string name;
    SourceSpan span;
};

struct InvokeCommand
{
    Invocation invocation;
};

struct AssertReturn
{
    Invocation invocation;
    std::vector<Value> expected;
};

struct AssertTrap
{
    Invocation invocation;
    TrapKind kind;
};

struct AssertExhaustion
{
    Invocation invocation;
};

struct AssertInvalid
{
    Module module;
    /// Expected error code name; empty accepts any validation failure.
    std::string code;
    SourceSpan span;
};

struct AssertUnlinkable
{
    Module module;
    SourceSpan span;
};

using Command = std::variant<ModuleCommand, RegisterCommand, InvokeCommand, AssertReturn,
    AssertTrap, AssertExhaustion, AssertInvalid, AssertUnlinkable>;

struct Script
{
    std::vector<Command> commands;

    size_t module_count() const noexcept;
    size_t assertion_count() const noexcept;
};

/// Parses a `.msws` script. Throws ParseError.
Script parse_script(std::string_view text);

/// Canonical text of a single instruction (nested bodies on one line).
std::string pretty(const Instr& instr);

/// Canonical multi-line text of a module; parse_module(pretty(m)) == m.
std::string pretty(const Module& module);

/// Script literal of a value, e.g. "(i32 5)" or "(h.null)".
std::string pretty(const Value& value);
}  // namespace mswasm
