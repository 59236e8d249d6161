// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/ast.hpp"
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mswasm
{
enum class TypeErrorCode : uint8_t
{
    stack_underflow,
    type_mismatch,
    unknown_index,
    handle_in_linear_memory,
    immutable_global_write,
    start_signature,
    missing_memory,
    invalid_initializer,
    invalid_operand_type,
    duplicate_export,
    multiple_memories,
    polymorphic_operand,
    trailing_values,
};

std::string_view to_string(TypeErrorCode code) noexcept;

/// Everything needed to type one instruction: the module-level index spaces plus the state of
/// the enclosing function.
struct TypingContext
{
    std::vector<FuncType> types;
    std::vector<FuncType> funcs;
    std::vector<GlobalType> globals;
    uint32_t tables = 0;
    bool memory = false;

    std::vector<ValType> locals;
    /// Branch target types, innermost last.
    std::vector<std::vector<ValType>> labels;
    std::optional<std::vector<ValType>> return_type;

    /// Module-level context with empty function state.
    static TypingContext for_module(const Module& module);

    /// Context for the body of defined function `func_index` (index into module.funcs). The
    /// function-level label is not included; body checkers push it.
    static TypingContext for_function(const Module& module, size_t func_index);
};

struct StackSignature
{
    std::vector<ValType> inputs;
    std::vector<ValType> outputs;
    /// Control never falls through (br, return, unreachable).
    bool diverges = false;

    friend bool operator==(const StackSignature&, const StackSignature&) = default;
};

class SignatureError : public std::runtime_error
{
public:
    SignatureError(TypeErrorCode code, const std::string& message)
      : std::runtime_error{message}, code_{code}
    {}

    TypeErrorCode code() const noexcept { return code_; }

private:
    TypeErrorCode code_;
};

/// Exact stack consumption and production of `instr` under `ctx`.
///
/// drop and select are polymorphic in their operand; pass its type as `operand`. Throws
/// SignatureError when an index does not resolve or the instruction is malformed.
StackSignature instruction_signature(
    const Instr& instr, const TypingContext& ctx, std::optional<ValType> operand = std::nullopt);
}  // namespace mswasm
