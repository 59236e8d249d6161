// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/ast.hpp"
#include "mswasm/signature.hpp"
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mswasm
{
struct TypeError
{
    /// Function index in the function index space; absent for module-level errors.
    std::optional<uint32_t> func;
    /// Preorder position of the offending instruction in the function body.
    uint32_t offset = 0;
    TypeErrorCode code = TypeErrorCode::type_mismatch;
    std::string message;

    /// One JSON line: {"func":..,"offset":..,"code":"..","message":".."}.
    std::string to_json() const;
    std::string to_string() const;
};

/// Operand stack contents the validator predicts before an instruction executes, bottom first.
/// Only recorded for reachable code.
using StackShape = std::vector<ValType>;

/// A module that passed validation, together with its per-instruction stack predictions.
class TypedModule
{
public:
    TypedModule(std::shared_ptr<const Module> module,
        std::unordered_map<const Instr*, StackShape> shapes);

    const Module& module() const noexcept { return *module_; }
    const std::shared_ptr<const Module>& shared_module() const noexcept { return module_; }

    /// Stack shape before `instr`, or nullptr for unreachable code and initializer expressions.
    const StackShape* shape_before(const Instr& instr) const noexcept;

private:
    std::shared_ptr<const Module> module_;
    std::unordered_map<const Instr*, StackShape> shapes_;
};

struct ValidationResult
{
    std::optional<TypedModule> typed;
    std::vector<TypeError> errors;

    bool ok() const noexcept { return typed.has_value(); }
};

/// Validates a whole module, reporting every error found (not just the first).
ValidationResult validate_module(std::shared_ptr<const Module> module);
ValidationResult validate_module(Module module);

/// Checks `body` against `expected` results under `ctx` (whose labels and return type are
/// taken as given; the body is checked as a function body). Empty result means well typed.
std::vector<TypeError> check_body(
    const TypingContext& ctx, const std::vector<Instr>& body, const std::vector<ValType>& expected);
}  // namespace mswasm
