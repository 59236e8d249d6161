// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/signature.hpp"
#include "mswasm/trap.hpp"

namespace mswasm
{
namespace
{
using enum ValType;

[[noreturn]] void fail(TypeErrorCode code, const std::string& message)
{
    throw SignatureError{code, message};
}

void require_integer(const Instr& instr)
{
    if (instr.type != i32 && instr.type != i64)
        fail(TypeErrorCode::invalid_operand_type,
            std::string(mnemonic(instr.op)) + " requires i32 or i64, got " +
                std::string(to_string(instr.type)));
}

void require_packed_i32(const Instr& instr)
{
    if (instr.packed8 && instr.type != i32)
        fail(TypeErrorCode::invalid_operand_type, "8-bit access requires i32");
}

void require_memory(const TypingContext& ctx)
{
    if (!ctx.memory)
        fail(TypeErrorCode::missing_memory, "linear memory access without a memory");
}

const std::vector<ValType>& label(const TypingContext& ctx, uint32_t depth)
{
    if (depth >= ctx.labels.size())
        fail(TypeErrorCode::unknown_index, "unknown label " + std::to_string(depth));
    return ctx.labels[ctx.labels.size() - 1 - depth];
}

ValType local(const TypingContext& ctx, uint32_t idx)
{
    if (idx >= ctx.locals.size())
        fail(TypeErrorCode::unknown_index, "unknown local " + std::to_string(idx));
    return ctx.locals[idx];
}

const GlobalType& global(const TypingContext& ctx, uint32_t idx)
{
    if (idx >= ctx.globals.size())
        fail(TypeErrorCode::unknown_index, "unknown global " + std::to_string(idx));
    return ctx.globals[idx];
}

std::vector<ValType> concat(std::vector<ValType> a, const std::vector<ValType>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}
}  // namespace

std::string_view to_string(TypeErrorCode code) noexcept
{
    switch (code)
    {
    case TypeErrorCode::stack_underflow:
        return "stack_underflow";
    case TypeErrorCode::type_mismatch:
        return "type_mismatch";
    case TypeErrorCode::unknown_index:
        return "unknown_index";
    case TypeErrorCode::handle_in_linear_memory:
        return "handle_in_linear_memory";
    case TypeErrorCode::immutable_global_write:
        return "immutable_global_write";
    case TypeErrorCode::start_signature:
        return "start_signature";
    case TypeErrorCode::missing_memory:
        return "missing_memory";
    case TypeErrorCode::invalid_initializer:
        return "invalid_initializer";
    case TypeErrorCode::invalid_operand_type:
        return "invalid_operand_type";
    case TypeErrorCode::duplicate_export:
        return "duplicate_export";
    case TypeErrorCode::multiple_memories:
        return "multiple_memories";
    case TypeErrorCode::polymorphic_operand:
        return "polymorphic_operand";
    case TypeErrorCode::trailing_values:
        return "trailing_values";
    }
    return "?";
}

std::string_view to_string(TrapKind kind) noexcept
{
    switch (kind)
    {
    case TrapKind::spatial:
        return "spatial";
    case TrapKind::temporal:
        return "temporal";
    case TrapKind::invalid_handle:
        return "invalid_handle";
    case TrapKind::tag_forgery:
        return "tag_forgery";
    case TrapKind::linear_oob:
        return "linear_oob";
    case TrapKind::indirect_call_type_mismatch:
        return "indirect_call_type_mismatch";
    case TrapKind::unreachable:
        return "unreachable";
    case TrapKind::misaligned:
        return "misaligned";
    }
    return "?";
}

std::optional<TrapKind> trap_kind_from_string(std::string_view name) noexcept
{
    for (const auto k : all_trap_kinds)
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

TypingContext TypingContext::for_module(const Module& module)
{
    TypingContext ctx;
    ctx.types = module.types;
    for (uint32_t i = 0; i < module.func_count(); ++i)
        ctx.funcs.push_back(*module.func_type(i));
    for (uint32_t i = 0; i < module.global_count(); ++i)
        ctx.globals.push_back(*module.global_type(i));
    ctx.tables = module.table_count();
    ctx.memory = module.has_memory();
    return ctx;
}

TypingContext TypingContext::for_function(const Module& module, size_t func_index)
{
    auto ctx = for_module(module);
    const auto& func = module.funcs.at(func_index);
    ctx.locals = concat(func.type.params, func.locals);
    ctx.return_type = func.type.results;
    return ctx;
}

StackSignature instruction_signature(
    const Instr& instr, const TypingContext& ctx, std::optional<ValType> operand)
{
    switch (instr.op)
    {
    case Opcode::unreachable:
        return {{}, {}, true};
    case Opcode::nop:
        return {};
    case Opcode::block:
    case Opcode::loop:
        return {{}, instr.results};
    case Opcode::if_:
        return {{i32}, instr.results};
    case Opcode::br:
        return {label(ctx, instr.index), {}, true};
    case Opcode::br_if:
    {
        const auto& types = label(ctx, instr.index);
        return {concat(types, {i32}), types};
    }
    case Opcode::return_:
        if (!ctx.return_type)
            fail(TypeErrorCode::unknown_index, "return outside of a function");
        return {*ctx.return_type, {}, true};
    case Opcode::call:
    {
        if (instr.index >= ctx.funcs.size())
            fail(TypeErrorCode::unknown_index, "unknown function " + std::to_string(instr.index));
        const auto& type = ctx.funcs[instr.index];
        return {type.params, type.results};
    }
    case Opcode::call_indirect:
    {
        if (instr.index >= ctx.types.size())
            fail(TypeErrorCode::unknown_index, "unknown type " + std::to_string(instr.index));
        if (instr.table >= ctx.tables)
            fail(TypeErrorCode::unknown_index, "unknown table " + std::to_string(instr.table));
        const auto& type = ctx.types[instr.index];
        return {concat(type.params, {i32}), type.results};
    }
    case Opcode::drop:
        if (!operand)
            fail(TypeErrorCode::polymorphic_operand, "drop needs an operand type");
        return {{*operand}, {}};
    case Opcode::select:
        if (!operand)
            fail(TypeErrorCode::polymorphic_operand, "select needs an operand type");
        return {{*operand, *operand, i32}, {*operand}};
    case Opcode::local_get:
        return {{}, {local(ctx, instr.index)}};
    case Opcode::local_set:
        return {{local(ctx, instr.index)}, {}};
    case Opcode::local_tee:
    {
        const auto t = local(ctx, instr.index);
        return {{t}, {t}};
    }
    case Opcode::global_get:
        return {{}, {global(ctx, instr.index).type}};
    case Opcode::global_set:
    {
        const auto& g = global(ctx, instr.index);
        if (!g.mut)
            fail(TypeErrorCode::immutable_global_write,
                "global " + std::to_string(instr.index) + " is immutable");
        return {{g.type}, {}};
    }
    case Opcode::const_:
        return {{}, {instr.value.type()}};
    case Opcode::eqz:
        require_integer(instr);
        return {{instr.type}, {i32}};
    case Opcode::add:
        if (instr.type == handle)
            fail(TypeErrorCode::invalid_operand_type, "add on handles; use h.add");
        return {{instr.type, instr.type}, {instr.type}};
    case Opcode::wrap:
        return {{i64}, {i32}};
    case Opcode::extend_u:
        return {{i32}, {i64}};
    case Opcode::load:
        require_memory(ctx);
        if (instr.type == handle)
            fail(TypeErrorCode::handle_in_linear_memory, "a handle cannot be loaded from linear memory");
        require_packed_i32(instr);
        return {{i32}, {instr.type}};
    case Opcode::store:
        require_memory(ctx);
        if (instr.type == handle)
            fail(TypeErrorCode::handle_in_linear_memory, "a handle cannot be stored in linear memory");
        require_packed_i32(instr);
        return {{i32, instr.type}, {}};
    case Opcode::segload:
        require_packed_i32(instr);
        return {{handle}, {instr.type}};
    case Opcode::segstore:
        require_packed_i32(instr);
        return {{handle, instr.type}, {}};
    case Opcode::slice:
    case Opcode::handle_setbounds:
    case Opcode::handle_add:
        return {{handle, i32}, {handle}};
    case Opcode::segalloc:
        return {{i32}, {handle}};
    case Opcode::segfree:
        return {{handle}, {}};
    case Opcode::handle_null:
        return {{}, {handle}};
    default:
        break;
    }

    if (is_comparison(instr.op))
    {
        require_integer(instr);
        return {{instr.type, instr.type}, {i32}};
    }
    if (is_binary_numeric(instr.op))
    {
        require_integer(instr);
        return {{instr.type, instr.type}, {instr.type}};
    }
    fail(TypeErrorCode::invalid_operand_type, "unsupported instruction");
}
}  // namespace mswasm
