// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/ast.hpp"
#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <utility>

namespace mswasm
{
namespace
{
constexpr std::array<std::pair<Opcode, std::string_view>, 50> mnemonics{{
    {Opcode::unreachable, "unreachable"},
    {Opcode::nop, "nop"},
    {Opcode::block, "block"},
    {Opcode::loop, "loop"},
    {Opcode::if_, "if"},
    {Opcode::br, "br"},
    {Opcode::br_if, "br_if"},
    {Opcode::return_, "return"},
    {Opcode::call, "call"},
    {Opcode::call_indirect, "call_indirect"},
    {Opcode::drop, "drop"},
    {Opcode::select, "select"},
    {Opcode::local_get, "local.get"},
    {Opcode::local_set, "local.set"},
    {Opcode::local_tee, "local.tee"},
    {Opcode::global_get, "global.get"},
    {Opcode::global_set, "global.set"},
    {Opcode::const_, "const"},
    {Opcode::eqz, "eqz"},
    {Opcode::eq, "eq"},
    {Opcode::ne, "ne"},
    {Opcode::lt_s, "lt_s"},
    {Opcode::lt_u, "lt_u"},
    {Opcode::gt_s, "gt_s"},
    {Opcode::gt_u, "gt_u"},
    {Opcode::le_s, "le_s"},
    {Opcode::le_u, "le_u"},
    {Opcode::ge_s, "ge_s"},
    {Opcode::ge_u, "ge_u"},
    {Opcode::add, "add"},
    {Opcode::sub, "sub"},
    {Opcode::mul, "mul"},
    {Opcode::and_, "and"},
    {Opcode::or_, "or"},
    {Opcode::xor_, "xor"},
    {Opcode::shl, "shl"},
    {Opcode::shr_s, "shr_s"},
    {Opcode::shr_u, "shr_u"},
    {Opcode::wrap, "wrap"},
    {Opcode::extend_u, "extend_u"},
    {Opcode::load, "load"},
    {Opcode::store, "store"},
    {Opcode::segload, "segload"},
    {Opcode::segstore, "segstore"},
    {Opcode::slice, "slice"},
    {Opcode::segalloc, "segalloc"},
    {Opcode::handle_add, "h.add"},
    {Opcode::segfree, "segfree"},
    {Opcode::handle_null, "h.null"},
    {Opcode::handle_setbounds, "handle.setbounds"},
}};

size_t count_one(const Instr& instr) noexcept
{
    return 1 + count_instructions(instr.body) + count_instructions(instr.else_body);
}
}  // namespace

std::string_view to_string(ValType type) noexcept
{
    switch (type)
    {
    case ValType::i32:
        return "i32";
    case ValType::i64:
        return "i64";
    case ValType::f32:
        return "f32";
    case ValType::f64:
        return "f64";
    case ValType::handle:
        return "handle";
    }
    return "?";
}

std::optional<ValType> val_type_from_string(std::string_view name) noexcept
{
    for (const auto t : all_val_types)
        if (to_string(t) == name)
            return t;
    return std::nullopt;
}

std::string to_string(const Handle& h)
{
    return "<" + std::to_string(h.base) + "," + std::to_string(h.offset) + "," +
           std::to_string(h.bound) + "," + (h.valid ? "true" : "false") + "," +
           std::to_string(h.id) + ">";
}

std::string to_string(const Value& v)
{
    std::array<char, 64> buf{};
    switch (v.type())
    {
    case ValType::i32:
        return "i32:" + std::to_string(v.as_i32());
    case ValType::i64:
        return "i64:" + std::to_string(v.as_i64());
    case ValType::f32:
    {
        const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v.as_f32());
        return "f32:" + std::string(buf.data(), r.ptr);
    }
    case ValType::f64:
    {
        const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v.as_f64());
        return "f64:" + std::string(buf.data(), r.ptr);
    }
    case ValType::handle:
        return "handle:" + to_string(v.as_handle());
    }
    return "?";
}

std::string_view mnemonic(Opcode op) noexcept
{
    for (const auto& [o, name] : mnemonics)
        if (o == op)
            return name;
    return "?";
}

std::optional<Opcode> opcode_from_mnemonic(std::string_view name) noexcept
{
    for (const auto& [o, n] : mnemonics)
        if (n == name)
            return o;
    return std::nullopt;
}

bool is_comparison(Opcode op) noexcept
{
    return op >= Opcode::eq && op <= Opcode::ge_u;
}

bool is_binary_numeric(Opcode op) noexcept
{
    return is_comparison(op) || (op >= Opcode::add && op <= Opcode::shr_u);
}

size_t count_instructions(const std::vector<Instr>& body) noexcept
{
    size_t n = 0;
    for (const auto& instr : body)
        n += count_one(instr);
    return n;
}

std::string to_string(const FuncType& type)
{
    std::string out = "[";
    for (size_t i = 0; i < type.params.size(); ++i)
        out += (i ? " " : "") + std::string(to_string(type.params[i]));
    out += "] -> [";
    for (size_t i = 0; i < type.results.size(); ++i)
        out += (i ? " " : "") + std::string(to_string(type.results[i]));
    return out + "]";
}

std::string_view to_string(ExternKind kind) noexcept
{
    switch (kind)
    {
    case ExternKind::func:
        return "func";
    case ExternKind::table:
        return "table";
    case ExternKind::memory:
        return "memory";
    case ExternKind::global:
        return "global";
    }
    return "?";
}

uint32_t Module::imported_count(ExternKind kind) const noexcept
{
    return static_cast<uint32_t>(std::count_if(imports.begin(), imports.end(),
        [kind](const Import& imp) { return imp.desc.kind == kind; }));
}

uint32_t Module::func_count() const noexcept
{
    return imported_count(ExternKind::func) + static_cast<uint32_t>(funcs.size());
}

uint32_t Module::global_count() const noexcept
{
    return imported_count(ExternKind::global) + static_cast<uint32_t>(globals.size());
}

uint32_t Module::table_count() const noexcept
{
    return imported_count(ExternKind::table) + static_cast<uint32_t>(tables.size());
}

bool Module::has_memory() const noexcept
{
    return memory.has_value() || imported_count(ExternKind::memory) > 0;
}

const FuncType* Module::func_type(uint32_t idx) const noexcept
{
    uint32_t i = 0;
    for (const auto& imp : imports)
    {
        if (imp.desc.kind != ExternKind::func)
            continue;
        if (i == idx)
            return &imp.desc.func;
        ++i;
    }
    if (idx - i < funcs.size())
        return &funcs[idx - i].type;
    return nullptr;
}

const GlobalType* Module::global_type(uint32_t idx) const noexcept
{
    uint32_t i = 0;
    for (const auto& imp : imports)
    {
        if (imp.desc.kind != ExternKind::global)
            continue;
        if (i == idx)
            return &imp.desc.global;
        ++i;
    }
    if (idx - i < globals.size())
        return &globals[idx - i].type;
    return nullptr;
}

const Export* Module::find_export(std::string_view name) const noexcept
{
    const auto it = std::find_if(
        exports.begin(), exports.end(), [name](const Export& e) { return e.name == name; });
    return it != exports.end() ? &*it : nullptr;
}
}  // namespace mswasm
