// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/text.hpp"
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace mswasm
{
namespace
{
template <typename F>
std::string float_text(F value)
{
    using Bits = std::conditional_t<std::is_same_v<F, float>, uint32_t, uint64_t>;
    constexpr unsigned mantissa_bits = std::is_same_v<F, float> ? 23 : 52;
    const auto bits = std::bit_cast<Bits>(value);
    const bool negative = (bits >> (sizeof(Bits) * 8 - 1)) != 0;
    if (std::isnan(value))
    {
        const Bits payload = bits & ((Bits{1} << mantissa_bits) - 1);
        std::array<char, 32> buf{};
        const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), payload, 16);
        return std::string(negative ? "-" : "") + "nan:0x" + std::string(buf.data(), r.ptr);
    }
    if (std::isinf(value))
        return negative ? "-inf" : "inf";
    std::array<char, 64> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), r.ptr);
}

std::string literal_text(const Value& v)
{
    switch (v.type())
    {
    case ValType::i32:
        return std::to_string(static_cast<int32_t>(v.as_i32()));
    case ValType::i64:
        return std::to_string(static_cast<int64_t>(v.as_i64()));
    case ValType::f32:
        return float_text(v.as_f32());
    case ValType::f64:
        return float_text(v.as_f64());
    case ValType::handle:
        break;
    }
    return "?";
}

std::string quoted(std::string_view bytes)
{
    std::string out = "\"";
    for (const char c : bytes)
    {
        const auto u = static_cast<unsigned char>(c);
        if (c == '"' || c == '\\')
        {
            out += '\\';
            out += c;
        }
        else if (u >= 0x20 && u < 0x7f)
            out += c;
        else
        {
            std::array<char, 4> buf{};
            std::snprintf(buf.data(), buf.size(), "\\%02x", u);
            out += buf.data();
        }
    }
    return out + "\"";
}

std::string types_group(std::string_view keyword, const std::vector<ValType>& types)
{
    if (types.empty())
        return {};
    std::string out = " (" + std::string(keyword);
    for (const auto t : types)
        out += " " + std::string(to_string(t));
    return out + ")";
}

std::string func_type_text(const FuncType& type)
{
    return types_group("param", type.params) + types_group("result", type.results);
}

std::string global_type_text(const GlobalType& type)
{
    return (type.mut ? "mut " : "") + std::string(to_string(type.type));
}

/// Opening text of an instruction, without nested bodies or the closing paren.
std::string head_text(const Instr& instr)
{
    std::string name(mnemonic(instr.op));
    if (instr.packed8)
        name += (instr.op == Opcode::load || instr.op == Opcode::segload) ? "8_u" : "8";
    std::string out = "(" + name;

    switch (instr.op)
    {
    case Opcode::const_:
        if (instr.value.type() != ValType::i32)
            out += " " + std::string(to_string(instr.value.type()));
        out += " " + literal_text(instr.value);
        break;
    case Opcode::local_get:
    case Opcode::local_set:
    case Opcode::local_tee:
    case Opcode::global_get:
    case Opcode::global_set:
    case Opcode::call:
    case Opcode::br:
    case Opcode::br_if:
        out += " " + std::to_string(instr.index);
        break;
    case Opcode::call_indirect:
        out += " " + std::to_string(instr.index);
        if (instr.table != 0)
            out += " " + std::to_string(instr.table);
        break;
    case Opcode::load:
    case Opcode::store:
    case Opcode::segload:
    case Opcode::segstore:
        out += " " + std::string(to_string(instr.type));
        if (instr.offset != 0)
            out += " offset=" + std::to_string(instr.offset);
        break;
    case Opcode::block:
    case Opcode::loop:
    case Opcode::if_:
        out += types_group("result", instr.results);
        break;
    case Opcode::wrap:
    case Opcode::extend_u:
        break;
    default:
        if (is_binary_numeric(instr.op) || instr.op == Opcode::eqz)
            out += " " + std::string(to_string(instr.type));
        break;
    }
    return out;
}

void print_body(std::string& out, const std::vector<Instr>& body, int indent);

void print_instr(std::string& out, const Instr& instr, int indent)
{
    const std::string pad(static_cast<size_t>(indent), ' ');
    out += pad + head_text(instr);
    if (instr.op == Opcode::block || instr.op == Opcode::loop)
    {
        out += "\n";
        print_body(out, instr.body, indent + 2);
        out += pad + ")\n";
    }
    else if (instr.op == Opcode::if_)
    {
        out += "\n" + pad + "  (then\n";
        print_body(out, instr.body, indent + 4);
        out += pad + "  )\n";
        if (!instr.else_body.empty())
        {
            out += pad + "  (else\n";
            print_body(out, instr.else_body, indent + 4);
            out += pad + "  )\n";
        }
        out += pad + ")\n";
    }
    else
        out += ")\n";
}

void print_body(std::string& out, const std::vector<Instr>& body, int indent)
{
    for (const auto& instr : body)
        print_instr(out, instr, indent);
}
}  // namespace

std::string pretty(const Instr& instr)
{
    std::string out = head_text(instr);
    for (const auto& nested : instr.op == Opcode::if_ ? std::vector<Instr>{} : instr.body)
        out += " " + pretty(nested);
    if (instr.op == Opcode::if_)
    {
        out += " (then";
        for (const auto& nested : instr.body)
            out += " " + pretty(nested);
        out += ")";
        if (!instr.else_body.empty())
        {
            out += " (else";
            for (const auto& nested : instr.else_body)
                out += " " + pretty(nested);
            out += ")";
        }
    }
    return out + ")";
}

std::string pretty(const Value& value)
{
    if (value.type() == ValType::handle)
    {
        const auto& h = value.as_handle();
        if (h == null_handle)
            return "(h.null)";
        return "(handle " + std::to_string(h.base) + " " + std::to_string(h.offset) + " " +
               std::to_string(h.bound) + " " + (h.valid ? "1" : "0") + " " + std::to_string(h.id) +
               ")";
    }
    return "(" + std::string(to_string(value.type())) + " " + literal_text(value) + ")";
}

std::string pretty(const Module& m)
{
    std::string out = "(module\n";
    for (const auto& type : m.types)
        out += "  (type (func" + func_type_text(type) + "))\n";
    for (const auto& imp : m.imports)
    {
        out += "  (import " + quoted(imp.module) + " " + quoted(imp.name) + " (";
        out += to_string(imp.desc.kind);
        switch (imp.desc.kind)
        {
        case ExternKind::func:
            out += func_type_text(imp.desc.func);
            break;
        case ExternKind::global:
            out += " " + global_type_text(imp.desc.global);
            break;
        case ExternKind::table:
        case ExternKind::memory:
            out += " " + std::to_string(imp.desc.min);
            break;
        }
        out += "))\n";
    }
    for (const auto& fn : m.funcs)
    {
        out += "  (func" + func_type_text(fn.type) + types_group("local", fn.locals) + "\n";
        print_body(out, fn.body, 4);
        out += "  )\n";
    }
    for (const auto& g : m.globals)
        out += "  (global " + global_type_text(g.type) + " " + pretty(g.init) + ")\n";
    for (const auto& t : m.tables)
    {
        out += "  (table";
        for (const auto e : t.elements)
            out += " " + std::to_string(e);
        out += ")\n";
    }
    if (m.memory)
        out += "  (memory " + std::to_string(m.memory->min_pages) + ")\n";
    for (const auto& d : m.data)
        out += "  (data " + pretty(d.offset) + " " +
               quoted(std::string_view(reinterpret_cast<const char*>(d.bytes.data()), d.bytes.size())) +
               ")\n";
    for (const auto& e : m.exports)
        out += "  (export " + quoted(e.name) + " (" + std::string(to_string(e.kind)) + " " +
               std::to_string(e.index) + "))\n";
    if (m.start)
        out += "  (start " + std::to_string(*m.start) + ")\n";
    return out + ")\n";
}
}  // namespace mswasm
