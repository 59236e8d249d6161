// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/text.hpp"
#include "sexpr.hpp"
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace mswasm
{
namespace
{
using detail::SExpr;

[[noreturn]] void fail(const SExpr& at, const std::string& message)
{
    throw ParseError{message, at.span};
}

bool is_keyword(const SExpr& e, std::string_view word)
{
    return e.kind == SExpr::Kind::atom && e.text == word;
}

bool is_list_headed(const SExpr& e, std::string_view head)
{
    return e.kind == SExpr::Kind::list && !e.items.empty() && is_keyword(e.items[0], head);
}

const SExpr& expect_list(const SExpr& e, std::string_view what)
{
    if (e.kind != SExpr::Kind::list || e.items.empty())
        fail(e, "expected " + std::string(what));
    return e;
}

const std::string& expect_atom(const SExpr& e, std::string_view what)
{
    if (e.kind != SExpr::Kind::atom)
        fail(e, "expected " + std::string(what));
    return e.text;
}

const std::string& expect_string(const SExpr& e, std::string_view what)
{
    if (e.kind != SExpr::Kind::string)
        fail(e, "expected " + std::string(what) + " string");
    return e.text;
}

void expect_arity(const SExpr& list, size_t n)
{
    if (list.items.size() > n)
        fail(list.items[n], "unexpected token '" + list.items[n].text + "'");
    if (list.items.size() < n)
        fail(list, "missing operand for '" + list.items[0].text + "'");
}

/// Integer literal of `bits` width: accepts the full signed and unsigned ranges.
uint64_t parse_int(const SExpr& e, unsigned bits)
{
    const auto& text = expect_atom(e, "integer literal");
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+'))
    {
        negative = s[0] == '-';
        s.remove_prefix(1);
    }
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
    {
        base = 16;
        s.remove_prefix(2);
    }
    uint64_t magnitude = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), magnitude, base);
    if (s.empty() || ec == std::errc::invalid_argument || ptr != s.data() + s.size())
        fail(e, "malformed integer literal '" + text + "'");
    const uint64_t umax = bits == 64 ? std::numeric_limits<uint64_t>::max() : (uint64_t{1} << bits) - 1;
    const uint64_t neg_limit = uint64_t{1} << (bits - 1);
    if (ec == std::errc::result_out_of_range || (!negative && magnitude > umax) ||
        (negative && magnitude > neg_limit))
        fail(e, "integer literal '" + text + "' out of range for i" + std::to_string(bits));
    const uint64_t value = negative ? (~magnitude + 1) : magnitude;
    return bits == 64 ? value : value & umax;
}

uint32_t parse_u32(const SExpr& e, std::string_view what)
{
    const auto& text = expect_atom(e, what);
    uint32_t v = 0;
    int base = 10;
    std::string_view s = text;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
    {
        base = 16;
        s.remove_prefix(2);
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        fail(e, "expected " + std::string(what) + ", got '" + text + "'");
    return v;
}

template <typename F>
F parse_float_text(const SExpr& e)
{
    using Bits = std::conditional_t<std::is_same_v<F, float>, uint32_t, uint64_t>;
    constexpr unsigned mantissa_bits = std::is_same_v<F, float> ? 23 : 52;
    const auto& text = expect_atom(e, "float literal");
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+'))
    {
        negative = s[0] == '-';
        s.remove_prefix(1);
    }
    const Bits sign = negative ? Bits{1} << (sizeof(Bits) * 8 - 1) : 0;
    if (s == "inf")
        return std::bit_cast<F>(
            static_cast<Bits>(std::bit_cast<Bits>(std::numeric_limits<F>::infinity()) | sign));
    if (s.starts_with("nan"))
    {
        Bits payload = Bits{1} << (mantissa_bits - 1);
        if (s.size() > 3)
        {
            if (!s.starts_with("nan:0x"))
                fail(e, "malformed nan literal '" + text + "'");
            const auto p = s.substr(6);
            const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), payload, 16);
            if (ec != std::errc{} || ptr != p.data() + p.size() || payload == 0 ||
                payload >> mantissa_bits)
                fail(e, "malformed nan payload '" + text + "'");
        }
        const Bits exp = std::bit_cast<Bits>(std::numeric_limits<F>::infinity());
        return std::bit_cast<F>(static_cast<Bits>(exp | payload | sign));
    }
    auto fmt = std::chars_format::general;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
    {
        fmt = std::chars_format::hex;
        s.remove_prefix(2);
    }
    F value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, fmt);
    if (s.empty() || ec == std::errc::invalid_argument || ptr != s.data() + s.size())
        fail(e, "malformed float literal '" + text + "'");
    if (ec == std::errc::result_out_of_range && std::isinf(value))
        fail(e, "float literal '" + text + "' out of range");
    return negative ? -value : value;
}

ValType parse_val_type(const SExpr& e)
{
    const auto& text = expect_atom(e, "value type");
    const auto t = val_type_from_string(text);
    if (!t)
        fail(e, "unknown type '" + text + "'");
    return *t;
}

Value parse_literal(ValType type, const SExpr& e)
{
    switch (type)
    {
    case ValType::i32:
        return Value::i32(static_cast<uint32_t>(parse_int(e, 32)));
    case ValType::i64:
        return Value::i64(parse_int(e, 64));
    case ValType::f32:
        return Value::f32(parse_float_text<float>(e));
    case ValType::f64:
        return Value::f64(parse_float_text<double>(e));
    case ValType::handle:
        break;
    }
    fail(e, "handles have no literal form; use h.null");
}

std::vector<Instr> parse_instrs(const std::vector<SExpr>& items, size_t from);

/// Consumes `(result t*)` groups starting at `pos`.
std::vector<ValType> parse_results(const SExpr& list, size_t& pos)
{
    std::vector<ValType> results;
    while (pos < list.items.size() && is_list_headed(list.items[pos], "result"))
    {
        const auto& group = list.items[pos];
        for (size_t i = 1; i < group.items.size(); ++i)
            results.push_back(parse_val_type(group.items[i]));
        ++pos;
    }
    return results;
}

void parse_mem_immediates(const SExpr& list, Instr& instr)
{
    if (list.items.size() < 2)
        fail(list, "missing type for '" + list.items[0].text + "'");
    instr.type = parse_val_type(list.items[1]);
    if (list.items.size() > 2)
    {
        const auto& imm = list.items[2];
        const auto& text = expect_atom(imm, "offset=N");
        if (!text.starts_with("offset="))
            fail(imm, "unexpected token '" + text + "'");
        SExpr number = imm;
        number.text = text.substr(7);
        instr.offset = parse_u32(number, "offset");
    }
    if (list.items.size() > 3)
        expect_arity(list, 3);
}

Instr parse_instr(const SExpr& e)
{
    expect_list(e, "instruction");
    const auto& head = expect_atom(e.items[0], "instruction mnemonic");

    Instr instr;
    std::string_view name = head;
    if (name == "load8_u" || name == "segload8_u" || name == "store8" || name == "segstore8")
    {
        instr.packed8 = true;
        name = name.substr(0, name.find('8'));
    }
    const auto op = opcode_from_mnemonic(name);
    if (!op)
        fail(e.items[0], "unknown instruction '" + head + "'");
    instr.op = *op;

    switch (instr.op)
    {
    case Opcode::const_:
        if (e.items.size() == 2)
            instr.value = parse_literal(ValType::i32, e.items[1]);
        else if (e.items.size() == 3)
            instr.value = parse_literal(parse_val_type(e.items[1]), e.items[2]);
        else
            expect_arity(e, 3);
        return instr;
    case Opcode::local_get:
    case Opcode::local_set:
    case Opcode::local_tee:
    case Opcode::global_get:
    case Opcode::global_set:
    case Opcode::call:
    case Opcode::br:
    case Opcode::br_if:
        expect_arity(e, 2);
        instr.index = parse_u32(e.items[1], "index");
        return instr;
    case Opcode::call_indirect:
        if (e.items.size() < 2)
            expect_arity(e, 2);
        instr.index = parse_u32(e.items[1], "type index");
        if (e.items.size() > 2)
        {
            expect_arity(e, 3);
            instr.table = parse_u32(e.items[2], "table index");
        }
        return instr;
    case Opcode::load:
    case Opcode::store:
    case Opcode::segload:
    case Opcode::segstore:
        parse_mem_immediates(e, instr);
        return instr;
    case Opcode::block:
    case Opcode::loop:
    {
        size_t pos = 1;
        instr.results = parse_results(e, pos);
        instr.body = parse_instrs(e.items, pos);
        return instr;
    }
    case Opcode::if_:
    {
        size_t pos = 1;
        instr.results = parse_results(e, pos);
        if (pos >= e.items.size() || !is_list_headed(e.items[pos], "then"))
            fail(pos < e.items.size() ? e.items[pos] : e, "expected (then ...)");
        instr.body = parse_instrs(e.items[pos].items, 1);
        ++pos;
        if (pos < e.items.size())
        {
            if (!is_list_headed(e.items[pos], "else"))
                fail(e.items[pos], "expected (else ...)");
            instr.else_body = parse_instrs(e.items[pos].items, 1);
            ++pos;
        }
        expect_arity(e, pos);
        return instr;
    }
    case Opcode::wrap:
    case Opcode::extend_u:
        expect_arity(e, 1);
        instr.type = instr.op == Opcode::wrap ? ValType::i64 : ValType::i32;
        return instr;
    default:
        break;
    }

    if (is_binary_numeric(instr.op) || instr.op == Opcode::eqz)
    {
        expect_arity(e, 2);
        instr.type = parse_val_type(e.items[1]);
        return instr;
    }
    expect_arity(e, 1);
    return instr;
}

std::vector<Instr> parse_instrs(const std::vector<SExpr>& items, size_t from)
{
    std::vector<Instr> out;
    out.reserve(items.size() - std::min(from, items.size()));
    for (size_t i = from; i < items.size(); ++i)
        out.push_back(parse_instr(items[i]));
    return out;
}

/// Parses `(param ..)* (result ..)*` groups; returns the position after them.
size_t parse_func_type(const SExpr& list, size_t pos, FuncType& type)
{
    while (pos < list.items.size() && is_list_headed(list.items[pos], "param"))
    {
        for (size_t i = 1; i < list.items[pos].items.size(); ++i)
            type.params.push_back(parse_val_type(list.items[pos].items[i]));
        ++pos;
    }
    type.results = parse_results(list, pos);
    return pos;
}

GlobalType parse_global_type(const SExpr& list, size_t& pos)
{
    GlobalType gt;
    if (pos < list.items.size() && (is_keyword(list.items[pos], "mut") || is_keyword(list.items[pos], "immut")))
    {
        gt.mut = list.items[pos].text == "mut";
        ++pos;
    }
    if (pos >= list.items.size())
        fail(list, "missing global type");
    gt.type = parse_val_type(list.items[pos++]);
    return gt;
}

ExternKind parse_extern_kind(const SExpr& e)
{
    const auto& text = expect_atom(e, "extern kind");
    for (const auto k : {ExternKind::func, ExternKind::table, ExternKind::memory, ExternKind::global})
        if (to_string(k) == text)
            return k;
    fail(e, "unknown extern kind '" + text + "'");
}

void parse_module_field(const SExpr& field, Module& m)
{
    expect_list(field, "module field");
    const auto& head = expect_atom(field.items[0], "module field keyword");

    if (head == "type")
    {
        expect_arity(field, 2);
        const auto& fn = field.items[1];
        if (!is_list_headed(fn, "func"))
            fail(fn, "expected (func ...)");
        FuncType type;
        expect_arity(fn, parse_func_type(fn, 1, type));
        m.types.push_back(std::move(type));
    }
    else if (head == "import")
    {
        expect_arity(field, 4);
        Import imp;
        imp.module = expect_string(field.items[1], "import module");
        imp.name = expect_string(field.items[2], "import name");
        const auto& desc = expect_list(field.items[3], "import descriptor");
        imp.desc.kind = parse_extern_kind(desc.items[0]);
        switch (imp.desc.kind)
        {
        case ExternKind::func:
            expect_arity(desc, parse_func_type(desc, 1, imp.desc.func));
            break;
        case ExternKind::global:
        {
            size_t pos = 1;
            imp.desc.global = parse_global_type(desc, pos);
            expect_arity(desc, pos);
            break;
        }
        case ExternKind::table:
        case ExternKind::memory:
            if (desc.items.size() > 1)
            {
                expect_arity(desc, 2);
                imp.desc.min = parse_u32(desc.items[1], "minimum size");
            }
            break;
        }
        m.imports.push_back(std::move(imp));
    }
    else if (head == "func")
    {
        Function fn;
        size_t pos = parse_func_type(field, 1, fn.type);
        while (pos < field.items.size() && is_list_headed(field.items[pos], "local"))
        {
            for (size_t i = 1; i < field.items[pos].items.size(); ++i)
                fn.locals.push_back(parse_val_type(field.items[pos].items[i]));
            ++pos;
        }
        fn.body = parse_instrs(field.items, pos);
        m.funcs.push_back(std::move(fn));
    }
    else if (head == "global")
    {
        size_t pos = 1;
        Global g;
        g.type = parse_global_type(field, pos);
        if (pos >= field.items.size())
            fail(field, "missing global initializer");
        g.init = parse_instr(field.items[pos++]);
        expect_arity(field, pos);
        m.globals.push_back(std::move(g));
    }
    else if (head == "table")
    {
        Table t;
        for (size_t i = 1; i < field.items.size(); ++i)
            t.elements.push_back(parse_u32(field.items[i], "function index"));
        m.tables.push_back(std::move(t));
    }
    else if (head == "memory")
    {
        expect_arity(field, 2);
        if (m.memory)
            fail(field, "at most one memory is allowed");
        m.memory = Memory{parse_u32(field.items[1], "page count")};
    }
    else if (head == "data")
    {
        if (field.items.size() < 2)
            fail(field, "missing data offset");
        DataSegment seg;
        seg.offset = parse_instr(field.items[1]);
        for (size_t i = 2; i < field.items.size(); ++i)
        {
            const auto& bytes = expect_string(field.items[i], "data");
            seg.bytes.insert(seg.bytes.end(), bytes.begin(), bytes.end());
        }
        m.data.push_back(std::move(seg));
    }
    else if (head == "export")
    {
        expect_arity(field, 3);
        Export ex;
        ex.name = expect_string(field.items[1], "export name");
        const auto& desc = expect_list(field.items[2], "export descriptor");
        expect_arity(desc, 2);
        ex.kind = parse_extern_kind(desc.items[0]);
        ex.index = parse_u32(desc.items[1], "index");
        m.exports.push_back(std::move(ex));
    }
    else if (head == "start")
    {
        expect_arity(field, 2);
        if (m.start)
            fail(field, "duplicate start function");
        m.start = parse_u32(field.items[1], "function index");
    }
    else
        fail(field.items[0], "unknown module field '" + head + "'");
}

Module module_from_sexpr(const SExpr& e)
{
    if (!is_list_headed(e, "module"))
        fail(e, "expected (module ...)");
    Module m;
    for (size_t i = 1; i < e.items.size(); ++i)
        parse_module_field(e.items[i], m);
    return m;
}

Value parse_script_value(const SExpr& e)
{
    expect_list(e, "value literal");
    const auto& head = expect_atom(e.items[0], "value type");
    if (head == "h.null")
    {
        expect_arity(e, 1);
        return Value::handle(null_handle);
    }
    if (head == "handle")
    {
        expect_arity(e, 6);
        Handle h;
        h.base = parse_u32(e.items[1], "base");
        h.offset = static_cast<int32_t>(parse_int(e.items[2], 32));
        h.bound = parse_u32(e.items[3], "bound");
        h.valid = parse_u32(e.items[4], "valid flag") != 0;
        h.id = parse_u32(e.items[5], "id");
        return Value::handle(h);
    }
    const auto type = parse_val_type(e.items[0]);
    expect_arity(e, 2);
    return parse_literal(type, e.items[1]);
}

Invocation parse_invocation(const SExpr& e)
{
    if (!is_list_headed(e, "invoke"))
        fail(e, "expected (invoke ...)");
    Invocation inv;
    inv.span = e.span;
    size_t pos = 1;
    if (pos < e.items.size() && e.items[pos].kind == SExpr::Kind::atom)
        inv.module = parse_u32(e.items[pos++], "module index");
    if (pos >= e.items.size())
        fail(e, "missing export name");
    inv.name = expect_string(e.items[pos++], "export name");
    for (; pos < e.items.size(); ++pos)
        inv.args.push_back(parse_script_value(e.items[pos]));
    return inv;
}

Command parse_command(const SExpr& e)
{
    expect_list(e, "script command");
    const auto& head = expect_atom(e.items[0], "command keyword");
    if (head == "module")
        return ModuleCommand{module_from_sexpr(e), e.span};
    if (head == "register")
    {
        expect_arity(e, 2);
        return RegisterCommand{expect_string(e.items[1], "registration name"), e.span};
    }
    if (head == "invoke")
        return InvokeCommand{parse_invocation(e)};
    if (head == "assert_return")
    {
        if (e.items.size() < 2)
            fail(e, "missing invocation");
        AssertReturn a{parse_invocation(e.items[1]), {}};
        for (size_t i = 2; i < e.items.size(); ++i)
            a.expected.push_back(parse_script_value(e.items[i]));
        return a;
    }
    if (head == "assert_trap")
    {
        expect_arity(e, 3);
        const auto& kind_text = expect_atom(e.items[2], "trap kind");
        const auto kind = trap_kind_from_string(kind_text);
        if (!kind)
            fail(e.items[2], "unknown trap kind '" + kind_text + "'");
        return AssertTrap{parse_invocation(e.items[1]), *kind};
    }
    if (head == "assert_exhaustion")
    {
        expect_arity(e, 2);
        return AssertExhaustion{parse_invocation(e.items[1])};
    }
    if (head == "assert_invalid")
    {
        if (e.items.size() < 2)
            fail(e, "missing module");
        AssertInvalid a{module_from_sexpr(e.items[1]), {}, e.span};
        if (e.items.size() > 2)
        {
            expect_arity(e, 3);
            a.code = expect_atom(e.items[2], "error code");
        }
        return a;
    }
    if (head == "assert_unlinkable")
    {
        expect_arity(e, 2);
        return AssertUnlinkable{module_from_sexpr(e.items[1]), e.span};
    }
    fail(e.items[0], "unknown script command '" + head + "'");
}

std::string location_prefix(const SourceSpan& span)
{
    return std::to_string(span.line) + ":" + std::to_string(span.column) + ": ";
}
}  // namespace

ParseError::ParseError(const std::string& message, SourceSpan span)
  : std::runtime_error{location_prefix(span) + message}, span_{span}, message_{message}
{}

Module parse_module(std::string_view text)
{
    const auto top = detail::read_sexprs(text);
    if (top.empty())
        throw ParseError{"expected (module ...)", SourceSpan{}};
    if (top.size() > 1)
        fail(top[1], "unexpected content after module");
    return module_from_sexpr(top[0]);
}

Instr parse_instruction(std::string_view text)
{
    const auto top = detail::read_sexprs(text);
    if (top.size() != 1)
        throw ParseError{"expected exactly one instruction", SourceSpan{}};
    return parse_instr(top[0]);
}

Script parse_script(std::string_view text)
{
    Script script;
    for (const auto& e : detail::read_sexprs(text))
        script.commands.push_back(parse_command(e));
    return script;
}

size_t Script::module_count() const noexcept
{
    return static_cast<size_t>(std::count_if(commands.begin(), commands.end(),
        [](const Command& c) { return std::holds_alternative<ModuleCommand>(c); }));
}

size_t Script::assertion_count() const noexcept
{
    return static_cast<size_t>(std::count_if(commands.begin(), commands.end(), [](const Command& c) {
        return std::holds_alternative<AssertReturn>(c) || std::holds_alternative<AssertTrap>(c) ||
               std::holds_alternative<AssertExhaustion>(c) ||
               std::holds_alternative<AssertInvalid>(c) ||
               std::holds_alternative<AssertUnlinkable>(c);
    }));
}
}  // namespace mswasm
