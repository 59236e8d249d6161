// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/codegen.hpp"
#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>

namespace mswasm
{
namespace
{
using Mode = CodegenOptions::Mode;

std::string hex(uint64_t v, int digits)
{
    std::array<char, 24> buf{};
    std::snprintf(buf.data(), buf.size(), "0x%0*llx", digits, static_cast<unsigned long long>(v));
    return buf.data();
}

std::string_view c_type(ValType t) noexcept
{
    switch (t)
    {
    case ValType::i32:
        return "uint32_t";
    case ValType::i64:
        return "uint64_t";
    case ValType::f32:
        return "float";
    case ValType::f64:
        return "double";
    case ValType::handle:
        return "Handle";
    }
    return "?";
}

char type_letter(ValType t) noexcept
{
    switch (t)
    {
    case ValType::i32:
        return 'i';
    case ValType::i64:
        return 'j';
    case ValType::f32:
        return 'f';
    case ValType::f64:
        return 'd';
    case ValType::handle:
        return 'h';
    }
    return '?';
}

std::string zero_of(ValType t)
{
    return t == ValType::handle ? "rt_handle_null()" : t == ValType::f32 || t == ValType::f64 ? "0" : "0u";
}

std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i)
        out += (i ? std::string(sep) : "") + parts[i];
    return out;
}

bool is_host_import(const Import& imp)
{
    return imp.desc.kind == ExternKind::func && imp.module == "env";
}

bool is_physical_memory(const Import& imp)
{
    return imp.desc.kind == ExternKind::global && imp.module == "env" && imp.name == physical_memory_name;
}

/// Native C functions whose library prototype the wrapper must use instead of a generic one.
struct NativeSignature
{
    std::string_view name;
    std::string_view header;
    std::string_view result;
    std::vector<std::string_view> params;
};

const std::vector<NativeSignature>& known_natives()
{
    static const std::vector<NativeSignature> natives = {
        {"memcpy", "<string.h>", "void*", {"void*", "const void*", "size_t"}},
        {"memmove", "<string.h>", "void*", {"void*", "const void*", "size_t"}},
        {"memset", "<string.h>", "void*", {"void*", "int", "size_t"}},
        {"abort", "<stdlib.h>", "void", {}},
    };
    return natives;
}

const NativeSignature* find_native(std::string_view name)
{
    for (const auto& n : known_natives())
        if (n.name == name)
            return &n;
    return nullptr;
}

/// Names shared by every function of one unit.
class UnitNames
{
public:
    UnitNames(const Module& m, const CodegenOptions& o) : m_{m}, o_{o}
    {
        const auto unit = c_identifier(o.unit_name);
        for (const auto& t : m.types)
            type_id(t);
        uint32_t func_index = 0;
        uint32_t global_index = 0;
        for (const auto& imp : m.imports)
        {
            if (imp.desc.kind == ExternKind::func)
            {
                funcs.push_back(import_symbol(imp));
                func_types.push_back(imp.desc.func);
                type_id(imp.desc.func);
                ++func_index;
            }
            else if (imp.desc.kind == ExternKind::global)
            {
                globals.push_back(is_physical_memory(imp) ? o.module_prefix + "physical_memory" : import_symbol(imp));
                global_types.push_back(imp.desc.global.type);
                ++global_index;
            }
            else
                throw CodegenError{"import \"" + imp.module + "\" \"" + imp.name + "\": imported " +
                                   std::string(to_string(imp.desc.kind)) + "s are not supported by the C backend"};
        }
        for (size_t i = 0; i < m.funcs.size(); ++i)
        {
            funcs.push_back(o.module_prefix + "f" + std::to_string(func_index + i));
            func_types.push_back(m.funcs[i].type);
            type_id(m.funcs[i].type);
        }
        for (size_t i = 0; i < m.globals.size(); ++i)
        {
            const auto index = global_index + static_cast<uint32_t>(i);
            std::string name = o.module_prefix + "g" + std::to_string(index);
            for (const auto& e : m.exports)
                if (e.kind == ExternKind::global && e.index == index)
                {
                    name = o.module_prefix + unit + "_" + c_identifier(e.name);
                    break;
                }
            globals.push_back(name);
            global_types.push_back(m.globals[i].type.type);
        }
        for (const auto& t : func_types)
            if (t.results.size() > 1)
                result_struct(t.results);
        for (const auto& t : m.types)
            if (t.results.size() > 1)
                result_struct(t.results);
    }

    std::string import_symbol(const Import& imp) const
    {
        if (imp.module == "env")
            return o_.module_prefix + c_identifier(imp.name);
        return o_.module_prefix + c_identifier(imp.module) + "_" + c_identifier(imp.name);
    }

    uint32_t type_id(const FuncType& t)
    {
        const auto it = std::find(distinct_types_.begin(), distinct_types_.end(), t);
        if (it != distinct_types_.end())
            return static_cast<uint32_t>(it - distinct_types_.begin());
        distinct_types_.push_back(t);
        return static_cast<uint32_t>(distinct_types_.size() - 1);
    }

    uint32_t type_id(const FuncType& t) const
    {
        return static_cast<uint32_t>(std::find(distinct_types_.begin(), distinct_types_.end(), t) - distinct_types_.begin());
    }

    const std::string& result_struct(const std::vector<ValType>& results)
    {
        auto it = structs_.find(results);
        if (it == structs_.end())
        {
            std::string name = o_.module_prefix + c_identifier(o_.unit_name) + "_ret";
            for (const auto t : results)
                name += type_letter(t);
            it = structs_.emplace(results, name).first;
        }
        return it->second;
    }

    const std::string& result_struct(const std::vector<ValType>& results) const { return structs_.at(results); }

    std::string result_type(const std::vector<ValType>& results) const
    {
        if (results.empty())
            return "void";
        if (results.size() == 1)
            return std::string(c_type(results[0]));
        return result_struct(results);
    }

    std::string param_list(const std::vector<ValType>& params, bool named) const
    {
        if (params.empty())
            return "void";
        std::vector<std::string> parts;
        for (size_t i = 0; i < params.size(); ++i)
            parts.push_back(std::string(c_type(params[i])) + (named ? " l" + std::to_string(i) : ""));
        return join(parts, ", ");
    }

    std::string struct_definitions() const
    {
        std::string out;
        for (const auto& [results, name] : structs_)
        {
            out += "typedef struct " + name + "\n{\n";
            for (size_t i = 0; i < results.size(); ++i)
                out += "    " + std::string(c_type(results[i])) + " r" + std::to_string(i) + ";\n";
            out += "} " + name + ";\n\n";
        }
        return out;
    }

    std::vector<std::string> funcs;
    std::vector<FuncType> func_types;
    std::vector<std::string> globals;
    std::vector<ValType> global_types;

private:
    const Module& m_;
    const CodegenOptions& o_;
    std::vector<FuncType> distinct_types_;
    std::map<std::vector<ValType>, std::string> structs_;
};

std::string memory_name(const CodegenOptions& o)
{
    return o.module_prefix + "memory";
}

std::string table_name(const CodegenOptions& o, uint32_t t)
{
    return o.module_prefix + "table" + std::to_string(t);
}

std::string rt_suffix(ValType t)
{
    return std::string(to_string(t));
}

std::string numeric_const(const Value& v, const CodegenOptions& o)
{
    switch (v.type())
    {
    case ValType::i32:
        return std::to_string(v.as_i32()) + "u";
    case ValType::i64:
        return std::to_string(v.as_i64()) + "ull";
    case ValType::f32:
        return o.module_prefix + "f32_bits(" + hex(v.as_i32(), 8) + "u)";
    case ValType::f64:
        return o.module_prefix + "f64_bits(" + hex(v.as_i64(), 16) + "ull)";
    case ValType::handle:
        break;
    }
    return "rt_handle_null()";
}

class FunctionEmitter
{
public:
    FunctionEmitter(const TypedModule& tm, const UnitNames& names, const CodegenOptions& o, uint32_t index,
        size_t skip_prefix)
      : tm_{tm}, m_{tm.module()}, names_{names}, o_{o}, index_{index}, skip_prefix_{skip_prefix}
    {}

    std::string emit()
    {
        const auto defined = index_ - m_.imported_count(ExternKind::func);
        const auto& fn = m_.funcs[defined];
        labels_.push_back(Label{"exit", 0, fn.type.results, false, false});
        for (size_t i = skip_prefix_; i < fn.body.size(); ++i)
            instr(fn.body[i]);

        std::string out = "static " + names_.result_type(fn.type.results) + " " + names_.funcs[index_] + "(" +
                          names_.param_list(fn.type.params, true) + ")\n{\n";
        const auto params = fn.type.params.size();
        for (size_t i = 0; i < fn.locals.size(); ++i)
            out += "    " + std::string(c_type(fn.locals[i])) + " l" + std::to_string(params + i) + " = " +
                   zero_of(fn.locals[i]) + ";\n";
        for (const auto& [depth, type] : temps_)
            out += "    " + std::string(c_type(type)) + " " + temp_name(depth, type) + " = " + zero_of(type) + ";\n";
        for (size_t i = 0; i < fn.locals.size(); ++i)
            if (!locals_read_.contains(static_cast<uint32_t>(params + i)))
                out += "    (void)l" + std::to_string(params + i) + ";\n";
        out += "    rt_enter();\n";
        out += body_;
        out += labels_.front().used ? "exit:;\n    rt_leave();\n" : "    rt_leave();\n";
        const auto& results = fn.type.results;
        if (results.size() == 1)
            out += "    return " + temp_name(0, results[0]) + ";\n";
        else if (results.size() > 1)
        {
            out += "    " + names_.result_struct(results) + " r;\n";
            for (size_t i = 0; i < results.size(); ++i)
                out += "    r.r" + std::to_string(i) + " = " + temp_name(static_cast<uint32_t>(i), results[i]) + ";\n";
            out += "    return r;\n";
        }
        out += "}\n";
        return out;
    }

private:
    struct Label
    {
        std::string name;
        uint32_t height = 0;
        std::vector<ValType> types;
        bool loop = false;
        bool used = false;
    };

    static std::string temp_name(uint32_t depth, ValType t)
    {
        return "s" + std::to_string(depth) + "_" + type_letter(t);
    }

    std::string temp(uint32_t depth, ValType t)
    {
        temps_.insert({depth, t});
        return temp_name(depth, t);
    }

    void line(const std::string& text) { body_ += std::string(4 * (indent_ + 1), ' ') + text + "\n"; }

    std::string fresh_label() { return "L" + std::to_string(next_label_++); }

    void seq(const std::vector<Instr>& body)
    {
        for (const auto& i : body)
            instr(i);
    }

    void branch(uint32_t depth, uint32_t stack_depth, const StackShape& shape)
    {
        auto& target = labels_[labels_.size() - 1 - depth];
        target.used = true;
        const auto arity = target.loop ? 0u : static_cast<uint32_t>(target.types.size());
        const auto src = stack_depth - arity;
        for (uint32_t k = 0; k < arity; ++k)
            if (target.height + k != src + k)
                line(temp(target.height + k, target.types[k]) + " = " + temp(src + k, shape[src + k]) + ";");
        line("goto " + target.name + (target.loop ? "_loop;" : target.name == "exit" ? ";" : "_end;"));
    }

    std::string call_args(uint32_t first, const std::vector<ValType>& params, const StackShape& shape)
    {
        std::vector<std::string> args;
        for (uint32_t k = 0; k < params.size(); ++k)
            args.push_back(temp(first + k, shape[first + k]));
        return join(args, ", ");
    }

    void assign_results(uint32_t first, const std::vector<ValType>& results, const std::string& call)
    {
        if (results.empty())
            line(call + ";");
        else if (results.size() == 1)
            line(temp(first, results[0]) + " = " + call + ";");
        else
        {
            line("{");
            line("    " + names_.result_struct(results) + " r = " + call + ";");
            for (uint32_t k = 0; k < results.size(); ++k)
                line("    " + temp(first + k, results[k]) + " = r.r" + std::to_string(k) + ";");
            line("}");
        }
    }

    static std::string signed_type(ValType t) { return t == ValType::i64 ? "int64_t" : "int32_t"; }

    std::string access_width(const Instr& i) const
    {
        if (i.packed8)
            return "1";
        switch (i.type)
        {
        case ValType::i32:
        case ValType::f32:
            return "4";
        case ValType::i64:
        case ValType::f64:
            return "8";
        case ValType::handle:
            return std::to_string(handle_width);
        }
        return "0";
    }

    std::string checked_pointer(const std::string& h, const Instr& i) const
    {
        const std::string elem = i.packed8 ? "uint8_t" : std::string(c_type(i.type));
        return "*((ptr<" + elem + ">)(" + h + ".data + " + h + ".base + " + h + ".offset + " + std::to_string(i.offset) + "))";
    }

    void segload(const Instr& i, uint32_t d)
    {
        const auto h = temp(d - 1, ValType::handle);
        const auto dst = temp(d - 1, i.type);
        if (i.type == ValType::handle)
            line(dst + " = " + (o_.mode == Mode::checked_c_syntax ? "handle_load(" : "rt_handle_load(") + h + ", " +
                 std::to_string(i.offset) + "u);");
        else if (o_.mode == Mode::checked_c_syntax)
        {
            line("dynamic_check(rt_access_ok(" + h + ", " + std::to_string(i.offset) + "u, " + access_width(i) + "u));");
            line(dst + " = " + checked_pointer(h, i) + ";");
        }
        else if (i.packed8)
            line(dst + " = rt_seg_load8_u(" + h + ", " + std::to_string(i.offset) + "u);");
        else
            line(dst + " = rt_seg_load_" + rt_suffix(i.type) + "(" + h + ", " + std::to_string(i.offset) + "u);");
    }

    void segstore(const Instr& i, uint32_t d)
    {
        const auto h = temp(d - 2, ValType::handle);
        const auto v = temp(d - 1, i.type);
        const auto off = std::to_string(i.offset) + "u";
        if (i.type == ValType::handle)
            line(std::string(o_.mode == Mode::checked_c_syntax ? "handle_store(" : "rt_handle_store(") + h + ", " + v +
                 ", " + off + ");");
        else if (o_.mode == Mode::checked_c_syntax)
        {
            line("dynamic_check(rt_access_ok(" + h + ", " + off + ", " + access_width(i) + "u));");
            line("rt_shatter(" + h + ", " + off + ", " + access_width(i) + "u);");
            line(checked_pointer(h, i) + " = " + (i.packed8 ? "(uint8_t)" + v : v) + ";");
        }
        else if (i.packed8)
            line("rt_seg_store8(" + h + ", " + v + ", " + off + ");");
        else
            line("rt_seg_store_" + rt_suffix(i.type) + "(" + h + ", " + v + ", " + off + ");");
    }

    void binary(const Instr& i, uint32_t d)
    {
        const auto t = i.type;
        const auto a = temp(d - 2, t);
        const auto b = temp(d - 1, t);
        const auto bits = t == ValType::i64 ? "63" : "31";
        const auto st = signed_type(t);
        std::string expr;
        switch (i.op)
        {
        case Opcode::add:
            expr = a + " + " + b;
            break;
        case Opcode::sub:
            expr = a + " - " + b;
            break;
        case Opcode::mul:
            expr = a + " * " + b;
            break;
        case Opcode::and_:
            expr = a + " & " + b;
            break;
        case Opcode::or_:
            expr = a + " | " + b;
            break;
        case Opcode::xor_:
            expr = a + " ^ " + b;
            break;
        case Opcode::shl:
            expr = a + " << (" + b + " & " + bits + ")";
            break;
        case Opcode::shr_u:
            expr = a + " >> (" + b + " & " + bits + ")";
            break;
        case Opcode::shr_s:
            expr = o_.module_prefix + "shr_s" + (t == ValType::i64 ? "64(" : "32(") + a + ", " + b + ")";
            break;
        default:
            break;
        }
        if (!expr.empty())
        {
            line(a + " = " + expr + ";");
            return;
        }
        std::string cmp;
        switch (i.op)
        {
        case Opcode::eq:
            cmp = a + " == " + b;
            break;
        case Opcode::ne:
            cmp = a + " != " + b;
            break;
        case Opcode::lt_u:
            cmp = a + " < " + b;
            break;
        case Opcode::gt_u:
            cmp = a + " > " + b;
            break;
        case Opcode::le_u:
            cmp = a + " <= " + b;
            break;
        case Opcode::ge_u:
            cmp = a + " >= " + b;
            break;
        case Opcode::lt_s:
            cmp = "(" + st + ")" + a + " < (" + st + ")" + b;
            break;
        case Opcode::gt_s:
            cmp = "(" + st + ")" + a + " > (" + st + ")" + b;
            break;
        case Opcode::le_s:
            cmp = "(" + st + ")" + a + " <= (" + st + ")" + b;
            break;
        case Opcode::ge_s:
            cmp = "(" + st + ")" + a + " >= (" + st + ")" + b;
            break;
        default:
            throw CodegenError{"unsupported instruction " + std::string(mnemonic(i.op))};
        }
        line(temp(d - 2, ValType::i32) + " = (" + cmp + ") ? 1u : 0u;");
    }

    void instr(const Instr& i)
    {
        const auto* shape_ptr = tm_.shape_before(i);
        if (shape_ptr == nullptr)
            return;
        const auto& shape = *shape_ptr;
        const auto d = static_cast<uint32_t>(shape.size());
        const auto mem = "&" + memory_name(o_);

        switch (i.op)
        {
        case Opcode::unreachable:
            line("rt_trap(MSWASM_RT_TRAP_UNREACHABLE, \"unreachable\");");
            return;
        case Opcode::nop:
            return;
        case Opcode::block:
        case Opcode::loop:
        {
            const auto name = fresh_label();
            const bool loop = i.op == Opcode::loop;
            labels_.push_back(Label{name, d, i.results, loop, false});
            const auto start = body_.size();
            seq(i.body);
            if (labels_.back().used)
            {
                if (loop)
                    body_.insert(start, std::string(4 * (indent_ + 1), ' ') + name + "_loop:;\n");
                else
                    line(name + "_end:;");
            }
            labels_.pop_back();
            return;
        }
        case Opcode::if_:
        {
            const auto name = fresh_label();
            line("if (" + temp(d - 1, ValType::i32) + ")");
            line("{");
            labels_.push_back(Label{name, d - 1, i.results, false, false});
            ++indent_;
            seq(i.body);
            --indent_;
            line("}");
            if (!i.else_body.empty())
            {
                line("else");
                line("{");
                ++indent_;
                seq(i.else_body);
                --indent_;
                line("}");
            }
            if (labels_.back().used)
                line(name + "_end:;");
            labels_.pop_back();
            return;
        }
        case Opcode::br:
            branch(i.index, d, shape);
            return;
        case Opcode::br_if:
            line("if (" + temp(d - 1, ValType::i32) + ")");
            line("{");
            ++indent_;
            branch(i.index, d - 1, shape);
            --indent_;
            line("}");
            return;
        case Opcode::return_:
            branch(static_cast<uint32_t>(labels_.size() - 1), d, shape);
            return;
        case Opcode::call:
        {
            const auto& type = names_.func_types.at(i.index);
            const auto first = d - static_cast<uint32_t>(type.params.size());
            assign_results(first, type.results, names_.funcs[i.index] + "(" + call_args(first, type.params, shape) + ")");
            return;
        }
        case Opcode::call_indirect:
        {
            const auto& type = m_.types.at(i.index);
            const auto first = d - 1 - static_cast<uint32_t>(type.params.size());
            const auto& table = m_.tables.at(i.table);
            const auto fn_type = names_.result_type(type.results) + " (*)(" + names_.param_list(type.params, false) + ")";
            const auto target = "((" + fn_type + ")rt_indirect(" + table_name(o_, i.table) + ", " +
                                std::to_string(table.elements.size()) + "u, " + temp(d - 1, ValType::i32) + ", " +
                                std::to_string(names_.type_id(type)) + "u))";
            assign_results(first, type.results, target + "(" + call_args(first, type.params, shape) + ")");
            return;
        }
        case Opcode::drop:
            return;
        case Opcode::select:
        {
            const auto t = shape[d - 2];
            line(temp(d - 3, t) + " = " + temp(d - 1, ValType::i32) + " ? " + temp(d - 3, t) + " : " + temp(d - 2, t) + ";");
            return;
        }
        case Opcode::local_get:
            locals_read_.insert(i.index);
            line(temp(d, local_type(i.index)) + " = l" + std::to_string(i.index) + ";");
            return;
        case Opcode::local_set:
        case Opcode::local_tee:
            line("l" + std::to_string(i.index) + " = " + temp(d - 1, local_type(i.index)) + ";");
            return;
        case Opcode::global_get:
            line(temp(d, names_.global_types.at(i.index)) + " = " + names_.globals[i.index] + ";");
            return;
        case Opcode::global_set:
            line(names_.globals.at(i.index) + " = " + temp(d - 1, names_.global_types[i.index]) + ";");
            return;
        case Opcode::const_:
            line(temp(d, i.value.type()) + " = " + numeric_const(i.value, o_) + ";");
            return;
        case Opcode::eqz:
            line(temp(d - 1, ValType::i32) + " = (" + temp(d - 1, i.type) + " == 0) ? 1u : 0u;");
            return;
        case Opcode::wrap:
            line(temp(d - 1, ValType::i32) + " = (uint32_t)" + temp(d - 1, ValType::i64) + ";");
            return;
        case Opcode::extend_u:
            line(temp(d - 1, ValType::i64) + " = (uint64_t)" + temp(d - 1, ValType::i32) + ";");
            return;
        case Opcode::load:
        {
            const auto fn = i.packed8 ? std::string("rt_linear_load8_u") : "rt_linear_load_" + rt_suffix(i.type);
            line(temp(d - 1, i.type) + " = " + fn + "(" + mem + ", " + temp(d - 1, ValType::i32) + ", " +
                 std::to_string(i.offset) + "u);");
            return;
        }
        case Opcode::store:
        {
            const auto fn = i.packed8 ? std::string("rt_linear_store8") : "rt_linear_store_" + rt_suffix(i.type);
            line(fn + "(" + mem + ", " + temp(d - 2, ValType::i32) + ", " + temp(d - 1, i.type) + ", " +
                 std::to_string(i.offset) + "u);");
            return;
        }
        case Opcode::segload:
            segload(i, d);
            return;
        case Opcode::segstore:
            segstore(i, d);
            return;
        case Opcode::slice:
        case Opcode::handle_setbounds:
            line(temp(d - 2, ValType::handle) + " = rt_setbounds(" + temp(d - 2, ValType::handle) + ", " +
                 temp(d - 1, ValType::i32) + ");");
            return;
        case Opcode::segalloc:
            line(temp(d - 1, ValType::handle) + " = rt_seg_alloc(" + temp(d - 1, ValType::i32) + ");");
            return;
        case Opcode::handle_add:
            line(temp(d - 2, ValType::handle) + " = rt_handle_add(" + temp(d - 2, ValType::handle) + ", (int32_t)" +
                 temp(d - 1, ValType::i32) + ");");
            return;
        case Opcode::segfree:
            line("rt_seg_free(" + temp(d - 1, ValType::handle) + ");");
            return;
        case Opcode::handle_null:
            line(temp(d, ValType::handle) + " = rt_handle_null();");
            return;
        default:
            binary(i, d);
            return;
        }
    }

    ValType local_type(uint32_t index) const
    {
        const auto& fn = m_.funcs[index_ - m_.imported_count(ExternKind::func)];
        if (index < fn.type.params.size())
            return fn.type.params[index];
        return fn.locals.at(index - fn.type.params.size());
    }

    const TypedModule& tm_;
    const Module& m_;
    const UnitNames& names_;
    const CodegenOptions& o_;
    uint32_t index_;
    size_t skip_prefix_;
    std::vector<Label> labels_;
    std::set<std::pair<uint32_t, ValType>> temps_;
    std::set<uint32_t> locals_read_;
    std::string body_;
    int indent_ = 0;
    uint32_t next_label_ = 0;
};

std::string file_banner(const CodegenOptions& o, std::string_view what)
{
    return "/* " + std::string(what) + " for unit \"" + o.unit_name + "\", emitted by mswasm codegen. */\n";
}

std::string preamble(const CodegenOptions& o)
{
    const auto& p = o.module_prefix;
    return "static inline float " + p + "f32_bits(uint32_t b)\n{\n    float f;\n    memcpy(&f, &b, sizeof f);\n    return f;\n}\n\n" +
           "static inline double " + p + "f64_bits(uint64_t b)\n{\n    double f;\n    memcpy(&f, &b, sizeof f);\n    return f;\n}\n\n" +
           "static inline uint32_t " + p + "shr_s32(uint32_t a, uint32_t b)\n{\n    b &= 31u;\n" +
           "    return (a & 0x80000000u) ? ~(~a >> b) : a >> b;\n}\n\n" +
           "static inline uint64_t " + p + "shr_s64(uint64_t a, uint64_t b)\n{\n    b &= 63u;\n" +
           "    return (a & 0x8000000000000000ull) ? ~(~a >> b) : a >> b;\n}\n\n";
}

std::string export_signature(const UnitNames& names, const std::string& symbol, const FuncType& type)
{
    return names.result_type(type.results) + " " + symbol + "(" + names.param_list(type.params, true) + ")";
}

std::string try_signature(const UnitNames& names, const std::string& symbol, const FuncType& type)
{
    std::string params;
    if (!type.results.empty())
        params = names.result_type(type.results) + "* out";
    for (size_t i = 0; i < type.params.size(); ++i)
        params += (params.empty() ? "" : ", ") + std::string(c_type(type.params[i])) + " l" + std::to_string(i);
    return "int " + symbol + "_try(" + (params.empty() ? "void" : params) + ")";
}

bool function_referenced(const Module& m, uint32_t f)
{
    for (const auto& e : m.exports)
        if (e.kind == ExternKind::func && e.index == f)
            return true;
    for (const auto& t : m.tables)
        if (std::find(t.elements.begin(), t.elements.end(), f) != t.elements.end())
            return true;
    bool found = false;
    const auto scan = [&](const auto& self, const std::vector<Instr>& body) -> void {
        for (const auto& i : body)
        {
            if (i.op == Opcode::call && i.index == f)
                found = true;
            self(self, i.body);
            self(self, i.else_body);
        }
    };
    for (const auto& fn : m.funcs)
        scan(scan, fn.body);
    return found;
}
}  // namespace

std::string c_identifier(std::string_view name)
{
    std::string out;
    for (const char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_') ? c : '_';
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) != 0)
        out.insert(out.begin(), '_');
    return out;
}

std::vector<std::pair<uint32_t, uint32_t>> global_object_sites(const Module& m)
{
    std::vector<std::pair<uint32_t, uint32_t>> sites;
    if (!m.start || *m.start < m.imported_count(ExternKind::func) || function_referenced(m, *m.start))
        return sites;
    const auto& body = m.funcs[*m.start - m.imported_count(ExternKind::func)].body;
    const auto imported_globals = m.imported_count(ExternKind::global);
    std::set<uint32_t> seen;
    for (size_t i = 0; i + 2 < body.size(); i += 3)
    {
        const auto& c = body[i];
        const auto& a = body[i + 1];
        const auto& s = body[i + 2];
        if (c.op != Opcode::const_ || c.value.type() != ValType::i32 || a.op != Opcode::segalloc ||
            s.op != Opcode::global_set || s.index < imported_globals || !seen.insert(s.index).second)
            break;
        sites.emplace_back(s.index, c.value.as_i32());
    }
    return sites;
}

Fragments emit_global_machinery(const TypedModule& module, const CodegenOptions& o)
{
    Fragments f;
    const UnitNames names{module.module(), o};
    for (const auto& [g, size] : global_object_sites(module.module()))
    {
        const auto object = o.module_prefix + "gobj" + std::to_string(g);
        const auto init = o.module_prefix + "init_g" + std::to_string(g);
        f.declarations += "static uint8_t " + object + "[" + std::to_string(std::max(size, 1u)) + "];\n\n";
        f.declarations += "static void " + init + "(void)\n{\n    " + names.globals[g] + " = rt_bind_object(" + object +
                          ", " + std::to_string(size) + "u);\n}\n\n";
        f.init += "    " + init + "();\n";
        f.init_functions.push_back(init);
    }
    return f;
}

Fragments lower_physical_memory(const TypedModule& module, const CodegenOptions& o)
{
    Fragments f;
    for (const auto& imp : module.module().imports)
    {
        if (imp.name != physical_memory_name)
            continue;
        if (!is_physical_memory(imp) || imp.desc.global.type != ValType::handle)
            throw CodegenError{"import \"" + imp.module + "\" \"" + imp.name +
                               "\" must be the global handle (\"env\" \"" + physical_memory_name + "\")"};
        const auto name = o.module_prefix + "physical_memory";
        f.declarations += "static Handle " + name + ";\n";
        f.init += "    " + name + " = rt_physical_memory(" + std::to_string(o.arena_size) + "u);\n";
        break;
    }
    return f;
}

std::string emit_wrapper(const Import& imp, const CodegenOptions& o)
{
    if (!is_host_import(imp))
        throw CodegenError{"wrappers are only emitted for host imports (\"env\" functions)"};
    const auto& type = imp.desc.func;
    if (type.results.size() > 1)
        throw CodegenError{"host import \"" + imp.name +
                           "\" returns several values; write its wrapper by hand and disable emitted wrappers"};
    const auto symbol = o.module_prefix + c_identifier(imp.name);
    const auto* native = find_native(imp.name);
    if (native != nullptr && native->params.size() != type.params.size())
        throw CodegenError{"host import \"" + imp.name + "\" does not match the arity of the C library function"};

    std::string out;
    if (native == nullptr)
    {
        std::vector<std::string> params;
        for (const auto t : type.params)
            params.push_back(t == ValType::handle ? "void*" : std::string(c_type(t)));
        const auto result = type.results.empty() ? std::string("void")
                            : type.results[0] == ValType::handle ? std::string("void*")
                                                                 : std::string(c_type(type.results[0]));
        out += "extern " + result + " " + c_identifier(imp.name) + "(" + (params.empty() ? "void" : join(params, ", ")) + ");\n\n";
    }
    std::vector<std::string> params;
    std::vector<std::string> args;
    for (size_t i = 0; i < type.params.size(); ++i)
    {
        const auto p = o.module_prefix + "p" + std::to_string(i);
        params.push_back(std::string(c_type(type.params[i])) + " " + p);
        std::string arg = type.params[i] == ValType::handle ? "rt_handle_to_native(" + p + ")" : p;
        if (native != nullptr && type.params[i] != ValType::handle)
            arg = "(" + std::string(native->params[i]) + ")" + arg;
        args.push_back(arg);
    }
    const auto result = type.results.empty() ? std::string("void") : std::string(c_type(type.results[0]));
    if (o.weak_wrapper_linkage)
        out += "__attribute__((weak)) ";
    out += result + " " + symbol + "(" + (params.empty() ? "void" : join(params, ", ")) + ")\n{\n";
    const auto call = c_identifier(imp.name) + "(" + join(args, ", ") + ")";
    if (type.results.empty())
        out += "    " + call + ";\n";
    else if (type.results[0] == ValType::handle)
        out += "    return rt_handle_from_native(" + call + ");\n";
    else
        out += "    return (" + result + ")" + call + ";\n";
    out += "}\n";
    return out;
}

EmittedUnit codegen_module(const TypedModule& tm, const CodegenOptions& o)
{
    const auto& m = tm.module();
    const UnitNames names{m, o};
    const auto unit = c_identifier(o.unit_name);
    const auto prefix = o.module_prefix + unit + "_";
    const auto imported_funcs = m.imported_count(ExternKind::func);
    const auto imported_globals = m.imported_count(ExternKind::global);
    const auto machinery = emit_global_machinery(tm, o);
    const auto physical = lower_physical_memory(tm, o);
    const auto sites = global_object_sites(m);
    const bool checked = o.mode == Mode::checked_c_syntax;
    EmittedUnit unit_out;
    unit_out.global_init_functions = machinery.init_functions;

    // Header.
    const auto guard = "MSWASM_UNIT_" + unit + "_H";
    std::string& h = unit_out.header;
    h += file_banner(o, "Interface");
    h += "\n#ifndef " + guard + "\n#define " + guard + "\n\n#include \"mswasm_rt.h\"\n\n";
    h += names.struct_definitions();
    for (uint32_t g = 0; g < m.imports.size(); ++g)
    {
        const auto& imp = m.imports[g];
        if (imp.desc.kind == ExternKind::global && !is_physical_memory(imp))
            h += "extern " + std::string(c_type(imp.desc.global.type)) + " " + names.import_symbol(imp) + ";\n";
        if (imp.desc.kind == ExternKind::func)
        {
            const auto proto = export_signature(names, names.import_symbol(imp), imp.desc.func) + ";";
            h += proto + "\n";
            if (is_host_import(imp))
                unit_out.wrapper_prototypes.push_back(proto);
        }
    }
    for (const auto& e : m.exports)
    {
        if (e.kind == ExternKind::global && e.index >= imported_globals)
            h += "extern " + std::string(c_type(names.global_types[e.index])) + " " + names.globals[e.index] + ";\n";
        if (e.kind == ExternKind::func)
        {
            const auto symbol = prefix + c_identifier(e.name);
            h += export_signature(names, symbol, names.func_types[e.index]) + ";\n";
            if (o.trap_behavior == CodegenOptions::TrapBehavior::return_error)
                h += try_signature(names, symbol, names.func_types[e.index]) + ";\n";
        }
    }
    h += "void " + prefix + "instantiate(void);\n\n#endif\n";

    // Source.
    std::string& s = unit_out.source;
    s += file_banner(o, "Translation");
    s += "\n#include <stdint.h>\n#include <string.h>\n\n#include \"" + o.unit_name + ".h\"\n";
    if (checked)
        s += "#include \"mswasm_rt_checked.h\"\n\n#pragma CHECKED_SCOPE on\n";
    s += "\n" + preamble(o);
    if (m.memory)
        s += "static rt_memory " + memory_name(o) + ";\n";
    for (uint32_t g = imported_globals; g < names.globals.size(); ++g)
    {
        const auto& global = m.globals[g - imported_globals];
        const bool exported = std::any_of(m.exports.begin(), m.exports.end(),
            [&](const Export& e) { return e.kind == ExternKind::global && e.index == g; });
        s += std::string(exported ? "" : "static ") + std::string(c_type(global.type.type)) + " " + names.globals[g] +
             ";\n";
    }
    s += physical.declarations;
    s += "\n";
    for (uint32_t f = imported_funcs; f < names.funcs.size(); ++f)
        s += "static " + names.result_type(names.func_types[f].results) + " " + names.funcs[f] + "(" +
             names.param_list(names.func_types[f].params, false) + ");\n";
    s += "\n";
    for (uint32_t t = 0; t < m.tables.size(); ++t)
    {
        const auto& elems = m.tables[t].elements;
        s += "static const rt_funcref " + table_name(o, t) + "[" + std::to_string(std::max<size_t>(elems.size(), 1)) + "] = {";
        for (size_t k = 0; k < elems.size(); ++k)
            s += std::string(k ? ", " : "") + "{" + std::to_string(names.type_id(names.func_types[elems[k]])) +
                 "u, (rt_anyfunc)" + names.funcs[elems[k]] + "}";
        if (elems.empty())
            s += "{0u, 0}";
        s += "};\n";
    }
    if (!m.tables.empty())
        s += "\n";
    s += machinery.declarations;
    for (uint32_t f = imported_funcs; f < names.funcs.size(); ++f)
    {
        const size_t skip = m.start && *m.start == f ? 3 * sites.size() : 0;
        s += FunctionEmitter{tm, names, o, f, skip}.emit() + "\n";
    }
    for (const auto& e : m.exports)
    {
        if (e.kind != ExternKind::func)
            continue;
        const auto& type = names.func_types[e.index];
        const auto symbol = prefix + c_identifier(e.name);
        std::vector<std::string> args;
        for (size_t i = 0; i < type.params.size(); ++i)
            args.push_back("l" + std::to_string(i));
        const auto call = names.funcs[e.index] + "(" + join(args, ", ") + ")";
        s += export_signature(names, symbol, type) + "\n{\n    " + (type.results.empty() ? "" : "return ") + call + ";\n}\n\n";
        if (o.trap_behavior == CodegenOptions::TrapBehavior::return_error)
            s += try_signature(names, symbol, type) + "\n{\n    return MSWASM_RT_TRY(" +
                 (type.results.empty() ? call : "*out = " + call) + ");\n}\n\n";
    }
    s += "void " + prefix + "instantiate(void)\n{\n    rt_init();\n";
    s += physical.init;
    if (m.memory)
        s += "    rt_memory_init(&" + memory_name(o) + ", " + std::to_string(m.memory->min_pages) + "u);\n";
    for (uint32_t g = imported_globals; g < names.globals.size(); ++g)
    {
        const auto& init = m.globals[g - imported_globals].init;
        const auto value = init.op == Opcode::global_get ? names.globals[init.index]
                           : init.op == Opcode::const_   ? numeric_const(init.value, o)
                                                         : std::string("rt_handle_null()");
        s += "    " + names.globals[g] + " = " + value + ";\n";
    }
    for (size_t k = 0; k < m.data.size(); ++k)
    {
        const auto& d = m.data[k];
        std::string bytes;
        for (size_t b = 0; b < d.bytes.size(); ++b)
            bytes += std::string(b ? ", " : "") + hex(d.bytes[b], 2);
        const auto name = o.module_prefix + "data" + std::to_string(k);
        const auto offset = d.offset.op == Opcode::global_get ? names.globals[d.offset.index]
                                                              : std::to_string(d.offset.value.as_i32()) + "u";
        s += "    {\n        static const uint8_t " + name + "[] = {" + (bytes.empty() ? "0" : bytes) + "};\n";
        s += "        rt_memory_init_data(&" + memory_name(o) + ", " + offset + ", " + name + ", " +
             std::to_string(d.bytes.size()) + "u);\n    }\n";
    }
    s += machinery.init;
    if (m.start)
        s += "    " + names.funcs[*m.start] + "();\n";
    s += "}\n";

    // Wrappers.
    if (o.emit_wrappers)
    {
        std::set<std::string> headers;
        std::string bodies;
        for (const auto& imp : m.imports)
            if (is_host_import(imp))
            {
                if (const auto* native = find_native(imp.name))
                    headers.insert(std::string(native->header));
                bodies += "\n" + emit_wrapper(imp, o);
            }
        if (!bodies.empty())
        {
            unit_out.wrappers = file_banner(o, "Host wrappers");
            unit_out.wrappers += "\n#include <stddef.h>\n";
            for (const auto& hd : headers)
                unit_out.wrappers += "#include " + hd + "\n";
            unit_out.wrappers += "\n#include \"" + o.unit_name + ".h\"\n" + bodies;
        }
    }
    return unit_out;
}
}  // namespace mswasm
