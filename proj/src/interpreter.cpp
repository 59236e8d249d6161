// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/interpreter.hpp"
#include "mswasm/host.hpp"
#include "mswasm/text.hpp"
#include "mswasm/validator.hpp"
#include <nlohmann/json.hpp>

namespace mswasm
{
namespace
{
using enum ValType;

std::string type_list(std::span<const ValType> types)
{
    std::string out = "[";
    for (size_t i = 0; i < types.size(); ++i)
        out += (i ? " " : "") + std::string(to_string(types[i]));
    return out + "]";
}

bool types_match(std::span<const Value> values, std::span<const ValType> types)
{
    if (values.size() != types.size())
        return false;
    for (size_t i = 0; i < values.size(); ++i)
        if (values[i].type() != types[i])
            return false;
    return true;
}

Value make_int(ValType t, uint64_t v)
{
    return t == i32 ? Value::i32(static_cast<uint32_t>(v)) : Value::i64(v);
}

bool compare(Opcode op, ValType t, uint64_t a, uint64_t b)
{
    const int64_t sa = t == i32 ? int64_t{static_cast<int32_t>(a)} : static_cast<int64_t>(a);
    const int64_t sb = t == i32 ? int64_t{static_cast<int32_t>(b)} : static_cast<int64_t>(b);
    switch (op)
    {
    case Opcode::eq:
        return a == b;
    case Opcode::ne:
        return a != b;
    case Opcode::lt_s:
        return sa < sb;
    case Opcode::lt_u:
        return a < b;
    case Opcode::gt_s:
        return sa > sb;
    case Opcode::gt_u:
        return a > b;
    case Opcode::le_s:
        return sa <= sb;
    case Opcode::le_u:
        return a <= b;
    case Opcode::ge_s:
        return sa >= sb;
    case Opcode::ge_u:
        return a >= b;
    default:
        return false;
    }
}

uint64_t arith(Opcode op, ValType t, uint64_t a, uint64_t b)
{
    const unsigned bits = t == i32 ? 32 : 64;
    const uint64_t mask = t == i32 ? 0xffffffffu : ~uint64_t{0};
    a &= mask;
    b &= mask;
    const unsigned k = static_cast<unsigned>(b % bits);
    switch (op)
    {
    case Opcode::add:
        return (a + b) & mask;
    case Opcode::sub:
        return (a - b) & mask;
    case Opcode::mul:
        return (a * b) & mask;
    case Opcode::and_:
        return a & b;
    case Opcode::or_:
        return a | b;
    case Opcode::xor_:
        return a ^ b;
    case Opcode::shl:
        return (a << k) & mask;
    case Opcode::shr_u:
        return a >> k;
    case Opcode::shr_s:
        if (t == i32)
            return static_cast<uint32_t>(static_cast<int32_t>(a) >> k);
        return static_cast<uint64_t>(static_cast<int64_t>(a) >> k);
    default:
        return 0;
    }
}
}  // namespace

std::string_view to_string(Outcome::Kind kind) noexcept
{
    switch (kind)
    {
    case Outcome::Kind::values:
        return "values";
    case Outcome::Kind::trapped:
        return "trapped";
    case Outcome::Kind::fuel_exhausted:
        return "fuel_exhausted";
    case Outcome::Kind::stuck:
        return "stuck";
    case Outcome::Kind::resource_exhausted:
        return "resource_exhausted";
    }
    return "?";
}

bool Outcome::same_as(const Outcome& other) const noexcept
{
    if (kind != other.kind)
        return false;
    if (kind == Kind::values)
        return values == other.values;
    if (kind == Kind::trapped)
        return trap.kind == other.trap.kind;
    return true;
}

std::string Outcome::to_string() const
{
    std::string out(mswasm::to_string(kind));
    switch (kind)
    {
    case Kind::values:
        for (const auto& v : values)
            out += " " + pretty(v);
        break;
    case Kind::trapped:
        out += " " + std::string(mswasm::to_string(trap.kind));
        if (!trap.detail.empty())
            out += ": " + trap.detail;
        break;
    case Kind::stuck:
    case Kind::resource_exhausted:
        out += ": " + detail;
        break;
    case Kind::fuel_exhausted:
        break;
    }
    return out;
}

std::string Outcome::to_json() const
{
    nlohmann::json j;
    j["outcome"] = std::string(mswasm::to_string(kind));
    if (kind == Kind::values)
    {
        auto arr = nlohmann::json::array();
        for (const auto& v : values)
            arr.push_back(pretty(v));
        j["values"] = arr;
    }
    if (kind == Kind::trapped)
    {
        j["trap"] = std::string(mswasm::to_string(trap.kind));
        j["detail"] = trap.detail;
    }
    if (kind == Kind::stuck || kind == Kind::resource_exhausted)
        j["detail"] = detail;
    return j.dump();
}

int Outcome::exit_code() const noexcept
{
    switch (kind)
    {
    case Kind::values:
        return exit_values;
    case Kind::trapped:
        return exit_trapped;
    case Kind::fuel_exhausted:
        return exit_fuel_exhausted;
    case Kind::stuck:
        return exit_stuck;
    case Kind::resource_exhausted:
        return exit_resource_exhausted;
    }
    return exit_resource_exhausted;
}

Config::Config(Store& store, uint32_t func_addr, std::vector<Value> args, InterpreterOptions options)
  : store_{store}, options_{options}, fuel_{options.fuel}, entry_{func_addr}, values_{std::move(args)}
{
    if (func_addr >= store_.funcs.size())
        throw InvokeError{"unknown function address " + std::to_string(func_addr)};
    const auto& params = store_.funcs[func_addr].type.params;
    if (!types_match(values_, params))
    {
        std::vector<ValType> got;
        for (const auto& v : values_)
            got.push_back(v.type());
        throw InvokeError{"arguments " + type_list(got) + " do not match parameters " + type_list(params)};
    }
}

bool Config::pop_any(Value& out)
{
    const uint32_t floor = labels_.empty() ? 0 : labels_.back().height;
    if (values_.size() <= floor)
        return false;
    out = values_.back();
    values_.pop_back();
    return true;
}

bool Config::pop(ValType type, Value& out)
{
    return pop_any(out) && out.type() == type;
}

bool Config::pop_results(std::span<const ValType> types, std::vector<Value>& out)
{
    const uint32_t floor = labels_.empty() ? 0 : labels_.back().height;
    if (values_.size() < floor + types.size())
        return false;
    out.assign(values_.end() - static_cast<std::ptrdiff_t>(types.size()), values_.end());
    if (!types_match(out, types))
        return false;
    values_.resize(values_.size() - types.size());
    return true;
}

std::optional<Outcome> Config::step()
{
    if (finished_)
        return finished_;
    std::optional<Outcome> r;
    try
    {
        if (frames_.empty() && labels_.empty() && entry_ != UINT32_MAX)
        {
            const auto entry = entry_;
            entry_ = UINT32_MAX;
            r = call(entry);
        }
        else if (frames_.empty())
            r = Outcome::returned(values_);
        else
        {
            auto& label = labels_.back();
            if (label.pc >= label.seq->size())
                r = end_label();
            else
            {
                const Instr& instr = (*label.seq)[label.pc++];
                if (options_.check_shapes)
                    r = check_shape(instr);
                if (!r)
                    r = execute(instr);
            }
        }
    }
    catch (const ResourceExhausted& e)
    {
        r = Outcome::exhausted(e.what());
    }
    if (!r && frames_.empty())
        r = Outcome::returned(values_);
    if (r)
    {
        finished_ = r;
        if (options_.observer)
            options_.observer->on_finish(*this, *r);
    }
    else if (options_.observer)
        options_.observer->after_step(*this);
    return r;
}

Outcome Config::run()
{
    while (true)
    {
        if (fuel_ == 0)
        {
            finished_ = Outcome::fuel_exhausted();
            if (options_.observer)
                options_.observer->on_finish(*this, *finished_);
            return *finished_;
        }
        --fuel_;
        if (auto r = step())
            return *r;
    }
}

std::optional<Outcome> Config::check_shape(const Instr& instr) const
{
    const auto& inst = instance();
    const auto* shape = inst.module->shape_before(instr);
    if (shape == nullptr)
        return Outcome::stuck("executing " + std::string(mnemonic(instr.op)) +
                              " for which the validator predicted no reachable stack");
    const auto base = frames_.back().stack_base;
    bool ok = values_.size() - base == shape->size();
    for (size_t i = 0; ok && i < shape->size(); ++i)
        ok = values_[base + i].type() == (*shape)[i];
    if (ok)
        return std::nullopt;
    std::vector<ValType> actual;
    for (size_t i = base; i < values_.size(); ++i)
        actual.push_back(values_[i].type());
    return Outcome::stuck("stack " + type_list(actual) + " before " + std::string(mnemonic(instr.op)) +
                          " differs from predicted " + type_list(*shape));
}

std::optional<Outcome> Config::end_label()
{
    const auto& frame = frames_.back();
    if (labels_.size() - 1 == frame.label_base)
        return do_return();
    const auto& label = labels_.back();
    const auto& results = label.instr->results;
    const std::span<const Value> top(values_.data() + label.height, values_.size() - label.height);
    if (!types_match(top, results))
        return Outcome::stuck("block ended with " + std::to_string(top.size()) +
                              " values, expected " + type_list(results));
    labels_.pop_back();
    return std::nullopt;
}

std::optional<Outcome> Config::branch(uint32_t depth)
{
    const auto& frame = frames_.back();
    if (depth >= labels_.size() - frame.label_base)
        return Outcome::stuck("branch to unknown label " + std::to_string(depth));
    const size_t idx = labels_.size() - 1 - depth;
    if (idx == frame.label_base)
        return do_return();
    auto& target = labels_[idx];
    const bool loop = target.instr->op == Opcode::loop;
    const auto& types = loop ? std::vector<ValType>{} : target.instr->results;
    std::vector<Value> carried;
    if (!pop_results(types, carried))
        return Outcome::stuck("branch needs " + type_list(types) + " on the stack");
    values_.resize(target.height);
    values_.insert(values_.end(), carried.begin(), carried.end());
    if (loop)
    {
        target.pc = 0;
        labels_.resize(idx + 1);
    }
    else
        labels_.resize(idx);
    return std::nullopt;
}

std::optional<Outcome> Config::do_return()
{
    const auto frame_func = frames_.back().func;
    const auto& types = store_.funcs[frame_func].type.results;
    std::vector<Value> results;
    if (!pop_results(types, results))
        return Outcome::stuck("return needs " + type_list(types) + " on the stack");
    const auto& frame = frames_.back();
    values_.resize(frame.stack_base);
    values_.insert(values_.end(), results.begin(), results.end());
    labels_.resize(frame.label_base);
    frames_.pop_back();
    if (options_.observer)
        options_.observer->on_return(*this, frame_func, results);
    return std::nullopt;
}

std::optional<Outcome> Config::call(uint32_t func_addr)
{
    if (func_addr >= store_.funcs.size())
        return Outcome::stuck("call of unknown function address " + std::to_string(func_addr));
    const auto& fi = store_.funcs[func_addr];
    if (fi.is_host())
        return call_host(func_addr);
    if (frames_.size() >= options_.max_call_depth)
        return Outcome::exhausted("call depth limit of " + std::to_string(options_.max_call_depth) + " reached");
    Frame frame;
    frame.func = func_addr;
    frame.instance = fi.instance;
    if (!pop_results(fi.type.params, frame.locals))
        return Outcome::stuck("call needs arguments " + type_list(fi.type.params));
    if (options_.observer)
        options_.observer->on_call(*this, func_addr, frame.locals);
    for (const auto t : fi.code->locals)
        frame.locals.push_back(Value::zero(t));
    frame.stack_base = static_cast<uint32_t>(values_.size());
    frame.label_base = static_cast<uint32_t>(labels_.size());
    frames_.push_back(std::move(frame));
    labels_.push_back(Label{&fi.code->body, 0, static_cast<uint32_t>(values_.size()),
        static_cast<uint32_t>(fi.type.results.size()), nullptr});
    return std::nullopt;
}

std::optional<Outcome> Config::call_host(uint32_t func_addr)
{
    const auto& fi = store_.funcs[func_addr];
    std::vector<Value> args;
    if (!pop_results(fi.type.params, args))
        return Outcome::stuck("host call needs arguments " + type_list(fi.type.params));
    if (options_.observer)
        options_.observer->on_call(*this, func_addr, args);
    HostContext ctx{store_, args};
    auto r = fi.host->callback(ctx, args);
    if (!r.ok())
        return Outcome::trapped(std::move(r).trap());
    auto& results = r.value();
    if (!types_match(results, fi.type.results))
        return Outcome::stuck("host function " + fi.host->name + " returned values not matching " +
                              type_list(fi.type.results));
    if (auto s = ctx.admit_results(results); !s.ok())
        return Outcome::trapped(s.trap());
    values_.insert(values_.end(), results.begin(), results.end());
    if (options_.observer)
        options_.observer->on_return(*this, func_addr, results);
    return std::nullopt;
}

std::optional<Outcome> Config::execute(const Instr& instr)
{
    const auto underflow = [&] {
        return Outcome::stuck("operand stack underflow or type mismatch at " + std::string(mnemonic(instr.op)));
    };
    const auto trap_of = [](const Trap& t) { return Outcome::trapped(t); };
    const ValType t = instr.type;
    Value a;
    Value b;
    Value c;

    switch (instr.op)
    {
    case Opcode::unreachable:
        return Outcome::trapped(Trap{TrapKind::unreachable, "unreachable executed"});
    case Opcode::nop:
        return std::nullopt;
    case Opcode::block:
    case Opcode::loop:
        labels_.push_back(Label{&instr.body, 0, static_cast<uint32_t>(values_.size()),
            instr.op == Opcode::loop ? 0u : static_cast<uint32_t>(instr.results.size()), &instr});
        return std::nullopt;
    case Opcode::if_:
        if (!pop(i32, a))
            return underflow();
        labels_.push_back(Label{a.as_i32() != 0 ? &instr.body : &instr.else_body, 0,
            static_cast<uint32_t>(values_.size()), static_cast<uint32_t>(instr.results.size()), &instr});
        return std::nullopt;
    case Opcode::br:
        return branch(instr.index);
    case Opcode::br_if:
        if (!pop(i32, a))
            return underflow();
        if (a.as_i32() != 0)
            return branch(instr.index);
        return std::nullopt;
    case Opcode::return_:
        return do_return();
    case Opcode::call:
    {
        const auto& inst = instance();
        if (instr.index >= inst.funcs.size())
            return Outcome::stuck("unknown function " + std::to_string(instr.index));
        return call(inst.funcs[instr.index]);
    }
    case Opcode::call_indirect:
    {
        const auto& inst = instance();
        if (!pop(i32, a))
            return underflow();
        if (instr.table >= inst.tables.size() || instr.index >= inst.module->module().types.size())
            return Outcome::stuck("call_indirect with unknown table or type");
        const auto& table = store_.tables[inst.tables[instr.table]];
        const auto slot = a.as_i32();
        if (slot >= table.elements.size() || !table.elements[slot])
            return Outcome::trapped(Trap{TrapKind::indirect_call_type_mismatch,
                "table slot " + std::to_string(slot) + " holds no function"});
        const auto target = *table.elements[slot];
        if (store_.funcs[target].type != inst.module->module().types[instr.index])
            return Outcome::trapped(Trap{TrapKind::indirect_call_type_mismatch,
                "table slot " + std::to_string(slot) + " has type " + to_string(store_.funcs[target].type)});
        return call(target);
    }
    case Opcode::drop:
        if (!pop_any(a))
            return underflow();
        return std::nullopt;
    case Opcode::select:
        if (!pop(i32, c) || !pop_any(b) || !pop(b.type(), a))
            return underflow();
        values_.push_back(c.as_i32() != 0 ? a : b);
        return std::nullopt;
    case Opcode::local_get:
    case Opcode::local_set:
    case Opcode::local_tee:
    {
        auto& locals = frames_.back().locals;
        if (instr.index >= locals.size())
            return Outcome::stuck("unknown local " + std::to_string(instr.index));
        auto& local = locals[instr.index];
        if (instr.op == Opcode::local_get)
        {
            values_.push_back(local);
            return std::nullopt;
        }
        if (!pop(local.type(), a))
            return underflow();
        local = a;
        if (instr.op == Opcode::local_tee)
            values_.push_back(a);
        return std::nullopt;
    }
    case Opcode::global_get:
    case Opcode::global_set:
    {
        const auto& inst = instance();
        if (instr.index >= inst.globals.size())
            return Outcome::stuck("unknown global " + std::to_string(instr.index));
        auto& cell = store_.globals[inst.globals[instr.index]];
        if (instr.op == Opcode::global_get)
        {
            values_.push_back(cell.value);
            return std::nullopt;
        }
        if (!cell.type.mut)
            return Outcome::stuck("write to immutable global " + std::to_string(instr.index));
        if (!pop(cell.type.type, a))
            return underflow();
        cell.value = a;
        return std::nullopt;
    }
    case Opcode::const_:
        values_.push_back(instr.value);
        return std::nullopt;
    case Opcode::eqz:
        if (!pop(t, a) || (t != i32 && t != i64))
            return underflow();
        values_.push_back(Value::i32(a.bits() == 0 ? 1 : 0));
        return std::nullopt;
    case Opcode::add:
        if (!pop(t, b) || !pop(t, a))
            return underflow();
        if (t == f32)
            values_.push_back(Value::f32(a.as_f32() + b.as_f32()));
        else if (t == f64)
            values_.push_back(Value::f64(a.as_f64() + b.as_f64()));
        else if (t == handle)
            return underflow();
        else
            values_.push_back(make_int(t, arith(Opcode::add, t, a.bits(), b.bits())));
        return std::nullopt;
    case Opcode::wrap:
        if (!pop(i64, a))
            return underflow();
        values_.push_back(Value::i32(static_cast<uint32_t>(a.as_i64())));
        return std::nullopt;
    case Opcode::extend_u:
        if (!pop(i32, a))
            return underflow();
        values_.push_back(Value::i64(a.as_i32()));
        return std::nullopt;
    case Opcode::load:
    case Opcode::store:
    {
        const auto& inst = instance();
        if (!inst.memory)
            return Outcome::stuck("linear memory access without a memory");
        if (t == handle)
            return Outcome::stuck("handle access to linear memory");
        if (instr.op == Opcode::load)
        {
            if (!pop(i32, a))
                return underflow();
            auto r = store_.linear_load(*inst.memory, a.as_i32(), t, instr.offset, instr.packed8);
            if (!r.ok())
                return trap_of(r.trap());
            values_.push_back(r.value());
            return std::nullopt;
        }
        if (!pop(t, b) || !pop(i32, a))
            return underflow();
        if (auto r = store_.linear_store(*inst.memory, a.as_i32(), b, instr.offset, instr.packed8); !r.ok())
            return trap_of(r.trap());
        return std::nullopt;
    }
    case Opcode::segload:
    {
        if (!pop(handle, a))
            return underflow();
        auto r = store_.seg_load(a.as_handle(), t, instr.offset, instr.packed8);
        if (!r.ok())
            return trap_of(r.trap());
        values_.push_back(r.value());
        return std::nullopt;
    }
    case Opcode::segstore:
        if (!pop(t, b) || !pop(handle, a))
            return underflow();
        if (auto r = store_.seg_store(a.as_handle(), b, instr.offset, instr.packed8); !r.ok())
            return trap_of(r.trap());
        return std::nullopt;
    case Opcode::slice:
    case Opcode::handle_setbounds:
    {
        if (!pop(i32, b) || !pop(handle, a))
            return underflow();
        auto r = store_.handle_setbounds(a.as_handle(), b.as_i32());
        if (!r.ok())
            return trap_of(r.trap());
        values_.push_back(Value::handle(r.value()));
        return std::nullopt;
    }
    case Opcode::segalloc:
        if (!pop(i32, a))
            return underflow();
        values_.push_back(Value::handle(store_.seg_alloc(a.as_i32())));
        return std::nullopt;
    case Opcode::handle_add:
        if (!pop(i32, b) || !pop(handle, a))
            return underflow();
        values_.push_back(Value::handle(Store::handle_add(a.as_handle(), static_cast<int32_t>(b.as_i32()))));
        return std::nullopt;
    case Opcode::segfree:
        if (!pop(handle, a))
            return underflow();
        if (auto r = store_.seg_free(a.as_handle()); !r.ok())
            return trap_of(r.trap());
        return std::nullopt;
    case Opcode::handle_null:
        values_.push_back(Value::handle(null_handle));
        return std::nullopt;
    default:
        break;
    }

    if (t != i32 && t != i64)
        return Outcome::stuck(std::string(mnemonic(instr.op)) + " on " + std::string(to_string(t)));
    if (!pop(t, b) || !pop(t, a))
        return underflow();
    if (is_comparison(instr.op))
        values_.push_back(Value::i32(compare(instr.op, t, a.bits(), b.bits()) ? 1 : 0));
    else
        values_.push_back(make_int(t, arith(instr.op, t, a.bits(), b.bits())));
    return std::nullopt;
}

Outcome invoke_address(Store& store, uint32_t func_addr, std::vector<Value> args, const InterpreterOptions& options)
{
    Config cfg{store, func_addr, std::move(args), options};
    return cfg.run();
}

uint32_t export_function(const Store& store, uint32_t instance, std::string_view export_name)
{
    if (instance >= store.instances.size())
        throw InvokeError{"unknown instance " + std::to_string(instance)};
    const auto& exports = store.instances[instance].exports;
    const auto it = exports.find(std::string(export_name));
    if (it == exports.end() || it->second.kind != ExternKind::func)
        throw InvokeError{"no exported function \"" + std::string(export_name) + "\""};
    return it->second.addr;
}

Outcome invoke(Store& store, uint32_t instance, std::string_view export_name, std::vector<Value> args,
    const InterpreterOptions& options)
{
    return invoke_address(store, export_function(store, instance, export_name), std::move(args), options);
}

Outcome invoke(Store& store, uint32_t instance, uint32_t func_index, std::vector<Value> args,
    const InterpreterOptions& options)
{
    if (instance >= store.instances.size())
        throw InvokeError{"unknown instance " + std::to_string(instance)};
    const auto& funcs = store.instances[instance].funcs;
    if (func_index >= funcs.size())
        throw InvokeError{"unknown function index " + std::to_string(func_index)};
    return invoke_address(store, funcs[func_index], std::move(args), options);
}

std::pair<Outcome, Trace> invoke_with_trace(Store& store, uint32_t instance, std::string_view export_name,
    std::vector<Value> args, const InterpreterOptions& options)
{
    Trace trace;
    auto* previous = store.trace;
    store.trace = &trace;
    try
    {
        auto outcome = invoke(store, instance, export_name, std::move(args), options);
        store.trace = previous;
        return {std::move(outcome), std::move(trace)};
    }
    catch (...)
    {
        store.trace = previous;
        throw;
    }
}
}  // namespace mswasm
