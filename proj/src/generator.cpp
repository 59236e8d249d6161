// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/generator.hpp"
#include <algorithm>
#include <set>

namespace mswasm
{
namespace
{
using enum ValType;

constexpr uint32_t max_depth = 5;

/// Everything a function body may refer to.
struct ModuleShape
{
    std::vector<FuncType> types;
    std::vector<FuncType> funcs;
    std::vector<GlobalType> globals;
    std::vector<uint32_t> table;
    bool has_table = false;
    bool has_memory = false;
};

struct LabelInfo
{
    std::vector<ValType> types;
    bool loop = false;
};

class FunctionGen
{
public:
    FunctionGen(Rng& rng, const ModuleShape& shape, const GeneratorOptions& options, uint32_t self,
        Function& fn, uint32_t budget)
      : rng_{rng}, shape_{shape}, options_{options}, self_{self}, fn_{fn}, left_{budget}
    {
        locals_ = fn.type.params;
        locals_.insert(locals_.end(), fn.locals.begin(), fn.locals.end());
    }

    void generate()
    {
        labels_.push_back({fn_.type.results, false});
        Seq prologue;
        const auto params = fn_.type.params.size();
        for (uint32_t i = static_cast<uint32_t>(params); i < locals_.size(); ++i)
        {
            if (locals_[i] != handle || !afford(3 + fn_.type.results.size()) || !rng_.chance(70))
                continue;
            emit(prologue, Instr::constant(Value::i32(static_cast<uint32_t>(rng_.below(options_.max_segment_size)))));
            emit(prologue, Instr::simple(Opcode::segalloc));
            emit(prologue, Instr::indexed(Opcode::local_set, i));
        }
        fn_.body = body(fn_.type.results);
        fn_.body.insert(fn_.body.begin(), prologue.begin(), prologue.end());
        labels_.pop_back();
    }

private:
    using Seq = std::vector<Instr>;

    bool afford(uint32_t n) const { return left_ >= n; }
    void spend() { --left_; }

    void emit(Seq& out, Instr instr)
    {
        spend();
        out.push_back(std::move(instr));
    }

    /// Statements, then one expression per result type.
    Seq body(const std::vector<ValType>& results)
    {
        Seq out;
        const auto reserve = static_cast<uint32_t>(results.size());
        left_ -= reserve;
        while (left_ > 0 && rng_.chance(70))
            stmt(out);
        left_ += reserve;
        exprs(out, results);
        return out;
    }

    void exprs(Seq& out, const std::vector<ValType>& types)
    {
        for (size_t i = 0; i < types.size(); ++i)
        {
            const auto rest = static_cast<uint32_t>(types.size() - i - 1);
            left_ -= rest;
            expr(out, types[i]);
            left_ += rest;
        }
    }

    std::vector<uint32_t> locals_of(ValType t, bool writable) const
    {
        std::vector<uint32_t> out;
        for (uint32_t i = 0; i < locals_.size(); ++i)
            if (locals_[i] == t && !(writable && reserved_.count(i)))
                out.push_back(i);
        return out;
    }

    std::vector<uint32_t> globals_of(ValType t, bool writable) const
    {
        std::vector<uint32_t> out;
        for (uint32_t i = 0; i < shape_.globals.size(); ++i)
            if (shape_.globals[i].type == t && (!writable || shape_.globals[i].mut))
                out.push_back(i);
        return out;
    }

    std::vector<uint32_t> callees(const std::optional<ValType>& result) const
    {
        std::vector<uint32_t> out;
        for (uint32_t i = 0; i < shape_.funcs.size(); ++i)
        {
            if (options_.terminating && i >= self_)
                continue;
            const auto& r = shape_.funcs[i].results;
            if (!result || (r.size() == 1 && r[0] == *result))
                out.push_back(i);
        }
        return out;
    }

    uint32_t call_cost(const FuncType& type) const
    {
        return 1 + static_cast<uint32_t>(type.params.size());
    }

    Value constant(ValType t)
    {
        const auto pick_int = [&]() -> uint64_t {
            switch (rng_.below(6))
            {
            case 0:
                return rng_.below(4);
            case 1:
                return rng_.below(options_.max_segment_size + 8);
            case 2:
                return ~uint64_t{0} - rng_.below(4);
            case 3:
                return rng_.next();
            default:
                return rng_.below(32);
            }
        };
        switch (t)
        {
        case i32:
            return Value::i32(static_cast<uint32_t>(pick_int()));
        case i64:
            return Value::i64(pick_int());
        case f32:
            return Value::f32(static_cast<float>(static_cast<int32_t>(rng_.below(2000)) - 1000) / 8.0f);
        case f64:
            return Value::f64(static_cast<double>(static_cast<int64_t>(rng_.below(2000)) - 1000) / 16.0);
        case handle:
            break;
        }
        return Value::zero(t);
    }

    /// A leaf producing `t`: constant, null handle, local or global read.
    void leaf(Seq& out, ValType t)
    {
        const auto locals = locals_of(t, false);
        const auto globals = globals_of(t, false);
        const auto roll = rng_.below(10);
        if (roll < 4 && !locals.empty())
            emit(out, Instr::indexed(Opcode::local_get, rng_.pick(locals)));
        else if (roll < 5 && !globals.empty())
            emit(out, Instr::indexed(Opcode::global_get, rng_.pick(globals)));
        else if (t == handle && afford(2) && rng_.chance(60))
        {
            emit(out, Instr::constant(Value::i32(static_cast<uint32_t>(rng_.below(options_.max_segment_size)))));
            emit(out, Instr::simple(Opcode::segalloc));
        }
        else if (t == handle)
            emit(out, Instr::simple(Opcode::handle_null));
        else
            emit(out, Instr::constant(constant(t)));
    }

    /// A small i32 suitable as a size, length, delta or slot.
    void small_i32(Seq& out)
    {
        if (afford(3) && rng_.chance(25))
        {
            spend();
            left_ -= 1;
            expr(out, i32);
            left_ += 1;
            emit(out, Instr::constant(Value::i32(options_.max_segment_size - 1)));
            out.push_back(Instr::typed(Opcode::and_, i32));
            return;
        }
        emit(out, Instr::constant(Value::i32(static_cast<uint32_t>(rng_.below(options_.max_segment_size + 8)))));
    }

    void address(Seq& out)
    {
        if (rng_.chance(70) || !afford(2))
            emit(out, Instr::constant(Value::i32(static_cast<uint32_t>(rng_.below(page_size + 8)))));
        else
            expr(out, i32);
    }

    uint32_t access_offset(ValType t)
    {
        if (t == handle)
            return rng_.chance(85) ? static_cast<uint32_t>(handle_width * rng_.below(3))
                                   : static_cast<uint32_t>(rng_.below(20));
        return rng_.chance(60) ? 0 : static_cast<uint32_t>(rng_.below(options_.max_segment_size));
    }

    void handle_operand(Seq& out)
    {
        expr(out, handle);
    }

    /// Emits `head` after generating its operands `first` and `second`.
    template <typename First, typename Second>
    void binary_operands(Seq& out, Instr head, First first, Second second)
    {
        spend();
        left_ -= 1;
        first(out);
        left_ += 1;
        second(out);
        out.push_back(std::move(head));
    }

    void expr(Seq& out, ValType t)
    {
        if (depth_ >= max_depth || !afford(2) || rng_.chance(30))
        {
            leaf(out, t);
            return;
        }
        ++depth_;
        expr_nonleaf(out, t);
        --depth_;
    }

    void expr_nonleaf(Seq& out, ValType t)
    {
        const bool integer = t == i32 || t == i64;
        for (int attempt = 0; attempt < 8; ++attempt)
        {
            switch (rng_.below(13))
            {
            case 0:  // binary operator
                if (integer && afford(3))
                {
                    static constexpr Opcode ops[] = {Opcode::add, Opcode::sub, Opcode::mul, Opcode::and_,
                        Opcode::or_, Opcode::xor_, Opcode::shl, Opcode::shr_s, Opcode::shr_u};
                    binary_operands(
                        out, Instr::typed(ops[rng_.below(std::size(ops))], t),
                        [&](Seq& o) { expr(o, t); }, [&](Seq& o) { expr(o, t); });
                    return;
                }
                if ((t == f32 || t == f64) && afford(3))
                {
                    binary_operands(
                        out, Instr::typed(Opcode::add, t), [&](Seq& o) { expr(o, t); },
                        [&](Seq& o) { expr(o, t); });
                    return;
                }
                break;
            case 1:  // comparison or eqz
                if (t == i32 && afford(3))
                {
                    static constexpr Opcode ops[] = {Opcode::eq, Opcode::ne, Opcode::lt_s, Opcode::lt_u,
                        Opcode::gt_s, Opcode::gt_u, Opcode::le_s, Opcode::le_u, Opcode::ge_s, Opcode::ge_u};
                    const auto operand = rng_.chance(50) ? i32 : i64;
                    if (rng_.chance(25))
                    {
                        spend();
                        expr(out, operand);
                        out.push_back(Instr::typed(Opcode::eqz, operand));
                        return;
                    }
                    binary_operands(
                        out, Instr::typed(ops[rng_.below(std::size(ops))], operand),
                        [&](Seq& o) { expr(o, operand); }, [&](Seq& o) { expr(o, operand); });
                    return;
                }
                break;
            case 2:  // conversions
                if (t == i32)
                {
                    spend();
                    expr(out, i64);
                    out.push_back(Instr::typed(Opcode::wrap, i64));
                    return;
                }
                if (t == i64)
                {
                    spend();
                    expr(out, i32);
                    out.push_back(Instr::typed(Opcode::extend_u, i32));
                    return;
                }
                break;
            case 3:  // linear load
                if (t != handle && shape_.has_memory)
                {
                    const bool packed = t == i32 && rng_.chance(25);
                    spend();
                    address(out);
                    out.push_back(Instr::memory(Opcode::load, t, access_offset(t), packed));
                    return;
                }
                break;
            case 4:
            case 5:  // segment load
            {
                const bool packed = t == i32 && rng_.chance(25);
                spend();
                handle_operand(out);
                out.push_back(Instr::memory(Opcode::segload, t, access_offset(t), packed));
                return;
            }
            case 6:  // block
            {
                spend();
                labels_.push_back({{t}, false});
                auto inner = body({t});
                labels_.pop_back();
                out.push_back(Instr::block_like(Opcode::block, {t}, std::move(inner)));
                return;
            }
            case 7:  // if
                if (afford(4))
                {
                    spend();
                    left_ -= 2;
                    expr(out, i32);
                    left_ += 1;
                    labels_.push_back({{t}, false});
                    auto then_body = body({t});
                    left_ += 1;
                    auto else_body = body({t});
                    labels_.pop_back();
                    out.push_back(Instr::block_like(Opcode::if_, {t}, std::move(then_body), std::move(else_body)));
                    return;
                }
                break;
            case 8:  // call
            {
                const auto fs = callees(t);
                if (fs.empty())
                    break;
                const auto f = rng_.pick(fs);
                if (!afford(call_cost(shape_.funcs[f])))
                    break;
                spend();
                exprs(out, shape_.funcs[f].params);
                out.push_back(Instr::indexed(Opcode::call, f));
                return;
            }
            case 9:  // select
                if (afford(4))
                {
                    spend();
                    left_ -= 2;
                    expr(out, t);
                    left_ += 1;
                    expr(out, t);
                    left_ += 1;
                    expr(out, i32);
                    out.push_back(Instr::simple(Opcode::select));
                    return;
                }
                break;
            case 10:  // local.tee
            {
                const auto ls = locals_of(t, true);
                if (ls.empty())
                    break;
                spend();
                expr(out, t);
                out.push_back(Instr::indexed(Opcode::local_tee, rng_.pick(ls)));
                return;
            }
            default:  // handle producers
                if (t != handle)
                    break;
                switch (rng_.below(4))
                {
                case 0:
                    spend();
                    small_i32(out);
                    out.push_back(Instr::simple(Opcode::segalloc));
                    return;
                case 1:
                case 2:
                    if (!afford(3))
                        break;
                    binary_operands(
                        out,
                        Instr::simple(rng_.chance(50) ? Opcode::handle_add
                                                      : (rng_.chance(50) ? Opcode::slice : Opcode::handle_setbounds)),
                        [&](Seq& o) { handle_operand(o); }, [&](Seq& o) { small_i32(o); });
                    return;
                default:
                    spend();
                    small_i32(out);
                    out.push_back(Instr::simple(Opcode::segalloc));
                    return;
                }
                break;
            }
        }
        leaf(out, t);
    }

    ValType any_type()
    {
        return all_val_types[rng_.below(std::size(all_val_types))];
    }

    /// Appends n drops whose cost the caller already deducted.
    void drop_all(Seq& out, size_t n)
    {
        for (size_t i = 0; i < n; ++i)
            out.push_back(Instr::simple(Opcode::drop));
    }

    /// A statement with net stack effect [] -> [] (or diverging).
    void stmt(Seq& out)
    {
        if (!afford(2) || depth_ >= max_depth)
        {
            emit(out, Instr::simple(Opcode::nop));
            return;
        }
        ++depth_;
        stmt_nonleaf(out);
        --depth_;
    }

    void stmt_nonleaf(Seq& out)
    {
        for (int attempt = 0; attempt < 8; ++attempt)
        {
            switch (rng_.below(16))
            {
            case 0:  // drop
            {
                spend();
                expr(out, any_type());
                out.push_back(Instr::simple(Opcode::drop));
                return;
            }
            case 1:  // local.set
            {
                const auto t = any_type();
                const auto ls = locals_of(t, true);
                if (ls.empty())
                    break;
                spend();
                expr(out, t);
                out.push_back(Instr::indexed(Opcode::local_set, rng_.pick(ls)));
                return;
            }
            case 2:  // global.set
            {
                const auto t = any_type();
                const auto gs = globals_of(t, true);
                if (gs.empty())
                    break;
                spend();
                expr(out, t);
                out.push_back(Instr::indexed(Opcode::global_set, rng_.pick(gs)));
                return;
            }
            case 3:  // linear store
            {
                auto t = any_type();
                if (t == handle || !shape_.has_memory || !afford(3))
                    break;
                const bool packed = t == i32 && rng_.chance(25);
                binary_operands(
                    out, Instr::memory(Opcode::store, t, access_offset(t), packed), [&](Seq& o) { address(o); },
                    [&](Seq& o) { expr(o, t); });
                return;
            }
            case 4:
            case 5:  // segment store
            {
                if (!afford(3))
                    break;
                const auto t = any_type();
                const bool packed = t == i32 && rng_.chance(25);
                binary_operands(
                    out, Instr::memory(Opcode::segstore, t, access_offset(t), packed),
                    [&](Seq& o) { handle_operand(o); }, [&](Seq& o) { expr(o, t); });
                return;
            }
            case 6:  // segfree
                spend();
                handle_operand(out);
                out.push_back(Instr::simple(Opcode::segfree));
                return;
            case 7:  // block
            {
                spend();
                labels_.push_back({{}, false});
                auto inner = body({});
                labels_.pop_back();
                out.push_back(Instr::block_like(Opcode::block, {}, std::move(inner)));
                return;
            }
            case 8:  // loop
                if (options_.terminating)
                {
                    if (counted_loop(out))
                        return;
                    break;
                }
                if (afford(3))
                {
                    spend();
                    labels_.push_back({{}, true});
                    left_ -= 2;
                    auto inner = body({});
                    left_ += 2;
                    spend();
                    expr(inner, i32);
                    inner.push_back(Instr::indexed(Opcode::br_if, 0));
                    labels_.pop_back();
                    out.push_back(Instr::block_like(Opcode::loop, {}, std::move(inner)));
                    return;
                }
                break;
            case 9:  // if
            {
                spend();
                left_ -= 1;
                labels_.push_back({{}, false});
                auto then_body = body({});
                auto else_body = rng_.chance(50) ? body({}) : Seq{};
                labels_.pop_back();
                left_ += 1;
                expr(out, i32);
                out.push_back(Instr::block_like(Opcode::if_, {}, std::move(then_body), std::move(else_body)));
                return;
            }
            case 10:  // br / br_if
            {
                if (!rng_.chance(30))
                    break;
                const auto depth = static_cast<uint32_t>(rng_.below(labels_.size()));
                const auto& label = labels_[labels_.size() - 1 - depth];
                if (label.loop && options_.terminating)
                    break;
                const auto types = label.loop ? std::vector<ValType>{} : label.types;
                const bool conditional = rng_.chance(60);
                const auto drops = conditional ? static_cast<uint32_t>(types.size()) : 0;
                const uint32_t cost = 1 + static_cast<uint32_t>(types.size()) + (conditional ? 1 : 0) + drops;
                if (!afford(cost))
                    break;
                spend();
                left_ -= drops;
                std::vector<ValType> operands = types;
                if (conditional)
                    operands.push_back(i32);
                exprs(out, operands);
                out.push_back(Instr::indexed(conditional ? Opcode::br_if : Opcode::br, depth));
                if (conditional)
                    drop_all(out, types.size());
                return;
            }
            case 11:  // return
            {
                if (!rng_.chance(20) || !afford(1 + static_cast<uint32_t>(fn_.type.results.size())))
                    break;
                spend();
                exprs(out, fn_.type.results);
                out.push_back(Instr::simple(Opcode::return_));
                return;
            }
            case 12:  // unreachable
                if (!rng_.chance(5))
                    break;
                emit(out, Instr::simple(Opcode::unreachable));
                return;
            case 13:  // call
            {
                const auto fs = callees(std::nullopt);
                if (fs.empty())
                    break;
                const auto f = rng_.pick(fs);
                const auto drops = static_cast<uint32_t>(shape_.funcs[f].results.size());
                if (!afford(call_cost(shape_.funcs[f]) + drops))
                    break;
                spend();
                left_ -= drops;
                exprs(out, shape_.funcs[f].params);
                out.push_back(Instr::indexed(Opcode::call, f));
                drop_all(out, drops);
                return;
            }
            case 14:  // call_indirect
            {
                if (!shape_.has_table || shape_.types.empty())
                    break;
                const auto type_index = static_cast<uint32_t>(rng_.below(shape_.types.size()));
                const auto& type = shape_.types[type_index];
                std::optional<uint32_t> slot;
                if (options_.terminating)
                {
                    std::vector<uint32_t> slots;
                    for (uint32_t s = 0; s < shape_.table.size(); ++s)
                        if (shape_.table[s] < self_)
                            slots.push_back(s);
                    if (slots.empty())
                        break;
                    slot = rng_.pick(slots);
                }
                const auto drops = static_cast<uint32_t>(type.results.size());
                if (!afford(2 + static_cast<uint32_t>(type.params.size()) + drops))
                    break;
                spend();
                left_ -= 1 + drops;
                exprs(out, type.params);
                left_ += 1;
                if (slot)
                    emit(out, Instr::constant(Value::i32(*slot)));
                else
                    expr(out, i32);
                out.push_back(Instr::indexed(Opcode::call_indirect, type_index));
                drop_all(out, drops);
                return;
            }
            default:
                emit(out, Instr::simple(Opcode::nop));
                return;
            }
        }
        emit(out, Instr::simple(Opcode::nop));
    }

    /// (const k) (local.set c) (loop body.. (local.get c) (const 1) (sub) (local.tee c) (br_if 0))
    bool counted_loop(Seq& out)
    {
        constexpr uint32_t overhead = 8;
        if (!afford(overhead))
            return false;
        const auto counter = static_cast<uint32_t>(locals_.size());
        locals_.push_back(i32);
        fn_.locals.push_back(i32);
        reserved_.insert(counter);
        for (uint32_t i = 0; i < overhead; ++i)
            spend();
        out.push_back(Instr::constant(Value::i32(1 + static_cast<uint32_t>(rng_.below(4)))));
        out.push_back(Instr::indexed(Opcode::local_set, counter));
        labels_.push_back({{}, true});
        auto inner = body({});
        labels_.pop_back();
        inner.push_back(Instr::indexed(Opcode::local_get, counter));
        inner.push_back(Instr::constant(Value::i32(1)));
        inner.push_back(Instr::typed(Opcode::sub, i32));
        inner.push_back(Instr::indexed(Opcode::local_tee, counter));
        inner.push_back(Instr::indexed(Opcode::br_if, 0));
        out.push_back(Instr::block_like(Opcode::loop, {}, std::move(inner)));
        return true;
    }

    Rng& rng_;
    const ModuleShape& shape_;
    const GeneratorOptions& options_;
    uint32_t self_;
    Function& fn_;
    uint32_t left_;
    uint32_t depth_ = 0;
    std::vector<ValType> locals_;
    std::set<uint32_t> reserved_;
    std::vector<LabelInfo> labels_;
};

ValType random_type(Rng& rng)
{
    return all_val_types[rng.below(std::size(all_val_types))];
}

FuncType random_func_type(Rng& rng, uint32_t max_results)
{
    FuncType t;
    const auto params = rng.below(4);
    for (uint64_t i = 0; i < params; ++i)
        t.params.push_back(random_type(rng));
    const auto results = std::min<uint64_t>(max_results, rng.chance(60) ? 1 : (rng.chance(15) ? 2 : 0));
    for (uint64_t i = 0; i < results; ++i)
        t.results.push_back(random_type(rng));
    return t;
}

void add_type(std::vector<FuncType>& types, const FuncType& t)
{
    if (std::find(types.begin(), types.end(), t) == types.end())
        types.push_back(t);
}
}  // namespace

Module generate_well_typed(uint64_t seed, uint32_t budget)
{
    return generate_well_typed(seed, budget, GeneratorOptions{});
}

Module generate_well_typed(uint64_t seed, uint32_t budget, const GeneratorOptions& options)
{
    Module m;
    m.imports = options.imports;
    if (budget == 0 && options.required_exports.empty() && options.imports.empty())
    {
        m.types.push_back(FuncType{});
        m.funcs.push_back(Function{});
        return m;
    }

    Rng rng{seed};
    ModuleShape shape;
    for (const auto& imp : m.imports)
    {
        if (imp.desc.kind == ExternKind::func)
        {
            shape.funcs.push_back(imp.desc.func);
            add_type(m.types, imp.desc.func);
        }
        else if (imp.desc.kind == ExternKind::global)
            shape.globals.push_back(imp.desc.global);
        else if (imp.desc.kind == ExternKind::memory)
            shape.has_memory = true;
    }
    const auto imported_funcs = static_cast<uint32_t>(shape.funcs.size());

    const auto extra = static_cast<uint32_t>(rng.below(4));
    const auto defined = std::max<uint32_t>(1, std::min<uint32_t>(
        static_cast<uint32_t>(options.required_exports.size()) + extra, std::max<uint32_t>(1, budget / 6)));
    const auto random_count = defined > options.required_exports.size()
                                  ? defined - static_cast<uint32_t>(options.required_exports.size())
                                  : 0;
    const auto share = budget / std::max<uint32_t>(1, random_count + static_cast<uint32_t>(options.required_exports.size()));

    // Random functions first so required exports (e.g. an attacker entry point) can call them in
    // terminating mode.
    for (uint32_t i = 0; i < random_count; ++i)
    {
        Function fn;
        fn.type = random_func_type(rng, std::min<uint32_t>(share, 2));
        const auto locals = rng.below(4);
        for (uint64_t l = 0; l < locals; ++l)
            fn.locals.push_back(random_type(rng));
        m.funcs.push_back(std::move(fn));
    }
    for (const auto& req : options.required_exports)
    {
        Function fn;
        fn.type = req.type;
        const auto locals = rng.below(4);
        for (uint64_t l = 0; l < locals; ++l)
            fn.locals.push_back(random_type(rng));
        m.funcs.push_back(std::move(fn));
    }
    for (const auto& fn : m.funcs)
    {
        shape.funcs.push_back(fn.type);
        add_type(m.types, fn.type);
    }
    if (rng.chance(30))
        add_type(m.types, random_func_type(rng, 1));

    const auto globals = rng.below(4);
    for (uint64_t i = 0; i < globals; ++i)
    {
        Global g;
        g.type = GlobalType{rng.chance(60), random_type(rng)};
        if (g.type.type == handle)
            g.init = Instr::simple(Opcode::handle_null);
        else
            g.init = Instr::constant(Value::zero(g.type.type));
        if (g.type.type == i32 || g.type.type == i64)
            g.init.value = g.type.type == i32 ? Value::i32(static_cast<uint32_t>(rng.below(100)))
                                              : Value::i64(rng.below(100));
        shape.globals.push_back(g.type);
        m.globals.push_back(std::move(g));
    }

    if (options.allow_memory && !shape.has_memory && rng.chance(50))
    {
        m.memory = Memory{1};
        shape.has_memory = true;
        const auto segments = rng.below(3);
        for (uint64_t i = 0; i < segments; ++i)
        {
            DataSegment d;
            d.offset = Instr::constant(Value::i32(static_cast<uint32_t>(rng.below(256))));
            const auto len = rng.below(17);
            for (uint64_t b = 0; b < len; ++b)
                d.bytes.push_back(static_cast<uint8_t>(rng.below(256)));
            m.data.push_back(std::move(d));
        }
    }

    if (options.allow_table && rng.chance(50))
    {
        Table t;
        const auto n = 1 + rng.below(4);
        for (uint64_t i = 0; i < n; ++i)
            t.elements.push_back(static_cast<uint32_t>(rng.below(shape.funcs.size())));
        shape.table = t.elements;
        shape.has_table = true;
        m.tables.push_back(std::move(t));
    }
    shape.types = m.types;

    for (uint32_t i = 0; i < m.funcs.size(); ++i)
    {
        auto& fn = m.funcs[i];
        const auto own = std::max<uint32_t>(share, static_cast<uint32_t>(fn.type.results.size()));
        FunctionGen gen{rng, shape, options, imported_funcs + i, fn, own};
        gen.generate();
    }

    if (options.allow_start && rng.chance(30))
    {
        std::vector<uint32_t> candidates;
        for (uint32_t i = 0; i < m.funcs.size(); ++i)
            if (m.funcs[i].type.params.empty() && m.funcs[i].type.results.empty())
                candidates.push_back(imported_funcs + i);
        if (!candidates.empty())
            m.start = rng.pick(candidates);
    }

    for (uint32_t i = 0; i < random_count; ++i)
        m.exports.push_back(Export{"func" + std::to_string(i), ExternKind::func, imported_funcs + i});
    for (uint32_t i = 0; i < options.required_exports.size(); ++i)
        m.exports.push_back(Export{options.required_exports[i].name, ExternKind::func, imported_funcs + random_count + i});
    for (uint32_t i = 0; i < m.globals.size(); ++i)
        if (rng.chance(30))
            m.exports.push_back(Export{"glob" + std::to_string(i), ExternKind::global,
                static_cast<uint32_t>(shape.globals.size() - m.globals.size()) + i});
    return m;
}
}  // namespace mswasm
