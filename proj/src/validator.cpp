// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/validator.hpp"
#include <nlohmann/json.hpp>
#include <set>

namespace mswasm
{
namespace
{
/// Stack-machine type checker following the WebAssembly validation algorithm, extended with
/// the handle type. Recovers after an error by treating the rest of the enclosing block as
/// unreachable, so one pass reports every independent error.
class BodyChecker
{
public:
    BodyChecker(TypingContext ctx, std::optional<uint32_t> func,
        std::unordered_map<const Instr*, StackShape>* shapes)
      : ctx_{std::move(ctx)}, func_{func}, shapes_{shapes}
    {}

    std::vector<TypeError> check(const std::vector<Instr>& body, const std::vector<ValType>& results)
    {
        ctx_.labels.push_back(results);
        frames_.push_back({results, 0, false, false});
        check_sequence(body);
        end_frame();
        ctx_.labels.pop_back();
        return std::move(errors_);
    }

private:
    struct Frame
    {
        std::vector<ValType> results;
        size_t height = 0;
        bool unreachable = false;
        bool dead = false;
    };

    using Slot = std::optional<ValType>;  // nullopt: unknown (polymorphic stack)

    void error(TypeErrorCode code, std::string message, uint32_t at)
    {
        errors_.push_back({func_, at, code, std::move(message)});
        auto& f = frames_.back();
        vals_.resize(f.height);
        f.unreachable = true;
    }

    Slot pop()
    {
        auto& f = frames_.back();
        if (vals_.size() == f.height)
        {
            if (f.unreachable)
                return std::nullopt;
            throw SignatureError{TypeErrorCode::stack_underflow, "stack underflow"};
        }
        const auto v = vals_.back();
        vals_.pop_back();
        return v;
    }

    Slot pop_expect(ValType expected, const Instr* instr = nullptr)
    {
        const auto actual = pop();
        if (actual && *actual != expected)
        {
            if (instr && instr->op == Opcode::store && *actual == ValType::handle)
                throw SignatureError{TypeErrorCode::handle_in_linear_memory,
                    "a handle cannot be stored in linear memory"};
            throw SignatureError{TypeErrorCode::type_mismatch,
                "expected " + std::string(to_string(expected)) + ", got " +
                    std::string(to_string(*actual))};
        }
        return actual ? actual : Slot{expected};
    }

    void pop_all(const std::vector<ValType>& types, const Instr* instr = nullptr)
    {
        for (auto it = types.rbegin(); it != types.rend(); ++it)
            pop_expect(*it, instr);
    }

    void push_all(const std::vector<ValType>& types)
    {
        for (const auto t : types)
            vals_.push_back(t);
    }

    void record_shape(const Instr& instr)
    {
        const auto& f = frames_.back();
        if (!shapes_ || f.unreachable || f.dead)
            return;
        StackShape shape;
        shape.reserve(vals_.size());
        for (const auto& v : vals_)
        {
            if (!v)
                return;
            shape.push_back(*v);
        }
        (*shapes_)[&instr] = std::move(shape);
    }

    void check_sequence(const std::vector<Instr>& body)
    {
        for (const auto& instr : body)
        {
            const auto my_offset = offset_++;
            record_shape(instr);
            try
            {
                check_instr(instr, my_offset);
            }
            catch (const SignatureError& e)
            {
                error(e.code(), e.what(), my_offset);
            }
        }
    }

    void enter_block(std::vector<ValType> label_types, std::vector<ValType> results)
    {
        const bool dead = frames_.back().dead || frames_.back().unreachable;
        ctx_.labels.push_back(std::move(label_types));
        frames_.push_back({std::move(results), vals_.size(), false, dead});
    }

    /// Checks the block's results, reports leftovers, and pops the frame (keeping its results).
    void end_frame()
    {
        auto& f = frames_.back();
        try
        {
            pop_all(f.results);
            if (vals_.size() != f.height)
                throw SignatureError{TypeErrorCode::trailing_values,
                    std::to_string(vals_.size() - f.height) + " value(s) left on the stack at block end"};
        }
        catch (const SignatureError& e)
        {
            errors_.push_back({func_, offset_ == 0 ? 0 : offset_ - 1, e.code(), e.what()});
        }
        vals_.resize(f.height);
        const auto results = f.results;
        frames_.pop_back();
        if (!frames_.empty())
            push_all(results);
    }

    void check_instr(const Instr& instr, uint32_t)
    {
        switch (instr.op)
        {
        case Opcode::block:
        case Opcode::loop:
        {
            auto label_types = instr.op == Opcode::loop ? std::vector<ValType>{} : instr.results;
            enter_block(std::move(label_types), instr.results);
            check_sequence(instr.body);
            end_frame();
            ctx_.labels.pop_back();
            return;
        }
        case Opcode::if_:
        {
            pop_expect(ValType::i32);
            enter_block(instr.results, instr.results);
            const auto height = vals_.size();
            check_sequence(instr.body);
            // Check the then-arm results without popping the frame.
            {
                auto& f = frames_.back();
                try
                {
                    pop_all(f.results);
                    if (vals_.size() != f.height)
                        throw SignatureError{TypeErrorCode::trailing_values,
                            "value(s) left on the stack at end of then"};
                }
                catch (const SignatureError& e)
                {
                    errors_.push_back({func_, offset_ == 0 ? 0 : offset_ - 1, e.code(), e.what()});
                }
                vals_.resize(height);
                f.unreachable = false;
            }
            if (instr.else_body.empty() && !instr.results.empty())
            {
                errors_.push_back({func_, offset_ == 0 ? 0 : offset_ - 1,
                    TypeErrorCode::type_mismatch, "if with results requires an else arm"});
                vals_.resize(frames_.back().height);
                frames_.back().unreachable = true;
            }
            check_sequence(instr.else_body);
            end_frame();
            ctx_.labels.pop_back();
            return;
        }
        case Opcode::drop:
            pop();
            return;
        case Opcode::select:
        {
            pop_expect(ValType::i32);
            const auto a = pop();
            const auto b = pop();
            if (a && b && *a != *b)
                throw SignatureError{TypeErrorCode::type_mismatch, "select operands differ"};
            vals_.push_back(a ? a : b);
            return;
        }
        default:
            break;
        }

        const auto sig = instruction_signature(instr, ctx_);
        pop_all(sig.inputs, &instr);
        push_all(sig.outputs);
        if (sig.diverges)
        {
            vals_.resize(frames_.back().height);
            frames_.back().unreachable = true;
        }
    }

    TypingContext ctx_;
    std::optional<uint32_t> func_;
    std::unordered_map<const Instr*, StackShape>* shapes_;
    std::vector<Slot> vals_;
    std::vector<Frame> frames_;
    std::vector<TypeError> errors_;
    uint32_t offset_ = 0;
};

void module_error(std::vector<TypeError>& errors, TypeErrorCode code, std::string message)
{
    errors.push_back({std::nullopt, 0, code, std::move(message)});
}

/// Constant initializer check for globals and data offsets.
void check_initializer(const Module& m, const Instr& init, ValType expected, std::string_view what,
    std::vector<TypeError>& errors)
{
    const auto imported_globals = m.imported_count(ExternKind::global);
    std::optional<ValType> produced;
    if (init.op == Opcode::const_ && expected != ValType::handle)
        produced = init.value.type();
    else if (init.op == Opcode::handle_null)
        produced = ValType::handle;
    else if (init.op == Opcode::global_get && init.index < imported_globals)
        produced = m.global_type(init.index)->type;

    if (!produced)
        module_error(errors, TypeErrorCode::invalid_initializer,
            std::string(what) + ": initializer must be " +
                (expected == ValType::handle ? "h.null or global.get of an imported global"
                                             : "const or global.get of an imported global"));
    else if (*produced != expected)
        module_error(errors, TypeErrorCode::type_mismatch,
            std::string(what) + ": initializer has type " + std::string(to_string(*produced)) +
                ", expected " + std::string(to_string(expected)));
}

void check_module_fields(const Module& m, std::vector<TypeError>& errors)
{
    if (m.imported_count(ExternKind::memory) + (m.memory ? 1u : 0u) > 1)
        module_error(errors, TypeErrorCode::multiple_memories, "at most one linear memory is allowed");

    for (size_t i = 0; i < m.globals.size(); ++i)
        check_initializer(m, m.globals[i].init, m.globals[i].type.type,
            "global " + std::to_string(m.imported_count(ExternKind::global) + i), errors);

    for (size_t i = 0; i < m.data.size(); ++i)
    {
        if (!m.has_memory())
            module_error(errors, TypeErrorCode::missing_memory, "data segment without a memory");
        check_initializer(m, m.data[i].offset, ValType::i32, "data " + std::to_string(i), errors);
    }

    const auto funcs = m.func_count();
    for (size_t t = 0; t < m.tables.size(); ++t)
        for (const auto e : m.tables[t].elements)
            if (e >= funcs)
                module_error(errors, TypeErrorCode::unknown_index,
                    "table " + std::to_string(t) + " references unknown function " + std::to_string(e));

    std::set<std::string> names;
    for (const auto& e : m.exports)
    {
        if (!names.insert(e.name).second)
            module_error(errors, TypeErrorCode::duplicate_export, "duplicate export \"" + e.name + "\"");
        uint32_t limit = 0;
        switch (e.kind)
        {
        case ExternKind::func:
            limit = funcs;
            break;
        case ExternKind::global:
            limit = m.global_count();
            break;
        case ExternKind::table:
            limit = m.table_count();
            break;
        case ExternKind::memory:
            limit = m.has_memory() ? 1 : 0;
            break;
        }
        if (e.index >= limit)
            module_error(errors, TypeErrorCode::unknown_index,
                "export \"" + e.name + "\" references unknown " + std::string(to_string(e.kind)) +
                    " " + std::to_string(e.index));
    }

    if (m.start)
    {
        const auto* type = m.func_type(*m.start);
        if (!type)
            module_error(errors, TypeErrorCode::unknown_index,
                "unknown start function " + std::to_string(*m.start));
        else if (!type->params.empty() || !type->results.empty())
            module_error(errors, TypeErrorCode::start_signature,
                "start function must have type [] -> [], has " + to_string(*type));
    }
}
}  // namespace

std::string TypeError::to_json() const
{
    nlohmann::json j;
    j["func"] = func ? nlohmann::json(*func) : nlohmann::json(nullptr);
    j["offset"] = offset;
    j["code"] = std::string(mswasm::to_string(code));
    j["message"] = message;
    return j.dump();
}

std::string TypeError::to_string() const
{
    std::string where = func ? "func " + std::to_string(*func) + " @" + std::to_string(offset) : "module";
    return where + ": " + std::string(mswasm::to_string(code)) + ": " + message;
}

TypedModule::TypedModule(
    std::shared_ptr<const Module> module, std::unordered_map<const Instr*, StackShape> shapes)
  : module_{std::move(module)}, shapes_{std::move(shapes)}
{}

const StackShape* TypedModule::shape_before(const Instr& instr) const noexcept
{
    const auto it = shapes_.find(&instr);
    return it != shapes_.end() ? &it->second : nullptr;
}

ValidationResult validate_module(std::shared_ptr<const Module> module)
{
    const auto& m = *module;
    std::vector<TypeError> errors;
    check_module_fields(m, errors);

    std::unordered_map<const Instr*, StackShape> shapes;
    const auto imported_funcs = m.imported_count(ExternKind::func);
    for (size_t i = 0; i < m.funcs.size(); ++i)
    {
        const auto index = static_cast<uint32_t>(imported_funcs + i);
        BodyChecker checker{TypingContext::for_function(m, i), index, &shapes};
        auto errs = checker.check(m.funcs[i].body, m.funcs[i].type.results);
        errors.insert(errors.end(), errs.begin(), errs.end());
    }

    ValidationResult result;
    if (errors.empty())
        result.typed.emplace(std::move(module), std::move(shapes));
    result.errors = std::move(errors);
    return result;
}

ValidationResult validate_module(Module module)
{
    return validate_module(std::make_shared<const Module>(std::move(module)));
}

std::vector<TypeError> check_body(
    const TypingContext& ctx, const std::vector<Instr>& body, const std::vector<ValType>& expected)
{
    auto local_ctx = ctx;
    if (!local_ctx.return_type)
        local_ctx.return_type = expected;
    return BodyChecker{std::move(local_ctx), std::nullopt, nullptr}.check(body, expected);
}
}  // namespace mswasm
