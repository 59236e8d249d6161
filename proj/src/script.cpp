// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/script.hpp"
#include "mswasm/linker.hpp"
#include "mswasm/loader.hpp"

namespace mswasm
{
namespace
{
std::string where(const SourceSpan& span)
{
    return std::to_string(span.line) + ":" + std::to_string(span.column) + ": ";
}

std::string values_text(const std::vector<Value>& values)
{
    std::string out;
    for (const auto& v : values)
        out += (out.empty() ? "" : " ") + pretty(v);
    return "(" + out + ")";
}

class Runner
{
public:
    explicit Runner(const ScriptOptions& options) : options_{options}
    {
        add_builtin_hosts(store_, imports_, options.hosts);
        if (options.arena_size != 0)
            add_physical_memory(store_, imports_, options.arena_size);
    }

    ScriptReport run(const Script& script)
    {
        for (const auto& command : script.commands)
            std::visit([this](const auto& c) { handle(c); }, command);
        return std::move(report_);
    }

private:
    void pass(const SourceSpan& span, const std::string& what)
    {
        ++report_.passed;
        report_.log.push_back(where(span) + what + " ok");
    }

    void fail(const SourceSpan& span, const std::string& message)
    {
        report_.failures.push_back(ScriptFailure{span, message});
        report_.log.push_back(where(span) + message);
    }

    void handle(const ModuleCommand& c)
    {
        try
        {
            instances_.push_back(instantiate(store_, typecheck(c.module), imports_, start_options()));
            report_.log.push_back(where(c.span) + "module " + std::to_string(instances_.size() - 1));
        }
        catch (const std::exception& e)
        {
            fail(c.span, std::string("module: ") + e.what());
        }
    }

    void handle(const RegisterCommand& c)
    {
        if (instances_.empty())
        {
            fail(c.span, "register: no module defined yet");
            return;
        }
        imports_.add_instance_exports(store_, instances_.back(), c.name);
        report_.log.push_back(where(c.span) + "register \"" + c.name + "\"");
    }

    void handle(const InvokeCommand& c)
    {
        const auto outcome = call(c.invocation);
        if (outcome)
            report_.log.push_back(where(c.invocation.span) + "invoke \"" + c.invocation.name + "\": " +
                                  outcome->to_string());
    }

    void handle(const AssertReturn& c)
    {
        const auto outcome = call(c.invocation);
        if (!outcome)
            return;
        if (outcome->is_values() && outcome->values == c.expected)
            pass(c.invocation.span, "assert_return");
        else
            fail(c.invocation.span, "assert_return: expected " + values_text(c.expected) + ", got " +
                                        outcome->to_string());
    }

    void handle(const AssertTrap& c)
    {
        const auto outcome = call(c.invocation);
        if (!outcome)
            return;
        if (outcome->is_trapped() && outcome->trap.kind == c.kind)
            pass(c.invocation.span, "assert_trap");
        else
            fail(c.invocation.span, "assert_trap: expected " + std::string(to_string(c.kind)) + ", got " +
                                        outcome->to_string());
    }

    void handle(const AssertExhaustion& c)
    {
        const auto outcome = call(c.invocation);
        if (!outcome)
            return;
        if (outcome->kind == Outcome::Kind::fuel_exhausted || outcome->kind == Outcome::Kind::resource_exhausted)
            pass(c.invocation.span, "assert_exhaustion");
        else
            fail(c.invocation.span, "assert_exhaustion: got " + outcome->to_string());
    }

    void handle(const AssertInvalid& c)
    {
        const auto result = validate_module(c.module);
        if (result.ok())
        {
            fail(c.span, "assert_invalid: module validated");
            return;
        }
        for (const auto& e : result.errors)
            if (c.code.empty() || to_string(e.code) == c.code)
            {
                pass(c.span, "assert_invalid");
                return;
            }
        fail(c.span, "assert_invalid: expected " + c.code + ", got " + result.errors.front().to_string());
    }

    void handle(const AssertUnlinkable& c)
    {
        std::shared_ptr<const TypedModule> typed;
        try
        {
            typed = typecheck(c.module);
        }
        catch (const ValidationFailure& e)
        {
            fail(c.span, std::string("assert_unlinkable: ") + e.what());
            return;
        }
        try
        {
            instances_.push_back(instantiate(store_, typed, imports_, start_options()));
            fail(c.span, "assert_unlinkable: module linked");
        }
        catch (const LinkError&)
        {
            pass(c.span, "assert_unlinkable");
        }
        catch (const StartFailure& e)
        {
            fail(c.span, std::string("assert_unlinkable: ") + e.what());
        }
    }

    std::optional<Outcome> call(const Invocation& inv)
    {
        const auto index = inv.module.value_or(instances_.empty() ? 0 : static_cast<uint32_t>(instances_.size() - 1));
        if (index >= instances_.size())
        {
            fail(inv.span, "invoke: no module " + std::to_string(index));
            return std::nullopt;
        }
        InterpreterOptions io;
        io.fuel = options_.fuel;
        try
        {
            return invoke(store_, instances_[index], inv.name, inv.args, io);
        }
        catch (const InvokeError& e)
        {
            fail(inv.span, std::string("invoke: ") + e.what());
            return std::nullopt;
        }
    }

    InstantiateOptions start_options() const
    {
        InstantiateOptions o;
        o.start.fuel = options_.fuel;
        return o;
    }

    const ScriptOptions& options_;
    Store store_;
    ImportObject imports_;
    std::vector<uint32_t> instances_;
    ScriptReport report_;
};
}  // namespace

ScriptReport run_script(const Script& script, const ScriptOptions& options)
{
    return Runner{options}.run(script);
}
}  // namespace mswasm
