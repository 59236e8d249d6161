// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/interpreter.hpp"
#include "mswasm/linker.hpp"
#include "test_support.hpp"
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <filesystem>

namespace mswasm
{
namespace
{
using test::corpus_module;
using test::Sandbox;

// Reference implementations written directly in C++.
uint32_t fib_oracle(uint32_t n)
{
    uint32_t a = 0;
    uint32_t b = 1;
    for (uint32_t i = 0; i < n; ++i)
    {
        const auto next = a + b;
        a = b;
        b = next;
    }
    return a;
}

uint32_t sum_oracle(uint32_t n)
{
    uint32_t total = 0;
    for (uint32_t i = 1; i <= n; ++i)
        total += i;
    return total;
}

uint32_t matmul_oracle(uint32_t n)
{
    uint32_t total = 0;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < n; ++j)
            for (uint32_t k = 0; k < n; ++k)
                total += (i + 1) * (j + 1);
    return total;
}

uint32_t bytecopy_oracle(uint32_t n)
{
    uint32_t total = 0;
    for (uint32_t i = 0; i < n; ++i)
        total += i & 0xffu;
    return total;
}

Value parse_arg(const std::string& text)
{
    const auto colon = text.find(':');
    const auto type = text.substr(0, colon);
    const auto number = std::stoll(text.substr(colon + 1));
    if (type == "i64")
        return Value::i64(static_cast<uint64_t>(number));
    return Value::i32(static_cast<uint32_t>(number));
}

std::string describe(const Outcome& o)
{
    switch (o.kind)
    {
    case Outcome::Kind::values:
    {
        std::string s = "values";
        for (const auto& v : o.values)
            s += " i32:" + std::to_string(static_cast<int32_t>(v.as_i32()));
        return s;
    }
    case Outcome::Kind::trapped:
        return "trapped " + std::string(to_string(o.trap.kind));
    default:
        return std::string(to_string(o.kind));
    }
}

struct ManifestEntry
{
    std::string program;
    std::vector<std::string> links;
    std::string invoke;
    std::vector<Value> args;
    std::string expect;
    uint64_t fuel = default_fuel;
};

std::vector<ManifestEntry> load_manifest()
{
    std::vector<ManifestEntry> entries;
    for (const auto& j : nlohmann::json::parse(test::corpus_text("manifest.json")))
    {
        ManifestEntry e;
        e.program = j.at("program");
        e.links = j.value("links", std::vector<std::string>{});
        e.invoke = j.at("invoke");
        for (const auto& a : j.at("args"))
            e.args.push_back(parse_arg(a));
        e.expect = j.at("expect");
        e.fuel = j.value("fuel", default_fuel);
        entries.push_back(std::move(e));
    }
    return entries;
}

bool imports_physical_memory(const TypedModule& m)
{
    for (const auto& i : m.module().imports)
        if (i.name == physical_memory_name)
            return true;
    return false;
}

Outcome run_entry(const ManifestEntry& e)
{
    Sandbox box;
    std::vector<NamedModule> chain;
    for (const auto& link : e.links)
    {
        const auto eq = link.find('=');
        const auto file = eq == std::string::npos ? link : link.substr(eq + 1);
        const auto name = eq == std::string::npos ? std::filesystem::path(file).stem().string() : link.substr(0, eq);
        chain.push_back({name, corpus_module(file)});
    }
    chain.push_back({"main", corpus_module(e.program)});
    for (const auto& m : chain)
        if (imports_physical_memory(*m.module))
            add_physical_memory(box.store, box.imports, default_arena_size);
    const auto ids = link_chain(box.store, chain, box.imports);
    return box.call(ids.back(), e.invoke, e.args, e.fuel);
}

TEST(Interpreter, ManifestExpectations)
{
    const auto entries = load_manifest();
    ASSERT_GE(entries.size(), 30u);
    for (const auto& e : entries)
        EXPECT_EQ(describe(run_entry(e)), e.expect) << e.program << " " << e.invoke;
}

TEST(Interpreter, NumericProgramsMatchOracles)
{
    Sandbox box;
    const auto fib = box.add(corpus_module("fib.msw"));
    const auto sum = box.add(corpus_module("sum_array.msw"));
    const auto matmul = box.add(corpus_module("matmul.msw"));
    const auto bytecopy = box.add(corpus_module("bytecopy.msw"));
    const auto list = box.add(corpus_module("linked_list.msw"));
    for (uint32_t n = 0; n <= 15; ++n)
    {
        EXPECT_EQ(box.call(fib, "fib", {Value::i32(n)}).values, std::vector<Value>{Value::i32(fib_oracle(n))}) << n;
        EXPECT_EQ(box.call(sum, "sum", {Value::i32(n)}).values, std::vector<Value>{Value::i32(sum_oracle(n))}) << n;
        EXPECT_EQ(box.call(matmul, "matmul", {Value::i32(n)}).values, std::vector<Value>{Value::i32(matmul_oracle(n))})
            << n;
        EXPECT_EQ(box.call(list, "sum", {Value::i32(n)}).values, std::vector<Value>{Value::i32(sum_oracle(n))}) << n;
    }
    for (const uint32_t n : {0u, 1u, 255u, 256u, 300u})
        EXPECT_EQ(box.call(bytecopy, "bytecopy", {Value::i32(n)}).values,
            std::vector<Value>{Value::i32(bytecopy_oracle(n))})
            << n;
}

TEST(Interpreter, HeartbeatTrapsExactlyWhenTheClaimExceedsThePayload)
{
    Sandbox box;
    const auto hb = box.add(corpus_module("heartbleed.msw"));
    for (uint32_t payload = 1; payload <= 8; ++payload)
        for (uint32_t claimed = 1; claimed <= 12; ++claimed)
        {
            const auto o = box.call(hb, "heartbeat", {Value::i32(payload), Value::i32(claimed)});
            if (claimed <= payload)
            {
                EXPECT_EQ(describe(o), "values i32:65") << payload << "/" << claimed;
            }
            else
            {
                EXPECT_EQ(describe(o), "trapped spatial") << payload << "/" << claimed;
            }
        }
}

TEST(Interpreter, FuelRunsOut)
{
    Sandbox box;
    const auto spin = box.add(corpus_module("spin.msw"));
    const auto o = box.call(spin, "main", {}, 500);
    EXPECT_EQ(o.kind, Outcome::Kind::fuel_exhausted);
    EXPECT_EQ(o.exit_code(), 4);
}

TEST(Interpreter, DeepRecursionIsResourceExhausted)
{
    Sandbox box;
    const auto id = box.add(load_module("(module (func (call 0)) (export \"f\" (func 0)))"));
    InterpreterOptions options;
    options.max_call_depth = 200;
    const auto o = invoke(box.store, id, "f", {}, options);
    EXPECT_EQ(o.kind, Outcome::Kind::resource_exhausted);
    EXPECT_EQ(o.exit_code(), 1);
}

TEST(Interpreter, OutcomeExitCodes)
{
    EXPECT_EQ(Outcome::returned({}).exit_code(), 0);
    EXPECT_EQ(Outcome::trapped({TrapKind::spatial, {}}).exit_code(), 3);
    EXPECT_EQ(Outcome::stuck("x").exit_code(), 5);
    EXPECT_TRUE(Outcome::trapped({TrapKind::spatial, "a"}).same_as(Outcome::trapped({TrapKind::spatial, "b"})));
    EXPECT_FALSE(Outcome::returned({Value::i32(1)}).same_as(Outcome::returned({Value::i32(2)})));
}

TEST(Interpreter, BadInvocationsThrow)
{
    Sandbox box;
    const auto fib = box.add(corpus_module("fib.msw"));
    EXPECT_THROW(box.call(fib, "nope"), InvokeError);
    EXPECT_THROW(box.call(fib, "fib", {}), InvokeError);
    EXPECT_THROW(box.call(fib, "fib", {Value::i64(1)}), InvokeError);
}

TEST(Interpreter, ControlFlow)
{
    Sandbox box;
    const auto id = box.add(load_module(R"((module
        (func (param i32) (result i32)
          (block (result i32)
            (const 7)
            (local.get 0) (br_if 0)
            (drop) (const 9)))
        (func (param i32) (result i32) (local i32)
          (loop
            (local.get 1) (const 1) (add i32) (local.set 1)
            (local.get 1) (local.get 0) (lt_u i32) (br_if 0))
          (local.get 1))
        (func (param i32 i32 i32) (result i32) (local.get 0) (local.get 1) (local.get 2) (select))
        (export "brif" (func 0)) (export "count" (func 1)) (export "sel" (func 2))))"));
    EXPECT_EQ(box.call(id, "brif", {Value::i32(1)}).values, std::vector<Value>{Value::i32(7)});
    EXPECT_EQ(box.call(id, "brif", {Value::i32(0)}).values, std::vector<Value>{Value::i32(9)});
    EXPECT_EQ(box.call(id, "count", {Value::i32(5)}).values, std::vector<Value>{Value::i32(5)});
    EXPECT_EQ(box.call(id, "sel", {Value::i32(1), Value::i32(2), Value::i32(0)}).values,
        std::vector<Value>{Value::i32(2)});
}

TEST(Interpreter, SteppingExposesTheConfiguration)
{
    Sandbox box;
    const auto fib = box.add(corpus_module("fib.msw"));
    Config config{box.store, export_function(box.store, fib, "fib"), {Value::i32(3)}};
    size_t steps = 0;
    size_t max_frames = 0;
    std::optional<Outcome> outcome;
    while (!(outcome = config.step()))
    {
        ++steps;
        max_frames = std::max(max_frames, config.frames().size());
    }
    EXPECT_GT(steps, 10u);
    EXPECT_EQ(max_frames, 3u);
    EXPECT_EQ(outcome->values, std::vector<Value>{Value::i32(2)});
}

class CountingObserver : public ExecutionObserver
{
public:
    void on_call(const Config&, uint32_t, std::span<const Value>) override { ++calls; }
    void on_return(const Config&, uint32_t, std::span<const Value>) override { ++returns; }
    void after_step(const Config&) override { ++steps; }
    void on_finish(const Config&, const Outcome& o) override { finished = o.kind; }

    size_t calls = 0;
    size_t returns = 0;
    size_t steps = 0;
    std::optional<Outcome::Kind> finished;
};

TEST(Interpreter, ObserverSeesCallsAndReturns)
{
    Sandbox box;
    const auto fib = box.add(corpus_module("fib.msw"));
    CountingObserver observer;
    InterpreterOptions options;
    options.observer = &observer;
    ASSERT_TRUE(invoke(box.store, fib, "fib", {Value::i32(5)}, options).is_values());
    // fib(5) makes 15 calls in total, counting the entry.
    EXPECT_EQ(observer.calls, 15u);
    EXPECT_EQ(observer.returns, observer.calls);
    EXPECT_GT(observer.steps, 0u);
    EXPECT_EQ(observer.finished, Outcome::Kind::values);
}

TEST(Interpreter, TraceListsMemoryEvents)
{
    Sandbox box;
    const auto id = box.add(corpus_module("sum_array.msw"));
    const auto [outcome, trace] = invoke_with_trace(box.store, id, "sum", {Value::i32(3)});
    ASSERT_TRUE(outcome.is_values());
    ASSERT_EQ(trace.size(), 8u);
    EXPECT_EQ(trace.front().kind, AccessKind::alloc);
    EXPECT_EQ(trace.front().width, 12u);
    EXPECT_EQ(trace[1].kind, AccessKind::segstore);
    EXPECT_EQ(trace.back().kind, AccessKind::free);
}

TEST(Interpreter, ShapeCheckingAcceptsTheCorpus)
{
    // Sandbox::call enables shape checking; a mismatch would end the run as stuck.
    for (const auto& e : load_manifest())
        EXPECT_FALSE(run_entry(e).is_stuck()) << e.program;
}
}  // namespace
}  // namespace mswasm
