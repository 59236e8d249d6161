// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/generator.hpp"
#include "mswasm/host.hpp"
#include "mswasm/isolation.hpp"
#include "test_support.hpp"
#include <gtest/gtest.h>

namespace mswasm
{
namespace
{
using test::corpus_module;
using test::Sandbox;

// Fixed-point closure over every (segment, slot) pair, independent of the library traversal.
SegSet brute_force_reachable(const Store& store, std::span<const Value> roots)
{
    const auto usable = [&](const Handle& h) { return h.valid && store.allocator().is_live(h.id); };
    SegSet reached;
    for (const auto& v : roots)
        if (v.type() == ValType::handle && usable(v.as_handle()))
            reached.insert(v.as_handle().id);
    for (bool changed = true; changed;)
    {
        changed = false;
        for (const auto& [id, segment] : store.segments())
        {
            if (!reached.count(id))
                continue;
            for (const auto& [offset, h] : segment.slots)
                if (usable(h) && reached.insert(h.id).second)
                    changed = true;
        }
    }
    return reached;
}

TEST(Isolation, ReachabilityMatchesBruteForce)
{
    for (uint64_t seed = 0; seed < 200; ++seed)
    {
        Rng rng{seed};
        Store s;
        std::vector<Handle> handles;
        const auto count = 1 + rng.below(16);
        for (uint64_t i = 0; i < count; ++i)
            handles.push_back(s.seg_alloc(static_cast<uint32_t>(handle_width * (1 + rng.below(4)))));
        for (int edge = 0; edge < 40; ++edge)
        {
            const auto& from = rng.pick(handles);
            const auto slot = static_cast<uint32_t>(handle_width * rng.below(from.bound / handle_width));
            (void)s.seg_store(from, Value::handle(rng.pick(handles)), slot);
            if (rng.chance(10))
                (void)s.seg_store(from, Value::i32(0), slot + 4, true);
        }
        for (int i = 0; i < 3; ++i)
            if (rng.chance(50))
                (void)s.seg_free(rng.pick(handles));
        std::vector<Value> roots;
        for (int i = 0; i < 3; ++i)
            if (rng.chance(60))
                roots.push_back(Value::handle(rng.pick(handles)));
        roots.push_back(Value::i32(7));
        EXPECT_EQ(reachable(s, roots), brute_force_reachable(s, roots)) << "seed " << seed;

        const auto p = partition(s, roots);
        EXPECT_EQ(p.exported, reachable(s, roots));
        for (const auto id : s.live_ids())
            EXPECT_NE(p.exported.count(id), p.local.count(id)) << "seed " << seed << " id " << id;
    }
}

TEST(Isolation, DigestDetectsChanges)
{
    Store s;
    const auto a = s.seg_alloc(32);
    const auto b = s.seg_alloc(8);
    const auto before = digest(s, {a.id, b.id});
    EXPECT_FALSE(first_difference(before, s).has_value());
    ASSERT_TRUE(s.seg_store(b, Value::i32(1), 4));
    const auto diff = first_difference(before, s);
    ASSERT_TRUE(diff.has_value());
    EXPECT_EQ(diff->segment, b.id);
    EXPECT_EQ(diff->offset, 4u);

    const auto again = digest(s, {a.id});
    ASSERT_TRUE(s.seg_free(a));
    EXPECT_TRUE(first_difference(again, s).has_value());
}

TEST(Isolation, CorpusAttackersNeverViolate)
{
    for (const auto* attacker : {"attacker_benign.msw", "attacker_scribble.msw", "attacker_overflow.msw",
             "attacker_smuggle.msw", "attacker_free.msw", "attacker_host.msw"})
    {
        Sandbox box;
        box.add(corpus_module("vault.msw"), "vault");
        box.add(corpus_module(attacker), "attacker");
        const auto program = box.add(corpus_module("isolation.msw"));
        for (const bool paranoid : {false, true})
        {
            ExperimentOptions options;
            options.paranoid = paranoid;
            const auto verdict = run_function_experiment(
                box.store, export_function(box.store, program, "main"), {}, options);
            EXPECT_FALSE(verdict.violated()) << attacker << ": " << verdict.to_string();
            if (verdict.outcome.is_values())
            {
                EXPECT_EQ(verdict.outcome.values, std::vector<Value>{Value::i32(1)}) << attacker;
            }
        }
    }
}

TEST(Isolation, VaultSecretIsLocalToAnAttacker)
{
    Sandbox box;
    const auto vault = box.add(corpus_module("vault.msw"), "vault");
    const auto pub = box.store.globals[box.store.instances[vault].exports.at("pub").addr].value;
    const auto p = partition(box.store, std::vector<Value>{pub});
    EXPECT_EQ(p.exported, SegSet{1});
    EXPECT_EQ(p.local, SegSet{2});
}

TEST(Isolation, DetectorFlagsAWriteThatBypassesTheChecks)
{
    Sandbox box;
    const auto hidden = box.store.seg_alloc(8);
    Store* store = &box.store;
    HostFunction poke{"poke", {}, [store, hidden](HostContext&, std::span<const Value>) -> TrapOr<std::vector<Value>> {
                          // Stands in for a broken runtime writing outside what it was granted.
                          (void)store->seg_store(hidden, Value::i32(99), 0);
                          return std::vector<Value>{};
                      }};
    box.imports.add("env", "poke", {ExternKind::func, box.store.add_host_function(std::move(poke))});
    const auto id = box.add(load_module(R"((module (import "env" "poke" (func)) (func (call 0)) (export "g" (func 1))))"));
    const auto verdict = run_function_experiment(box.store, export_function(box.store, id, "g"), {});
    ASSERT_TRUE(verdict.violated()) << verdict.to_string();
    EXPECT_EQ(verdict.difference.segment, hidden.id);
    EXPECT_NE(verdict.to_json().find("violated"), std::string::npos);
}

TEST(Isolation, HostContextRefusesUngrantedHandles)
{
    Store s;
    const auto granted = s.seg_alloc(8);
    const auto other = s.seg_alloc(8);
    const std::vector<Value> args{Value::handle(granted)};
    HostContext ctx{s, args};
    EXPECT_TRUE(ctx.seg_store(granted, Value::i32(1), 0));
    EXPECT_EQ(ctx.seg_load(other, ValType::i32, 0).trap().kind, TrapKind::tag_forgery);
    const auto fresh = ctx.seg_alloc(4);
    EXPECT_TRUE(ctx.granted(fresh.id));
    EXPECT_FALSE(ctx.admit_results(std::vector<Value>{Value::handle(other)}));
}

TEST(Isolation, ModuleExperimentChecksTheStartFunction)
{
    Store store;
    ModuleExperiment experiment;
    experiment.setup = {{"vault", corpus_module("vault.msw")}};
    experiment.target = {"attacker", load_module(R"((module
        (import "vault" "pub" (global mut handle))
        (func (global.get 0) (const 7) (segstore i32 offset=4)
              (global.get 0) (const 64) (h.add) (const 1) (segstore i32))
        (start 0)))")};
    const auto result = run_module_experiment(store, experiment);
    EXPECT_EQ(result.verdict.kind, Verdict::Kind::trapped);
    EXPECT_EQ(result.verdict.outcome.trap.kind, TrapKind::spatial);
    EXPECT_FALSE(result.instance.has_value());
    EXPECT_EQ(result.verdict.partition.local, SegSet{2});
}

TEST(Isolation, ModuleExperimentRefusesMemoryAndTableImports)
{
    Store store;
    ModuleExperiment experiment;
    experiment.target = {"m", load_module(R"((module (import "x" "mem" (memory 1))))")};
    EXPECT_THROW(run_module_experiment(store, experiment), ExperimentError);
}

TEST(Isolation, ClosureFollowsImports)
{
    Sandbox box;
    const auto lib = box.add(corpus_module("lib.msw"), "lib");
    const auto main = box.add(corpus_module("main.msw"));
    EXPECT_EQ(closure_instances(box.store, export_function(box.store, main, "main")), (std::set<uint32_t>{lib, main}));
    EXPECT_EQ(closure_instances(box.store, export_function(box.store, lib, "square")), std::set<uint32_t>{lib});
}
}  // namespace
}  // namespace mswasm
