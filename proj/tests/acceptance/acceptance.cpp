// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero if any fails.

#include "mswasm/campaign.hpp"
#include "mswasm/generator.hpp"
#include "mswasm/interpreter.hpp"
#include "mswasm/isolation.hpp"
#include "mswasm/linker.hpp"
#include "mswasm/loader.hpp"
#include "mswasm/store.hpp"
#include "mswasm/text.hpp"
#include <fmt/core.h>
#include <chrono>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace mswasm
{
namespace
{
struct Result
{
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

unsigned worker_threads()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

Result never_stuck()
{
    NeverStuckOptions options;
    options.cases = 1000;
    options.fuel = 100'000;
    options.seed = 1;
    options.threads = worker_threads();
    const auto start = Clock::now();
    const auto report = run_never_stuck_campaign(options);
    const auto elapsed = seconds_since(start);
    const bool pass = report.modules == 1000 && report.invalid == 0 && report.outcomes.stuck == 0 &&
                      report.failures.empty() && elapsed < 120;
    return {pass, fmt::format("{} modules, {} invocations, {} stuck, {} invalid, {:.1f}s", report.modules,
                      report.outcomes.total(), report.outcomes.stuck, report.invalid, elapsed)};
}

Result isolation_campaign()
{
    IsolationCampaignOptions options;
    options.functions = 200;
    options.modules = 50;
    options.seed = 1;
    options.threads = worker_threads();
    options.example = load_module(isolation_example_text());
    options.victim = load_module(victim_text());
    const auto start = Clock::now();
    const auto report = run_isolation_campaign(options);
    const auto elapsed = seconds_since(start);
    const bool pass = report.runs == 250 && report.violated == 0 && report.returned_zero == 0 && report.other == 0 &&
                      report.failures.empty() && report.returned_one + report.trapped == report.runs && elapsed < 120;
    return {pass, fmt::format("{} runs: {} returned 1, {} trapped, {} returned 0, {} other, {} violated, {:.1f}s",
                      report.runs, report.returned_one, report.trapped, report.returned_zero, report.other,
                      report.violated, elapsed)};
}

// Transitive closure by repeated relaxation over every stored slot.
SegSet closure_oracle(const Store& store, const std::vector<Value>& roots)
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
            if (reached.count(id))
                for (const auto& [offset, h] : segment.slots)
                    changed |= usable(h) && reached.insert(h.id).second;
    }
    return reached;
}

Result reachability()
{
    size_t agree = 0;
    for (uint64_t seed = 0; seed < 500; ++seed)
    {
        Rng rng{seed * 7919 + 13};
        Store s;
        std::vector<Handle> handles;
        const auto segments = 1 + rng.below(16);
        for (uint64_t i = 0; i < segments; ++i)
            handles.push_back(s.seg_alloc(static_cast<uint32_t>(handle_width * (1 + rng.below(4)))));
        const auto edges = rng.below(3 * segments + 1);
        for (uint64_t e = 0; e < edges; ++e)
        {
            const auto& from = rng.pick(handles);
            const auto slot = static_cast<uint32_t>(handle_width * rng.below(from.bound / handle_width));
            (void)s.seg_store(from, Value::handle(rng.pick(handles)), slot);
            if (rng.chance(10))
                (void)s.seg_store(from, Value::i32(1), slot + static_cast<uint32_t>(rng.below(handle_width)), true);
        }
        for (auto& h : handles)
            if (rng.chance(10))
                (void)s.seg_free(h);
        std::vector<Value> roots;
        for (uint64_t r = rng.below(4); r > 0; --r)
            roots.push_back(Value::handle(rng.pick(handles)));
        if (rng.chance(20))
            roots.push_back(Value::i32(3));
        if (reachable(s, roots) == closure_oracle(s, roots))
            ++agree;
    }
    return {agree == 500, fmt::format("{}/500 stores agree with the brute-force closure", agree)};
}

struct AccessShape
{
    uint32_t width;
    ValType type;
    bool packed;
};

constexpr AccessShape access_kinds[] = {
    {1, ValType::i32, true}, {4, ValType::i32, false}, {8, ValType::i64, false}, {16, ValType::handle, false}};

Result spatial()
{
    size_t checked = 0;
    size_t wrong = 0;
    std::string first;
    const auto check = [&](Store& s, const Handle& h, int64_t a, const AccessShape& k, uint32_t static_offset) {
        const bool inside = a >= 0 && a + k.width <= h.bound;
        // Handle accesses also need alignment; the range predicate is checked on its own.
        const auto predicate = s.check_access(Store::handle_add(h, static_cast<int32_t>(a - static_offset)),
            static_offset, k.width, false);
        bool ok = predicate.has_value() != inside && (inside || predicate->kind == TrapKind::spatial);
        if (k.type != ValType::handle || a % handle_width == 0)
        {
            const auto loaded = s.seg_load(Store::handle_add(h, static_cast<int32_t>(a - static_offset)), k.type,
                static_offset, k.packed);
            ok = ok && loaded.ok() == inside && (inside || loaded.trap().kind == TrapKind::spatial);
        }
        ++checked;
        if (!ok && wrong++ == 0)
            first = fmt::format("width {} bound {} a {}", k.width, h.bound, a);
    };

    for (const auto& k : access_kinds)
        for (uint32_t bound = 0; bound <= 64; ++bound)
        {
            Store s;
            const auto h = s.seg_alloc(bound);
            for (int64_t a = -int64_t{k.width} - 2; a <= bound + 2; ++a)
            {
                check(s, h, a, k, 0);
                if (a >= 0)
                    check(s, h, a, k, static_cast<uint32_t>(a / 2));
            }
        }

    Rng rng{99};
    for (int i = 0; i < 5000; ++i)
    {
        const auto& k = access_kinds[rng.below(4)];
        Store s;
        const auto bound = static_cast<uint32_t>(rng.below(1u << 16));
        const auto h = s.seg_alloc(bound);
        const int64_t a = static_cast<int64_t>(bound) - k.width + static_cast<int64_t>(rng.below(5)) - 2;
        check(s, h, a, k, 0);
        check(s, h, static_cast<int64_t>(rng.below(bound + 8)) - 4, k, 0);
    }
    return {wrong == 0, fmt::format("{} accesses, {} disagree with 0 <= a && a + w <= bound{}", checked, wrong,
                            wrong ? " (first: " + first + ")" : "")};
}

Result temporal()
{
    size_t interleavings_ok = 0;
    for (uint64_t seed = 0; seed < 100; ++seed)
    {
        Rng rng{seed + 1000};
        Store s;
        std::vector<Handle> handles;
        std::set<uint32_t> freed;
        bool ok = true;
        for (int step = 0; step < 200 && ok; ++step)
        {
            const auto op = handles.empty() ? 0 : rng.below(5);
            if (op == 0)
            {
                handles.push_back(s.seg_alloc(16));
                continue;
            }
            const auto& h = rng.pick(handles);
            const bool dead = freed.count(h.id) != 0;
            const auto expect = [&](const auto& r) {
                ok = ok && (dead ? !r.ok() && r.trap().kind == TrapKind::temporal : r.ok());
            };
            if (op == 1)
            {
                const auto r = s.seg_free(h);
                expect(r);
                freed.insert(h.id);
            }
            else if (op == 2)
                expect(s.seg_load(h, ValType::i32, 4));
            else if (op == 3)
                expect(s.seg_store(h, Value::i64(5), 8));
            else
                expect(s.seg_load(h, ValType::handle, 0));
        }
        interleavings_ok += ok;
    }

    Store s;
    uint32_t previous = 0;
    bool monotone = true;
    for (int i = 0; i < 100'000; ++i)
    {
        const auto h = s.seg_alloc(8);
        monotone = monotone && h.id > previous;
        previous = h.id;
        monotone = monotone && s.seg_free(h).ok();
    }
    return {interleavings_ok == 100 && monotone,
        fmt::format("{}/100 interleavings trap temporal exactly on freed ids; ids {} across 100000 cycles",
            interleavings_ok, monotone ? "never reused" : "REUSED")};
}

Result forgery()
{
    size_t perturbations = 0;
    size_t perturbation_failures = 0;
    for (uint32_t byte = 0; byte < handle_width; ++byte)
        for (const uint32_t value : {0u, 1u, 0x7fu, 0xffu})
        {
            Store s;
            const auto frame = s.seg_alloc(64);
            const auto target = s.seg_alloc(32);
            (void)s.seg_store(frame, Value::handle(Store::handle_add(target, 4)), 16);
            const auto original = serialize_handle(Store::handle_add(target, 4));
            const auto write = s.seg_store(frame, Value::i32(value == 0xffu ? original[byte] : value), 16 + byte, true);
            const auto reloaded = s.seg_load(frame, ValType::handle, 16);
            bool ok = write.ok() && reloaded.ok() && !reloaded.value().as_handle().valid;
            if (ok)
            {
                const auto use = s.seg_load(reloaded.value().as_handle(), ValType::i32, 0);
                ok = !use.ok() && use.trap().kind == TrapKind::invalid_handle;
            }
            ++perturbations;
            perturbation_failures += !ok;
        }

    // Every (id, base, bound) produced by seg_alloc or setbounds, recorded independently.
    Store s;
    std::set<std::tuple<uint32_t, uint32_t, uint32_t>> lineage;
    std::vector<Handle> live;
    for (const uint32_t size : {16u, 16u, 32u, 48u})
    {
        live.push_back(s.seg_alloc(size));
        lineage.insert({live.back().id, 0, size});
    }
    const auto narrowed = s.handle_setbounds(Store::handle_add(live[3], 16), 16).value();
    live.push_back(narrowed);
    lineage.insert({narrowed.id, narrowed.base, narrowed.bound});

    size_t mutations = 0;
    size_t mutation_failures = 0;
    const auto try_all = [&](const Handle& m) {
        for (const auto& k : access_kinds)
            for (uint32_t off = 0; off < 64; off += (k.type == ValType::handle ? handle_width : 1))
                if (!s.check_access(m, off, k.width, k.type == ValType::handle))
                    return true;
        return false;
    };
    const std::vector<int64_t> deltas = {-17, -16, -1, 1, 4, 16, 17, 1 << 20};
    for (const auto& h : live)
    {
        std::vector<Handle> mutants;
        auto flip = h;
        flip.valid = false;
        mutants.push_back(flip);
        for (const auto d : deltas)
        {
            auto m = h;
            m.base = static_cast<uint32_t>(m.base + d);
            mutants.push_back(m);
            m = h;
            m.bound = static_cast<uint32_t>(m.bound + d);
            mutants.push_back(m);
            m = h;
            m.id = static_cast<uint32_t>(m.id + d);
            mutants.push_back(m);
        }
        for (const auto& other : live)
        {
            auto m = h;
            m.id = other.id;
            mutants.push_back(m);
        }
        for (const auto& m : mutants)
        {
            ++mutations;
            const bool identity = m == h || (m.valid && lineage.count({m.id, m.base, m.bound}) != 0);
            if (identity)
            {
                // A value equal to a legitimately produced handle must obey that handle's range.
                for (uint32_t off = 0; off < 64; ++off)
                {
                    const bool inside = m.offset + int64_t{off} + 4 <= m.bound && m.offset + int64_t{off} >= 0;
                    if (s.check_access(m, off, 4, false).has_value() == inside)
                    {
                        ++mutation_failures;
                        break;
                    }
                }
            }
            else if (try_all(m))
                ++mutation_failures;
        }
        for (const auto d : deltas)
        {
            ++mutations;
            const auto moved = Store::handle_add(h, static_cast<int32_t>(d));
            const int64_t a = moved.offset;
            const bool inside = a >= 0 && a + 4 <= moved.bound;
            if (s.check_access(moved, 0, 4, false).has_value() == inside)
                ++mutation_failures;
        }
    }
    return {perturbation_failures == 0 && mutation_failures == 0,
        fmt::format("{} byte perturbations ({} failed), {} field mutations ({} failed)", perturbations,
            perturbation_failures, mutations, mutation_failures)};
}

Result round_trip()
{
    size_t same = 0;
    for (uint64_t seed = 0; seed < 1000; ++seed)
    {
        const auto m = generate_well_typed(seed, 80);
        const auto printed = pretty(m);
        if (parse_module(printed) == m && pretty(parse_module(printed)) == printed)
            ++same;
    }
    return {same == 1000, fmt::format("{}/1000 generated modules survive parse(pretty(m)) == m", same)};
}

Result heartbleed()
{
    const std::filesystem::path corpus{MSWASM_CORPUS_DIR};
    std::vector<std::string> lines;
    bool pass = true;
    for (const auto* file : {"heartbleed.msw", "heartbleed_host.msw"})
    {
        Store store;
        ImportObject imports;
        add_builtin_hosts(store, imports, {"memcpy"});
        const auto id = instantiate(store, load_module_file(corpus / file), imports);
        const auto honest = invoke(store, id, "heartbeat", {Value::i32(16), Value::i32(16)});
        const auto bleed = invoke(store, id, "heartbeat", {Value::i32(16), Value::i32(64)});
        pass = pass && honest.is_values() && bleed.is_trapped() && bleed.trap.kind == TrapKind::spatial;
        lines.push_back(fmt::format("{}: honest {}, over-read {}", file, honest.to_string(), bleed.to_string()));
    }
    return {pass, lines[0] + "; " + lines[1]};
}

struct Criterion
{
    const char* name;
    std::function<Result()> check;
};
}  // namespace
}  // namespace mswasm

int main()
{
    using namespace mswasm;
    const std::vector<Criterion> criteria = {
        {"never-stuck campaign", never_stuck},
        {"isolation campaign", isolation_campaign},
        {"reachability oracle", reachability},
        {"spatial suite", spatial},
        {"temporal suite", temporal},
        {"forgery suite", forgery},
        {"text round-trip", round_trip},
        {"heartbleed over-read", heartbleed},
    };
    int failed = 0;
    for (const auto& c : criteria)
    {
        Result r;
        try
        {
            r = c.check();
        }
        catch (const std::exception& e)
        {
            r = {false, std::string("exception: ") + e.what()};
        }
        fmt::print("{} {}: {}\n", r.pass ? "PASS" : "FAIL", c.name, r.detail);
        std::fflush(stdout);
        failed += !r.pass;
    }
    fmt::print("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
