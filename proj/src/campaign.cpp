// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/campaign.hpp"
#include "mswasm/linker.hpp"
#include "mswasm/loader.hpp"
#include <chrono>
#include <future>
#include <nlohmann/json.hpp>

namespace mswasm
{
namespace
{
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

nlohmann::json failures_json(const std::vector<CaseFailure>& failures)
{
    auto out = nlohmann::json::array();
    for (const auto& f : failures)
        out.push_back({{"seed", f.seed}, {"detail", f.detail}});
    return out;
}

Value random_arg(Rng& rng, Store& store, ValType type)
{
    switch (type)
    {
    case ValType::i32:
        return Value::i32(static_cast<uint32_t>(rng.chance(50) ? rng.below(64) : rng.next()));
    case ValType::i64:
        return Value::i64(rng.chance(50) ? rng.below(64) : rng.next());
    case ValType::f32:
        return Value::f32(static_cast<float>(rng.below(1000)) / 8.0f);
    case ValType::f64:
        return Value::f64(static_cast<double>(rng.below(1000)) / 8.0);
    case ValType::handle:
        if (rng.chance(25))
            return Value::handle(Handle{});
        return Value::handle(store.seg_alloc(static_cast<uint32_t>(rng.below(65))));
    }
    return Value::i32(0);
}

/// Runs one generated module; returns an empty string or a failure description.
std::string never_stuck_case(uint64_t seed, const NeverStuckOptions& options, NeverStuckReport& report)
{
    auto result = validate_module(generate_well_typed(seed, options.budget));
    if (!result.ok())
    {
        ++report.invalid;
        return "generated module failed validation: " + result.errors.front().to_string();
    }
    auto typed = std::make_shared<const TypedModule>(std::move(*result.typed));

    Store store;
    ImportObject imports;
    InstantiateOptions io;
    io.start.fuel = options.fuel;
    io.start.check_shapes = options.check_shapes;
    uint32_t instance = 0;
    try
    {
        instance = instantiate(store, typed, imports, io);
        if (typed->module().start)
            report.outcomes.add(Outcome::returned({}));
    }
    catch (const StartFailure& e)
    {
        report.outcomes.add(e.outcome());
        if (e.outcome().is_stuck())
            return "start function stuck: " + e.outcome().detail;
        return {};
    }
    catch (const LinkError& e)
    {
        return std::string("closed module failed to link: ") + e.what();
    }

    Rng rng{seed ^ 0x9e3779b97f4a7c15ull};
    InterpreterOptions opts;
    opts.fuel = options.fuel;
    opts.check_shapes = options.check_shapes;
    for (const auto& ex : typed->module().exports)
    {
        if (ex.kind != ExternKind::func)
            continue;
        const auto addr = store.instances[instance].funcs[ex.index];
        std::vector<Value> args;
        for (const auto t : store.funcs[addr].type.params)
            args.push_back(random_arg(rng, store, t));
        const auto outcome = invoke_address(store, addr, std::move(args), opts);
        report.outcomes.add(outcome);
        if (outcome.is_stuck())
            return "export \"" + ex.name + "\" stuck: " + outcome.detail;
    }
    return {};
}

void classify(const Verdict& verdict, uint64_t seed, const std::string& what, IsolationCampaignReport& report)
{
    ++report.runs;
    const auto& o = verdict.outcome;
    if (verdict.violated())
    {
        ++report.violated;
        report.failures.push_back({seed, what + ": " + verdict.to_string()});
    }
    if (o.is_values() && o.values.size() == 1 && o.values[0] == Value::i32(1))
        ++report.returned_one;
    else if (o.is_values() && o.values.size() == 1 && o.values[0] == Value::i32(0))
    {
        ++report.returned_zero;
        report.failures.push_back({seed, what + ": returned 0"});
    }
    else if (o.is_trapped())
        ++report.trapped;
    else
    {
        ++report.other;
        report.failures.push_back({seed, what + ": " + o.to_string()});
    }
}

/// Splits [0, cases) into contiguous ranges, runs `one(index, report)` on each range in its own
/// thread and merges the partial reports in range order.
template <typename Report, typename One>
Report run_split(uint32_t cases, unsigned threads, One one)
{
    threads = std::max(1u, std::min<unsigned>(threads, std::max(cases, 1u)));
    const auto range = [&](uint32_t from, uint32_t to) {
        Report r;
        for (uint32_t i = from; i < to; ++i)
            one(i, r);
        return r;
    };
    if (threads == 1)
        return range(0, cases);
    std::vector<std::future<Report>> parts;
    const uint32_t chunk = (cases + threads - 1) / threads;
    for (uint32_t from = 0; from < cases; from += chunk)
        parts.push_back(std::async(std::launch::async, range, from, std::min(cases, from + chunk)));
    Report total;
    for (auto& part : parts)
        total.merge(part.get());
    return total;
}

const std::vector<std::string> attacker_hosts = {"memcpy", "abort"};

Verdict run_example(Store& store, const ImportObject& imports, const IsolationCampaignOptions& options)
{
    InstantiateOptions io;
    io.start.fuel = options.fuel;
    const auto instance = instantiate(store, options.example, imports, io);
    ExperimentOptions eo;
    eo.fuel = options.fuel;
    eo.paranoid = options.paranoid;
    return run_function_experiment(store, export_function(store, instance, "main"), {}, eo);
}

void function_case(uint64_t seed, const IsolationCampaignOptions& options, IsolationCampaignReport& report)
{
    Store store;
    ImportObject imports;
    add_builtin_hosts(store, imports, attacker_hosts);
    if (options.victim)
        imports.add_instance_exports(store, instantiate(store, options.victim, imports), "vault");
    const auto attacker = typecheck(generate_attacker(seed, options.budget, options.victim != nullptr, false));
    imports.add_instance_exports(store, instantiate(store, attacker, imports), "attacker");
    classify(run_example(store, imports, options), seed, "function attacker", report);
}

void module_case(uint64_t seed, const IsolationCampaignOptions& options, IsolationCampaignReport& report)
{
    Store store;
    ModuleExperiment experiment;
    if (options.victim)
        experiment.setup.push_back({"vault", options.victim});
    experiment.target = {"attacker", typecheck(generate_attacker(seed, options.budget, options.victim != nullptr, true))};
    experiment.hosts = attacker_hosts;
    ExperimentOptions eo;
    eo.fuel = options.fuel;
    eo.paranoid = options.paranoid;
    const auto result = run_module_experiment(store, experiment, eo);
    if (!result.instance)
    {
        classify(result.verdict, seed, "attacker module start", report);
        return;
    }
    if (result.verdict.violated())
    {
        classify(result.verdict, seed, "attacker module instantiation", report);
        return;
    }
    classify(run_example(store, result.imports, options), seed, "module attacker", report);
}
}  // namespace

void OutcomeCounts::add(const Outcome& outcome) noexcept
{
    switch (outcome.kind)
    {
    case Outcome::Kind::values:
        ++values;
        break;
    case Outcome::Kind::trapped:
        ++trapped;
        break;
    case Outcome::Kind::fuel_exhausted:
        ++fuel_exhausted;
        break;
    case Outcome::Kind::stuck:
        ++stuck;
        break;
    case Outcome::Kind::resource_exhausted:
        ++resource_exhausted;
        break;
    }
}

std::string NeverStuckReport::to_json() const
{
    nlohmann::json j;
    j["modules"] = modules;
    j["invalid"] = invalid;
    j["values"] = outcomes.values;
    j["trapped"] = outcomes.trapped;
    j["fuel_exhausted"] = outcomes.fuel_exhausted;
    j["stuck"] = outcomes.stuck;
    j["resource_exhausted"] = outcomes.resource_exhausted;
    j["failures"] = failures_json(failures);
    j["seconds"] = seconds;
    j["ok"] = ok();
    return j.dump();
}

void OutcomeCounts::merge(const OutcomeCounts& other) noexcept
{
    values += other.values;
    trapped += other.trapped;
    fuel_exhausted += other.fuel_exhausted;
    stuck += other.stuck;
    resource_exhausted += other.resource_exhausted;
}

void NeverStuckReport::merge(NeverStuckReport other)
{
    modules += other.modules;
    invalid += other.invalid;
    outcomes.merge(other.outcomes);
    failures.insert(failures.end(), other.failures.begin(), other.failures.end());
}

NeverStuckReport run_never_stuck_campaign(const NeverStuckOptions& options)
{
    const auto start = Clock::now();
    auto report = run_split<NeverStuckReport>(options.cases, options.threads, [&](uint32_t i, NeverStuckReport& r) {
        const auto seed = options.seed + i;
        ++r.modules;
        auto failure = never_stuck_case(seed, options, r);
        if (!failure.empty())
            r.failures.push_back({seed, std::move(failure)});
    });
    report.seconds = seconds_since(start);
    return report;
}

std::string IsolationCampaignReport::to_json() const
{
    nlohmann::json j;
    j["runs"] = runs;
    j["returned_one"] = returned_one;
    j["returned_zero"] = returned_zero;
    j["trapped"] = trapped;
    j["other"] = other;
    j["violated"] = violated;
    j["failures"] = failures_json(failures);
    j["seconds"] = seconds;
    j["ok"] = ok();
    return j.dump();
}

std::vector<Import> attacker_imports(bool with_victim)
{
    std::vector<Import> imports;
    if (with_victim)
    {
        Import pub;
        pub.module = "vault";
        pub.name = "pub";
        pub.desc.kind = ExternKind::global;
        pub.desc.global = GlobalType{true, ValType::handle};
        imports.push_back(pub);
    }
    Import memcpy_import;
    memcpy_import.module = "env";
    memcpy_import.name = "memcpy";
    memcpy_import.desc.kind = ExternKind::func;
    memcpy_import.desc.func = FuncType{{ValType::handle, ValType::handle, ValType::i32}, {ValType::handle}};
    imports.push_back(memcpy_import);
    Import abort_import;
    abort_import.module = "env";
    abort_import.name = "abort";
    abort_import.desc.kind = ExternKind::func;
    imports.push_back(abort_import);
    return imports;
}

Module generate_attacker(uint64_t seed, uint32_t budget, bool with_victim, bool allow_start)
{
    GeneratorOptions go;
    go.terminating = true;
    go.imports = attacker_imports(with_victim);
    go.required_exports.push_back({"g", FuncType{}});
    go.allow_start = allow_start;
    return generate_well_typed(seed, budget, go);
}

void IsolationCampaignReport::merge(IsolationCampaignReport part)
{
    runs += part.runs;
    returned_one += part.returned_one;
    returned_zero += part.returned_zero;
    trapped += part.trapped;
    other += part.other;
    violated += part.violated;
    failures.insert(failures.end(), part.failures.begin(), part.failures.end());
}

IsolationCampaignReport run_isolation_campaign(const IsolationCampaignOptions& options)
{
    if (!options.example)
        throw std::invalid_argument{"isolation campaign needs the example program"};
    const auto start = Clock::now();
    const auto total = options.functions + options.modules;
    auto report = run_split<IsolationCampaignReport>(total, options.threads, [&](uint32_t i, IsolationCampaignReport& r) {
        const auto seed = options.seed + i;
        try
        {
            if (i < options.functions)
                function_case(seed, options, r);
            else
                module_case(seed, options, r);
        }
        catch (const std::exception& e)
        {
            ++r.other;
            r.failures.push_back({seed, e.what()});
        }
    });
    report.seconds = seconds_since(start);
    return report;
}

std::string_view isolation_example_text() noexcept
{
    return R"msw(;; Stores n = 42 in a fresh segment, hands control to an arbitrary g, then checks n is still there.
;; Returns 1 when the segment is unchanged, 0 otherwise. g is never given a handle to the segment.
(module
  (import "attacker" "g" (func))
  (func (result i32) (local handle)
    (const 4) (segalloc) (local.tee 0)
    (const 42) (segstore i32)
    (call 0)
    (local.get 0) (segload i32)
    (const 42) (sub i32) (eqz i32)
    (if (result i32) (then (const 1)) (else (const 0)))
  )
  (export "main" (func 1))
)
)msw";
}

std::string_view victim_text() noexcept
{
    return R"msw(;; A victim environment: one segment shared through the exported global "pub", one kept private.
;; The start function allocates both and fills the private segment with a secret.
(module
  (global mut handle (h.null))
  (global mut handle (h.null))
  (func
    (const 32) (segalloc) (global.set 0)
    (const 64) (segalloc) (global.set 1)
    (global.get 1) (const 1234) (segstore i32)
    (global.get 1) (global.get 0) (segstore handle offset=16)
  )
  (func (result i32)
    (global.get 1) (segload i32)
  )
  (start 0)
  (export "pub" (global 0))
  (export "secret" (func 1))
)
)msw";
}
}  // namespace mswasm
