// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/isolation.hpp"
#include <deque>
#include <limits>
#include <nlohmann/json.hpp>

namespace mswasm
{
SegSet reachable(const Store& store, std::span<const Value> roots)
{
    SegSet seen;
    std::deque<uint32_t> work;
    const auto visit = [&](const Value& v) {
        if (v.type() != ValType::handle)
            return;
        const auto& h = v.as_handle();
        if (h.valid && store.allocator().is_live(h.id) && seen.insert(h.id).second)
            work.push_back(h.id);
    };
    for (const auto& v : roots)
        visit(v);
    while (!work.empty())
    {
        const auto id = work.front();
        work.pop_front();
        for (const auto& [offset, h] : store.segment(id)->slots)
            visit(Value::handle(h));
    }
    return seen;
}

Partition partition(const Store& store, std::span<const Value> roots)
{
    Partition p;
    p.exported = reachable(store, roots);
    for (const auto id : store.live_ids())
        if (!p.exported.count(id))
            p.local.insert(id);
    return p;
}

uint64_t segment_hash(const Segment& segment) noexcept
{
    uint64_t h = 14695981039346656037ull;
    const auto mix = [&h](uint64_t v, unsigned bytes) {
        for (unsigned i = 0; i < bytes; ++i)
        {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(segment.bytes.size(), 8);
    for (size_t i = 0; i < segment.bytes.size(); ++i)
    {
        mix(segment.bytes[i], 1);
        mix(static_cast<uint8_t>(segment.tags[i]), 1);
    }
    for (const auto& [offset, handle] : segment.slots)
    {
        mix(offset, 4);
        mix(handle.valid ? 1 : 0, 1);
    }
    return h;
}

MemoryDigest digest(const Store& store, const SegSet& segments)
{
    MemoryDigest d;
    d.covered = segments;
    for (const auto id : segments)
        if (const auto* seg = store.segment(id))
        {
            d.contents.emplace(id, *seg);
            d.hashes.emplace(id, segment_hash(*seg));
        }
    return d;
}

std::optional<Difference> first_difference(const MemoryDigest& before, const Store& store)
{
    for (const auto& [id, old] : before.contents)
    {
        const auto* now = store.segment(id);
        if (now == nullptr)
            return Difference{id, 0, "segment freed"};
        if (segment_hash(*now) == before.hashes.at(id) && *now == old)
            continue;
        const size_t n = std::min(old.bytes.size(), now->bytes.size());
        for (size_t o = 0; o < n; ++o)
            if (old.bytes[o] != now->bytes[o] || old.tags[o] != now->tags[o])
                return Difference{id, static_cast<uint32_t>(o), "byte or tag changed"};
        for (const auto& [offset, h] : old.slots)
        {
            const auto it = now->slots.find(offset);
            if (it == now->slots.end() || it->second != h)
                return Difference{id, offset, "handle slot changed"};
        }
        for (const auto& [offset, h] : now->slots)
            if (!old.slots.count(offset))
                return Difference{id, offset, "handle slot added"};
        return Difference{id, static_cast<uint32_t>(n), "segment size changed"};
    }
    return std::nullopt;
}

std::string_view to_string(Verdict::Kind kind) noexcept
{
    switch (kind)
    {
    case Verdict::Kind::isolated:
        return "isolated";
    case Verdict::Kind::violated:
        return "violated";
    case Verdict::Kind::trapped:
        return "trapped";
    }
    return "?";
}

std::string Verdict::to_string() const
{
    std::string out(mswasm::to_string(kind));
    if (kind == Kind::violated)
        out += " segment " + std::to_string(difference.segment) + " offset " + std::to_string(difference.offset) +
               " (" + difference.detail + ")";
    out += "; outcome " + outcome.to_string();
    return out;
}

std::string Verdict::to_json() const
{
    nlohmann::json j;
    j["verdict"] = std::string(mswasm::to_string(kind));
    j["outcome"] = nlohmann::json::parse(outcome.to_json());
    if (kind == Kind::violated)
    {
        j["segment"] = difference.segment;
        j["offset"] = difference.offset;
        j["detail"] = difference.detail;
    }
    j["exported"] = partition.exported;
    j["local"] = partition.local;
    return j.dump();
}

std::set<uint32_t> closure_instances(const Store& store, uint32_t func_addr)
{
    std::set<uint32_t> instances;
    std::set<uint32_t> seen_funcs;
    std::deque<uint32_t> work{func_addr};
    while (!work.empty())
    {
        const auto f = work.front();
        work.pop_front();
        if (f >= store.funcs.size() || !seen_funcs.insert(f).second || store.funcs[f].is_host())
            continue;
        const auto inst = store.funcs[f].instance;
        if (!instances.insert(inst).second)
            continue;
        const auto& mi = store.instances[inst];
        work.insert(work.end(), mi.funcs.begin(), mi.funcs.end());
        for (const auto t : mi.tables)
            for (const auto& e : store.tables[t].elements)
                if (e)
                    work.push_back(*e);
    }
    return instances;
}

std::vector<Value> experiment_roots(const Store& store, uint32_t func_addr, std::span<const Value> args)
{
    std::vector<Value> roots(args.begin(), args.end());
    for (const auto inst : closure_instances(store, func_addr))
        for (const auto g : store.instances[inst].globals)
            roots.push_back(store.globals[g].value);
    return roots;
}

namespace
{
constexpr size_t outermost = std::numeric_limits<size_t>::max();

/// Keeps one local-memory digest per open boundary and checks it when the boundary closes.
class BoundaryObserver : public ExecutionObserver
{
public:
    BoundaryObserver(const Store& store, const ExperimentOptions& options) : store_{store}, options_{options} {}

    void open(uint32_t func, size_t depth, const SegSet& local)
    {
        boundaries_.push_back(Boundary{func, depth, digest(store_, local)});
    }

    void on_call(const Config& cfg, uint32_t func_addr, std::span<const Value> args) override
    {
        if (!options_.nested_boundaries || cfg.frames().empty())
            return;
        const auto& callee = store_.funcs[func_addr];
        if (!callee.is_host() && callee.instance == cfg.frames().back().instance)
            return;
        const auto roots = experiment_roots(store_, func_addr, args);
        open(func_addr, cfg.frames().size(), partition(store_, roots).local);
    }

    void on_return(const Config& cfg, uint32_t func_addr, std::span<const Value>) override
    {
        if (boundaries_.empty())
            return;
        const auto& top = boundaries_.back();
        if (top.depth != cfg.frames().size() || top.func != func_addr)
            return;
        check(top);
        boundaries_.pop_back();
    }

    void after_step(const Config&) override
    {
        if (options_.paranoid)
            check_all();
    }

    void on_finish(const Config&, const Outcome&) override { check_all(); }

    void check_all()
    {
        for (const auto& b : boundaries_)
            check(b);
    }

    const std::optional<Difference>& violation() const noexcept { return violation_; }

private:
    struct Boundary
    {
        uint32_t func;
        size_t depth;
        MemoryDigest local;
    };

    void check(const Boundary& b)
    {
        if (violation_)
            return;
        violation_ = first_difference(b.local, store_);
    }

    const Store& store_;
    const ExperimentOptions& options_;
    std::vector<Boundary> boundaries_;
    std::optional<Difference> violation_;
};

Verdict make_verdict(Outcome outcome, const std::optional<Difference>& violation, Partition p)
{
    Verdict v;
    v.outcome = std::move(outcome);
    v.partition = std::move(p);
    if (violation)
    {
        v.kind = Verdict::Kind::violated;
        v.difference = *violation;
    }
    else if (v.outcome.is_trapped())
        v.kind = Verdict::Kind::trapped;
    return v;
}
}  // namespace

Verdict run_function_experiment(
    Store& store, uint32_t func_addr, std::vector<Value> args, const ExperimentOptions& options)
{
    if (func_addr >= store.funcs.size())
        throw InvokeError{"unknown function address " + std::to_string(func_addr)};
    auto roots = experiment_roots(store, func_addr, args);
    roots.insert(roots.end(), options.extra_roots.begin(), options.extra_roots.end());
    auto p = partition(store, roots);
    BoundaryObserver observer{store, options};
    observer.open(func_addr, outermost, p.local);
    InterpreterOptions io;
    io.fuel = options.fuel;
    io.observer = &observer;
    auto outcome = invoke_address(store, func_addr, std::move(args), io);
    observer.check_all();
    return make_verdict(std::move(outcome), observer.violation(), std::move(p));
}

ModuleExperimentResult run_module_experiment(
    Store& store, const ModuleExperiment& experiment, const ExperimentOptions& options)
{
    for (const auto& imp : experiment.target.module->module().imports)
        if (imp.desc.kind == ExternKind::memory || imp.desc.kind == ExternKind::table)
            throw ExperimentError{"module \"" + experiment.target.name + "\" imports a " +
                                  std::string(to_string(imp.desc.kind)) + "; the experiment requires none"};

    ModuleExperimentResult result;
    add_builtin_hosts(store, result.imports, experiment.hosts);
    for (const auto& m : experiment.setup)
    {
        const auto index = instantiate(store, m.module, result.imports);
        result.imports.add_instance_exports(store, index, m.name);
        result.setup_instances.push_back(index);
    }

    std::vector<Value> roots;
    for (const auto& imp : experiment.target.module->module().imports)
    {
        const auto* item = result.imports.find(imp.module, imp.name);
        if (item == nullptr)
            continue;
        if (item->kind == ExternKind::global)
            roots.push_back(store.globals.at(item->addr).value);
        else if (item->kind == ExternKind::func)
        {
            const auto more = experiment_roots(store, item->addr, {});
            roots.insert(roots.end(), more.begin(), more.end());
        }
    }
    auto p = partition(store, roots);

    BoundaryObserver observer{store, options};
    observer.open(UINT32_MAX, outermost, p.local);
    InstantiateOptions io;
    io.start.fuel = options.fuel;
    io.start.observer = &observer;
    Outcome outcome = Outcome::returned({});
    try
    {
        result.instance = instantiate(store, experiment.target.module, result.imports, io);
        result.imports.add_instance_exports(store, *result.instance, experiment.target.name);
        observer.check_all();
    }
    catch (const StartFailure& e)
    {
        outcome = e.outcome();
    }
    result.verdict = make_verdict(std::move(outcome), observer.violation(), std::move(p));
    return result;
}
}  // namespace mswasm
