// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/interpreter.hpp"
#include "mswasm/linker.hpp"
#include "mswasm/store.hpp"
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mswasm
{
using SegSet = std::set<uint32_t>;

/// Segments reachable from `roots`: every valid handle with a live id reaches its segment, and
/// every intact handle slot of a reached segment holding such a handle reaches further.
SegSet reachable(const Store& store, std::span<const Value> roots);

struct Partition
{
    SegSet exported;
    SegSet local;
};

/// exported = reachable(roots); local = the remaining live segments.
Partition partition(const Store& store, std::span<const Value> roots);

/// Full copies of a set of segments plus a content hash per segment.
struct MemoryDigest
{
    SegSet covered;
    std::map<uint32_t, Segment> contents;
    std::map<uint32_t, uint64_t> hashes;
};

MemoryDigest digest(const Store& store, const SegSet& segments);
uint64_t segment_hash(const Segment& segment) noexcept;

struct Difference
{
    uint32_t segment = 0;
    uint32_t offset = 0;
    std::string detail;
};

/// First segment of `before` whose bytes, tags or slots differ in `store`, or that was freed.
std::optional<Difference> first_difference(const MemoryDigest& before, const Store& store);

struct Verdict
{
    enum class Kind : uint8_t
    {
        isolated,
        violated,
        trapped,
    };

    Kind kind = Kind::isolated;
    /// How the experiment's invocation ended (also set for violated runs).
    Outcome outcome;
    /// Set for violated.
    Difference difference;
    /// Top-level partition used for the experiment.
    Partition partition;

    bool violated() const noexcept { return kind == Kind::violated; }
    std::string to_string() const;
    std::string to_json() const;
};

std::string_view to_string(Verdict::Kind kind) noexcept;

struct ExperimentOptions
{
    uint64_t fuel = default_fuel;
    /// Compare local memory after every step instead of only at call boundaries.
    bool paranoid = false;
    /// Also check every call that crosses into another instance or a host function, with the
    /// local memory computed at that call.
    bool nested_boundaries = true;
    /// Extra root values for function experiments, e.g. exported globals named on the command line.
    std::vector<Value> extra_roots;
};

/// Instances whose functions f can reach through calls, tables and imports, f's own included.
std::set<uint32_t> closure_instances(const Store& store, uint32_t func_addr);

/// Roots for calling f: the arguments plus the globals of every instance in f's closure.
std::vector<Value> experiment_roots(const Store& store, uint32_t func_addr, std::span<const Value> args);

/// Calls f(args) and checks that the local memory (live segments not reachable from the roots)
/// is unchanged when f returns or traps.
Verdict run_function_experiment(
    Store& store, uint32_t func_addr, std::vector<Value> args, const ExperimentOptions& options = {});

class ExperimentError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct ModuleExperiment
{
    /// Modules instantiated first, in order; each is importable under its name.
    std::vector<NamedModule> setup;
    /// The module under test. It must not import a memory or a table.
    NamedModule target;
    /// Built-in host functions offered as ("env", name).
    std::vector<std::string> hosts;
};

struct ModuleExperimentResult
{
    Verdict verdict;
    /// Instance of the target when instantiation succeeded.
    std::optional<uint32_t> instance;
    /// Instances of the setup modules.
    std::vector<uint32_t> setup_instances;
    /// Everything the setup modules and hosts export, plus the target's exports under its name.
    ImportObject imports;
};

/// Instantiates the setup modules, then checks that instantiating the target (including its
/// start function) leaves unchanged every segment not reachable from the globals and function
/// closures it imports. Throws ExperimentError for a target that imports memory or tables, and
/// LinkError if linking fails.
ModuleExperimentResult run_module_experiment(
    Store& store, const ModuleExperiment& experiment, const ExperimentOptions& options = {});
}  // namespace mswasm
