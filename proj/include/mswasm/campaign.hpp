// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/generator.hpp"
#include "mswasm/interpreter.hpp"
#include "mswasm/isolation.hpp"
#include "mswasm/validator.hpp"
#include <memory>
#include <string>
#include <vector>

namespace mswasm
{
struct CaseFailure
{
    uint64_t seed = 0;
    std::string detail;
};

struct OutcomeCounts
{
    size_t values = 0;
    size_t trapped = 0;
    size_t fuel_exhausted = 0;
    size_t stuck = 0;
    size_t resource_exhausted = 0;

    void add(const Outcome& outcome) noexcept;
    void merge(const OutcomeCounts& other) noexcept;
    size_t total() const noexcept { return values + trapped + fuel_exhausted + stuck + resource_exhausted; }
};

struct NeverStuckOptions
{
    uint64_t seed = 0;
    uint32_t cases = 1000;
    uint32_t budget = 50;
    uint64_t fuel = 100'000;
    /// Compare every operand stack against the validator's prediction.
    bool check_shapes = true;
    /// Worker threads; cases are split into contiguous seed ranges and merged in seed order.
    unsigned threads = 1;
};

struct NeverStuckReport
{
    size_t modules = 0;
    /// Generated modules the validator rejected (a generator bug).
    size_t invalid = 0;
    /// Every start function and exported-function invocation.
    OutcomeCounts outcomes;
    std::vector<CaseFailure> failures;
    double seconds = 0;

    void merge(NeverStuckReport other);
    bool ok() const noexcept { return invalid == 0 && outcomes.stuck == 0 && failures.empty(); }
    std::string to_json() const;
};

/// Generates `cases` closed modules, instantiates each in a fresh store and invokes every exported
/// function with random well-typed arguments. Any stuck configuration is a failure.
NeverStuckReport run_never_stuck_campaign(const NeverStuckOptions& options);

struct IsolationCampaignOptions
{
    uint64_t seed = 0;
    /// Attacker functions g linked straight into the example program.
    uint32_t functions = 200;
    /// Attacker modules instantiated under the module experiment, then linked into the example.
    uint32_t modules = 50;
    uint32_t budget = 60;
    uint64_t fuel = 100'000;
    bool paranoid = false;
    /// Example program importing ("attacker", "g") and exporting main : [] -> [i32].
    std::shared_ptr<const TypedModule> example;
    /// Victim environment instantiated as "vault" before each attacker; may be null.
    std::shared_ptr<const TypedModule> victim;
    unsigned threads = 1;
};

struct IsolationCampaignReport
{
    size_t runs = 0;
    size_t returned_one = 0;
    size_t returned_zero = 0;
    size_t trapped = 0;
    /// Outcomes outside {values (1), trapped}.
    size_t other = 0;
    size_t violated = 0;
    std::vector<CaseFailure> failures;
    double seconds = 0;

    void merge(IsolationCampaignReport other);
    bool ok() const noexcept { return returned_zero == 0 && other == 0 && violated == 0 && failures.empty(); }
    std::string to_json() const;
};

/// Import list offered to generated attackers: the victim's public handle and the built-in hosts.
std::vector<Import> attacker_imports(bool with_victim);

/// A generated terminating attacker exporting g : [] -> [].
Module generate_attacker(uint64_t seed, uint32_t budget, bool with_victim, bool allow_start);

IsolationCampaignReport run_isolation_campaign(const IsolationCampaignOptions& options);

/// Text of the example program: allocate, store 42, call g, reload and compare.
std::string_view isolation_example_text() noexcept;
/// Text of the victim environment exporting its public handle as "pub".
std::string_view victim_text() noexcept;
}  // namespace mswasm
