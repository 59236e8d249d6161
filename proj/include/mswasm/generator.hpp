// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/ast.hpp"
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mswasm
{
/// Deterministic random source shared by the generators and the property campaigns.
class Rng
{
public:
    explicit Rng(uint64_t seed) : engine_{seed} {}

    uint64_t next() { return engine_(); }
    /// Uniform in [0, n); n must be nonzero.
    uint64_t below(uint64_t n) { return engine_() % n; }
    /// True with probability percent/100.
    bool chance(unsigned percent) { return below(100) < percent; }
    template <typename T>
    const T& pick(const std::vector<T>& items)
    {
        return items[below(items.size())];
    }

private:
    std::mt19937_64 engine_;
};

struct RequiredExport
{
    std::string name;
    FuncType type;
};

struct GeneratorOptions
{
    /// Every generated function terminates: loops are counted, calls and table entries only
    /// reach lower function indices, and branches never target loops.
    bool terminating = false;
    /// Imports the module declares; generated code may call or access them.
    std::vector<Import> imports;
    /// Functions that must exist and be exported under these names.
    std::vector<RequiredExport> required_exports;
    bool allow_memory = true;
    bool allow_table = true;
    bool allow_start = true;
    /// Upper bound for segalloc sizes and constant offsets produced by the generator.
    uint32_t max_segment_size = 64;
};

/// A random module that passes validation. `budget` bounds the total number of instructions in
/// function bodies; budget 0 yields a single empty function of type [] -> [].
Module generate_well_typed(uint64_t seed, uint32_t budget);
Module generate_well_typed(uint64_t seed, uint32_t budget, const GeneratorOptions& options);
}  // namespace mswasm
