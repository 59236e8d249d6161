// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/campaign.hpp"
#include "mswasm/generator.hpp"
#include "mswasm/text.hpp"
#include "mswasm/validator.hpp"
#include <gtest/gtest.h>

namespace mswasm
{
namespace
{
TEST(Generator, ModulesValidate)
{
    for (uint64_t seed = 0; seed < 300; ++seed)
    {
        const auto m = generate_well_typed(seed, 60);
        const auto result = validate_module(m);
        EXPECT_TRUE(result.ok()) << "seed " << seed << ": " << result.errors[0].to_string() << "\n" << pretty(m);
    }
}

TEST(Generator, SameSeedSameModule)
{
    for (uint64_t seed = 0; seed < 20; ++seed)
        EXPECT_EQ(generate_well_typed(seed, 50), generate_well_typed(seed, 50));
    EXPECT_NE(pretty(generate_well_typed(1, 50)), pretty(generate_well_typed(2, 50)));
}

TEST(Generator, ZeroBudgetIsOneEmptyFunction)
{
    const auto m = generate_well_typed(5, 0);
    ASSERT_EQ(m.funcs.size(), 1u);
    EXPECT_TRUE(m.funcs[0].body.empty());
}

TEST(Generator, RequiredExportsAndImportsAreHonoured)
{
    GeneratorOptions options;
    options.terminating = true;
    options.imports = attacker_imports(true);
    options.required_exports = {{"g", FuncType{}}};
    options.allow_memory = false;
    options.allow_table = false;
    for (uint64_t seed = 0; seed < 50; ++seed)
    {
        const auto m = generate_well_typed(seed, 40, options);
        ASSERT_TRUE(validate_module(m).ok()) << seed;
        EXPECT_FALSE(m.memory.has_value());
        EXPECT_TRUE(m.tables.empty());
        EXPECT_EQ(m.imports.size(), options.imports.size());
        ASSERT_NE(m.find_export("g"), nullptr);
    }
}

TEST(Generator, AttackersExportG)
{
    for (uint64_t seed = 0; seed < 30; ++seed)
    {
        const auto m = generate_attacker(seed, 40, seed % 2 == 0, true);
        ASSERT_TRUE(validate_module(m).ok()) << seed;
        ASSERT_NE(m.find_export("g"), nullptr);
    }
}

TEST(Generator, RngIsDeterministic)
{
    Rng a{9};
    Rng b{9};
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(a.below(1000), b.below(1000));
}
}  // namespace
}  // namespace mswasm
