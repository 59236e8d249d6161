// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/campaign.hpp"
#include "mswasm/text.hpp"
#include "test_support.hpp"
#include <gtest/gtest.h>

namespace mswasm
{
namespace
{
TEST(Campaign, NeverStuckSmall)
{
    NeverStuckOptions options;
    options.cases = 100;
    options.seed = 3;
    const auto report = run_never_stuck_campaign(options);
    EXPECT_TRUE(report.ok()) << report.to_json();
    EXPECT_EQ(report.modules, 100u);
    EXPECT_EQ(report.outcomes.stuck, 0u);
    EXPECT_GT(report.outcomes.total(), 100u);
}

TEST(Campaign, ThreadedRunMatchesSerialCounts)
{
    NeverStuckOptions options;
    options.cases = 60;
    options.seed = 11;
    const auto serial = run_never_stuck_campaign(options);
    options.threads = 4;
    const auto threaded = run_never_stuck_campaign(options);
    EXPECT_EQ(serial.outcomes.values, threaded.outcomes.values);
    EXPECT_EQ(serial.outcomes.trapped, threaded.outcomes.trapped);
    EXPECT_EQ(serial.outcomes.fuel_exhausted, threaded.outcomes.fuel_exhausted);
}

TEST(Campaign, IsolationSmall)
{
    IsolationCampaignOptions options;
    options.functions = 20;
    options.modules = 5;
    options.seed = 5;
    options.example = load_module(isolation_example_text());
    options.victim = load_module(victim_text());
    const auto report = run_isolation_campaign(options);
    EXPECT_TRUE(report.ok()) << report.to_json();
    EXPECT_EQ(report.runs, 25u);
    EXPECT_EQ(report.returned_one + report.trapped, report.runs);
}

TEST(Campaign, EmbeddedProgramsMatchTheCorpus)
{
    EXPECT_EQ(parse_module(isolation_example_text()), parse_module(test::corpus_text("isolation.msw")));
    EXPECT_EQ(parse_module(victim_text()), parse_module(test::corpus_text("vault.msw")));
}

TEST(Campaign, OutcomeCountsMerge)
{
    OutcomeCounts a;
    a.add(Outcome::returned({}));
    a.add(Outcome::trapped({TrapKind::spatial, {}}));
    OutcomeCounts b;
    b.add(Outcome::fuel_exhausted());
    a.merge(b);
    EXPECT_EQ(a.total(), 3u);
    EXPECT_EQ(a.fuel_exhausted, 1u);
}
}  // namespace
}  // namespace mswasm
