// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/script.hpp"
#include "test_support.hpp"
#include <gtest/gtest.h>

namespace mswasm
{
namespace
{
TEST(Script, ForgeScriptPasses)
{
    const auto report = run_script(parse_script(test::corpus_text("forge.msws")));
    EXPECT_TRUE(report.ok()) << (report.failures.empty() ? "" : report.failures[0].message);
    EXPECT_EQ(report.passed, 2u);
}

TEST(Script, WrongExpectationsAreReportedWithTheirLine)
{
    const auto report = run_script(parse_script(R"((module
  (func (param i32) (result i32) (local.get 0))
  (export "id" (func 0)))
(assert_return (invoke "id" (i32 3)) (i32 3))
(assert_return (invoke "id" (i32 3)) (i32 4))
(assert_trap (invoke "id" (i32 3)) spatial)
)"));
    EXPECT_EQ(report.passed, 1u);
    ASSERT_EQ(report.failures.size(), 2u);
    EXPECT_EQ(report.failures[0].span.line, 5u);
    EXPECT_EQ(report.failures[1].span.line, 6u);
}

TEST(Script, InvalidAndUnlinkableModules)
{
    const auto report = run_script(parse_script(R"(
(assert_invalid (module (func (result i32) (add i32))) stack_underflow)
(assert_unlinkable (module (import "nowhere" "f" (func))))
)"));
    EXPECT_TRUE(report.ok()) << (report.failures.empty() ? "" : report.failures[0].message);
    EXPECT_EQ(report.passed, 2u);
}

TEST(Script, ModuleThatFailsToValidateIsAFailure)
{
    const auto report = run_script(parse_script("(module (func (result i32) (add i32)))"));
    EXPECT_FALSE(report.ok());
}

TEST(Script, TrapKindsAreCompared)
{
    const auto report = run_script(parse_script(R"((module
  (func (result i32) (const 4) (segalloc) (const 4) (h.add) (segload i32))
  (export "f" (func 0)))
(assert_trap (invoke "f") spatial)
(assert_trap (invoke "f") temporal)
)"));
    EXPECT_EQ(report.passed, 1u);
    EXPECT_EQ(report.failures.size(), 1u);
}
}  // namespace
}  // namespace mswasm
