// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/text.hpp"
#include "mswasm/validator.hpp"
#include "test_support.hpp"
#include <gtest/gtest.h>

namespace mswasm
{
namespace
{
std::vector<TypeErrorCode> codes_of(const std::string& text)
{
    std::vector<TypeErrorCode> codes;
    for (const auto& e : validate_module(parse_module(text)).errors)
        codes.push_back(e.code);
    return codes;
}

bool has_code(const std::string& text, TypeErrorCode code)
{
    const auto codes = codes_of(text);
    return std::find(codes.begin(), codes.end(), code) != codes.end();
}

TEST(Validator, AcceptsTheCorpus)
{
    for (const auto* name : {"abort.msw", "attacker.msw", "attacker_benign.msw", "attacker_free.msw", "attacker_host.msw",
             "attacker_overflow.msw", "attacker_scribble.msw", "attacker_smuggle.msw", "bytecopy.msw", "double_free.msw",
             "fib.msw", "fig3.msw", "globals.msw", "heartbleed.msw", "heartbleed_host.msw", "indirect.msw",
             "isolation.msw", "lib.msw", "linear.msw", "linked_list.msw", "main.msw", "matmul.msw", "misaligned.msw",
             "physical_memory.msw", "setbounds.msw", "shatter.msw", "spin.msw", "sum_array.msw", "uaf.msw", "vault.msw"})
    {
        const auto result = validate_module(parse_module(test::corpus_text(name)));
        EXPECT_TRUE(result.ok()) << name << ": " << (result.errors.empty() ? "" : result.errors[0].to_string());
    }
}

TEST(Validator, HandleInLinearMemoryIsRejected)
{
    const auto result = validate_module(parse_module(test::corpus_text("bad.msw")));
    ASSERT_FALSE(result.ok());
    EXPECT_EQ(result.errors[0].code, TypeErrorCode::handle_in_linear_memory);
    EXPECT_NE(result.errors[0].to_json().find("\"handle_in_linear_memory\""), std::string::npos);
    EXPECT_TRUE(has_code("(module (memory 1) (func (result handle) (const 0) (load handle)))",
        TypeErrorCode::handle_in_linear_memory));
}

TEST(Validator, StackErrors)
{
    EXPECT_TRUE(has_code("(module (func (result i32) (add i32)))", TypeErrorCode::stack_underflow));
    EXPECT_TRUE(has_code("(module (func (result i32) (const i64 1)))", TypeErrorCode::type_mismatch));
    EXPECT_TRUE(has_code("(module (func (const 1)))", TypeErrorCode::trailing_values));
}

TEST(Validator, IntegersCannotBeUsedAsHandles)
{
    EXPECT_FALSE(codes_of("(module (func (result i32) (const 0) (segload i32)))").empty());
    EXPECT_FALSE(codes_of("(module (func (param handle) (result i32) (local.get 0)))").empty());
}

TEST(Validator, IndexErrors)
{
    EXPECT_TRUE(has_code("(module (func (call 3)))", TypeErrorCode::unknown_index));
    EXPECT_TRUE(has_code("(module (func (local.get 0) (drop)))", TypeErrorCode::unknown_index));
    EXPECT_TRUE(has_code("(module (func (block (br 2))))", TypeErrorCode::unknown_index));
}

TEST(Validator, ModuleLevelErrors)
{
    EXPECT_TRUE(has_code("(module (global i32 (const 1)) (func (const 2) (global.set 0)))",
        TypeErrorCode::immutable_global_write));
    EXPECT_TRUE(has_code("(module (func (param i32)) (start 0))", TypeErrorCode::start_signature));
    EXPECT_TRUE(has_code("(module (func (result i32) (const 0) (load i32)))", TypeErrorCode::missing_memory));
    EXPECT_TRUE(has_code("(module (func) (export \"a\" (func 0)) (export \"a\" (func 0)))", TypeErrorCode::duplicate_export));
}

TEST(Validator, FloatsSupportAddOnly)
{
    EXPECT_TRUE(validate_module(parse_module("(module (func (result f64) (const f64 1.5) (const f64 2) (add f64)))")).ok());
    EXPECT_FALSE(validate_module(parse_module("(module (func (result f32) (const f32 1) (const f32 2) (mul f32)))")).ok());
}

TEST(Validator, MultiValueResults)
{
    EXPECT_TRUE(validate_module(parse_module("(module (func (result i32 i64) (const 1) (const i64 2)))")).ok());
    EXPECT_TRUE(validate_module(parse_module(
                                    "(module (func (result i32) (block (result i32 i32) (const 1) (const 2)) (add i32)))"))
                    .ok());
}

TEST(Validator, UnreachableCodeIsPolymorphic)
{
    EXPECT_TRUE(validate_module(parse_module("(module (func (result i32) (unreachable) (add i32)))")).ok());
    EXPECT_TRUE(validate_module(parse_module("(module (func (result handle) (h.null) (return) (drop)))")).ok());
}

TEST(Validator, ShapesArePredictedPerInstruction)
{
    const auto tm = load_module("(module (func (result i32) (const 1) (const 2) (add i32)))");
    const auto& body = tm->module().funcs[0].body;
    ASSERT_NE(tm->shape_before(body[2]), nullptr);
    EXPECT_EQ(*tm->shape_before(body[2]), (StackShape{ValType::i32, ValType::i32}));
    EXPECT_EQ(*tm->shape_before(body[0]), StackShape{});
}

TEST(Validator, ReportsEveryError)
{
    EXPECT_GE(codes_of("(module (func (result i32) (add i32)) (func (call 9)))").size(), 2u);
}
}  // namespace
}  // namespace mswasm
