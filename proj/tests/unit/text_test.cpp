// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/generator.hpp"
#include "mswasm/text.hpp"
#include "test_support.hpp"
#include <gtest/gtest.h>

namespace mswasm
{
namespace
{
using test::corpus_text;

class CorpusRoundTrip : public testing::TestWithParam<std::string>
{};

TEST_P(CorpusRoundTrip, PrettyThenParseIsIdentity)
{
    const auto m = parse_module(corpus_text(GetParam()));
    const auto printed = pretty(m);
    EXPECT_EQ(parse_module(printed), m) << printed;
    EXPECT_EQ(pretty(parse_module(printed)), printed);
}

INSTANTIATE_TEST_SUITE_P(Corpus, CorpusRoundTrip,
    testing::Values("abort.msw", "attacker.msw", "attacker_host.msw", "bad.msw", "bytecopy.msw", "fib.msw",
        "fig3.msw", "globals.msw", "heartbleed.msw", "heartbleed_host.msw", "indirect.msw", "isolation.msw",
        "linear.msw", "linked_list.msw", "matmul.msw", "physical_memory.msw", "setbounds.msw", "vault.msw"),
    [](const auto& info) {
        auto name = info.param.substr(0, info.param.find('.'));
        return name;
    });

TEST(TextRoundTrip, GeneratedModules)
{
    for (uint64_t seed = 0; seed < 100; ++seed)
    {
        const auto m = generate_well_typed(seed, 40);
        ASSERT_EQ(parse_module(pretty(m)), m) << "seed " << seed;
    }
}

TEST(TextParse, ConstDefaultsToI32)
{
    EXPECT_EQ(parse_instruction("(const 5)"), Instr::constant(Value::i32(5)));
    EXPECT_EQ(parse_instruction("(const i64 5)"), Instr::constant(Value::i64(5)));
    EXPECT_EQ(parse_instruction("(const -1)"), Instr::constant(Value::i32(0xffffffffu)));
}

TEST(TextParse, PackedAccessesCarryTypeAndOffset)
{
    EXPECT_EQ(parse_instruction("(segstore8 i32 offset=3)"), Instr::memory(Opcode::segstore, ValType::i32, 3, true));
    EXPECT_EQ(parse_instruction("(segload8_u i32)"), Instr::memory(Opcode::segload, ValType::i32, 0, true));
    EXPECT_EQ(parse_instruction("(segload handle offset=16)"), Instr::memory(Opcode::segload, ValType::handle, 16));
    EXPECT_THROW(parse_instruction("(segstore8)"), ParseError);
}

TEST(TextParse, BinaryOperatorsNeedAType)
{
    EXPECT_EQ(parse_instruction("(sub i64)"), Instr::typed(Opcode::sub, ValType::i64));
    EXPECT_THROW(parse_instruction("(sub)"), ParseError);
}

TEST(TextParse, CommentsAreIgnored)
{
    const auto with = parse_module("(module ;; line\n (; block\n comment ;) (func (result i32) (const 1)))");
    const auto without = parse_module("(module (func (result i32) (const 1)))");
    EXPECT_EQ(with, without);
}

TEST(TextParse, ErrorsCarryLineAndColumn)
{
    try
    {
        parse_module("(module\n  (func\n    (frobnicate)))");
        FAIL() << "expected a parse error";
    }
    catch (const ParseError& e)
    {
        EXPECT_EQ(e.span().line, 3u);
        EXPECT_EQ(e.span().column, 6u);
        EXPECT_NE(e.message().find("frobnicate"), std::string::npos);
    }
}

TEST(TextParse, RejectsHandleLiterals)
{
    EXPECT_THROW(parse_instruction("(const handle 0)"), ParseError);
}

TEST(TextParse, UnterminatedListIsAnError)
{
    EXPECT_THROW(parse_module("(module (func"), ParseError);
}

TEST(TextParse, ModuleFields)
{
    const auto m = parse_module(R"((module
        (import "m" "n" (func (param i32) (result i32)))
        (import "env" "_physical_memory" (global handle))
        (func (param i32) (result i32) (local handle) (local.get 0))
        (global mut handle (h.null))
        (table 1)
        (memory 1)
        (data (const 8) "\2a\00")
        (export "x" (func 1))
        (start 2)
        (func))
    )");
    ASSERT_EQ(m.imports.size(), 2u);
    EXPECT_EQ(m.imports[0].module, "m");
    EXPECT_EQ(m.imports[1].desc.kind, ExternKind::global);
    EXPECT_EQ(m.funcs.size(), 2u);
    EXPECT_EQ(m.funcs[0].locals, std::vector<ValType>{ValType::handle});
    ASSERT_EQ(m.globals.size(), 1u);
    EXPECT_TRUE(m.globals[0].type.mut);
    ASSERT_EQ(m.tables.size(), 1u);
    EXPECT_EQ(m.tables[0].elements, std::vector<uint32_t>{1});
    ASSERT_TRUE(m.memory.has_value());
    EXPECT_EQ(m.memory->min_pages, 1u);
    ASSERT_EQ(m.data.size(), 1u);
    EXPECT_EQ(m.data[0].bytes, (std::vector<uint8_t>{0x2a, 0x00}));
    EXPECT_EQ(m.start, 2u);
    EXPECT_EQ(m.find_export("x")->index, 1u);
}

TEST(TextScript, ParsesCommands)
{
    const auto script = parse_script(corpus_text("forge.msws"));
    EXPECT_EQ(script.module_count(), 1u);
    EXPECT_EQ(script.assertion_count(), 2u);
    const auto* trap = std::get_if<AssertTrap>(&script.commands[2]);
    ASSERT_NE(trap, nullptr);
    EXPECT_EQ(trap->kind, TrapKind::invalid_handle);
    EXPECT_EQ(trap->invocation.name, "reload");
    EXPECT_EQ(trap->invocation.args, std::vector<Value>{Value::i32(1)});
}

TEST(TextScript, UnknownTrapKindIsAnError)
{
    EXPECT_THROW(parse_script("(module) (assert_trap (invoke \"f\") exploded)"), ParseError);
}
}  // namespace
}  // namespace mswasm
