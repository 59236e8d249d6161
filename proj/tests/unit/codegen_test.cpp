// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/codegen.hpp"
#include "mswasm/constants.hpp"
#include "mswasm/text.hpp"
#include "mswasm_rt_constants.h"
#include "test_support.hpp"
#include <gtest/gtest.h>
#include <cstdlib>
#include <fstream>
#include <regex>

namespace mswasm
{
namespace
{
using test::corpus_module;
namespace fs = std::filesystem;

static_assert(MSWASM_RT_HANDLE_WIDTH == handle_width);
static_assert(MSWASM_RT_LINEAR_MEMORY_ID == linear_memory_id);
static_assert(MSWASM_RT_UNBOUNDED_SENTINEL_ID == unbounded_sentinel_id);
static_assert(MSWASM_RT_PAGE_SIZE == page_size);
static_assert(MSWASM_RT_DEFAULT_FUEL == default_fuel);
static_assert(MSWASM_RT_MAX_CALL_DEPTH == max_call_depth);
static_assert(MSWASM_RT_EXIT_VALUES == exit_values);
static_assert(MSWASM_RT_EXIT_RESOURCE_EXHAUSTED == exit_resource_exhausted);
static_assert(MSWASM_RT_EXIT_INVALID == exit_invalid);
static_assert(MSWASM_RT_EXIT_TRAPPED == exit_trapped);
static_assert(MSWASM_RT_EXIT_FUEL_EXHAUSTED == exit_fuel_exhausted);
static_assert(MSWASM_RT_EXIT_STUCK == exit_stuck);
static_assert(MSWASM_RT_EXIT_USAGE == exit_usage);
static_assert(MSWASM_RT_DEFAULT_ARENA_SIZE == default_arena_size);

const std::vector<std::string> corpus_programs = {"abort.msw", "attacker.msw", "attacker_benign.msw",
    "attacker_free.msw", "attacker_host.msw", "attacker_overflow.msw", "attacker_scribble.msw",
    "attacker_smuggle.msw", "bytecopy.msw", "double_free.msw", "fib.msw", "fig3.msw", "globals.msw",
    "heartbleed.msw", "heartbleed_host.msw", "indirect.msw", "isolation.msw", "lib.msw", "linear.msw",
    "linked_list.msw", "main.msw", "matmul.msw", "misaligned.msw", "physical_memory.msw", "setbounds.msw",
    "shatter.msw", "spin.msw", "sum_array.msw", "uaf.msw", "vault.msw"};

std::string stem(const std::string& file)
{
    return fs::path(file).stem().string();
}

bool have_cc()
{
    return std::system("cc --version > /dev/null 2>&1") == 0;
}

struct TempDir
{
    fs::path path;

    TempDir()
    {
        path = fs::temp_directory_path() / ("mswasm_codegen_" + std::to_string(std::rand()) + "_" +
                                            std::to_string(reinterpret_cast<uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    fs::path write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

std::string include_flags()
{
    return std::string(" -I") + MSWASM_RT_INCLUDE_DIR + " -I" + MSWASM_GENERATED_INCLUDE_DIR;
}

int compile(const std::string& args, const TempDir& dir)
{
    const auto log = dir.path / "cc.log";
    const auto command = "cc -std=c11 -Wall -Wextra -Werror" + include_flags() + " -I" + dir.path.string() + " " +
                         args + " > " + log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    if (status != 0)
    {
        std::ifstream in(log);
        std::cerr << in.rdbuf();
    }
    return status;
}

CodegenOptions options_for(const std::string& unit)
{
    CodegenOptions o;
    o.unit_name = unit;
    return o;
}

TEST(Codegen, OutputIsDeterministic)
{
    for (const auto& file : corpus_programs)
    {
        const auto m = corpus_module(file);
        const auto a = codegen_module(*m, options_for(stem(file)));
        const auto b = codegen_module(*corpus_module(file), options_for(stem(file)));
        EXPECT_EQ(a.source, b.source) << file;
        EXPECT_EQ(a.header, b.header) << file;
        EXPECT_EQ(a.wrappers, b.wrappers) << file;
    }
}

TEST(Codegen, PlainOutputNeverDereferencesRawPointers)
{
    const std::regex deref{R"(\*\s*\()"};
    for (const auto& file : corpus_programs)
    {
        const auto unit = codegen_module(*corpus_module(file), options_for(stem(file)));
        EXPECT_FALSE(std::regex_search(unit.source, deref)) << file;
        EXPECT_EQ(unit.source.find("->data"), std::string::npos) << file;
    }
}

TEST(Codegen, CorpusCompilesWithoutWarnings)
{
    if (!have_cc())
        GTEST_SKIP() << "no C compiler";
    // Checked C output needs the Checked C compiler; only the plain C11 output is compiled here.
    for (const auto& file : corpus_programs)
        for (const auto trap : {CodegenOptions::TrapBehavior::abort_with_code, CodegenOptions::TrapBehavior::return_error})
        {
            TempDir dir;
            auto options = options_for(stem(file));
            options.trap_behavior = trap;
            const auto unit = codegen_module(*corpus_module(file), options);
            const auto c = dir.write(options.unit_name + ".c", unit.source);
            dir.write(options.unit_name + ".h", unit.header);
            std::string files = c.string();
            if (!unit.wrappers.empty())
                files += " " + dir.write(options.unit_name + "_wrappers.c", unit.wrappers).string();
            EXPECT_EQ(compile("-fsyntax-only " + files, dir), 0) << file;
        }
}

TEST(Codegen, CheckedCShape)
{
    CodegenOptions options = options_for("shatter");
    options.mode = CodegenOptions::Mode::checked_c_syntax;
    const auto unit = codegen_module(*corpus_module("shatter.msw"), options);
    EXPECT_NE(unit.source.find("#include \"mswasm_rt_checked.h\""), std::string::npos);
    EXPECT_NE(unit.source.find("#pragma CHECKED_SCOPE on"), std::string::npos);
    EXPECT_NE(unit.source.find("dynamic_check(rt_access_ok("), std::string::npos);
    EXPECT_NE(unit.source.find("*((ptr<"), std::string::npos);
    EXPECT_NE(unit.source.find("rt_shatter("), std::string::npos);
    EXPECT_NE(unit.source.find("handle_store("), std::string::npos);
    EXPECT_NE(unit.source.find("handle_load("), std::string::npos);
}

TEST(Codegen, WeakWrapperForMemcpy)
{
    const auto unit = codegen_module(*corpus_module("heartbleed_host.msw"), options_for("hb"));
    EXPECT_NE(unit.wrappers.find("__attribute__((weak)) Handle w2c_memcpy(Handle w2c_p0, Handle w2c_p1, uint32_t w2c_p2)"),
        std::string::npos)
        << unit.wrappers;
    ASSERT_EQ(unit.wrapper_prototypes.size(), 1u);

    auto strong = options_for("hb");
    strong.weak_wrapper_linkage = false;
    EXPECT_EQ(codegen_module(*corpus_module("heartbleed_host.msw"), strong).wrappers.find("weak"), std::string::npos);

    auto none = options_for("hb");
    none.emit_wrappers = false;
    EXPECT_TRUE(codegen_module(*corpus_module("heartbleed_host.msw"), none).wrappers.empty());
}

TEST(Codegen, StrongDefinitionOverridesTheWeakWrapper)
{
    if (!have_cc())
        GTEST_SKIP() << "no C compiler";
    TempDir dir;
    const auto unit = codegen_module(*corpus_module("heartbleed_host.msw"), options_for("hb"));
    dir.write("hb.h", unit.header);
    const auto wrappers = dir.write("hb_wrappers.c", unit.wrappers);
    // Stubs for the two runtime entry points the wrapper uses, plus a strong override.
    const auto driver = dir.write("driver.c", R"(#include "hb.h"
Handle rt_handle_from_native(void* p) { Handle h = {0}; h.data = (uint8_t*)p; return h; }
void* rt_handle_to_native(Handle h) { return h.data; }
Handle w2c_memcpy(Handle a, Handle b, uint32_t n) { (void)b; (void)n; a.id = 77; return a; }
int main(void) { Handle z = {0}; return w2c_memcpy(z, z, 0).id == 77 ? 0 : 1; }
)");
    const auto exe = dir.path / "driver";
    ASSERT_EQ(compile(wrappers.string() + " " + driver.string() + " -o " + exe.string(), dir), 0);
    EXPECT_EQ(std::system(exe.string().c_str()), 0);
}

TEST(Codegen, GlobalMachineryForStartAllocatedHandles)
{
    const auto vault = corpus_module("vault.msw");
    EXPECT_EQ(global_object_sites(vault->module()), (std::vector<std::pair<uint32_t, uint32_t>>{{0, 32}, {1, 64}}));
    const auto f = emit_global_machinery(*vault);
    EXPECT_NE(f.declarations.find("w2c_gobj0"), std::string::npos);
    EXPECT_NE(f.declarations.find("w2c_gobj1"), std::string::npos);
    EXPECT_EQ(f.init_functions, (std::vector<std::string>{"w2c_init_g0", "w2c_init_g1"}));
    EXPECT_NE(f.declarations.find("rt_bind_object"), std::string::npos);
    EXPECT_TRUE(emit_global_machinery(*corpus_module("fib.msw")).empty());
}

TEST(Codegen, PhysicalMemoryBinding)
{
    CodegenOptions options;
    options.arena_size = 4096;
    const auto f = lower_physical_memory(*corpus_module("physical_memory.msw"), options);
    EXPECT_NE(f.declarations.find("static Handle w2c_physical_memory"), std::string::npos);
    EXPECT_NE(f.init.find("rt_physical_memory(4096"), std::string::npos);
    EXPECT_TRUE(lower_physical_memory(*corpus_module("fib.msw")).empty());
}

TEST(Codegen, EmptyFunction)
{
    const auto unit = codegen_module(*load_module("(module (func) (export \"nop\" (func 0)))"), options_for("e"));
    EXPECT_NE(unit.header.find("void w2c_e_nop(void);"), std::string::npos) << unit.header;
    EXPECT_TRUE(unit.wrappers.empty());
}

TEST(Codegen, ReturnErrorAddsTryEntries)
{
    auto options = options_for("fib");
    options.trap_behavior = CodegenOptions::TrapBehavior::return_error;
    const auto unit = codegen_module(*corpus_module("fib.msw"), options);
    EXPECT_NE(unit.header.find("w2c_fib_fib_try(uint32_t* out"), std::string::npos) << unit.header;
    EXPECT_NE(unit.source.find("MSWASM_RT_TRY"), std::string::npos);
}

TEST(Codegen, PrefixAndIdentifiers)
{
    auto options = options_for("fib");
    options.module_prefix = "zz_";
    EXPECT_NE(codegen_module(*corpus_module("fib.msw"), options).header.find("zz_fib_fib("), std::string::npos);
    EXPECT_EQ(c_identifier("a-b.c"), "a_b_c");
    EXPECT_EQ(c_identifier("9x"), "_9x");
}

TEST(Codegen, UnsupportedConstructsRaise)
{
    EXPECT_THROW(codegen_module(*load_module(R"((module (import "m" "t" (table 1))))")), CodegenError);
    EXPECT_THROW(codegen_module(*load_module(R"((module (import "m" "mem" (memory 1))))")), CodegenError);
    EXPECT_THROW(codegen_module(*load_module(R"((module (import "env" "two" (func (result i32 i32)))))")),
        CodegenError);
}

TEST(RuntimeAbi, HeaderCompilesAsCAndCxx)
{
    if (!have_cc())
        GTEST_SKIP() << "no C compiler";
    TempDir dir;
    const auto c = dir.write("abi.c", R"(#include "mswasm_rt.h"
#include "mswasm_rt_checked.h"
#include <stddef.h>
_Static_assert(sizeof(((Handle*)0)->offset) == 4, "offset is 32-bit");
_Static_assert(offsetof(Handle, data) == 0, "data comes first");
_Static_assert(MSWASM_RT_TRAP_MISALIGNED == 7, "trap numbering");
_Static_assert(MSWASM_RT_HANDLE_WIDTH == 16, "handle width");
)");
    EXPECT_EQ(compile("-fsyntax-only " + c.string(), dir), 0);
    const auto cxx = dir.write("abi.cpp", "#include \"mswasm_rt.h\"\nint main() { return MSWASM_RT_EXIT_VALUES; }\n");
    const auto command = "c++ -std=c++20 -Wall -Werror -fsyntax-only" + include_flags() + " " + cxx.string();
    EXPECT_EQ(std::system(command.c_str()), 0);
}
}  // namespace
}  // namespace mswasm
