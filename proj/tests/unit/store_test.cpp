// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/conformance.hpp"
#include "mswasm/loader.hpp"
#include "mswasm/store.hpp"
#include <gtest/gtest.h>
#include <filesystem>
#include <random>

namespace mswasm
{
namespace
{
std::optional<TrapKind> trap_of(const Status& s)
{
    return s ? std::nullopt : std::optional<TrapKind>{s.trap().kind};
}

template <typename T>
std::optional<TrapKind> trap_of(const TrapOr<T>& r)
{
    return r ? std::nullopt : std::optional<TrapKind>{r.trap().kind};
}

TEST(Store, AllocReturnsAFreshZeroedSegment)
{
    Store s;
    const auto h = s.seg_alloc(8);
    EXPECT_EQ(h, (Handle{0, 0, 8, true, 1}));
    const auto* seg = s.segment(h.id);
    ASSERT_NE(seg, nullptr);
    EXPECT_EQ(seg->bytes, std::vector<uint8_t>(8, 0));
    EXPECT_EQ(s.seg_alloc(0).id, 2u);
}

TEST(Store, SpatialPredicateForEveryWidth)
{
    // Access succeeds iff 0 <= a and a + w <= bound, with a = offset + static offset.
    for (const auto type : {ValType::i32, ValType::i64})
        for (uint32_t bound = 0; bound <= 24; ++bound)
        {
            Store s;
            const auto h = s.seg_alloc(bound);
            const int64_t w = type == ValType::i32 ? 4 : 8;
            for (int32_t offset = -10; offset <= 30; ++offset)
            {
                const auto moved = Store::handle_add(h, offset);
                const bool expect_ok = offset >= 0 && offset + w <= bound;
                EXPECT_EQ(s.seg_load(moved, type, 0).ok(), expect_ok) << "bound " << bound << " offset " << offset;
                if (!expect_ok)
                {
                    EXPECT_EQ(trap_of(s.seg_load(moved, type, 0)), TrapKind::spatial);
                }
            }
        }
}

TEST(Store, StaticOffsetOverflowIsSpatial)
{
    Store s;
    const auto h = s.seg_alloc(8);
    EXPECT_EQ(trap_of(s.seg_load(h, ValType::i32, 0xfffffffeu)), TrapKind::spatial);
    EXPECT_EQ(trap_of(s.seg_load(Store::handle_add(h, 4), ValType::i32, 0xfffffffcu)), TrapKind::spatial);
}

TEST(Store, UseAfterFreeAndDoubleFreeAreTemporal)
{
    Store s;
    const auto h = s.seg_alloc(4);
    ASSERT_TRUE(s.seg_free(h));
    EXPECT_EQ(trap_of(s.seg_load(h, ValType::i32, 0)), TrapKind::temporal);
    EXPECT_EQ(trap_of(s.seg_store(h, Value::i32(1), 0)), TrapKind::temporal);
    EXPECT_EQ(trap_of(s.seg_free(h)), TrapKind::temporal);
}

TEST(Store, TrapsLeaveTheStoreUnchanged)
{
    Store s;
    const auto h = s.seg_alloc(8);
    const auto before = s.segments();
    EXPECT_FALSE(s.seg_store(Store::handle_add(h, 6), Value::i32(0xdeadbeef), 0));
    EXPECT_EQ(s.segments(), before);
}

TEST(Store, HandleRoundTripAndShattering)
{
    Store s;
    const auto frame = s.seg_alloc(32);
    const auto obj = s.seg_alloc(4);
    ASSERT_TRUE(s.seg_store(frame, Value::handle(obj), 16));
    auto back = s.seg_load(frame, ValType::handle, 16);
    ASSERT_TRUE(back);
    EXPECT_EQ(back.value().as_handle(), obj);

    ASSERT_TRUE(s.seg_store(frame, Value::i32(0), 20, true));
    back = s.seg_load(frame, ValType::handle, 16);
    ASSERT_TRUE(back);
    EXPECT_FALSE(back.value().as_handle().valid);
    EXPECT_EQ(trap_of(s.seg_load(back.value().as_handle(), ValType::i32, 0)), TrapKind::invalid_handle);
    EXPECT_FALSE(s.check_tag_coherence().has_value());
}

TEST(Store, HandleAccessesMustBeAligned)
{
    Store s;
    const auto frame = s.seg_alloc(48);
    const auto obj = s.seg_alloc(4);
    EXPECT_EQ(trap_of(s.seg_store(frame, Value::handle(obj), 8)), TrapKind::misaligned);
    EXPECT_EQ(trap_of(s.seg_load(frame, ValType::handle, 4)), TrapKind::misaligned);
    // Spatial is checked before alignment.
    EXPECT_EQ(trap_of(s.seg_load(frame, ValType::handle, 40)), TrapKind::spatial);
}

TEST(Store, SetboundsNarrowsAndRegistersTheWindow)
{
    Store s;
    const auto h = s.seg_alloc(16);
    const auto narrowed = s.handle_setbounds(Store::handle_add(h, 4), 8);
    ASSERT_TRUE(narrowed);
    EXPECT_EQ(narrowed.value(), (Handle{4, 0, 8, true, h.id}));
    EXPECT_TRUE(s.seg_load(narrowed.value(), ValType::i32, 4));
    EXPECT_EQ(trap_of(s.seg_load(narrowed.value(), ValType::i32, 5)), TrapKind::spatial);
    EXPECT_EQ(trap_of(s.handle_setbounds(Store::handle_add(h, 4), 13)), TrapKind::spatial);
    EXPECT_EQ(trap_of(s.handle_setbounds(null_handle, 0)), TrapKind::invalid_handle);
}

TEST(Store, ForgedWindowsAndIdsTrapTagForgery)
{
    Store s;
    const auto h = s.seg_alloc(16);
    Handle wider = h;
    wider.bound = 32;
    EXPECT_EQ(trap_of(s.seg_load(wider, ValType::i32, 20)), TrapKind::tag_forgery);
    Handle unissued = h;
    unissued.id = 99;
    EXPECT_EQ(trap_of(s.seg_load(unissued, ValType::i32, 0)), TrapKind::tag_forgery);
    Handle linear = h;
    linear.id = linear_memory_id;
    EXPECT_EQ(trap_of(s.seg_load(linear, ValType::i32, 0)), TrapKind::tag_forgery);
}

TEST(Store, FreeNeedsOffsetZero)
{
    Store s;
    const auto h = s.seg_alloc(8);
    EXPECT_EQ(trap_of(s.seg_free(Store::handle_add(h, 4))), TrapKind::spatial);
    EXPECT_TRUE(s.seg_free(h));
}

TEST(Store, IdsAreNeverReused)
{
    Store s;
    std::set<uint32_t> seen;
    for (int i = 0; i < 1000; ++i)
    {
        const auto h = s.seg_alloc(1);
        EXPECT_TRUE(seen.insert(h.id).second);
        ASSERT_TRUE(s.seg_free(h));
    }
}

TEST(Store, SegmentBudgetRaisesResourceExhausted)
{
    Store s{StoreLimits{64, 1}};
    s.seg_alloc(60);
    EXPECT_THROW(s.seg_alloc(8), ResourceExhausted);
}

TEST(Store, LinearMemoryBounds)
{
    Store s;
    const auto mem = s.add_memory(1);
    EXPECT_TRUE(s.linear_store(mem, page_size - 4, Value::i32(7), 0));
    EXPECT_EQ(s.linear_load(mem, page_size - 4, ValType::i32, 0).value(), Value::i32(7));
    EXPECT_EQ(trap_of(s.linear_load(mem, page_size - 3, ValType::i32, 0)), TrapKind::linear_oob);
}

TEST(Store, TraceRecordsEveryEvent)
{
    Store s;
    Trace trace;
    s.trace = &trace;
    const auto h = s.seg_alloc(8);
    ASSERT_TRUE(s.seg_store(h, Value::i32(1), 4));
    ASSERT_TRUE(s.seg_load(h, ValType::i32, 4));
    ASSERT_TRUE(s.seg_free(h));
    ASSERT_EQ(trace.size(), 4u);
    EXPECT_EQ(trace[0], (TraceEvent{AccessKind::alloc, 1, 0, 8}));
    EXPECT_EQ(trace[1], (TraceEvent{AccessKind::segstore, 1, 4, 4}));
    EXPECT_EQ(trace[3].kind, AccessKind::free);
}

TEST(Store, RandomOperationsKeepTagsCoherent)
{
    std::mt19937 rng{11};
    Store s;
    std::vector<Handle> handles;
    for (int step = 0; step < 5000; ++step)
    {
        const auto choice = rng() % 5;
        if (handles.empty() || choice == 0)
            handles.push_back(s.seg_alloc(16 * (1 + rng() % 4)));
        else
        {
            const auto& h = handles[rng() % handles.size()];
            const auto offset = static_cast<uint32_t>(rng() % 64);
            if (choice == 1)
                (void)s.seg_store(h, Value::handle(handles[rng() % handles.size()]), offset & ~15u);
            else if (choice == 2)
                (void)s.seg_store(h, Value::i32(static_cast<uint32_t>(rng())), offset, rng() % 2 == 0);
            else if (choice == 3)
                (void)s.seg_load(h, ValType::handle, offset & ~15u);
            else if (rng() % 8 == 0)
                (void)s.seg_free(h);
        }
    }
    EXPECT_FALSE(s.check_tag_coherence().has_value()) << *s.check_tag_coherence();
}

TEST(Conformance, TableRunsCleanAgainstRuntimeStore)
{
    for (const auto& entry : std::filesystem::directory_iterator(MSWASM_CONFORMANCE_DIR))
    {
        const auto report = run_conformance_table(read_file(entry.path()));
        EXPECT_GT(report.cases, 0u) << entry.path();
        for (const auto& f : report.failures)
            ADD_FAILURE() << entry.path().filename() << ":" << f.line << " [" << f.case_name << "] expected " << f.expected
                          << ", got " << f.actual;
    }
}

TEST(Conformance, MismatchesAreReported)
{
    const auto report = run_conformance_table("case c\nh0 = alloc 4\nload i32 h0 0 => 5\nload i32 h0 4\n");
    EXPECT_EQ(report.steps, 3u);
    ASSERT_EQ(report.failures.size(), 2u);
    EXPECT_EQ(report.failures[0].actual, "0");
    EXPECT_EQ(report.failures[1].line, 4u);
    EXPECT_EQ(report.failures[1].actual, "trap spatial");
}

TEST(Conformance, SyntaxErrorsCarryTheLine)
{
    EXPECT_THROW(run_conformance_table("h0 = alloc 4\n"), ConformanceSyntaxError);
    try
    {
        run_conformance_table("case c\n\nh0 = frobnicate\n");
        FAIL();
    }
    catch (const ConformanceSyntaxError& e)
    {
        EXPECT_EQ(e.line(), 3u);
    }
}
}  // namespace
}  // namespace mswasm
