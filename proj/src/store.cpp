// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/store.hpp"
#include <cstdio>
#include <cstring>

namespace mswasm
{
namespace
{
Trap trap(TrapKind kind, std::string detail)
{
    return Trap{kind, std::move(detail)};
}

void put_le(uint8_t* out, uint64_t v, uint32_t width) noexcept
{
    for (uint32_t i = 0; i < width; ++i)
        out[i] = static_cast<uint8_t>(v >> (8 * i));
}

uint64_t get_le(const uint8_t* in, uint32_t width) noexcept
{
    uint64_t v = 0;
    for (uint32_t i = 0; i < width; ++i)
        v |= uint64_t{in[i]} << (8 * i);
    return v;
}

Value numeric_from_bits(ValType type, uint64_t bits) noexcept
{
    switch (type)
    {
    case ValType::i32:
        return Value::i32(static_cast<uint32_t>(bits));
    case ValType::i64:
        return Value::i64(bits);
    case ValType::f32:
        return Value::f32_bits(static_cast<uint32_t>(bits));
    case ValType::f64:
        return Value::f64_bits(bits);
    case ValType::handle:
        break;
    }
    return Value::zero(type);
}

uint32_t access_width(ValType type, bool packed8) noexcept
{
    return packed8 ? 1 : byte_width(type);
}
}  // namespace

std::string_view to_string(AccessKind kind) noexcept
{
    switch (kind)
    {
    case AccessKind::alloc:
        return "alloc";
    case AccessKind::free:
        return "free";
    case AccessKind::segload:
        return "segload";
    case AccessKind::segstore:
        return "segstore";
    case AccessKind::load:
        return "load";
    case AccessKind::store:
        return "store";
    }
    return "?";
}

uint32_t Allocator::allocate(uint32_t size)
{
    const auto id = next_id_++;
    auto& a = live_[id];
    a.size = size;
    a.windows.emplace(0, size);
    return id;
}

Allocation* Allocator::find(uint32_t id) noexcept
{
    const auto it = live_.find(id);
    return it == live_.end() ? nullptr : &it->second;
}

const Allocation* Allocator::find(uint32_t id) const noexcept
{
    const auto it = live_.find(id);
    return it == live_.end() ? nullptr : &it->second;
}

std::array<uint8_t, handle_width> serialize_handle(const Handle& h) noexcept
{
    std::array<uint8_t, handle_width> out{};
    put_le(out.data(), h.base, 4);
    put_le(out.data() + 4, static_cast<uint32_t>(h.offset), 4);
    put_le(out.data() + 8, h.bound, 4);
    put_le(out.data() + 12, h.id, 4);
    return out;
}

Handle deserialize_handle(std::span<const uint8_t, handle_width> bytes, bool valid) noexcept
{
    Handle h;
    h.base = static_cast<uint32_t>(get_le(bytes.data(), 4));
    h.offset = static_cast<int32_t>(static_cast<uint32_t>(get_le(bytes.data() + 4, 4)));
    h.bound = static_cast<uint32_t>(get_le(bytes.data() + 8, 4));
    h.id = static_cast<uint32_t>(get_le(bytes.data() + 12, 4));
    h.valid = valid;
    return h;
}

void Store::record(AccessKind kind, uint32_t id, uint64_t address, uint32_t width)
{
    if (trace != nullptr)
        trace->push_back(TraceEvent{kind, id, address, width});
}

std::optional<Trap> Store::check_handle(const Handle& h) const
{
    if (!h.valid)
        return trap(TrapKind::invalid_handle, "handle is not valid");
    if (!allocator_.was_issued(h.id))
        return trap(TrapKind::tag_forgery, "segment id " + std::to_string(h.id) + " was never issued");
    const auto* a = allocator_.find(h.id);
    if (a == nullptr)
        return trap(TrapKind::temporal, "segment " + std::to_string(h.id) + " was freed");
    if (a->windows.count({h.base, h.bound}) == 0)
        return trap(TrapKind::tag_forgery, "window [" + std::to_string(h.base) + ", +" +
                                               std::to_string(h.bound) + ") was never issued for segment " +
                                               std::to_string(h.id));
    return std::nullopt;
}

std::optional<Trap> Store::check_access(
    const Handle& h, uint32_t static_offset, uint32_t width, bool handle_access) const
{
    if (auto t = check_handle(h))
        return t;
    const int64_t a = int64_t{h.offset} + static_offset;
    if (a < 0 || a + width > h.bound)
        return trap(TrapKind::spatial, "access of " + std::to_string(width) + " bytes at offset " +
                                           std::to_string(a) + " outside bound " + std::to_string(h.bound));
    if (handle_access && (h.base + static_cast<uint64_t>(a)) % handle_width != 0)
        return trap(TrapKind::misaligned, "handle access at segment offset " +
                                              std::to_string(h.base + static_cast<uint64_t>(a)));
    return std::nullopt;
}

Handle Store::seg_alloc(uint32_t size)
{
    if (live_bytes_ + size > limits_.max_segment_bytes)
        throw ResourceExhausted{"segment budget of " + std::to_string(limits_.max_segment_bytes) +
                                " bytes exhausted"};
    const auto id = allocator_.allocate(size);
    auto& seg = segments_[id];
    seg.bytes.assign(size, 0);
    seg.tags.assign(size, Tag::D);
    live_bytes_ += size;
    record(AccessKind::alloc, id, 0, size);
    return Handle{0, 0, size, true, id};
}

Status Store::seg_free(const Handle& h)
{
    if (auto t = check_handle(h))
        return *t;
    if (h.offset != 0)
        return trap(TrapKind::spatial, "free through a handle with nonzero offset");
    const auto size = allocator_.find(h.id)->size;
    allocator_.release(h.id);
    segments_.erase(h.id);
    live_bytes_ -= size;
    record(AccessKind::free, h.id, 0, size);
    return ok_status();
}

void Store::shatter(Segment& seg, uint32_t addr, uint32_t width)
{
    if (seg.slots.empty())
        return;
    const uint32_t from = addr >= handle_width - 1 ? addr - (handle_width - 1) : 0;
    auto it = seg.slots.lower_bound(from);
    while (it != seg.slots.end() && it->first < addr + width)
    {
        std::fill_n(seg.tags.begin() + it->first, handle_width, Tag::D);
        it = seg.slots.erase(it);
    }
}

TrapOr<Value> Store::seg_load(const Handle& h, ValType type, uint32_t static_offset, bool packed8)
{
    const auto width = access_width(type, packed8);
    if (auto t = check_access(h, static_offset, width, type == ValType::handle))
        return *t;
    const auto addr = static_cast<uint32_t>(h.base + int64_t{h.offset} + static_offset);
    const auto& seg = segments_.at(h.id);
    record(AccessKind::segload, h.id, addr, width);
    if (type != ValType::handle)
        return numeric_from_bits(type, get_le(seg.bytes.data() + addr, width));
    if (const auto it = seg.slots.find(addr); it != seg.slots.end())
        return Value::handle(it->second);
    return Value::handle(deserialize_handle(
        std::span<const uint8_t, handle_width>(seg.bytes.data() + addr, handle_width), false));
}

Status Store::seg_store(const Handle& h, const Value& v, uint32_t static_offset, bool packed8)
{
    const auto width = access_width(v.type(), packed8);
    if (auto t = check_access(h, static_offset, width, v.type() == ValType::handle))
        return *t;
    const auto addr = static_cast<uint32_t>(h.base + int64_t{h.offset} + static_offset);
    auto& seg = segments_.at(h.id);
    if (v.type() == ValType::handle)
    {
        const auto bytes = serialize_handle(v.as_handle());
        std::copy(bytes.begin(), bytes.end(), seg.bytes.begin() + addr);
        std::fill_n(seg.tags.begin() + addr, handle_width, Tag::H);
        seg.slots[addr] = v.as_handle();
    }
    else
    {
        shatter(seg, addr, width);
        put_le(seg.bytes.data() + addr, v.bits(), width);
    }
    record(AccessKind::segstore, h.id, addr, width);
    return ok_status();
}

TrapOr<Handle> Store::handle_setbounds(const Handle& h, uint32_t len)
{
    if (!h.valid)
        return trap(TrapKind::invalid_handle, "handle is not valid");
    if (!allocator_.was_issued(h.id))
        return trap(TrapKind::tag_forgery, "segment id " + std::to_string(h.id) + " was never issued");
    auto* a = allocator_.find(h.id);
    if (a != nullptr && a->windows.count({h.base, h.bound}) == 0)
        return trap(TrapKind::tag_forgery, "window was never issued for segment " + std::to_string(h.id));
    if (h.offset < 0 || int64_t{h.offset} + len > h.bound)
        return trap(TrapKind::spatial, "new bounds exceed the handle's window");
    const Handle out{h.base + static_cast<uint32_t>(h.offset), 0, len, true, h.id};
    if (a != nullptr)
        a->windows.emplace(out.base, out.bound);
    return out;
}

Handle Store::handle_add(const Handle& h, int32_t delta) noexcept
{
    Handle out = h;
    out.offset = static_cast<int32_t>(static_cast<uint32_t>(h.offset) + static_cast<uint32_t>(delta));
    return out;
}

uint32_t Store::add_memory(uint32_t pages)
{
    if (pages > limits_.max_memory_pages)
        throw ResourceExhausted{"memory of " + std::to_string(pages) + " pages exceeds the limit"};
    memories.push_back(LinearMemory{std::vector<uint8_t>(uint64_t{pages} * page_size, 0)});
    return static_cast<uint32_t>(memories.size() - 1);
}

TrapOr<Value> Store::linear_load(
    uint32_t mem, uint32_t addr, ValType type, uint32_t static_offset, bool packed8)
{
    if (type == ValType::handle)
        throw std::invalid_argument{"handle load from linear memory"};
    const auto width = access_width(type, packed8);
    const auto& bytes = memories.at(mem).bytes;
    const uint64_t ea = uint64_t{addr} + static_offset;
    if (ea + width > bytes.size())
        return trap(TrapKind::linear_oob, "linear load at " + std::to_string(ea));
    record(AccessKind::load, linear_memory_id, ea, width);
    return numeric_from_bits(type, get_le(bytes.data() + ea, width));
}

Status Store::linear_store(uint32_t mem, uint32_t addr, const Value& v, uint32_t static_offset, bool packed8)
{
    if (v.type() == ValType::handle)
        throw std::invalid_argument{"handle store to linear memory"};
    const auto width = access_width(v.type(), packed8);
    auto& bytes = memories.at(mem).bytes;
    const uint64_t ea = uint64_t{addr} + static_offset;
    if (ea + width > bytes.size())
        return trap(TrapKind::linear_oob, "linear store at " + std::to_string(ea));
    put_le(bytes.data() + ea, v.bits(), width);
    record(AccessKind::store, linear_memory_id, ea, width);
    return ok_status();
}

const Segment* Store::segment(uint32_t id) const noexcept
{
    const auto it = segments_.find(id);
    return it == segments_.end() ? nullptr : &it->second;
}

std::vector<uint32_t> Store::live_ids() const
{
    std::vector<uint32_t> ids;
    for (const auto& [id, _] : segments_)
        ids.push_back(id);
    return ids;
}

std::string Store::dump() const
{
    std::string out = "next_id " + std::to_string(allocator_.next_id()) + "\n";
    char buf[8];
    for (const auto& [id, seg] : segments_)
    {
        out += "segment " + std::to_string(id) + " size " + std::to_string(seg.bytes.size()) + "\n";
        for (size_t row = 0; row < seg.bytes.size(); row += 16)
        {
            std::snprintf(buf, sizeof buf, "%06zx", row);
            out += std::string("  ") + buf + " ";
            std::string tags;
            for (size_t i = row; i < std::min(row + 16, seg.bytes.size()); ++i)
            {
                std::snprintf(buf, sizeof buf, " %02x", seg.bytes[i]);
                out += buf;
                tags += seg.tags[i] == Tag::H ? 'H' : 'D';
            }
            out += "  " + tags + "\n";
        }
        for (const auto& [offset, h] : seg.slots)
            out += "  slot " + std::to_string(offset) + " " + to_string(h) + "\n";
    }
    return out;
}

std::optional<std::string> Store::check_tag_coherence() const
{
    for (const auto& [id, seg] : segments_)
    {
        const auto where = [&](size_t o) {
            return "segment " + std::to_string(id) + " offset " + std::to_string(o);
        };
        if (seg.tags.size() != seg.bytes.size())
            return where(0) + ": tag array size differs from byte array size";
        std::vector<bool> covered(seg.bytes.size(), false);
        for (const auto& [offset, h] : seg.slots)
        {
            if (uint64_t{offset} + handle_width > seg.bytes.size())
                return where(offset) + ": slot runs past the segment end";
            for (uint32_t i = 0; i < handle_width; ++i)
            {
                if (seg.tags[offset + i] != Tag::H)
                    return where(offset + i) + ": slot byte tagged D";
                if (covered[offset + i])
                    return where(offset + i) + ": overlapping slots";
                covered[offset + i] = true;
            }
            const auto bytes = serialize_handle(h);
            if (!std::equal(bytes.begin(), bytes.end(), seg.bytes.begin() + offset))
                return where(offset) + ": slot bytes differ from the recorded handle";
        }
        for (size_t o = 0; o < seg.bytes.size(); ++o)
            if (seg.tags[o] == Tag::H && !covered[o])
                return where(o) + ": byte tagged H outside any slot";
    }
    return std::nullopt;
}

uint32_t Store::add_global(GlobalType type, Value value)
{
    globals.push_back(GlobalCell{type, value});
    return static_cast<uint32_t>(globals.size() - 1);
}

uint32_t Store::add_table(TableInstance table)
{
    tables.push_back(std::move(table));
    return static_cast<uint32_t>(tables.size() - 1);
}

uint32_t Store::add_function(FuncInstance func)
{
    funcs.push_back(std::move(func));
    return static_cast<uint32_t>(funcs.size() - 1);
}

uint32_t Store::add_host_function(HostFunction func)
{
    FuncInstance inst;
    inst.type = func.type;
    inst.host = std::make_shared<const HostFunction>(std::move(func));
    return add_function(std::move(inst));
}
}  // namespace mswasm
