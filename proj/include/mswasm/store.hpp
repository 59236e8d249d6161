// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/ast.hpp"
#include "mswasm/trap.hpp"
#include "mswasm/value.hpp"
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mswasm
{
class TypedModule;
class HostContext;

enum class Tag : uint8_t
{
    D,  // data byte
    H,  // byte of a serialized handle
};

/// A segment: its bytes, one tag per byte, and the shadow identity of every serialized handle.
///
/// Invariant: slots has an entry at offset o iff tags[o, o + handle_width) are all H.
struct Segment
{
    std::vector<uint8_t> bytes;
    std::vector<Tag> tags;
    std::map<uint32_t, Handle> slots;

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Live allocation record plus every (base, bound) window issued for it.
struct Allocation
{
    uint32_t size = 0;
    std::set<std::pair<uint32_t, uint32_t>> windows;
};

class Allocator
{
public:
    bool is_live(uint32_t id) const noexcept { return live_.count(id) != 0; }
    /// True for ids handed out by this allocator at some point (live or freed).
    bool was_issued(uint32_t id) const noexcept { return id != linear_memory_id && id < next_id_; }
    uint32_t next_id() const noexcept { return next_id_; }
    const std::map<uint32_t, Allocation>& live() const noexcept { return live_; }

    uint32_t allocate(uint32_t size);
    void release(uint32_t id) { live_.erase(id); }
    Allocation* find(uint32_t id) noexcept;
    const Allocation* find(uint32_t id) const noexcept;

private:
    std::map<uint32_t, Allocation> live_;
    uint32_t next_id_ = 1;
};

/// Host-side failure that is not a trap: the configured segment budget ran out.
class ResourceExhausted : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class AccessKind : uint8_t
{
    alloc,
    free,
    segload,
    segstore,
    load,
    store,
};

std::string_view to_string(AccessKind kind) noexcept;

/// One observable memory event. For alloc/free, width is the segment size. Linear accesses
/// report id 0.
struct TraceEvent
{
    AccessKind kind = AccessKind::alloc;
    uint32_t id = 0;
    uint64_t address = 0;
    uint32_t width = 0;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using Trace = std::vector<TraceEvent>;

struct GlobalCell
{
    GlobalType type;
    Value value;
};

struct LinearMemory
{
    std::vector<uint8_t> bytes;
};

struct TableInstance
{
    /// Function addresses; empty slots trap on call_indirect.
    std::vector<std::optional<uint32_t>> elements;
};

using HostCallback = std::function<TrapOr<std::vector<Value>>(HostContext&, std::span<const Value>)>;

struct HostFunction
{
    std::string name;
    FuncType type;
    HostCallback callback;
};

struct FuncInstance
{
    FuncType type;
    /// Owning module instance (Store::instances index); unused for host functions.
    uint32_t instance = 0;
    const Function* code = nullptr;
    std::shared_ptr<const HostFunction> host;

    bool is_host() const noexcept { return host != nullptr; }
};

struct ExternVal
{
    ExternKind kind = ExternKind::func;
    uint32_t addr = 0;

    friend bool operator==(const ExternVal&, const ExternVal&) = default;
};

struct ModuleInstance
{
    std::shared_ptr<const TypedModule> module;
    std::vector<uint32_t> funcs;
    std::vector<uint32_t> globals;
    std::vector<uint32_t> tables;
    std::optional<uint32_t> memory;
    std::map<std::string, ExternVal> exports;
};

struct StoreLimits
{
    /// Upper bound on the total size of live segments.
    uint64_t max_segment_bytes = uint64_t{256} << 20;
    uint32_t max_memory_pages = 256;
};

/// The whole machine state: segments with tags, the allocator, linear memories, and the
/// runtime objects of every instantiated module. Copyable, so a copy is a snapshot.
///
/// Segment operations are all-or-nothing: an operation that traps leaves the store unchanged.
class Store
{
public:
    explicit Store(StoreLimits limits = {}) : limits_{limits} {}

    // Segment memory.

    /// Fresh segment of `size` zero bytes tagged D; returns ⟨0, 0, size, true, id⟩.
    /// Throws ResourceExhausted when the segment budget would be exceeded.
    Handle seg_alloc(uint32_t size);
    Status seg_free(const Handle& h);
    TrapOr<Value> seg_load(const Handle& h, ValType type, uint32_t static_offset, bool packed8 = false);
    Status seg_store(const Handle& h, const Value& v, uint32_t static_offset, bool packed8 = false);
    /// CSetBounds: narrows h to [h.offset, h.offset + len). Also the semantics of `slice`.
    TrapOr<Handle> handle_setbounds(const Handle& h, uint32_t len);

    /// Offset arithmetic; never traps.
    static Handle handle_add(const Handle& h, int32_t delta) noexcept;

    /// The trap an access of `width` bytes at h.offset + static_offset would raise, if any.
    /// Handle-typed accesses additionally require alignment.
    std::optional<Trap> check_access(
        const Handle& h, uint32_t static_offset, uint32_t width, bool handle_access) const;

    // Linear memory.

    uint32_t add_memory(uint32_t pages);
    TrapOr<Value> linear_load(uint32_t mem, uint32_t addr, ValType type, uint32_t static_offset,
        bool packed8 = false);
    Status linear_store(uint32_t mem, uint32_t addr, const Value& v, uint32_t static_offset,
        bool packed8 = false);

    // Inspection.

    const Allocator& allocator() const noexcept { return allocator_; }
    const Segment* segment(uint32_t id) const noexcept;
    const std::map<uint32_t, Segment>& segments() const noexcept { return segments_; }
    std::vector<uint32_t> live_ids() const;

    /// Deterministic newline-delimited listing of every segment's bytes, tags and slots.
    std::string dump() const;

    /// Full-rescan check of the tag/slot invariant for every segment. Returns a description of
    /// the first violation, if any.
    std::optional<std::string> check_tag_coherence() const;

    // Runtime objects.

    uint32_t add_global(GlobalType type, Value value);
    uint32_t add_table(TableInstance table);
    uint32_t add_function(FuncInstance func);
    uint32_t add_host_function(HostFunction func);

    std::vector<GlobalCell> globals;
    std::vector<TableInstance> tables;
    std::vector<FuncInstance> funcs;
    std::vector<LinearMemory> memories;
    std::vector<ModuleInstance> instances;

    /// When set, every successful memory operation appends an event.
    Trace* trace = nullptr;

    const StoreLimits& limits() const noexcept { return limits_; }

private:
    std::optional<Trap> check_handle(const Handle& h) const;
    void record(AccessKind kind, uint32_t id, uint64_t address, uint32_t width);
    void shatter(Segment& seg, uint32_t addr, uint32_t width);

    StoreLimits limits_;
    Allocator allocator_;
    std::map<uint32_t, Segment> segments_;
    uint64_t live_bytes_ = 0;
};

/// Serialized little-endian form of a handle: base, offset, bound, id (validity lives in the
/// slot shadow).
std::array<uint8_t, handle_width> serialize_handle(const Handle& h) noexcept;
Handle deserialize_handle(std::span<const uint8_t, handle_width> bytes, bool valid) noexcept;
}  // namespace mswasm
