// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/host.hpp"

namespace mswasm
{
HostContext::HostContext(Store& store, std::span<const Value> args) : store_{store}
{
    for (const auto& v : args)
        grant(v);
}

void HostContext::grant(const Value& v)
{
    if (v.type() == ValType::handle && v.as_handle().valid)
        granted_.insert(v.as_handle().id);
}

std::optional<Trap> HostContext::check_granted(const Handle& h) const
{
    if (h.valid && !granted(h.id))
        return Trap{TrapKind::tag_forgery, "host used a handle for segment " + std::to_string(h.id) +
                                               " it was never given"};
    return std::nullopt;
}

TrapOr<Value> HostContext::seg_load(const Handle& h, ValType type, uint32_t offset, bool packed8)
{
    if (auto t = check_granted(h))
        return *t;
    auto r = store_.seg_load(h, type, offset, packed8);
    if (r.ok())
        grant(r.value());
    return r;
}

Status HostContext::seg_store(const Handle& h, const Value& v, uint32_t offset, bool packed8)
{
    if (auto t = check_granted(h))
        return *t;
    if (v.type() == ValType::handle)
        if (auto t = check_granted(v.as_handle()))
            return *t;
    return store_.seg_store(h, v, offset, packed8);
}

Handle HostContext::seg_alloc(uint32_t size)
{
    const auto h = store_.seg_alloc(size);
    granted_.insert(h.id);
    return h;
}

Status HostContext::seg_free(const Handle& h)
{
    if (auto t = check_granted(h))
        return *t;
    return store_.seg_free(h);
}

TrapOr<Handle> HostContext::setbounds(const Handle& h, uint32_t len)
{
    if (auto t = check_granted(h))
        return *t;
    return store_.handle_setbounds(h, len);
}

std::optional<Trap> HostContext::check_access(const Handle& h, uint32_t offset, uint32_t width) const
{
    if (auto t = check_granted(h))
        return t;
    return store_.check_access(h, offset, width, false);
}

Status HostContext::admit_results(std::span<const Value> results) const
{
    for (const auto& v : results)
        if (v.type() == ValType::handle)
            if (auto t = check_granted(v.as_handle()))
                return *t;
    return ok_status();
}

namespace
{
TrapOr<std::vector<Value>> host_memcpy(HostContext& ctx, std::span<const Value> args)
{
    const auto& dst = args[0].as_handle();
    const auto& src = args[1].as_handle();
    const auto n = args[2].as_i32();
    if (auto t = ctx.check_access(src, 0, n))
        return *t;
    if (auto t = ctx.check_access(dst, 0, n))
        return *t;
    std::vector<Value> bytes;
    bytes.reserve(n);
    for (uint32_t i = 0; i < n; ++i)
    {
        auto b = ctx.seg_load(src, ValType::i32, i, true);
        if (!b.ok())
            return std::move(b).trap();
        bytes.push_back(b.value());
    }
    for (uint32_t i = 0; i < n; ++i)
    {
        auto s = ctx.seg_store(dst, bytes[i], i, true);
        if (!s.ok())
            return std::move(s).trap();
    }
    return std::vector<Value>{args[0]};
}

TrapOr<std::vector<Value>> host_abort(HostContext&, std::span<const Value>)
{
    return Trap{TrapKind::unreachable, "abort called"};
}
}  // namespace

std::vector<std::string_view> builtin_host_names()
{
    return {"memcpy", "abort"};
}

std::optional<HostFunction> builtin_host(std::string_view name)
{
    using enum ValType;
    if (name == "memcpy")
        return HostFunction{"memcpy", FuncType{{handle, handle, i32}, {handle}}, host_memcpy};
    if (name == "abort")
        return HostFunction{"abort", FuncType{{}, {}}, host_abort};
    return std::nullopt;
}
}  // namespace mswasm
