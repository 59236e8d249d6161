// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/store.hpp"
#include <set>
#include <span>
#include <string_view>
#include <vector>

namespace mswasm
{
/// The only view of the store a host function gets.
///
/// Every operation goes through the checked runtime-store operations, and a handle is accepted
/// only if its id was granted to this context: it arrived as an argument, was loaded through
/// the context, or was allocated through it. Any other handle traps TagForgery, so a host
/// function cannot reach a segment by guessing its id.
class HostContext
{
public:
    HostContext(Store& store, std::span<const Value> args);

    TrapOr<Value> seg_load(const Handle& h, ValType type, uint32_t offset, bool packed8 = false);
    Status seg_store(const Handle& h, const Value& v, uint32_t offset, bool packed8 = false);
    Handle seg_alloc(uint32_t size);
    Status seg_free(const Handle& h);
    TrapOr<Handle> setbounds(const Handle& h, uint32_t len);
    static Handle handle_add(const Handle& h, int32_t delta) noexcept { return Store::handle_add(h, delta); }

    /// Would an access of `width` bytes through h at `offset` succeed?
    std::optional<Trap> check_access(const Handle& h, uint32_t offset, uint32_t width) const;

    bool granted(uint32_t id) const noexcept { return granted_.count(id) != 0; }

    /// Checks that every valid handle among `results` is one the context may hand back.
    Status admit_results(std::span<const Value> results) const;

private:
    std::optional<Trap> check_granted(const Handle& h) const;
    void grant(const Value& v);

    Store& store_;
    std::set<uint32_t> granted_;
};

/// Built-in host functions, imported from module "env":
///   memcpy (param handle handle i32) (result handle): copies n data bytes, returns dst
///   abort: traps unreachable
std::vector<std::string_view> builtin_host_names();
std::optional<HostFunction> builtin_host(std::string_view name);
}  // namespace mswasm
