// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace mswasm
{
enum class TrapKind : uint8_t
{
    spatial,
    temporal,
    invalid_handle,
    tag_forgery,
    linear_oob,
    indirect_call_type_mismatch,
    unreachable,
    misaligned,
};

inline constexpr TrapKind all_trap_kinds[] = {TrapKind::spatial, TrapKind::temporal,
    TrapKind::invalid_handle, TrapKind::tag_forgery, TrapKind::linear_oob,
    TrapKind::indirect_call_type_mismatch, TrapKind::unreachable, TrapKind::misaligned};

/// Script/CLI spelling, e.g. "invalid_handle".
std::string_view to_string(TrapKind kind) noexcept;
std::optional<TrapKind> trap_kind_from_string(std::string_view name) noexcept;

struct Trap
{
    TrapKind kind = TrapKind::unreachable;
    std::string detail;

    friend bool operator==(const Trap& a, const Trap& b) noexcept { return a.kind == b.kind; }
};

/// Either a result or the trap that prevented it.
template <typename T>
class TrapOr
{
public:
    TrapOr(T value) : v_{std::move(value)} {}  // NOLINT(google-explicit-constructor)
    TrapOr(Trap trap) : v_{std::move(trap)} {}  // NOLINT(google-explicit-constructor)

    bool ok() const noexcept { return v_.index() == 0; }
    explicit operator bool() const noexcept { return ok(); }

    T& value() & { return std::get<0>(v_); }
    const T& value() const& { return std::get<0>(v_); }
    T&& value() && { return std::get<0>(std::move(v_)); }
    const Trap& trap() const& { return std::get<1>(v_); }
    Trap&& trap() && { return std::get<1>(std::move(v_)); }

private:
    std::variant<T, Trap> v_;
};

/// Trap-or-nothing.
using Status = TrapOr<std::monostate>;

inline Status ok_status()
{
    return Status{std::monostate{}};
}
}  // namespace mswasm
