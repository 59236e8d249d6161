// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/constants.hpp"
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mswasm
{
enum class ValType : uint8_t
{
    i32,
    i64,
    f32,
    f64,
    handle,
};

inline constexpr ValType all_val_types[] = {
    ValType::i32, ValType::i64, ValType::f32, ValType::f64, ValType::handle};

std::string_view to_string(ValType type) noexcept;
std::optional<ValType> val_type_from_string(std::string_view name) noexcept;

/// Byte width of a value of the given type when stored in a segment.
constexpr uint32_t byte_width(ValType type) noexcept
{
    switch (type)
    {
    case ValType::i32:
    case ValType::f32:
        return 4;
    case ValType::i64:
    case ValType::f64:
        return 8;
    case ValType::handle:
        return handle_width;
    }
    return 0;
}

constexpr bool is_numeric(ValType type) noexcept
{
    return type != ValType::handle;
}

/// The fat pointer ⟨base, offset, bound, valid, id⟩.
///
/// `base` and `bound` describe the accessible window inside segment `id`. The offset is signed
/// and may wander outside the window; range checks happen only at access time.
struct Handle
{
    uint32_t base = 0;
    int32_t offset = 0;
    uint32_t bound = 0;
    bool valid = false;
    uint32_t id = 0;

    friend constexpr bool operator==(const Handle&, const Handle&) = default;
};

inline constexpr Handle null_handle{};

std::string to_string(const Handle& h);

/// A tagged scalar. Floats are stored by bit pattern, so equality is bitwise.
class Value
{
public:
    constexpr Value() noexcept = default;

    static constexpr Value i32(uint32_t v) noexcept { return {ValType::i32, v, {}}; }
    static constexpr Value i64(uint64_t v) noexcept { return {ValType::i64, v, {}}; }
    static Value f32(float v) noexcept { return {ValType::f32, std::bit_cast<uint32_t>(v), {}}; }
    static Value f64(double v) noexcept { return {ValType::f64, std::bit_cast<uint64_t>(v), {}}; }
    static constexpr Value f32_bits(uint32_t bits) noexcept { return {ValType::f32, bits, {}}; }
    static constexpr Value f64_bits(uint64_t bits) noexcept { return {ValType::f64, bits, {}}; }
    static constexpr Value handle(const Handle& h) noexcept { return {ValType::handle, 0, h}; }

    /// The zero value of a type; for handles this is the null handle.
    static constexpr Value zero(ValType type) noexcept { return {type, 0, {}}; }

    constexpr ValType type() const noexcept { return type_; }
    constexpr uint32_t as_i32() const noexcept { return static_cast<uint32_t>(bits_); }
    constexpr uint64_t as_i64() const noexcept { return bits_; }
    float as_f32() const noexcept { return std::bit_cast<float>(static_cast<uint32_t>(bits_)); }
    double as_f64() const noexcept { return std::bit_cast<double>(bits_); }
    constexpr uint64_t bits() const noexcept { return bits_; }
    constexpr const Handle& as_handle() const noexcept { return handle_; }

    friend constexpr bool operator==(const Value&, const Value&) = default;

private:
    constexpr Value(ValType type, uint64_t bits, Handle h) noexcept
      : type_{type}, bits_{bits}, handle_{h}
    {}

    ValType type_ = ValType::i32;
    uint64_t bits_ = 0;
    Handle handle_{};
};

std::string to_string(const Value& v);
}  // namespace mswasm
