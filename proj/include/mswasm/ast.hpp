// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/value.hpp"
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mswasm
{
enum class Opcode : uint8_t
{
    unreachable,
    nop,
    block,
    loop,
    if_,
    br,
    br_if,
    return_,
    call,
    call_indirect,
    drop,
    select,
    local_get,
    local_set,
    local_tee,
    global_get,
    global_set,
    const_,

    // Integer (and, for add, float) operators carrying their operand type.
    eqz,
    eq,
    ne,
    lt_s,
    lt_u,
    gt_s,
    gt_u,
    le_s,
    le_u,
    ge_s,
    ge_u,
    add,
    sub,
    mul,
    and_,
    or_,
    xor_,
    shl,
    shr_s,
    shr_u,
    wrap,      // i64 -> i32
    extend_u,  // i32 -> i64, zero-extending

    // Coarse-grained linear memory.
    load,
    store,

    // Segment memory and handles.
    segload,
    segstore,
    slice,
    segalloc,
    handle_add,
    segfree,
    handle_null,
    handle_setbounds,
};

/// Text mnemonic as used in the s-expression format, e.g. "segload" or "h.add".
std::string_view mnemonic(Opcode op) noexcept;
std::optional<Opcode> opcode_from_mnemonic(std::string_view name) noexcept;

bool is_binary_numeric(Opcode op) noexcept;
bool is_comparison(Opcode op) noexcept;

/// A single instruction. Block-structured instructions own their nested bodies.
///
/// Fields not meaningful for an opcode keep their default values, so structural equality is
/// well defined.
struct Instr
{
    Opcode op = Opcode::nop;

    /// Operand type of numeric operators and memory accesses.
    ValType type = ValType::i32;

    /// 8-bit packed access (load8_u / store8 / segload8_u / segstore8); i32 only.
    bool packed8 = false;

    /// Local, global, function, type index or branch depth, depending on op.
    uint32_t index = 0;

    /// Table index of call_indirect.
    uint32_t table = 0;

    /// Static offset of memory accesses.
    uint32_t offset = 0;

    /// Immediate of const.
    Value value;

    /// Result types of block, loop and if.
    std::vector<ValType> results;

    std::vector<Instr> body;
    std::vector<Instr> else_body;

    friend bool operator==(const Instr&, const Instr&) = default;

    static Instr simple(Opcode op)
    {
        Instr i;
        i.op = op;
        return i;
    }
    static Instr typed(Opcode op, ValType t)
    {
        Instr i = simple(op);
        i.type = t;
        return i;
    }
    static Instr indexed(Opcode op, uint32_t idx)
    {
        Instr i = simple(op);
        i.index = idx;
        return i;
    }
    static Instr constant(Value v)
    {
        Instr i = simple(Opcode::const_);
        i.value = v;
        return i;
    }
    static Instr memory(Opcode op, ValType t, uint32_t offset = 0, bool packed8 = false)
    {
        Instr i = typed(op, t);
        i.offset = offset;
        i.packed8 = packed8;
        return i;
    }
    static Instr block_like(Opcode op, std::vector<ValType> results, std::vector<Instr> body,
        std::vector<Instr> else_body = {})
    {
        Instr i = simple(op);
        i.results = std::move(results);
        i.body = std::move(body);
        i.else_body = std::move(else_body);
        return i;
    }
};

/// Number of instructions in a sequence, counting nested bodies.
size_t count_instructions(const std::vector<Instr>& body) noexcept;

struct FuncType
{
    std::vector<ValType> params;
    std::vector<ValType> results;

    friend bool operator==(const FuncType&, const FuncType&) = default;
};

std::string to_string(const FuncType& type);

struct GlobalType
{
    bool mut = false;
    ValType type = ValType::i32;

    friend bool operator==(const GlobalType&, const GlobalType&) = default;
};

struct Function
{
    FuncType type;
    std::vector<ValType> locals;
    std::vector<Instr> body;

    friend bool operator==(const Function&, const Function&) = default;
};

struct Global
{
    GlobalType type;
    /// Constant initializer: const, h.null or global.get of an imported global.
    Instr init;

    friend bool operator==(const Global&, const Global&) = default;
};

struct Table
{
    std::vector<uint32_t> elements;

    friend bool operator==(const Table&, const Table&) = default;
};

struct Memory
{
    uint32_t min_pages = 0;

    friend bool operator==(const Memory&, const Memory&) = default;
};

enum class ExternKind : uint8_t
{
    func,
    table,
    memory,
    global,
};

std::string_view to_string(ExternKind kind) noexcept;

struct ImportDesc
{
    ExternKind kind = ExternKind::func;
    FuncType func;
    GlobalType global;
    /// Minimum element count for tables, minimum pages for memories.
    uint32_t min = 0;

    friend bool operator==(const ImportDesc&, const ImportDesc&) = default;
};

struct Import
{
    std::string module;
    std::string name;
    ImportDesc desc;

    friend bool operator==(const Import&, const Import&) = default;
};

struct Export
{
    std::string name;
    ExternKind kind = ExternKind::func;
    uint32_t index = 0;

    friend bool operator==(const Export&, const Export&) = default;
};

struct DataSegment
{
    Instr offset;
    std::vector<uint8_t> bytes;

    friend bool operator==(const DataSegment&, const DataSegment&) = default;
};

/// A module. Index spaces follow WebAssembly: imported items precede defined ones.
struct Module
{
    std::vector<FuncType> types;
    std::vector<Import> imports;
    std::vector<Function> funcs;
    std::vector<Global> globals;
    std::vector<Table> tables;
    std::optional<Memory> memory;
    std::vector<Export> exports;
    std::optional<uint32_t> start;
    std::vector<DataSegment> data;

    friend bool operator==(const Module&, const Module&) = default;

    uint32_t imported_count(ExternKind kind) const noexcept;
    uint32_t func_count() const noexcept;
    uint32_t global_count() const noexcept;
    uint32_t table_count() const noexcept;
    bool has_memory() const noexcept;

    /// Type of function `idx` in the function index space, if it exists.
    const FuncType* func_type(uint32_t idx) const noexcept;
    const GlobalType* global_type(uint32_t idx) const noexcept;

    const Export* find_export(std::string_view name) const noexcept;
};
}  // namespace mswasm
