// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/constants.hpp"
#include "mswasm/validator.hpp"
#include <stdexcept>
#include <string>
#include <vector>

namespace mswasm
{
class CodegenError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct CodegenOptions
{
    enum class Mode : uint8_t
    {
        /// C11 calling the checked accessors of mswasm_rt.h.
        plain_checked,
        /// Checked C spelling: ptr<T> dereferences guarded by dynamic_check.
        checked_c_syntax,
    };
    enum class TrapBehavior : uint8_t
    {
        abort_with_code,
        /// Each export also gets a `<name>_try` entry that returns nonzero on a trap.
        return_error,
    };

    Mode mode = Mode::plain_checked;
    std::string module_prefix = "w2c_";
    /// Name of the unit; used in exported symbol names and as the output file stem.
    std::string unit_name = "module";
    bool emit_wrappers = true;
    bool weak_wrapper_linkage = true;
    TrapBehavior trap_behavior = TrapBehavior::abort_with_code;
    /// Size of the arena bound to an imported `_physical_memory` handle.
    uint32_t arena_size = default_arena_size;
};

struct EmittedUnit
{
    /// `<unit>.c`
    std::string source;
    /// `<unit>.h`
    std::string header;
    /// `<unit>_wrappers.c`; empty when the module imports no host functions.
    std::string wrappers;
    std::vector<std::string> wrapper_prototypes;
    std::vector<std::string> global_init_functions;
};

/// Declarations and instantiate-time statements contributed by one lowering.
struct Fragments
{
    std::string declarations;
    std::string init;
    std::vector<std::string> init_functions;

    bool empty() const noexcept { return declarations.empty() && init.empty(); }
};

/// Translates a validated module. Throws CodegenError for constructs the C backend does not
/// support (imported tables or memories, multi-result host imports).
EmittedUnit codegen_module(const TypedModule& module, const CodegenOptions& options = {});

/// Wrapper for a host import ("env", name): handle arguments become native pointers and a
/// returned pointer becomes a handle with infinite bounds.
std::string emit_wrapper(const Import& import, const CodegenOptions& options = {});

/// Handle globals bound by the start function's leading `(const N) (segalloc) (global.set g)`
/// runs: one C object and one init function per global.
Fragments emit_global_machinery(const TypedModule& module, const CodegenOptions& options = {});

/// Binding of an imported `_physical_memory` handle to an arena of options.arena_size bytes.
Fragments lower_physical_memory(const TypedModule& module, const CodegenOptions& options = {});

/// Offsets of `(const N) (segalloc) (global.set g)` runs at the start of the start function,
/// as (global index, size) pairs.
std::vector<std::pair<uint32_t, uint32_t>> global_object_sites(const Module& module);

/// C identifier derived from an arbitrary name.
std::string c_identifier(std::string_view name);
}  // namespace mswasm
