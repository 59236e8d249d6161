// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/interpreter.hpp"
#include "mswasm/store.hpp"
#include "mswasm/validator.hpp"
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mswasm
{
class LinkError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The start function did not return normally. The store has been rolled back.
class StartFailure : public std::runtime_error
{
public:
    explicit StartFailure(Outcome outcome)
      : std::runtime_error{"start function: " + outcome.to_string()}, outcome_{std::move(outcome)}
    {}

    const Outcome& outcome() const noexcept { return outcome_; }

private:
    Outcome outcome_;
};

/// Items offered to a module's imports, keyed by (module name, item name).
class ImportObject
{
public:
    void add(std::string module, std::string name, ExternVal item);
    const ExternVal* find(const std::string& module, const std::string& name) const;
    bool provides_module(const std::string& module) const;

    /// Offers every export of store instance `instance` under `module`.
    void add_instance_exports(const Store& store, uint32_t instance, const std::string& module);

    const std::map<std::pair<std::string, std::string>, ExternVal>& items() const noexcept { return items_; }

private:
    std::map<std::pair<std::string, std::string>, ExternVal> items_;
};

/// Registers the named built-in host functions in the store and offers them as ("env", name).
void add_builtin_hosts(Store& store, ImportObject& imports, const std::vector<std::string>& names);

/// Allocates an arena segment of `size` bytes and offers a handle to it as the immutable global
/// ("env", "_physical_memory"). Integer addresses become offsets on that handle. Returns the handle.
Handle add_physical_memory(Store& store, ImportObject& imports, uint32_t size);

struct InstantiateOptions
{
    InterpreterOptions start;
};

/// Allocates the module's functions, tables, memory and globals, copies its data segments and
/// runs its start function. Returns the index of the new entry in store.instances.
///
/// Throws LinkError (unresolved or mistyped import, data segment out of bounds) or StartFailure.
/// On any failure the store is left exactly as it was.
uint32_t instantiate(Store& store, std::shared_ptr<const TypedModule> module, const ImportObject& imports,
    const InstantiateOptions& options = {});

struct NamedModule
{
    std::string name;
    std::shared_ptr<const TypedModule> module;
};

/// Instantiates modules left to right; each one's exports become importable under its name by
/// the modules after it. An import naming a module that is not available yet (a forward or
/// cyclic reference) is a LinkError.
std::vector<uint32_t> link_chain(Store& store, const std::vector<NamedModule>& modules,
    const ImportObject& base_imports, const InstantiateOptions& options = {});
}  // namespace mswasm
