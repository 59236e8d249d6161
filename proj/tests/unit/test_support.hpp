// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/interpreter.hpp"
#include "mswasm/linker.hpp"
#include "mswasm/loader.hpp"
#include <filesystem>
#include <memory>
#include <string>

namespace mswasm::test
{
inline std::filesystem::path corpus_path(const std::string& name)
{
    return std::filesystem::path{MSWASM_CORPUS_DIR} / name;
}

inline std::string corpus_text(const std::string& name)
{
    return read_file(corpus_path(name));
}

inline std::shared_ptr<const TypedModule> corpus_module(const std::string& name)
{
    return load_module_file(corpus_path(name));
}

/// A store with the built-in hosts offered as ("env", name).
struct Sandbox
{
    Store store;
    ImportObject imports;

    Sandbox() { add_builtin_hosts(store, imports, {"memcpy", "abort"}); }

    uint32_t add(const std::shared_ptr<const TypedModule>& module, const std::string& name = {})
    {
        const auto id = instantiate(store, module, imports);
        if (!name.empty())
            imports.add_instance_exports(store, id, name);
        return id;
    }

    Outcome call(uint32_t instance, const std::string& name, std::vector<Value> args = {}, uint64_t fuel = default_fuel)
    {
        InterpreterOptions options;
        options.fuel = fuel;
        options.check_shapes = true;
        return invoke(store, instance, name, std::move(args), options);
    }
};
}  // namespace mswasm::test
