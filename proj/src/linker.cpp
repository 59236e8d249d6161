// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/linker.hpp"
#include "mswasm/host.hpp"
#include <set>

namespace mswasm
{
void ImportObject::add(std::string module, std::string name, ExternVal item)
{
    items_[{std::move(module), std::move(name)}] = item;
}

const ExternVal* ImportObject::find(const std::string& module, const std::string& name) const
{
    const auto it = items_.find({module, name});
    return it == items_.end() ? nullptr : &it->second;
}

bool ImportObject::provides_module(const std::string& module) const
{
    const auto it = items_.lower_bound({module, std::string{}});
    return it != items_.end() && it->first.first == module;
}

void ImportObject::add_instance_exports(const Store& store, uint32_t instance, const std::string& module)
{
    for (const auto& [name, item] : store.instances.at(instance).exports)
        add(module, name, item);
}

void add_builtin_hosts(Store& store, ImportObject& imports, const std::vector<std::string>& names)
{
    for (const auto& name : names)
    {
        auto fn = builtin_host(name);
        if (!fn)
            throw LinkError{"unknown built-in host function \"" + name + "\""};
        imports.add("env", name, ExternVal{ExternKind::func, store.add_host_function(std::move(*fn))});
    }
}

Handle add_physical_memory(Store& store, ImportObject& imports, uint32_t size)
{
    const auto h = store.seg_alloc(size);
    const auto addr = store.add_global(GlobalType{false, ValType::handle}, Value::handle(h));
    imports.add("env", std::string(physical_memory_name), ExternVal{ExternKind::global, addr});
    return h;
}

namespace
{
std::string import_name(const Import& imp)
{
    return "\"" + imp.module + "\" \"" + imp.name + "\"";
}

/// Value of a constant initializer; `globals` holds the addresses of the imported globals.
Value evaluate_init(const Store& store, const Instr& init, const std::vector<uint32_t>& globals)
{
    switch (init.op)
    {
    case Opcode::const_:
        return init.value;
    case Opcode::handle_null:
        return Value::handle(null_handle);
    case Opcode::global_get:
        return store.globals.at(globals.at(init.index)).value;
    default:
        throw LinkError{"unsupported initializer " + std::string(mnemonic(init.op))};
    }
}

uint32_t instantiate_unchecked(
    Store& store, std::shared_ptr<const TypedModule> typed, const ImportObject& imports)
{
    const Module& m = typed->module();
    const auto inst_index = static_cast<uint32_t>(store.instances.size());
    ModuleInstance inst;
    inst.module = typed;

    for (const auto& imp : m.imports)
    {
        const auto* item = imports.find(imp.module, imp.name);
        if (item == nullptr)
            throw LinkError{"unknown import " + import_name(imp)};
        if (item->kind != imp.desc.kind)
            throw LinkError{"import " + import_name(imp) + " expects a " + std::string(to_string(imp.desc.kind)) +
                            ", got a " + std::string(to_string(item->kind))};
        switch (imp.desc.kind)
        {
        case ExternKind::func:
            if (store.funcs.at(item->addr).type != imp.desc.func)
                throw LinkError{"import " + import_name(imp) + " expects type " + to_string(imp.desc.func) +
                                ", got " + to_string(store.funcs[item->addr].type)};
            inst.funcs.push_back(item->addr);
            break;
        case ExternKind::global:
            if (store.globals.at(item->addr).type != imp.desc.global)
                throw LinkError{"import " + import_name(imp) + " has a mismatched global type"};
            inst.globals.push_back(item->addr);
            break;
        case ExternKind::table:
            if (store.tables.at(item->addr).elements.size() < imp.desc.min)
                throw LinkError{"import " + import_name(imp) + " table is smaller than " +
                                std::to_string(imp.desc.min)};
            inst.tables.push_back(item->addr);
            break;
        case ExternKind::memory:
            if (store.memories.at(item->addr).bytes.size() < uint64_t{imp.desc.min} * page_size)
                throw LinkError{"import " + import_name(imp) + " memory is smaller than " +
                                std::to_string(imp.desc.min) + " pages"};
            inst.memory = item->addr;
            break;
        }
    }

    for (const auto& fn : m.funcs)
        inst.funcs.push_back(store.add_function(FuncInstance{fn.type, inst_index, &fn, nullptr}));
    for (const auto& table : m.tables)
    {
        TableInstance t;
        for (const auto e : table.elements)
            t.elements.emplace_back(inst.funcs.at(e));
        inst.tables.push_back(store.add_table(std::move(t)));
    }
    if (m.memory)
        inst.memory = store.add_memory(m.memory->min_pages);
    const auto imported_globals = inst.globals;
    for (const auto& g : m.globals)
        inst.globals.push_back(store.add_global(g.type, evaluate_init(store, g.init, imported_globals)));

    for (const auto& e : m.exports)
    {
        ExternVal item{e.kind, 0};
        switch (e.kind)
        {
        case ExternKind::func:
            item.addr = inst.funcs.at(e.index);
            break;
        case ExternKind::global:
            item.addr = inst.globals.at(e.index);
            break;
        case ExternKind::table:
            item.addr = inst.tables.at(e.index);
            break;
        case ExternKind::memory:
            item.addr = *inst.memory;
            break;
        }
        inst.exports[e.name] = item;
    }

    for (size_t i = 0; i < m.data.size(); ++i)
    {
        const auto& d = m.data[i];
        const auto offset = evaluate_init(store, d.offset, imported_globals).as_i32();
        auto& bytes = store.memories.at(*inst.memory).bytes;
        if (uint64_t{offset} + d.bytes.size() > bytes.size())
            throw LinkError{"data segment " + std::to_string(i) + " does not fit in linear memory"};
        std::copy(d.bytes.begin(), d.bytes.end(), bytes.begin() + offset);
    }

    store.instances.push_back(std::move(inst));
    return inst_index;
}
}  // namespace

uint32_t instantiate(Store& store, std::shared_ptr<const TypedModule> module, const ImportObject& imports,
    const InstantiateOptions& options)
{
    Store snapshot = store;
    try
    {
        const auto index = instantiate_unchecked(store, module, imports);
        const Module& m = module->module();
        if (m.start)
        {
            const auto addr = store.instances[index].funcs.at(*m.start);
            auto outcome = invoke_address(store, addr, {}, options.start);
            if (!outcome.is_values())
                throw StartFailure{std::move(outcome)};
        }
        return index;
    }
    catch (...)
    {
        auto* trace = store.trace;
        store = std::move(snapshot);
        store.trace = trace;
        throw;
    }
}

std::vector<uint32_t> link_chain(Store& store, const std::vector<NamedModule>& modules,
    const ImportObject& base_imports, const InstantiateOptions& options)
{
    ImportObject imports = base_imports;
    std::vector<uint32_t> out;
    for (size_t i = 0; i < modules.size(); ++i)
    {
        const auto& [name, module] = modules[i];
        for (const auto& imp : module->module().imports)
        {
            if (imports.find(imp.module, imp.name) != nullptr)
                continue;
            bool later = false;
            for (size_t j = i; j < modules.size(); ++j)
                later = later || modules[j].name == imp.module;
            if (later)
                throw LinkError{"module \"" + name + "\": import " + import_name(imp) +
                                " is unresolvable (cyclic or forward reference)"};
        }
        const auto index = instantiate(store, module, imports, options);
        imports.add_instance_exports(store, index, name);
        out.push_back(index);
    }
    return out;
}
}  // namespace mswasm
