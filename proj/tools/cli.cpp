// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include "mswasm/campaign.hpp"
#include "mswasm/codegen.hpp"
#include "mswasm/constants.hpp"
#include "mswasm/generator.hpp"
#include "mswasm/host.hpp"
#include "mswasm/interpreter.hpp"
#include "mswasm/isolation.hpp"
#include "mswasm/linker.hpp"
#include "mswasm/loader.hpp"
#include "mswasm/script.hpp"
#include "mswasm/text.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <ostream>
#include <sstream>
#include <thread>

#ifndef MSWASM_RT_INCLUDE_DIRS
#define MSWASM_RT_INCLUDE_DIRS ""
#endif

namespace mswasm::cli
{
namespace
{
namespace fs = std::filesystem;
using json = nlohmann::json;

/// A command that ends early with an exit code and a message for stderr.
struct Failure
{
    int code;
    std::string message;
};

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(std::string_view text, std::string_view what)
{
    T value{};
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
    {
        text.remove_prefix(2);
        base = 16;
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw UsageError{"invalid " + std::string(what) + " '" + std::string(text) + "'"};
    return value;
}

struct Loaded
{
    std::string name;
    std::string path;
    std::shared_ptr<const TypedModule> module;
};

std::string stem(const std::string& path)
{
    return fs::path(path).stem().string();
}

Failure invalid_module(const std::string& path, const ValidationFailure& e, bool as_json)
{
    std::string message;
    for (const auto& error : e.errors())
        message += (as_json ? error.to_json() : path + ": " + error.to_string()) + "\n";
    if (!message.empty())
        message.pop_back();
    return Failure{exit_invalid, message};
}

Loaded load(const std::string& path, std::string name = {})
{
    std::string text;
    try
    {
        text = read_file(path);
    }
    catch (const std::exception& e)
    {
        throw Failure{exit_usage, e.what()};
    }
    try
    {
        return Loaded{name.empty() ? stem(path) : std::move(name), path, load_module(text)};
    }
    catch (const ParseError& e)
    {
        throw Failure{exit_invalid, path + ":" + std::to_string(e.span().line) + ":" + std::to_string(e.span().column) +
                                        ": " + e.message()};
    }
    catch (const ValidationFailure& e)
    {
        throw invalid_module(path, e, false);
    }
}

bool imports_physical_memory(const Module& m)
{
    return std::any_of(m.imports.begin(), m.imports.end(), [](const Import& i) {
        return i.module == "env" && i.name == physical_memory_name && i.desc.kind == ExternKind::global;
    });
}

std::vector<std::string> checked_hosts(const std::vector<std::string>& requested)
{
    const auto known = builtin_host_names();
    if (requested.empty())
        return {known.begin(), known.end()};
    for (const auto& name : requested)
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw UsageError{"unknown host function '" + name + "'"};
    return requested;
}

/// A store holding every loaded module, linked in command-line order.
struct Session
{
    Store store;
    ImportObject imports;
    std::map<std::string, uint32_t> instances;
    std::string main_name;

    uint32_t main_instance() const { return instances.at(main_name); }
};

struct Settings
{
    uint64_t fuel = default_fuel;
    uint32_t arena_size = default_arena_size;
    std::vector<std::string> hosts;
};

void prepare(Session& s, const std::vector<Loaded>& modules, const Settings& settings)
{
    add_builtin_hosts(s.store, s.imports, checked_hosts(settings.hosts));
    if (std::any_of(modules.begin(), modules.end(), [](const Loaded& l) { return imports_physical_memory(l.module->module()); }))
        add_physical_memory(s.store, s.imports, settings.arena_size);
}

void link(Session& s, const std::vector<Loaded>& modules, const Settings& settings)
{
    prepare(s, modules, settings);
    std::vector<NamedModule> named;
    for (const auto& l : modules)
        named.push_back(NamedModule{l.name, l.module});
    InstantiateOptions options;
    options.start.fuel = settings.fuel;
    try
    {
        const auto ids = link_chain(s.store, named, s.imports, options);
        for (size_t i = 0; i < ids.size(); ++i)
            s.instances[modules[i].name] = ids[i];
    }
    catch (const LinkError& e)
    {
        throw Failure{exit_invalid, std::string("link error: ") + e.what()};
    }
    s.main_name = modules.back().name;
}

/// Value of the global named `name` ("export" of the main module or "module.export").
Value global_root(const Session& s, const std::string& name)
{
    std::string module = s.main_name;
    std::string export_name = name;
    if (const auto dot = name.find('.'); dot != std::string::npos)
    {
        module = name.substr(0, dot);
        export_name = name.substr(dot + 1);
    }
    const auto it = s.instances.find(module);
    if (it == s.instances.end())
        throw UsageError{"unknown module '" + module + "' in root '" + name + "'"};
    const auto& instance = s.store.instances[it->second];
    const auto* e = instance.module->module().find_export(export_name);
    if (e == nullptr || e->kind != ExternKind::global)
        throw UsageError{"module '" + module + "' exports no global '" + export_name + "'"};
    return s.store.globals[instance.globals[e->index]].value;
}

/// Every exported handle global as (MODULE.NAME, value).
std::vector<std::pair<std::string, Value>> exported_handle_globals(const Session& s)
{
    std::vector<std::pair<std::string, Value>> roots;
    for (const auto& [module, id] : s.instances)
    {
        const auto& instance = s.store.instances[id];
        for (const auto& e : instance.module->module().exports)
            if (e.kind == ExternKind::global)
            {
                const auto& v = s.store.globals[instance.globals[e.index]].value;
                if (v.type() == ValType::handle)
                    roots.emplace_back(module + "." + e.name, v);
            }
    }
    return roots;
}

std::vector<Value> parse_args(const std::vector<std::string>& texts)
{
    std::vector<Value> values;
    for (const auto& t : texts)
        values.push_back(parse_value(t));
    return values;
}

json trace_json(const Trace& trace)
{
    json out = json::array();
    for (const auto& e : trace)
        out.push_back({{"kind", std::string(to_string(e.kind))}, {"id", e.id}, {"address", e.address}, {"width", e.width}});
    return out;
}

json segset_json(const SegSet& set)
{
    return json(std::vector<uint32_t>(set.begin(), set.end()));
}

/// Options shared by the subcommands, filled in by CLI11.
struct Flags
{
    std::string config_path;
    bool as_json = false;
    uint64_t fuel = 0;
    uint32_t arena_size = 0;
    std::vector<std::string> files;
    std::vector<std::string> links;
    std::vector<std::string> hosts;
    std::string invoke;
    std::vector<std::string> args;
    std::vector<std::string> roots;
    bool trace = false;
    bool dump = false;
    bool verbose = false;

    std::string attacker;
    std::string attacker_name = "attacker";
    uint64_t seed = 0;
    uint32_t budget = 0;
    bool paranoid = false;
    bool module_mode = false;

    std::string out_dir = ".";
    std::string mode = "plain";
    std::string prefix = "w2c_";
    std::string unit_name;
    std::string trap = "abort";
    bool no_wrappers = false;
    bool strong_wrappers = false;

    std::string runtime_dir;
    std::string cc;

    int theorem = 0;
    uint32_t cases = 0;
    uint32_t modules = 0;
    unsigned threads = 0;
};

Settings settings_from(const Flags& f, const Config& config)
{
    Settings s;
    s.fuel = f.fuel != 0 ? f.fuel : config.fuel.value_or(default_fuel);
    s.arena_size = f.arena_size != 0 ? f.arena_size : config.arena_size.value_or(default_arena_size);
    s.hosts = f.hosts;
    return s;
}

/// Loads a `--link` argument: FILE, registered under its stem, or NAME=FILE.
Loaded load_link(const std::string& spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        return load(spec);
    if (eq == 0)
        throw UsageError{"empty module name in --link " + spec};
    return load(spec.substr(eq + 1), spec.substr(0, eq));
}

std::vector<Loaded> load_program(const Flags& f)
{
    std::vector<Loaded> modules;
    for (const auto& spec : f.links)
        modules.push_back(load_link(spec));
    modules.push_back(load(f.files.at(0)));
    return modules;
}

// check

int cmd_check(const Flags& f, std::ostream& out)
{
    int code = exit_values;
    for (const auto& path : f.files)
    {
        json report = {{"file", path}, {"valid", true}, {"errors", json::array()}};
        std::string human = path + ": ok";
        try
        {
            const auto text = read_file(path);
            if (fs::path(path).extension() == ".msws")
            {
                const auto script = parse_script(text);
                for (const auto& command : script.commands)
                    if (const auto* m = std::get_if<ModuleCommand>(&command))
                        typecheck(m->module);
                human += " (" + std::to_string(script.module_count()) + " modules, " +
                         std::to_string(script.assertion_count()) + " assertions)";
            }
            else
                typecheck(parse_module(text));
        }
        catch (const ParseError& e)
        {
            report["valid"] = false;
            report["errors"].push_back({{"line", e.span().line}, {"column", e.span().column}, {"code", "parse_error"},
                {"message", e.message()}});
            human = path + ":" + std::to_string(e.span().line) + ":" + std::to_string(e.span().column) + ": " + e.message();
            code = exit_invalid;
        }
        catch (const ValidationFailure& e)
        {
            report["valid"] = false;
            human.clear();
            for (const auto& error : e.errors())
            {
                report["errors"].push_back(json::parse(error.to_json()));
                human += (human.empty() ? "" : "\n") + path + ": " + error.to_string();
            }
            code = exit_invalid;
        }
        catch (const std::exception& e)
        {
            throw Failure{exit_usage, e.what()};
        }
        out << (f.as_json ? report.dump() : human) << "\n";
    }
    return code;
}

// run

int cmd_run(const Flags& f, const Config& config, std::ostream& out)
{
    const auto settings = settings_from(f, config);
    const auto modules = load_program(f);
    const auto args = parse_args(f.args);
    Session s;
    json report;
    try
    {
        link(s, modules, settings);
    }
    catch (const StartFailure& e)
    {
        if (f.as_json)
            out << json{{"start", json::parse(e.outcome().to_json())}}.dump() << "\n";
        else
            out << "start: " << e.outcome().to_string() << "\n";
        return e.outcome().exit_code();
    }
    int code = exit_values;
    if (f.invoke.empty())
    {
        report["instantiated"] = modules.size();
        if (!f.as_json)
            out << "instantiated " << modules.size() << (modules.size() == 1 ? " module" : " modules") << "\n";
    }
    else
    {
        InterpreterOptions options;
        options.fuel = settings.fuel;
        Outcome outcome;
        Trace trace;
        try
        {
            if (f.trace)
                std::tie(outcome, trace) = invoke_with_trace(s.store, s.main_instance(), f.invoke, args, options);
            else
                outcome = invoke(s.store, s.main_instance(), f.invoke, args, options);
        }
        catch (const InvokeError& e)
        {
            throw UsageError{e.what()};
        }
        code = outcome.exit_code();
        report["outcome"] = json::parse(outcome.to_json());
        if (f.trace)
            report["trace"] = trace_json(trace);
        if (!f.as_json)
        {
            if (f.trace)
                for (const auto& e : trace)
                    out << to_string(e.kind) << " id=" << e.id << " address=" << e.address << " width=" << e.width << "\n";
            out << outcome.to_string() << "\n";
        }
    }
    if (f.dump)
    {
        report["dump"] = s.store.dump();
        if (!f.as_json)
            out << s.store.dump();
    }
    if (f.as_json)
        out << report.dump() << "\n";
    return code;
}

// script

int cmd_script(const Flags& f, const Config& config, std::ostream& out)
{
    const auto& path = f.files.at(0);
    Script script;
    try
    {
        script = parse_script(read_file(path));
    }
    catch (const ParseError& e)
    {
        throw Failure{exit_invalid, path + ":" + std::to_string(e.span().line) + ":" + std::to_string(e.span().column) +
                                        ": " + e.message()};
    }
    ScriptOptions options;
    const auto settings = settings_from(f, config);
    options.fuel = settings.fuel;
    options.arena_size = settings.arena_size;
    options.hosts = checked_hosts(f.hosts);
    const auto report = run_script(script, options);
    if (f.as_json)
    {
        json failures = json::array();
        for (const auto& failure : report.failures)
            failures.push_back({{"line", failure.span.line}, {"column", failure.span.column}, {"message", failure.message}});
        out << json{{"file", path}, {"passed", report.passed}, {"failed", report.failures.size()}, {"failures", failures}}.dump()
            << "\n";
    }
    else
    {
        if (f.verbose)
            for (const auto& line : report.log)
                out << line << "\n";
        for (const auto& failure : report.failures)
            out << path << ":" << failure.span.line << ":" << failure.span.column << ": " << failure.message << "\n";
        out << path << ": " << report.passed << " passed, " << report.failures.size() << " failed\n";
    }
    return report.ok() ? exit_values : 1;
}

// reach

int cmd_reach(const Flags& f, const Config& config, std::ostream& out)
{
    const auto settings = settings_from(f, config);
    const auto modules = load_program(f);
    Session s;
    try
    {
        link(s, modules, settings);
    }
    catch (const StartFailure& e)
    {
        throw Failure{e.outcome().exit_code(), std::string(e.what())};
    }
    std::vector<Value> roots;
    json root_names = json::array();
    for (const auto& name : f.roots)
    {
        roots.push_back(global_root(s, name));
        root_names.push_back(name);
    }
    json report;
    if (!f.invoke.empty())
    {
        InterpreterOptions options;
        options.fuel = settings.fuel;
        Outcome outcome;
        try
        {
            outcome = invoke(s.store, s.main_instance(), f.invoke, parse_args(f.args), options);
        }
        catch (const InvokeError& e)
        {
            throw UsageError{e.what()};
        }
        report["outcome"] = json::parse(outcome.to_json());
        for (const auto& v : outcome.values)
            if (v.type() == ValType::handle)
                roots.push_back(v);
    }
    if (f.roots.empty())
        for (const auto& [name, v] : exported_handle_globals(s))
        {
            roots.push_back(v);
            root_names.push_back(name);
        }
    const auto set = reachable(s.store, roots);
    const auto parts = partition(s.store, roots);
    report["roots"] = root_names;
    report["reachable"] = segset_json(set);
    report["exported"] = segset_json(parts.exported);
    report["local"] = segset_json(parts.local);
    report["live"] = s.store.live_ids();
    out << report.dump() << "\n";
    return exit_values;
}

// isolate

int cmd_isolate(const Flags& f, const Config& config, std::ostream& out)
{
    const auto settings = settings_from(f, config);
    const auto example = load(f.files.at(0));
    std::vector<Loaded> setup;
    for (const auto& spec : f.links)
        setup.push_back(load_link(spec));
    const bool with_victim = std::any_of(setup.begin(), setup.end(), [](const Loaded& l) {
        const auto* e = l.module->module().find_export("pub");
        return l.name == "vault" && e != nullptr && e->kind == ExternKind::global;
    });

    Loaded attacker;
    if (f.attacker.rfind("builtin:", 0) == 0)
    {
        if (f.attacker != "builtin:random")
            throw UsageError{"unknown built-in attacker '" + f.attacker + "' (expected builtin:random)"};
        const auto budget = f.budget != 0 ? f.budget : 60u;
        attacker = Loaded{f.attacker_name, f.attacker, typecheck(generate_attacker(f.seed, budget, with_victim, f.module_mode))};
    }
    else if (!f.attacker.empty())
        attacker = load(f.attacker, f.attacker_name);
    else
        throw UsageError{"isolate needs --attacker FILE or --attacker builtin:random"};

    ExperimentOptions options;
    options.fuel = settings.fuel;
    options.paranoid = f.paranoid;
    const auto invoke_name = f.invoke.empty() ? std::string("main") : f.invoke;
    const auto args = parse_args(f.args);

    json report;
    bool violated = false;
    const auto print = [&](const std::string& label, const Verdict& v) {
        violated = violated || v.violated();
        report[label] = json::parse(v.to_json());
        if (!f.as_json)
            out << label << ": " << v.to_string() << "\n";
    };

    Session s;
    if (f.module_mode)
    {
        ModuleExperiment experiment;
        for (const auto& l : setup)
            experiment.setup.push_back(NamedModule{l.name, l.module});
        experiment.target = NamedModule{attacker.name, attacker.module};
        experiment.hosts = checked_hosts(f.hosts);
        ModuleExperimentResult result;
        try
        {
            result = run_module_experiment(s.store, experiment, options);
        }
        catch (const ExperimentError& e)
        {
            throw UsageError{e.what()};
        }
        catch (const LinkError& e)
        {
            throw Failure{exit_invalid, std::string("link error: ") + e.what()};
        }
        print("module", result.verdict);
        if (result.instance && !result.verdict.violated())
        {
            try
            {
                const auto id = instantiate(s.store, example.module, result.imports);
                s.instances[example.name] = id;
                for (size_t i = 0; i < setup.size() && i < result.setup_instances.size(); ++i)
                    s.instances[setup[i].name] = result.setup_instances[i];
                s.main_name = example.name;
                for (const auto& name : f.roots)
                    options.extra_roots.push_back(global_root(s, name));
                print("function", run_function_experiment(s.store, export_function(s.store, id, invoke_name), args, options));
            }
            catch (const LinkError& e)
            {
                throw Failure{exit_invalid, std::string("link error: ") + e.what()};
            }
            catch (const StartFailure& e)
            {
                report["start"] = json::parse(e.outcome().to_json());
                if (!f.as_json)
                    out << "start: " << e.outcome().to_string() << "\n";
            }
        }
    }
    else
    {
        auto modules = setup;
        modules.push_back(attacker);
        modules.push_back(example);
        try
        {
            link(s, modules, settings);
        }
        catch (const StartFailure& e)
        {
            throw Failure{e.outcome().exit_code(), std::string(e.what())};
        }
        for (const auto& name : f.roots)
            options.extra_roots.push_back(global_root(s, name));
        uint32_t func = 0;
        try
        {
            func = export_function(s.store, s.main_instance(), invoke_name);
        }
        catch (const std::exception& e)
        {
            throw UsageError{e.what()};
        }
        print("function", run_function_experiment(s.store, func, args, options));
    }
    if (f.as_json)
        out << report.dump() << "\n";
    return violated ? 1 : exit_values;
}

// codegen

CodegenOptions codegen_options(const Flags& f, const Config& config, const std::string& unit)
{
    CodegenOptions o;
    if (f.mode == "plain")
        o.mode = CodegenOptions::Mode::plain_checked;
    else if (f.mode == "checkedc")
        o.mode = CodegenOptions::Mode::checked_c_syntax;
    else
        throw UsageError{"--mode must be plain or checkedc"};
    if (f.trap == "abort")
        o.trap_behavior = CodegenOptions::TrapBehavior::abort_with_code;
    else if (f.trap == "return")
        o.trap_behavior = CodegenOptions::TrapBehavior::return_error;
    else
        throw UsageError{"--trap must be abort or return"};
    o.module_prefix = f.prefix;
    o.unit_name = unit;
    o.emit_wrappers = !f.no_wrappers;
    o.weak_wrapper_linkage = !f.strong_wrappers;
    o.arena_size = settings_from(f, config).arena_size;
    return o;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream file{path, std::ios::binary};
    file << text;
    if (!file)
        throw Failure{1, "cannot write " + path.string()};
}

std::vector<fs::path> write_unit(const EmittedUnit& unit, const fs::path& dir, const std::string& name)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::vector<fs::path> written = {dir / (name + ".c"), dir / (name + ".h")};
    write_text(written[0], unit.source);
    write_text(written[1], unit.header);
    if (!unit.wrappers.empty())
    {
        written.push_back(dir / (name + "_wrappers.c"));
        write_text(written.back(), unit.wrappers);
    }
    return written;
}

int cmd_codegen(const Flags& f, const Config& config, std::ostream& out)
{
    const auto program = load(f.files.at(0));
    const auto name = f.unit_name.empty() ? program.name : f.unit_name;
    EmittedUnit unit;
    try
    {
        unit = codegen_module(*program.module, codegen_options(f, config, name));
    }
    catch (const CodegenError& e)
    {
        throw Failure{1, std::string("codegen: ") + e.what()};
    }
    json written = json::array();
    for (const auto& path : write_unit(unit, f.out_dir, name))
    {
        written.push_back(path.string());
        if (!f.as_json)
            out << path.string() << "\n";
    }
    if (f.as_json)
        out << json{{"written", written}}.dump() << "\n";
    return exit_values;
}

// diff

std::string c_literal(const Value& v)
{
    std::ostringstream s;
    switch (v.type())
    {
    case ValType::i32:
        s << v.as_i32() << "u";
        break;
    case ValType::i64:
        s << v.as_i64() << "ull";
        break;
    case ValType::f32:
        s << "diff_f32(" << v.as_i32() << "u)";
        break;
    case ValType::f64:
        s << "diff_f64(" << v.as_i64() << "ull)";
        break;
    case ValType::handle:
        throw UsageError{"diff does not accept handle arguments"};
    }
    return s.str();
}

std::string print_statement(ValType t, const std::string& expr)
{
    switch (t)
    {
    case ValType::i32:
        return "printf(\" i32:%u\", (unsigned)(" + expr + "));";
    case ValType::i64:
        return "printf(\" i64:%llu\", (unsigned long long)(" + expr + "));";
    case ValType::f32:
        return "{ float v = " + expr + "; uint32_t b; memcpy(&b, &v, 4); printf(\" f32:0x%08x\", (unsigned)b); }";
    case ValType::f64:
        return "{ double v = " + expr + "; uint64_t b; memcpy(&b, &v, 8); printf(\" f64:0x%016llx\", (unsigned long long)b); }";
    case ValType::handle:
        return "printf(\" handle\");";
    }
    return {};
}

std::string interpreter_line(const Outcome& outcome)
{
    if (outcome.kind == Outcome::Kind::trapped)
        return "trapped " + std::string(to_string(outcome.trap.kind));
    if (outcome.kind == Outcome::Kind::resource_exhausted)
        return "resource_exhausted";
    if (outcome.kind != Outcome::Kind::values)
        return std::string(to_string(outcome.kind));
    std::string line = "values";
    for (const auto& v : outcome.values)
        line += " " + (v.type() == ValType::handle ? std::string("handle") : format_value(v));
    return line;
}

std::string compiled_line(std::string raw)
{
    raw = trim(raw);
    if (raw.rfind("trapped ", 0) == 0)
    {
        const auto kind = std::atoi(raw.c_str() + 8);
        if (kind == 8)
            return "resource_exhausted";
        if (kind >= 0 && kind < static_cast<int>(std::size(all_trap_kinds)))
            return "trapped " + std::string(to_string(all_trap_kinds[kind]));
    }
    return raw;
}

int cmd_diff(const Flags& f, const Config& config, std::ostream& out)
{
    if (f.runtime_dir.empty())
        throw Failure{1, "diff: the C runtime is not part of this build; pass --runtime DIR with its sources"};
    if (f.invoke.empty())
        throw UsageError{"diff needs --invoke"};
    const fs::path runtime{f.runtime_dir};
    std::vector<fs::path> runtime_sources;
    for (const auto& dir : {runtime, runtime / "src"})
        if (fs::is_directory(dir))
            for (const auto& entry : fs::directory_iterator(dir))
                if (entry.path().extension() == ".c")
                    runtime_sources.push_back(entry.path());
    std::sort(runtime_sources.begin(), runtime_sources.end());
    if (runtime_sources.empty())
        throw Failure{1, "diff: no C sources in " + runtime.string()};

    const auto settings = settings_from(f, config);
    const auto program = load(f.files.at(0));
    const auto args = parse_args(f.args);

    // Interpreter side.
    Session s;
    Outcome expected;
    try
    {
        link(s, {program}, settings);
        InterpreterOptions options;
        options.fuel = settings.fuel;
        expected = invoke(s.store, s.main_instance(), f.invoke, args, options);
    }
    catch (const StartFailure& e)
    {
        expected = e.outcome();
    }
    catch (const InvokeError& e)
    {
        throw UsageError{e.what()};
    }

    // Compiled side.
    const auto& m = program.module->module();
    const auto* e = m.find_export(f.invoke);
    if (e == nullptr || e->kind != ExternKind::func)
        throw UsageError{"no exported function '" + f.invoke + "'"};
    const auto& type = *m.func_type(e->index);
    auto options = codegen_options(f, config, c_identifier(program.name));
    options.trap_behavior = CodegenOptions::TrapBehavior::return_error;
    EmittedUnit unit;
    try
    {
        unit = codegen_module(*program.module, options);
    }
    catch (const CodegenError& err)
    {
        throw Failure{1, std::string("codegen: ") + err.what()};
    }
    const auto work = fs::temp_directory_path() / ("mswasm-diff-" + std::to_string(std::random_device{}()));
    auto files = write_unit(unit, work, options.unit_name);
    const auto symbol = options.module_prefix + options.unit_name + "_" + c_identifier(f.invoke);
    std::string call_args = type.results.empty() ? "" : "&out";
    for (const auto& v : args)
        call_args += (call_args.empty() ? "" : ", ") + c_literal(v);
    std::string driver = "#include <stdio.h>\n#include <string.h>\n#include \"" + options.unit_name + ".h\"\n\n";
    driver += "static float diff_f32(uint32_t b)\n{\n    float f;\n    memcpy(&f, &b, 4);\n    return f;\n}\n\n";
    driver += "static double diff_f64(uint64_t b)\n{\n    double f;\n    memcpy(&f, &b, 8);\n    return f;\n}\n\n";
    driver += "int main(void)\n{\n    (void)diff_f32;\n    (void)diff_f64;\n";
    driver += "    if (MSWASM_RT_TRY(" + options.module_prefix + options.unit_name + "_instantiate()))\n";
    driver += "    {\n        printf(\"trapped %d\\n\", (int)rt_last_trap());\n        return 0;\n    }\n";
    if (!type.results.empty())
    {
        const auto result_type = type.results.size() == 1 ? std::string(type.results[0] == ValType::i32 ? "uint32_t"
                                                                         : type.results[0] == ValType::i64 ? "uint64_t"
                                                                         : type.results[0] == ValType::f32 ? "float"
                                                                         : type.results[0] == ValType::f64 ? "double"
                                                                                                           : "Handle")
                                                           : std::string();
        if (result_type.empty())
            throw Failure{1, "diff: multi-value exports are not supported"};
        driver += "    " + result_type + " out;\n";
    }
    driver += "    if (" + symbol + "_try(" + call_args + "))\n";
    driver += "    {\n        printf(\"trapped %d\\n\", (int)rt_last_trap());\n        return 0;\n    }\n";
    driver += "    printf(\"values\");\n";
    if (!type.results.empty())
        driver += "    " + print_statement(type.results[0], "out") + "\n";
    driver += "    printf(\"\\n\");\n    return 0;\n}\n";
    write_text(work / "driver.c", driver);
    files.push_back(work / "driver.c");

    std::string command = (f.cc.empty() ? std::string(std::getenv("CC") ? std::getenv("CC") : "cc") : f.cc) +
                          " -std=c11 -O1 -o " + (work / "program").string();
    for (const auto& file : files)
        if (file.extension() == ".c")
            command += " " + file.string();
    for (const auto& file : runtime_sources)
        command += " " + file.string();
    for (const auto& dir : {runtime / "include", runtime})
        command += " -I" + dir.string();
    std::string dirs = MSWASM_RT_INCLUDE_DIRS;
    for (std::string::size_type start = 0; start < dirs.size();)
    {
        const auto end = std::min(dirs.find('|', start), dirs.size());
        command += " -I" + dirs.substr(start, end - start);
        start = end + 1;
    }
    command += " -I" + work.string() + " 2>&1";
    if (std::system(command.c_str()) != 0)
        throw Failure{1, "diff: compilation failed: " + command};

    std::string raw;
    if (FILE* pipe = popen((work / "program").string().c_str(), "r"))
    {
        std::array<char, 256> buf{};
        while (fgets(buf.data(), buf.size(), pipe) != nullptr)
            raw += buf.data();
        pclose(pipe);
    }
    if (!f.verbose)
        fs::remove_all(work);
    const auto want = interpreter_line(expected);
    const auto got = compiled_line(raw);
    const bool match = want == got;
    if (f.as_json)
        out << json{{"interpreter", want}, {"compiled", got}, {"match", match}}.dump() << "\n";
    else
        out << "interpreter: " << want << "\ncompiled:    " << got << "\n" << (match ? "match" : "MISMATCH") << "\n";
    return match ? exit_values : 1;
}

// fuzz

int cmd_fuzz(const Flags& f, const Config& config, std::ostream& out)
{
    const auto threads = f.threads != 0 ? f.threads : std::max(1u, std::thread::hardware_concurrency());
    const auto fuel = f.fuel != 0 ? f.fuel : config.fuel.value_or(100'000);
    if (f.theorem == 1)
    {
        NeverStuckOptions o;
        o.seed = f.seed;
        o.cases = f.cases != 0 ? f.cases : 1000;
        o.budget = f.budget != 0 ? f.budget : o.budget;
        o.fuel = fuel;
        o.threads = threads;
        const auto report = run_never_stuck_campaign(o);
        if (f.as_json)
            out << report.to_json() << "\n";
        else
        {
            const auto& c = report.outcomes;
            out << "theorem 1: " << report.modules << " modules, " << report.invalid << " invalid; outcomes: values "
                << c.values << ", trapped " << c.trapped << ", fuel_exhausted " << c.fuel_exhausted << ", stuck " << c.stuck
                << ", resource_exhausted " << c.resource_exhausted << "; " << report.seconds << " s: "
                << (report.ok() ? "ok" : "FAILED") << "\n";
            for (const auto& failure : report.failures)
                out << "  seed " << failure.seed << ": " << failure.detail << "\n";
        }
        return report.ok() ? exit_values : 1;
    }
    if (f.theorem == 3)
    {
        IsolationCampaignOptions o;
        o.seed = f.seed;
        o.functions = f.cases != 0 ? f.cases : o.functions;
        o.modules = f.modules != 0 ? f.modules : o.modules;
        o.budget = f.budget != 0 ? f.budget : o.budget;
        o.fuel = fuel;
        o.paranoid = f.paranoid;
        o.threads = threads;
        o.example = f.files.empty() ? load_module(isolation_example_text()) : load(f.files[0]).module;
        o.victim = load_module(victim_text());
        const auto report = run_isolation_campaign(o);
        if (f.as_json)
            out << report.to_json() << "\n";
        else
        {
            out << "theorem 3: " << report.runs << " runs; returned 1: " << report.returned_one << ", returned 0: "
                << report.returned_zero << ", trapped: " << report.trapped << ", other: " << report.other
                << ", violated: " << report.violated << "; " << report.seconds << " s: " << (report.ok() ? "ok" : "FAILED")
                << "\n";
            for (const auto& failure : report.failures)
                out << "  seed " << failure.seed << ": " << failure.detail << "\n";
        }
        return report.ok() ? exit_values : 1;
    }
    throw UsageError{"--theorem must be 1 or 3"};
}
}  // namespace

Config parse_config(std::string_view text)
{
    Config config;
    std::istringstream in{std::string(text)};
    std::string raw;
    int number = 0;
    while (std::getline(in, raw))
    {
        ++number;
        const auto line = trim(std::string_view(raw).substr(0, raw.find('#')));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError{"config line " + std::to_string(number) + ": expected key = value"};
        const auto key = trim(std::string_view(line).substr(0, eq));
        auto value = trim(std::string_view(line).substr(eq + 1));
        value.erase(std::remove(value.begin(), value.end(), '_'), value.end());
        if (key == "fuel")
            config.fuel = parse_number<uint64_t>(value, "fuel");
        else if (key == "arena_size")
            config.arena_size = parse_number<uint32_t>(value, "arena_size");
        else if (key == "handle_width")
        {
            config.handle_width = parse_number<uint32_t>(value, "handle_width");
            if (*config.handle_width != handle_width)
                throw UsageError{"config handle_width = " + value + " but this toolchain uses " +
                                 std::to_string(handle_width)};
        }
        else
            throw UsageError{"config line " + std::to_string(number) + ": unknown key '" + key + "'"};
    }
    return config;
}

Value parse_value(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        return Value::i32(static_cast<uint32_t>(parse_number<int64_t>(text, "argument")));
    const auto type = text.substr(0, colon);
    const auto body = text.substr(colon + 1);
    const bool negative = !body.empty() && body[0] == '-';
    if (type == "i32")
        return Value::i32(negative ? static_cast<uint32_t>(parse_number<int32_t>(body, "i32"))
                                   : static_cast<uint32_t>(parse_number<uint64_t>(body, "i32")));
    if (type == "i64")
        return Value::i64(negative ? static_cast<uint64_t>(parse_number<int64_t>(body, "i64")) : parse_number<uint64_t>(body, "i64"));
    if (type == "f32" || type == "f64")
    {
        if (body.size() > 2 && body[0] == '0' && body[1] == 'x')
            return type == "f32" ? Value::f32_bits(parse_number<uint32_t>(body, "f32 bits"))
                                 : Value::f64_bits(parse_number<uint64_t>(body, "f64 bits"));
        const std::string copy{body};
        char* end = nullptr;
        const double d = std::strtod(copy.c_str(), &end);
        if (copy.empty() || end != copy.c_str() + copy.size())
            throw UsageError{"invalid " + std::string(type) + " '" + copy + "'"};
        return type == "f32" ? Value::f32(static_cast<float>(d)) : Value::f64(d);
    }
    if (type == "handle" && body == "null")
        return Value::zero(ValType::handle);
    throw UsageError{"invalid argument '" + std::string(text) + "' (expected i32:N, i64:N, f32:X, f64:X or handle:null)"};
}

std::string format_value(const Value& value)
{
    std::array<char, 32> buf{};
    switch (value.type())
    {
    case ValType::i32:
        return "i32:" + std::to_string(value.as_i32());
    case ValType::i64:
        return "i64:" + std::to_string(value.as_i64());
    case ValType::f32:
        std::snprintf(buf.data(), buf.size(), "f32:0x%08x", static_cast<unsigned>(value.as_i32()));
        return buf.data();
    case ValType::f64:
        std::snprintf(buf.data(), buf.size(), "f64:0x%016llx", static_cast<unsigned long long>(value.as_i64()));
        return buf.data();
    case ValType::handle:
        break;
    }
    return "handle:" + to_string(value.as_handle());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"MSWASM toolchain: validate, run, isolate and compile MSWASM modules", "mswasm"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config_path, "key = value file setting fuel, arena_size, handle_width");
    app.add_flag("--json", f.as_json, "Print JSON instead of text");

    const auto add_fuel = [&](CLI::App* c) { c->add_option("--fuel", f.fuel, "Step budget per invocation"); };
    const auto add_program = [&](CLI::App* c) {
        c->add_option("program", f.files, "Module text file")->required()->expected(1);
        c->add_option("--link", f.links, "Module (FILE or NAME=FILE) instantiated first and importable under NAME, default the file stem");
        c->add_option("--host", f.hosts, "Built-in host function offered as (\"env\", NAME); default all");
        c->add_option("--arena-size", f.arena_size, "Size of the _physical_memory arena");
        add_fuel(c);
    };
    const auto add_invoke = [&](CLI::App* c) {
        c->add_option("--invoke", f.invoke, "Exported function to call");
        c->add_option("--arg", f.args, "Typed argument: i32:5, i64:5, f32:1.5, f64:2, handle:null");
    };

    auto* check = app.add_subcommand("check", "Validate modules or scripts");
    check->add_option("files", f.files, "Module or script files")->required();

    auto* run_cmd = app.add_subcommand("run", "Link modules and invoke an export");
    add_program(run_cmd);
    add_invoke(run_cmd);
    run_cmd->add_flag("--trace", f.trace, "Print every memory event");
    run_cmd->add_flag("--dump", f.dump, "Print the segment memory after the run");

    auto* script = app.add_subcommand("script", "Run an assertion script");
    script->add_option("script", f.files, "Script file")->required()->expected(1);
    script->add_option("--host", f.hosts, "Built-in host function offered as (\"env\", NAME); default all");
    script->add_option("--arena-size", f.arena_size, "Size of the _physical_memory arena");
    script->add_flag("-v,--verbose", f.verbose, "Print one line per command");
    add_fuel(script);

    auto* reach = app.add_subcommand("reach", "Print the segments reachable from root globals as JSON");
    add_program(reach);
    add_invoke(reach);
    reach->add_option("--roots", f.roots, "Exported globals (NAME or MODULE.NAME); default every exported handle")
        ->delimiter(',');

    auto* isolate = app.add_subcommand("isolate", "Check that an attacker cannot change local memory");
    isolate->add_option("program", f.files, "Example program")->required()->expected(1);
    isolate->add_option("--attacker", f.attacker, "Attacker module file or builtin:random")->required();
    isolate->add_option("--attacker-name", f.attacker_name, "Module name the attacker is registered under");
    isolate->add_option("--link", f.links, "Setup module (FILE or NAME=FILE) instantiated before the attacker");
    isolate->add_option("--host", f.hosts, "Built-in host function offered as (\"env\", NAME); default all");
    isolate->add_option("--seed", f.seed, "Seed of builtin:random");
    isolate->add_option("--budget", f.budget, "Instruction budget of builtin:random");
    isolate->add_flag("--module", f.module_mode, "Instantiate the attacker under a module experiment first");
    isolate->add_flag("--paranoid", f.paranoid, "Compare local memory after every step");
    isolate->add_option("--roots", f.roots, "Extra root globals (NAME or MODULE.NAME)")->delimiter(',');
    add_invoke(isolate);
    add_fuel(isolate);

    auto* codegen = app.add_subcommand("codegen", "Translate a module to C");
    codegen->add_option("program", f.files, "Module text file")->required()->expected(1);
    codegen->add_option("-o,--output", f.out_dir, "Output directory");
    codegen->add_option("--mode", f.mode, "plain or checkedc");
    codegen->add_option("--prefix", f.prefix, "Symbol prefix");
    codegen->add_option("--name", f.unit_name, "Unit name; default the file stem");
    codegen->add_option("--trap", f.trap, "abort or return");
    codegen->add_option("--arena-size", f.arena_size, "Size of the _physical_memory arena");
    codegen->add_flag("--no-wrappers", f.no_wrappers, "Do not emit host wrappers");
    codegen->add_flag("--strong-wrappers", f.strong_wrappers, "Emit wrappers without weak linkage");

    auto* diff = app.add_subcommand("diff", "Compare the interpreter with the compiled program");
    diff->add_option("program", f.files, "Module text file")->required()->expected(1);
    diff->add_option("--runtime", f.runtime_dir, "Directory with the C runtime sources");
    diff->add_option("--cc", f.cc, "C compiler; default $CC or cc");
    diff->add_option("--prefix", f.prefix, "Symbol prefix");
    diff->add_option("--arena-size", f.arena_size, "Size of the _physical_memory arena");
    diff->add_flag("--keep", f.verbose, "Keep the build directory");
    add_invoke(diff);
    add_fuel(diff);

    auto* fuzz = app.add_subcommand("fuzz", "Run a seeded property campaign");
    fuzz->add_option("--theorem", f.theorem, "1: never stuck; 3: isolation of the example program")->required();
    fuzz->add_option("program", f.files, "Example program for --theorem 3; default the built-in one");
    fuzz->add_option("--cases", f.cases, "Modules (theorem 1) or attacker functions (theorem 3)");
    fuzz->add_option("--modules", f.modules, "Attacker modules (theorem 3)");
    fuzz->add_option("--seed", f.seed, "First seed");
    fuzz->add_option("--budget", f.budget, "Generator instruction budget");
    fuzz->add_option("--threads", f.threads, "Worker threads; default the hardware concurrency");
    fuzz->add_flag("--paranoid", f.paranoid, "Compare local memory after every step (theorem 3)");
    add_fuel(fuzz);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const auto code = app.exit(e, out, err);
        return code == 0 ? exit_values : static_cast<int>(exit_usage);
    }

    try
    {
        Config config;
        if (!f.config_path.empty())
            config = parse_config(read_file(f.config_path));
        if (check->parsed())
            return cmd_check(f, out);
        if (run_cmd->parsed())
            return cmd_run(f, config, out);
        if (script->parsed())
            return cmd_script(f, config, out);
        if (reach->parsed())
            return cmd_reach(f, config, out);
        if (isolate->parsed())
            return cmd_isolate(f, config, out);
        if (codegen->parsed())
            return cmd_codegen(f, config, out);
        if (diff->parsed())
            return cmd_diff(f, config, out);
        if (fuzz->parsed())
            return cmd_fuzz(f, config, out);
    }
    catch (const Failure& e)
    {
        err << e.message << "\n";
        return e.code;
    }
    catch (const UsageError& e)
    {
        err << "mswasm: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        err << "mswasm: " << e.what() << "\n";
        return 1;
    }
    return exit_usage;
}
}  // namespace mswasm::cli
