// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/constants.hpp"
#include "mswasm/store.hpp"
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mswasm
{
/// How an invocation ended.
struct Outcome
{
    enum class Kind : uint8_t
    {
        values,
        trapped,
        fuel_exhausted,
        stuck,
        /// The store's segment budget or the call-depth limit ran out (a host condition, not a trap).
        resource_exhausted,
    };

    Kind kind = Kind::values;
    std::vector<Value> values;
    Trap trap;
    std::string detail;

    static Outcome returned(std::vector<Value> values) { return {Kind::values, std::move(values), {}, {}}; }
    static Outcome trapped(Trap trap) { return {Kind::trapped, {}, std::move(trap), {}}; }
    static Outcome fuel_exhausted() { return {Kind::fuel_exhausted, {}, {}, {}}; }
    static Outcome stuck(std::string why) { return {Kind::stuck, {}, {}, std::move(why)}; }
    static Outcome exhausted(std::string why) { return {Kind::resource_exhausted, {}, {}, std::move(why)}; }

    bool is_values() const noexcept { return kind == Kind::values; }
    bool is_trapped() const noexcept { return kind == Kind::trapped; }
    bool is_stuck() const noexcept { return kind == Kind::stuck; }

    /// Same kind, same values (bitwise), same trap kind.
    bool same_as(const Outcome& other) const noexcept;

    /// e.g. "values (i32 1)", "trapped spatial: ...", "fuel_exhausted".
    std::string to_string() const;
    std::string to_json() const;

    /// CLI exit code: 0 values, 3 trapped, 4 fuel exhausted, 5 stuck, 1 resource exhausted.
    int exit_code() const noexcept;
};

std::string_view to_string(Outcome::Kind kind) noexcept;

class Config;

/// Hooks used by the isolation lab. Called with the configuration in a consistent state.
class ExecutionObserver
{
public:
    virtual ~ExecutionObserver() = default;
    /// Before entering function `func_addr`; its arguments are `args`.
    virtual void on_call(const Config&, uint32_t /*func_addr*/, std::span<const Value> /*args*/) {}
    /// After `func_addr` returned `results` to its caller.
    virtual void on_return(const Config&, uint32_t /*func_addr*/, std::span<const Value> /*results*/) {}
    /// After every step that did not end the run.
    virtual void after_step(const Config&) {}
    /// Once, when the run ends, before anything else happens to the store.
    virtual void on_finish(const Config&, const Outcome&) {}
};

struct InterpreterOptions
{
    uint64_t fuel = default_fuel;
    /// Compare the operand stack against the validator's prediction before each instruction.
    bool check_shapes = false;
    uint32_t max_call_depth = mswasm::max_call_depth;
    ExecutionObserver* observer = nullptr;
};

/// Host error raised by invoke for a bad request: unknown export, argument mismatch.
class InvokeError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A running invocation: operand stack, label stack and call stack over a store.
class Config
{
public:
    struct Label
    {
        const std::vector<Instr>* seq = nullptr;
        uint32_t pc = 0;
        uint32_t height = 0;
        /// Values a branch to this label carries (0 for loops).
        uint32_t branch_arity = 0;
        /// The block instruction; null for a function body.
        const Instr* instr = nullptr;
    };

    struct Frame
    {
        uint32_t func = 0;
        uint32_t instance = 0;
        std::vector<Value> locals;
        uint32_t label_base = 0;
        uint32_t stack_base = 0;
    };

    /// Prepares a call of store function `func_addr`. Throws InvokeError if args do not match.
    Config(Store& store, uint32_t func_addr, std::vector<Value> args, InterpreterOptions options = {});

    /// Performs one reduction. Returns the final outcome once the run is over.
    std::optional<Outcome> step();

    /// Steps until an outcome, spending one unit of fuel per step.
    Outcome run();

    Store& store() noexcept { return store_; }
    const Store& store() const noexcept { return store_; }
    const std::vector<Value>& values() const noexcept { return values_; }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    const std::vector<Frame>& frames() const noexcept { return frames_; }
    uint64_t fuel_left() const noexcept { return fuel_; }

private:
    std::optional<Outcome> execute(const Instr& instr);
    std::optional<Outcome> end_label();
    std::optional<Outcome> branch(uint32_t depth);
    std::optional<Outcome> do_return();
    std::optional<Outcome> call(uint32_t func_addr);
    std::optional<Outcome> call_host(uint32_t func_addr);
    std::optional<Outcome> check_shape(const Instr& instr) const;

    bool pop(ValType type, Value& out);
    bool pop_any(Value& out);
    bool pop_results(std::span<const ValType> types, std::vector<Value>& out);
    const ModuleInstance& instance() const { return store_.instances[frames_.back().instance]; }

    Store& store_;
    InterpreterOptions options_;
    uint64_t fuel_;
    uint32_t entry_;
    std::vector<Value> values_;
    std::vector<Label> labels_;
    std::vector<Frame> frames_;
    std::optional<Outcome> finished_;
};

/// Runs store function `func_addr` to completion or fuel exhaustion.
Outcome invoke_address(
    Store& store, uint32_t func_addr, std::vector<Value> args, const InterpreterOptions& options = {});

/// Invokes an exported function of `instance` (an index into store.instances).
Outcome invoke(Store& store, uint32_t instance, std::string_view export_name, std::vector<Value> args,
    const InterpreterOptions& options = {});

/// Invokes function `func_index` of the instance's function index space.
Outcome invoke(Store& store, uint32_t instance, uint32_t func_index, std::vector<Value> args,
    const InterpreterOptions& options = {});

/// invoke plus the ordered list of memory events it caused.
std::pair<Outcome, Trace> invoke_with_trace(Store& store, uint32_t instance, std::string_view export_name,
    std::vector<Value> args, const InterpreterOptions& options = {});

/// Store function address of an export, or InvokeError.
uint32_t export_function(const Store& store, uint32_t instance, std::string_view export_name);
}  // namespace mswasm
