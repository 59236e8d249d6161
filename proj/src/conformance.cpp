// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/conformance.hpp"
#include "mswasm/store.hpp"
#include <charconv>
#include <map>
#include <optional>
#include <sstream>

namespace mswasm
{
namespace
{
std::vector<std::string> split_words(std::string_view line)
{
    std::vector<std::string> words;
    std::istringstream in{std::string(line)};
    std::string w;
    while (in >> w)
        words.push_back(w);
    return words;
}

class TableRunner
{
public:
    explicit TableRunner(ConformanceReport& report) : report_{report} {}

    void begin_case(std::string name)
    {
        ++report_.cases;
        name_ = std::move(name);
        store_ = Store{};
        handles_.clear();
    }

    void step(size_t line, std::string_view text)
    {
        line_ = line;
        std::string expected = "ok";
        if (const auto arrow = text.find("=>"); arrow != std::string_view::npos)
        {
            const auto words = split_words(text.substr(arrow + 2));
            if (words.empty())
                fail_syntax("missing expectation after =>");
            expected.clear();
            for (const auto& w : words)
                expected += (expected.empty() ? "" : " ") + w;
            text = text.substr(0, arrow);
        }
        auto words = split_words(text);
        std::string target;
        if (words.size() >= 2 && words[1] == "=")
        {
            target = words[0];
            if (target.size() < 2 || target[0] != 'h')
                fail_syntax("assignment target must be a handle name like h0");
            words.erase(words.begin(), words.begin() + 2);
        }
        if (words.empty())
            fail_syntax("missing operation");
        ++report_.steps;
        const auto actual = execute(words, target);
        if (actual != expected)
            report_.failures.push_back({name_, line_, expected, actual});
    }

private:
    [[noreturn]] void fail_syntax(const std::string& message) const { throw ConformanceSyntaxError{line_, message}; }

    template <typename T>
    T number(const std::string& text) const
    {
        T value{};
        std::string_view s = text;
        int base = 10;
        if (s.size() > 2 && s[0] == '0' && s[1] == 'x')
        {
            s.remove_prefix(2);
            base = 16;
        }
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, base);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
            fail_syntax("invalid number '" + text + "'");
        return value;
    }

    const Handle& handle(const std::string& name) const
    {
        const auto it = handles_.find(name);
        if (it == handles_.end())
            fail_syntax("unknown handle " + name);
        return it->second;
    }

    void need(const std::vector<std::string>& words, size_t count, std::string_view usage) const
    {
        if (words.size() != count)
            fail_syntax("expected: " + std::string(usage));
    }

    void need_target(const std::string& target, bool wanted) const
    {
        if (target.empty() == wanted)
            fail_syntax(wanted ? "this operation needs a target: hN = ..." : "this operation has no result");
    }

    static std::string trap_text(const Trap& t) { return "trap " + std::string(to_string(t.kind)); }

    Value scalar(const std::string& type, const std::string& text) const
    {
        const bool negative = !text.empty() && text[0] == '-';
        if (type == "i32" || type == "u8")
            return Value::i32(negative ? static_cast<uint32_t>(number<int32_t>(text)) : number<uint32_t>(text));
        if (type == "i64")
            return Value::i64(negative ? static_cast<uint64_t>(number<int64_t>(text)) : number<uint64_t>(text));
        if (type == "f32")
            return Value::f32_bits(number<uint32_t>(text));
        if (type == "f64")
            return Value::f64_bits(number<uint64_t>(text));
        fail_syntax("unknown type " + type);
    }

    static std::string show(const Value& v)
    {
        switch (v.type())
        {
        case ValType::i32:
            return std::to_string(v.as_i32());
        case ValType::i64:
            return std::to_string(v.as_i64());
        case ValType::f32:
        case ValType::f64:
        {
            std::ostringstream s;
            s << "0x" << std::hex << v.as_i64();
            return s.str();
        }
        case ValType::handle:
            break;
        }
        return "handle";
    }

    ValType value_type(const std::string& type) const
    {
        if (type == "u8")
            return ValType::i32;
        if (const auto t = val_type_from_string(type))
            return *t;
        fail_syntax("unknown type " + type);
    }

    std::string execute(const std::vector<std::string>& w, const std::string& target)
    {
        const auto& op = w[0];
        if (op == "alloc")
        {
            need(w, 2, "hN = alloc SIZE");
            need_target(target, true);
            handles_[target] = store_.seg_alloc(number<uint32_t>(w[1]));
            return "ok";
        }
        if (op == "null")
        {
            need(w, 1, "hN = null");
            need_target(target, true);
            handles_[target] = null_handle;
            return "ok";
        }
        if (op == "add")
        {
            need(w, 3, "hN = add hM DELTA");
            need_target(target, true);
            handles_[target] = Store::handle_add(handle(w[1]), number<int32_t>(w[2]));
            return "ok";
        }
        if (op == "setbounds")
        {
            need(w, 3, "hN = setbounds hM LEN");
            need_target(target, true);
            auto r = store_.handle_setbounds(handle(w[1]), number<uint32_t>(w[2]));
            if (!r)
                return trap_text(r.trap());
            handles_[target] = r.value();
            return "ok";
        }
        if (op == "free")
        {
            need(w, 2, "free hM");
            need_target(target, false);
            const auto r = store_.seg_free(handle(w[1]));
            return r ? "ok" : trap_text(r.trap());
        }
        if (op == "store")
        {
            need(w, 5, "store TYPE hM OFFSET VALUE");
            need_target(target, false);
            const auto& h = handle(w[2]);
            const auto offset = number<uint32_t>(w[3]);
            const auto v = w[1] == "handle" ? Value::handle(handle(w[4])) : scalar(w[1], w[4]);
            const auto r = store_.seg_store(h, v, offset, w[1] == "u8");
            return r ? "ok" : trap_text(r.trap());
        }
        if (op == "load")
        {
            need(w, 4, "load TYPE hM OFFSET");
            const bool is_handle = w[1] == "handle";
            need_target(target, is_handle);
            auto r = store_.seg_load(handle(w[2]), value_type(w[1]), number<uint32_t>(w[3]), w[1] == "u8");
            if (!r)
                return trap_text(r.trap());
            if (is_handle)
            {
                handles_[target] = r.value().as_handle();
                return "ok";
            }
            return show(r.value());
        }
        if (op == "valid")
        {
            need(w, 2, "valid hM");
            need_target(target, false);
            return handle(w[1]).valid ? "1" : "0";
        }
        if (op == "access")
        {
            need(w, 4, "access hM OFFSET WIDTH");
            need_target(target, false);
            const auto width = number<uint32_t>(w[3]);
            const auto t = store_.check_access(handle(w[1]), number<uint32_t>(w[2]), width, false);
            return t ? trap_text(*t) : "ok";
        }
        fail_syntax("unknown operation " + op);
    }

    ConformanceReport& report_;
    std::string name_;
    size_t line_ = 0;
    Store store_;
    std::map<std::string, Handle> handles_;
};
}  // namespace

ConformanceReport run_conformance_table(std::string_view text)
{
    ConformanceReport report;
    TableRunner runner{report};
    bool in_case = false;
    size_t number = 0;
    size_t start = 0;
    while (start <= text.size())
    {
        const auto end = std::min(text.find('\n', start), text.size());
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++number;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const auto words = split_words(line);
        if (words.empty())
            continue;
        if (words[0] == "case")
        {
            if (words.size() != 2)
                throw ConformanceSyntaxError{number, "expected: case NAME"};
            runner.begin_case(words[1]);
            in_case = true;
            continue;
        }
        if (!in_case)
            throw ConformanceSyntaxError{number, "operation outside a case"};
        runner.step(number, line);
        if (end == text.size())
            break;
    }
    return report;
}
}  // namespace mswasm
