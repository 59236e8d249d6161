// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mswasm/loader.hpp"
#include <fstream>
#include <sstream>

namespace mswasm
{
namespace
{
std::string summarize(const std::vector<TypeError>& errors)
{
    std::string out = "validation failed";
    if (!errors.empty())
        out += ": " + errors.front().to_string();
    if (errors.size() > 1)
        out += " (and " + std::to_string(errors.size() - 1) + " more)";
    return out;
}
}  // namespace

ValidationFailure::ValidationFailure(std::vector<TypeError> errors)
  : std::runtime_error{summarize(errors)}, errors_{std::move(errors)}
{}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error{"cannot read " + path.string()};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::shared_ptr<const TypedModule> typecheck(Module module)
{
    auto result = validate_module(std::move(module));
    if (!result.ok())
        throw ValidationFailure{std::move(result.errors)};
    return std::make_shared<const TypedModule>(std::move(*result.typed));
}

std::shared_ptr<const TypedModule> load_module(std::string_view text)
{
    return typecheck(parse_module(text));
}

std::shared_ptr<const TypedModule> load_module_file(const std::filesystem::path& path)
{
    return load_module(read_file(path));
}
}  // namespace mswasm
