// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/text.hpp"
#include "mswasm/validator.hpp"
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mswasm
{
/// A parsed module that failed validation; carries every error found.
class ValidationFailure : public std::runtime_error
{
public:
    explicit ValidationFailure(std::vector<TypeError> errors);

    const std::vector<TypeError>& errors() const noexcept { return errors_; }

private:
    std::vector<TypeError> errors_;
};

/// Whole file contents. Throws std::runtime_error if the file cannot be read.
std::string read_file(const std::filesystem::path& path);

/// Validates `module`. Throws ValidationFailure.
std::shared_ptr<const TypedModule> typecheck(Module module);

/// Parses and validates module text. Throws ParseError or ValidationFailure.
std::shared_ptr<const TypedModule> load_module(std::string_view text);
std::shared_ptr<const TypedModule> load_module_file(const std::filesystem::path& path);
}  // namespace mswasm
