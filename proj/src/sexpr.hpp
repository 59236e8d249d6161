// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mswasm/text.hpp"
#include <string>
#include <string_view>
#include <vector>

namespace mswasm::detail
{
struct SExpr
{
    enum class Kind
    {
        list,
        atom,
        string,
    };

    Kind kind = Kind::atom;
    /// Atom text, or the decoded bytes of a string.
    std::string text;
    std::vector<SExpr> items;
    SourceSpan span;
};

/// Reads every top-level s-expression. Handles `;;` line comments and `(; ;)` block comments.
/// Throws ParseError on unbalanced parentheses or malformed strings.
std::vector<SExpr> read_sexprs(std::string_view text);
}  // namespace mswasm::detail
