// MSWASM toolchain
// Copyright 2026 The MSWASM Toolchain Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sexpr.hpp"
#include <cctype>

namespace mswasm::detail
{
namespace
{
class Reader
{
public:
    explicit Reader(std::string_view text) : text_{text} {}

    std::vector<SExpr> read_all()
    {
        std::vector<SExpr> out;
        skip_space();
        while (pos_ < text_.size())
        {
            if (text_[pos_] == ')')
                throw ParseError{"unbalanced ')'", span(pos_, pos_ + 1)};
            out.push_back(read());
            skip_space();
        }
        return out;
    }

private:
    SourceSpan span(size_t start, size_t end) const
    {
        SourceSpan s{start, end, 1, 1};
        for (size_t i = 0; i < start && i < text_.size(); ++i)
        {
            if (text_[i] == '\n')
            {
                ++s.line;
                s.column = 1;
            }
            else
                ++s.column;
        }
        return s;
    }

    void skip_space()
    {
        while (pos_ < text_.size())
        {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)))
                ++pos_;
            else if (c == ';' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ';')
            {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    ++pos_;
            }
            else if (c == '(' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ';')
                skip_block_comment();
            else
                break;
        }
    }

    void skip_block_comment()
    {
        const size_t start = pos_;
        int depth = 0;
        while (pos_ + 1 < text_.size())
        {
            if (text_[pos_] == '(' && text_[pos_ + 1] == ';')
            {
                ++depth;
                pos_ += 2;
            }
            else if (text_[pos_] == ';' && text_[pos_ + 1] == ')')
            {
                pos_ += 2;
                if (--depth == 0)
                    return;
            }
            else
                ++pos_;
        }
        throw ParseError{"unterminated block comment", span(start, text_.size())};
    }

    SExpr read()
    {
        const char c = text_[pos_];
        if (c == '(')
            return read_list();
        if (c == '"')
            return read_string();
        return read_atom();
    }

    SExpr read_list()
    {
        const size_t start = pos_++;
        SExpr e;
        e.kind = SExpr::Kind::list;
        while (true)
        {
            skip_space();
            if (pos_ >= text_.size())
                throw ParseError{"unbalanced '(': missing ')'", span(start, text_.size())};
            if (text_[pos_] == ')')
            {
                ++pos_;
                break;
            }
            e.items.push_back(read());
        }
        e.span = span(start, pos_);
        return e;
    }

    SExpr read_string()
    {
        const size_t start = pos_++;
        SExpr e;
        e.kind = SExpr::Kind::string;
        while (true)
        {
            if (pos_ >= text_.size() || text_[pos_] == '\n')
                throw ParseError{"unterminated string", span(start, pos_)};
            const char c = text_[pos_++];
            if (c == '"')
                break;
            if (c != '\\')
            {
                e.text.push_back(c);
                continue;
            }
            if (pos_ >= text_.size())
                throw ParseError{"unterminated string", span(start, pos_)};
            const char esc = text_[pos_++];
            switch (esc)
            {
            case 'n':
                e.text.push_back('\n');
                break;
            case 't':
                e.text.push_back('\t');
                break;
            case '\\':
            case '"':
            case '\'':
                e.text.push_back(esc);
                break;
            default:
                if (pos_ < text_.size() && std::isxdigit(static_cast<unsigned char>(esc)) &&
                    std::isxdigit(static_cast<unsigned char>(text_[pos_])))
                {
                    const std::string hex{esc, text_[pos_++]};
                    e.text.push_back(static_cast<char>(std::stoi(hex, nullptr, 16)));
                }
                else
                    throw ParseError{"invalid escape in string", span(pos_ - 2, pos_)};
            }
        }
        e.span = span(start, pos_);
        return e;
    }

    SExpr read_atom()
    {
        const size_t start = pos_;
        while (pos_ < text_.size())
        {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '"' ||
                (c == ';' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ';'))
                break;
            ++pos_;
        }
        SExpr e;
        e.kind = SExpr::Kind::atom;
        e.text = std::string(text_.substr(start, pos_ - start));
        e.span = span(start, pos_);
        return e;
    }

    std::string_view text_;
    size_t pos_ = 0;
};
}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text)
{
    return Reader{text}.read_all();
}
}  // namespace mswasm::detail
