#pragma once

// Tokenizer shared by the textual ground dialect and the non-ground parser.

#include <cstddef>
#include <string>
#include <string_view>

#include "measp/error.hpp"

namespace measp::detail {

enum class Tok {
    Ident,     // lowercase-initial name (constants, predicates, functions, `not`)
    Variable,  // uppercase or '_' initial
    Integer,
    String,    // double-quoted, text includes the quotes
    Punct,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;

    bool is(std::string_view punct) const { return kind == Tok::Punct && text == punct; }
    bool is_ident(std::string_view name) const { return kind == Tok::Ident && text == name; }
};

class Lexer {
public:
    explicit Lexer(std::string_view source) : src_(source) { advance(); }

    const Token& peek() const { return current_; }

    // Token after peek(); computed on demand without consuming anything.
    Token peek_second() const {
        Lexer copy = *this;
        copy.advance();
        return copy.current_;
    }

    Token next() {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& message) const { fail_at(current_, message); }

    [[noreturn]] static void fail_at(const Token& t, const std::string& message) {
        throw ParseError(message, t.line, t.column);
    }

private:
    void advance() {
        skip_space_and_comments();
        current_ = Token{};
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= src_.size()) {
            current_.kind = Tok::End;
            return;
        }
        const char c = src_[pos_];
        if (is_lower(c)) {
            current_.kind = Tok::Ident;
            current_.text = take_while_name();
        } else if (is_upper(c) || c == '_') {
            current_.kind = Tok::Variable;
            current_.text = take_while_name();
        } else if (is_digit(c)) {
            current_.kind = Tok::Integer;
            std::size_t start = pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_])) bump();
            current_.text = std::string(src_.substr(start, pos_ - start));
        } else if (c == '"') {
            current_.kind = Tok::String;
            std::size_t start = pos_;
            bump();
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\n') throw ParseError("unterminated string", current_.line, current_.column);
                if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) bump();
                bump();
            }
            if (pos_ >= src_.size()) throw ParseError("unterminated string", current_.line, current_.column);
            bump();
            current_.text = std::string(src_.substr(start, pos_ - start));
        } else {
            current_.kind = Tok::Punct;
            static constexpr std::string_view two_char[] = {":-", "!=", "<>", "<=", ">=", "=="};
            for (std::string_view op : two_char) {
                if (src_.substr(pos_, 2) == op) {
                    current_.text = std::string(op);
                    bump();
                    bump();
                    return;
                }
            }
            static constexpr std::string_view one_char = ".,|()?-+*/=<>\\:";
            if (one_char.find(c) == std::string_view::npos) {
                throw ParseError(std::string("unexpected character '") + printable(c) + "'", line_, column_);
            }
            current_.text = std::string(1, c);
            bump();
        }
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
                bump();
            } else {
                break;
            }
        }
    }

    std::string take_while_name() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (is_alnum(src_[pos_]) || src_[pos_] == '_' || src_[pos_] == '\'')) bump();
        return std::string(src_.substr(start, pos_ - start));
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    static std::string printable(char c) {
        const auto u = static_cast<unsigned char>(c);
        if (u >= 0x20 && u < 0x7f) return std::string(1, c);
        static constexpr char hex[] = "0123456789abcdef";
        return std::string("\\x") + hex[u >> 4] + hex[u & 0xf];
    }

    static bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
    static bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_alnum(char c) { return is_lower(c) || is_upper(c) || is_digit(c); }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
    Token current_;
};

}  // namespace measp::detail
