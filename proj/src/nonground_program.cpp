#include "measp/nonground_program.hpp"

#include <algorithm>
#include <istream>
#include <iterator>
#include <map>

#include "lexer.hpp"
#include "measp/error.hpp"

namespace measp {

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

bool is_comparison(const Token& t) {
    static constexpr std::string_view ops[] = {"=", "==", "!=", "<>", "<", "<=", ">", ">="};
    if (t.kind != Tok::Punct) return false;
    return std::find(std::begin(ops), std::end(ops), t.text) != std::end(ops);
}

// A parsed term: its spelling and, for bare constants or compound terms, the
// functor and argument count (used when the term turns out to be an atom).
struct Term {
    std::string text;
    std::string functor;
    std::size_t arity = 0;
    bool symbolic = false;  // constant or compound with an identifier head
};

class NonGroundParser {
public:
    explicit NonGroundParser(std::string_view text) : lex_(text) {}

    NonGroundProgram parse() {
        while (lex_.peek().kind != Tok::End) statement();
        check_arities();
        return std::move(program_);
    }

private:
    void statement() {
        NonGroundRule rule;
        if (!lex_.peek().is(":-")) {
            rule.head.push_back(head_atom());
            if (lex_.peek().is("?")) {
                lex_.next();
                rule.is_query = true;
                rule.pos_body = std::move(rule.head);
                rule.head.clear();
                program_.has_query = true;
                program_.rules.push_back(std::move(rule));
                return;
            }
            while (true) {
                if (lex_.peek().is("|")) {
                    lex_.next();
                } else if (lex_.peek().is_ident("v") && starts_atom(lex_.peek_second())) {
                    lex_.next();
                } else {
                    break;
                }
                rule.head.push_back(head_atom());
            }
        }
        if (lex_.peek().is(":-")) {
            lex_.next();
            while (true) {
                literal(rule);
                if (!lex_.peek().is(",")) break;
                lex_.next();
            }
        }
        expect(".");
        program_.rules.push_back(std::move(rule));
    }

    static bool starts_atom(const Token& t) { return t.kind == Tok::Ident || t.is("-"); }

    void literal(NonGroundRule& rule) {
        if (lex_.peek().is_ident("not") && starts_atom(lex_.peek_second())) {
            lex_.next();
            rule.neg_body.push_back(head_atom());
            return;
        }
        const Token start = lex_.peek();
        std::string prefix;
        if (lex_.peek().is("-") && lex_.peek_second().kind == Tok::Ident) {
            lex_.next();
            prefix = "-";
        }
        Term lhs = term();
        if (is_comparison(lex_.peek())) {
            std::string op = lex_.next().text;
            Term rhs = term();
            note_function(lhs);
            note_function(rhs);
            rule.builtins.push_back(prefix + lhs.text + op + rhs.text);
            return;
        }
        if (!lhs.symbolic) Lexer::fail_at(start, "expected atom or comparison");
        rule.pos_body.push_back(make_atom(prefix + lhs.functor, lhs.arity, prefix + lhs.text));
    }

    NonGroundAtom head_atom() {
        const Token start = lex_.peek();
        std::string prefix;
        if (lex_.peek().is("-")) {
            lex_.next();
            prefix = "-";
        }
        if (lex_.peek().kind != Tok::Ident || lex_.peek().is_ident("not")) lex_.fail("expected atom" + found());
        Term t = primary();
        if (!t.symbolic) Lexer::fail_at(start, "expected atom");
        return make_atom(prefix + t.functor, t.arity, prefix + t.text);
    }

    NonGroundAtom make_atom(std::string name, std::size_t arity, std::string text) {
        Predicate pred{std::move(name), arity};
        program_.predicates.insert(pred);
        return NonGroundAtom{std::move(pred), std::move(text)};
    }

    Term term() {
        Term t = product();
        while (lex_.peek().is("+") || lex_.peek().is("-")) {
            std::string op = lex_.next().text;
            Term rhs = product();
            note_function(t);
            note_function(rhs);
            t = Term{t.text + op + rhs.text, {}, 0, false};
        }
        return t;
    }

    Term product() {
        Term t = unary();
        while (lex_.peek().is("*") || lex_.peek().is("/") || lex_.peek().is("\\")) {
            std::string op = lex_.next().text;
            Term rhs = unary();
            note_function(t);
            note_function(rhs);
            t = Term{t.text + op + rhs.text, {}, 0, false};
        }
        return t;
    }

    Term unary() {
        if (lex_.peek().is("-")) {
            lex_.next();
            Term t = unary();
            note_function(t);
            return Term{"-" + t.text, {}, 0, false};
        }
        return primary();
    }

    // Constant, variable, integer, string, compound term or parenthesised term.
    // Functors of nested compound terms are recorded as function symbols.
    Term primary() {
        const Token t = lex_.peek();
        switch (t.kind) {
            case Tok::Integer:
            case Tok::Variable:
            case Tok::String:
                lex_.next();
                return Term{t.text, {}, 0, false};
            case Tok::Ident: {
                if (t.text == "not") lex_.fail("unexpected 'not'");
                lex_.next();
                Term out{t.text, t.text, 0, true};
                if (lex_.peek().is("(")) {
                    lex_.next();
                    out.text += "(";
                    while (true) {
                        Term arg = term();
                        note_function(arg);
                        out.text += arg.text;
                        ++out.arity;
                        if (lex_.peek().is(",")) {
                            lex_.next();
                            out.text += ",";
                            continue;
                        }
                        break;
                    }
                    expect(")");
                    out.text += ")";
                }
                return out;
            }
            case Tok::Punct:
                if (t.is("(")) {
                    lex_.next();
                    Term inner = term();
                    note_function(inner);
                    expect(")");
                    return Term{"(" + inner.text + ")", {}, 0, false};
                }
                break;
            case Tok::End:
                break;
        }
        lex_.fail("expected term" + found());
    }

    // Compound terms in term position are function symbols.
    void note_function(const Term& t) {
        if (t.symbolic && t.arity > 0) program_.functions.insert(t.functor);
    }

    void expect(std::string_view punct) {
        if (!lex_.peek().is(punct)) lex_.fail("expected '" + std::string(punct) + "'" + found());
        lex_.next();
    }

    std::string found() const {
        const Token& t = lex_.peek();
        if (t.kind == Tok::End) return ", found end of input";
        return ", found '" + t.text + "'";
    }

    void check_arities() {
        std::map<std::string, std::vector<std::size_t>> arities;
        for (const auto& p : program_.predicates) arities[p.name].push_back(p.arity);
        for (const auto& [name, list] : arities) {
            if (list.size() < 2) continue;
            std::string msg = "predicate '" + name + "' used with arities";
            for (std::size_t a : list) msg += " " + std::to_string(a);
            program_.warnings.push_back(msg);
        }
    }

    Lexer lex_;
    NonGroundProgram program_;
};

}  // namespace

NonGroundProgram parse_nonground(std::string_view text) {
    return NonGroundParser(text).parse();
}

NonGroundProgram parse_nonground(std::istream& in) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_nonground(text);
}

}  // namespace measp
