#include "measp/ground_program.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "lexer.hpp"
#include "measp/error.hpp"

namespace measp {

std::string_view to_string(RuleKind kind) {
    switch (kind) {
        case RuleKind::Basic: return "basic";
        case RuleKind::ConstraintEncoding: return "constraint";
        case RuleKind::Choice: return "choice";
        case RuleKind::Weight: return "weight";
        case RuleKind::Minimize: return "minimize";
        case RuleKind::Disjunctive: return "disjunctive";
        case RuleKind::Unknown: return "unknown";
    }
    return "unknown";
}

std::size_t count_atoms(const GroundProgram& program) {
    std::set<AtomId> seen;
    for (const auto& rule : program.rules) {
        seen.insert(rule.head.begin(), rule.head.end());
        seen.insert(rule.pos_body.begin(), rule.pos_body.end());
        seen.insert(rule.neg_body.begin(), rule.neg_body.end());
    }
    for (const auto& [id, name] : program.symbols) seen.insert(id);
    return seen.size();
}

namespace {

struct NumToken {
    std::int64_t value;
    std::size_t column;
};

std::vector<NumToken> split_integers(const std::string& line, std::size_t line_no) {
    std::vector<NumToken> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        std::int64_t value = 0;
        const char* first = line.data() + start;
        const char* last = line.data() + i;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            throw ParseError("expected integer, got '" + line.substr(start, i - start) + "'", line_no, start + 1);
        }
        out.push_back({value, start + 1});
    }
    return out;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

// Cursor over the integers of one rule line.
class RuleLine {
public:
    RuleLine(std::vector<NumToken> tokens, std::size_t line_no) : tokens_(std::move(tokens)), line_(line_no) {}

    std::int64_t integer(const char* what) {
        if (pos_ >= tokens_.size()) throw ParseError(std::string("missing ") + what, line_);
        return tokens_[pos_++].value;
    }

    std::size_t count(const char* what) {
        std::int64_t v = integer(what);
        if (v < 0) fail_prev(std::string("negative ") + what);
        return static_cast<std::size_t>(v);
    }

    AtomId atom() {
        std::int64_t v = integer("atom id");
        if (v < 0) fail_prev("negative atom id");
        if (v == 0 || v > std::numeric_limits<AtomId>::max()) fail_prev("atom id out of range");
        return static_cast<AtomId>(v);
    }

    std::vector<AtomId> atoms(std::size_t n) {
        std::vector<AtomId> out;
        out.reserve(std::min<std::size_t>(n, tokens_.size()));
        for (std::size_t i = 0; i < n; ++i) out.push_back(atom());
        return out;
    }

    std::vector<std::int64_t> rest() {
        std::vector<std::int64_t> out;
        for (; pos_ < tokens_.size(); ++pos_) out.push_back(tokens_[pos_].value);
        return out;
    }

    void finish() const {
        if (pos_ != tokens_.size()) throw ParseError("trailing integers in rule", line_, tokens_[pos_].column);
    }

    [[noreturn]] void fail_prev(const std::string& message) const {
        throw ParseError(message, line_, tokens_[pos_ - 1].column);
    }

    std::size_t line() const { return line_; }

private:
    std::vector<NumToken> tokens_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

// `<#lits> <#neg> [bound] <neg...> <pos...>`
void read_body(RuleLine& in, GroundRule& rule, bool bound_after_counts) {
    std::size_t n_lits = in.count("literal count");
    std::size_t n_neg = in.count("negative literal count");
    if (n_neg > n_lits) in.fail_prev("negative literal count exceeds literal count");
    if (bound_after_counts) rule.bound = in.integer("bound");
    rule.neg_body = in.atoms(n_neg);
    rule.pos_body = in.atoms(n_lits - n_neg);
}

void check_disjoint_body(const GroundRule& rule, std::size_t line_no) {
    std::set<AtomId> pos(rule.pos_body.begin(), rule.pos_body.end());
    for (AtomId a : rule.neg_body) {
        if (pos.count(a) != 0) {
            throw ParseError("atom " + std::to_string(a) + " occurs in both positive and negative body", line_no);
        }
    }
}

GroundRule read_rule(RuleLine& in, std::int64_t code) {
    if (code < 0 || code > std::numeric_limits<int>::max()) throw ParseError("rule type code out of range", in.line(), 1);
    GroundRule rule;
    rule.type_code = static_cast<int>(code);
    switch (code) {
        case rule_code::basic:
            rule.kind = RuleKind::Basic;
            rule.head = {in.atom()};
            read_body(in, rule, false);
            break;
        case rule_code::cardinality:
            rule.kind = RuleKind::Weight;
            rule.head = {in.atom()};
            read_body(in, rule, true);
            break;
        case rule_code::choice:
        case rule_code::disjunctive: {
            rule.kind = code == rule_code::choice ? RuleKind::Choice : RuleKind::Disjunctive;
            std::size_t n_heads = in.count("head count");
            if (code == rule_code::disjunctive && n_heads == 0) in.fail_prev("disjunctive rule needs a head atom");
            rule.head = in.atoms(n_heads);
            read_body(in, rule, false);
            break;
        }
        case rule_code::weight: {
            rule.kind = RuleKind::Weight;
            rule.head = {in.atom()};
            rule.bound = in.integer("bound");
            read_body(in, rule, false);
            for (std::size_t i = 0; i < rule.body_size(); ++i) rule.weights.push_back(in.integer("weight"));
            break;
        }
        case rule_code::minimize: {
            rule.kind = RuleKind::Minimize;
            rule.bound = in.integer("minimize marker");
            read_body(in, rule, false);
            for (std::size_t i = 0; i < rule.body_size(); ++i) rule.weights.push_back(in.integer("weight"));
            break;
        }
        default:
            rule.kind = RuleKind::Unknown;
            rule.raw = in.rest();
            break;
    }
    in.finish();
    check_disjoint_body(rule, in.line());
    return rule;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-blank line; false at end of input.
    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!is_blank(line)) return true;
        }
        return false;
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Atom lines up to a lone 0; the block header line has already been consumed.
std::vector<AtomId> read_compute_atoms(LineReader& reader, const char* header) {
    std::string line;
    std::vector<AtomId> atoms;
    while (true) {
        if (!reader.next(line)) {
            throw ParseError(std::string("truncated document: ") + header + " block lacks terminating 0", reader.line_no() + 1);
        }
        RuleLine tokens(split_integers(line, reader.line_no()), reader.line_no());
        std::int64_t v = tokens.integer("atom id");
        tokens.finish();
        if (v == 0) return atoms;
        if (v < 0) throw ParseError("negative atom id", reader.line_no(), 1);
        if (v > std::numeric_limits<AtomId>::max()) throw ParseError("atom id out of range", reader.line_no(), 1);
        atoms.push_back(static_cast<AtomId>(v));
    }
}

void expect_header(LineReader& reader, std::string& line, const char* header, bool already_read) {
    if (!already_read && !reader.next(line)) {
        throw ParseError(std::string("truncated document: missing ") + header, reader.line_no() + 1);
    }
    if (trim(line) != header) {
        throw ParseError(std::string("expected '") + header + "', got '" + trim(line) + "'", reader.line_no(), 1);
    }
}

// The never-true atom: first B- atom that has no name, occurs in no body, no
// non-basic head and not in B+.
void detect_false_atom(GroundProgram& p) {
    std::set<AtomId> excluded(p.compute_pos.begin(), p.compute_pos.end());
    for (const auto& [id, name] : p.symbols) excluded.insert(id);
    for (const auto& rule : p.rules) {
        excluded.insert(rule.pos_body.begin(), rule.pos_body.end());
        excluded.insert(rule.neg_body.begin(), rule.neg_body.end());
        if (rule.kind != RuleKind::Basic) excluded.insert(rule.head.begin(), rule.head.end());
    }
    auto it = std::find_if(p.compute_neg.begin(), p.compute_neg.end(),
                           [&](AtomId a) { return excluded.count(a) == 0; });
    if (it == p.compute_neg.end()) return;
    const AtomId falsum = *it;
    p.false_atom = falsum;
    p.compute_neg.erase(it);
    for (auto& rule : p.rules) {
        if (rule.kind == RuleKind::Basic && rule.head.size() == 1 && rule.head.front() == falsum) {
            rule.kind = RuleKind::ConstraintEncoding;
            rule.head.clear();
        }
    }
}

}  // namespace

GroundProgram parse_numeric(std::istream& in) {
    GroundProgram program;
    LineReader reader(in);
    std::string line;

    bool terminated = false;
    while (reader.next(line)) {
        RuleLine tokens(split_integers(line, reader.line_no()), reader.line_no());
        std::int64_t code = tokens.integer("rule type");
        if (code == 0) {
            tokens.finish();
            terminated = true;
            break;
        }
        program.rules.push_back(read_rule(tokens, code));
    }
    if (!terminated) throw ParseError("truncated document: rule section lacks terminating 0", reader.line_no() + 1);

    terminated = false;
    while (reader.next(line)) {
        const std::string body = trim(line);
        if (body == "0") {
            terminated = true;
            break;
        }
        std::size_t space = body.find_first_of(" \t");
        const std::string id_text = body.substr(0, space);
        std::int64_t id = 0;
        auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
        if (ec != std::errc() || ptr != id_text.data() + id_text.size()) {
            throw ParseError("expected atom id in symbol table, got '" + id_text + "'", reader.line_no(), 1);
        }
        if (id < 0) throw ParseError("negative atom id", reader.line_no(), 1);
        if (id == 0 || id > std::numeric_limits<AtomId>::max()) {
            throw ParseError("atom id out of range", reader.line_no(), 1);
        }
        if (space == std::string::npos) throw ParseError("symbol table entry lacks a name", reader.line_no());
        std::string name = trim(body.substr(space));
        if (!program.symbols.emplace(static_cast<AtomId>(id), name).second) {
            throw ParseError("duplicate symbol table entry for atom " + id_text, reader.line_no(), 1);
        }
    }
    if (!terminated) throw ParseError("truncated document: symbol table lacks terminating 0", reader.line_no() + 1);

    // Compute section and models line are optional as a whole, complete when present.
    if (reader.next(line)) {
        expect_header(reader, line, "B+", true);
        program.compute_pos = read_compute_atoms(reader, "B+");
        expect_header(reader, line, "B-", false);
        program.compute_neg = read_compute_atoms(reader, "B-");
        if (!reader.next(line)) throw ParseError("truncated document: missing models count", reader.line_no() + 1);
        RuleLine tokens(split_integers(line, reader.line_no()), reader.line_no());
        program.models = tokens.integer("models count");
        tokens.finish();
        if (program.models < 0) throw ParseError("negative models count", reader.line_no(), 1);
        if (reader.next(line)) throw ParseError("unexpected content after models count", reader.line_no(), 1);
    }

    detect_false_atom(program);
    program.n_atoms = count_atoms(program);
    return program;
}

GroundProgram parse_numeric(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_numeric(in);
}

namespace {

template <typename T>
void put_list(std::ostream& out, const std::vector<T>& values) {
    for (const auto& v : values) out << ' ' << v;
}

void put_body(std::ostream& out, const GroundRule& r, bool bound_after_counts) {
    out << ' ' << r.body_size() << ' ' << r.neg_body.size();
    if (bound_after_counts) out << ' ' << r.bound.value_or(0);
    put_list(out, r.neg_body);
    put_list(out, r.pos_body);
}

}  // namespace

void emit_numeric(const GroundProgram& program, std::ostream& out) {
    for (const auto& r : program.rules) {
        switch (r.kind) {
            case RuleKind::Unknown:
                out << r.type_code;
                put_list(out, r.raw);
                break;
            case RuleKind::ConstraintEncoding:
                if (!program.false_atom) throw Error("constraint rule without a designated false atom");
                out << rule_code::basic << ' ' << *program.false_atom;
                put_body(out, r, false);
                break;
            case RuleKind::Basic:
                out << rule_code::basic << ' ' << r.head.at(0);
                put_body(out, r, false);
                break;
            case RuleKind::Choice:
            case RuleKind::Disjunctive:
                out << (r.kind == RuleKind::Choice ? rule_code::choice : rule_code::disjunctive) << ' ' << r.head.size();
                put_list(out, r.head);
                put_body(out, r, false);
                break;
            case RuleKind::Weight:
                if (r.type_code == rule_code::cardinality) {
                    out << rule_code::cardinality << ' ' << r.head.at(0);
                    put_body(out, r, true);
                } else {
                    out << rule_code::weight << ' ' << r.head.at(0) << ' ' << r.bound.value_or(0);
                    put_body(out, r, false);
                    put_list(out, r.weights);
                }
                break;
            case RuleKind::Minimize:
                out << rule_code::minimize << ' ' << r.bound.value_or(0);
                put_body(out, r, false);
                put_list(out, r.weights);
                break;
        }
        out << '\n';
    }
    out << "0\n";
    for (const auto& [id, name] : program.symbols) out << id << ' ' << name << '\n';
    out << "0\nB+\n";
    for (AtomId a : program.compute_pos) out << a << '\n';
    out << "0\nB-\n";
    if (program.false_atom) out << *program.false_atom << '\n';
    for (AtomId a : program.compute_neg) out << a << '\n';
    out << "0\n" << program.models << '\n';
}

std::string emit_numeric(const GroundProgram& program) {
    std::ostringstream out;
    emit_numeric(program, out);
    return out.str();
}

namespace {

using detail::Lexer;
using detail::Tok;
using detail::Token;

class TextGroundParser {
public:
    explicit TextGroundParser(std::string_view text) : lex_(text) {}

    GroundProgram parse() {
        bool any_constraint = false;
        while (lex_.peek().kind != Tok::End) {
            GroundRule rule = statement();
            any_constraint |= rule.kind == RuleKind::ConstraintEncoding;
            program_.rules.push_back(std::move(rule));
        }
        if (any_constraint) program_.false_atom = static_cast<AtomId>(ids_.size() + 1);
        program_.n_atoms = count_atoms(program_);
        return std::move(program_);
    }

private:
    GroundRule statement() {
        const Token start = lex_.peek();
        GroundRule rule;
        if (!lex_.peek().is(":-")) {
            rule.head.push_back(atom());
            while (true) {
                if (lex_.peek().is("|")) {
                    lex_.next();
                } else if (lex_.peek().is_ident("v") && starts_atom(lex_.peek_second())) {
                    lex_.next();
                } else {
                    break;
                }
                AtomId a = atom();
                if (std::find(rule.head.begin(), rule.head.end(), a) == rule.head.end()) rule.head.push_back(a);
            }
        }
        if (lex_.peek().is(":-")) {
            lex_.next();
            while (true) {
                if (lex_.peek().is_ident("not") && starts_atom(lex_.peek_second())) {
                    lex_.next();
                    rule.neg_body.push_back(atom());
                } else {
                    rule.pos_body.push_back(atom());
                }
                if (!lex_.peek().is(",")) break;
                lex_.next();
            }
        }
        if (!lex_.peek().is(".")) lex_.fail("expected '.'" + found());
        lex_.next();

        if (rule.head.empty()) {
            if (rule.body_size() == 0) Lexer::fail_at(start, "empty rule");
            rule.kind = RuleKind::ConstraintEncoding;
        } else if (rule.head.size() == 1) {
            rule.kind = RuleKind::Basic;
        } else {
            rule.kind = RuleKind::Disjunctive;
            rule.type_code = rule_code::disjunctive;
        }
        std::set<AtomId> pos(rule.pos_body.begin(), rule.pos_body.end());
        for (AtomId a : rule.neg_body) {
            if (pos.count(a) != 0) Lexer::fail_at(start, "atom '" + program_.symbols[a] + "' occurs in both positive and negative body");
        }
        return rule;
    }

    static bool starts_atom(const Token& t) {
        return t.kind == Tok::Ident || t.kind == Tok::Variable || t.is("-");
    }

    std::string found() const {
        const Token& t = lex_.peek();
        if (t.kind == Tok::End) return ", found end of input";
        return ", found '" + t.text + "'";
    }

    AtomId atom() {
        std::string name;
        if (lex_.peek().is("-")) name += lex_.next().text;
        const Token& head = lex_.peek();
        if (head.kind != Tok::Ident && head.kind != Tok::Variable) lex_.fail("expected atom" + found());
        if (head.is_ident("not")) lex_.fail("expected atom" + found());
        name += lex_.next().text;
        if (lex_.peek().is("(")) {
            int depth = 0;
            do {
                const Token t = lex_.next();
                if (t.kind == Tok::End) Lexer::fail_at(t, "unbalanced parentheses in atom");
                if (t.is("(")) ++depth;
                if (t.is(")")) --depth;
                if (t.is(".") || t.is(":-")) Lexer::fail_at(t, "unbalanced parentheses in atom");
                name += t.text;
            } while (depth > 0);
        }
        return intern(name);
    }

    AtomId intern(const std::string& name) {
        auto [it, inserted] = ids_.try_emplace(name, static_cast<AtomId>(ids_.size() + 1));
        if (inserted) program_.symbols.emplace(it->second, name);
        return it->second;
    }

    Lexer lex_;
    GroundProgram program_;
    std::unordered_map<std::string, AtomId> ids_;
};

}  // namespace

GroundProgram parse_text_ground(std::string_view text) {
    return TextGroundParser(text).parse();
}

GroundProgram parse_text_ground(std::istream& in) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_text_ground(text);
}

std::string emit_text_ground(const GroundProgram& program) {
    auto name_of = [&](AtomId a) {
        auto it = program.symbols.find(a);
        return it != program.symbols.end() ? it->second : "_x" + std::to_string(a);
    };
    std::ostringstream out;
    for (const auto& r : program.rules) {
        if (r.kind != RuleKind::Basic && r.kind != RuleKind::ConstraintEncoding && r.kind != RuleKind::Disjunctive) {
            throw Error("unsupported construct for textual ground format: " + std::string(to_string(r.kind)) + " rule");
        }
        if (r.head.empty() && r.body_size() == 0) {
            throw Error("unsupported construct for textual ground format: constraint with an empty body");
        }
        for (std::size_t i = 0; i < r.head.size(); ++i) out << (i ? " | " : "") << name_of(r.head[i]);
        if (r.body_size() > 0) {
            out << (r.head.empty() ? ":- " : " :- ");
            bool first = true;
            for (AtomId a : r.pos_body) {
                out << (first ? "" : ", ") << name_of(a);
                first = false;
            }
            for (AtomId a : r.neg_body) {
                out << (first ? "" : ", ") << "not " << name_of(a);
                first = false;
            }
        }
        out << ".\n";
    }
    return out.str();
}

}  // namespace measp
