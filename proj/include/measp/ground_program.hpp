#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace measp {

using AtomId = std::uint32_t;

enum class RuleKind {
    Basic,
    ConstraintEncoding,
    Choice,
    Weight,
    Minimize,
    Disjunctive,
    Unknown,
};

std::string_view to_string(RuleKind kind);

// Numeric-format type codes (lparse/smodels convention).
namespace rule_code {
inline constexpr int basic = 1;
inline constexpr int cardinality = 2;
inline constexpr int choice = 3;
inline constexpr int weight = 5;
inline constexpr int minimize = 6;
inline constexpr int disjunctive = 8;
}  // namespace rule_code

struct GroundRule {
    RuleKind kind = RuleKind::Basic;
    int type_code = rule_code::basic;
    // Empty for ConstraintEncoding rules; the never-true head lives in GroundProgram::false_atom.
    std::vector<AtomId> head;
    std::vector<AtomId> pos_body;
    std::vector<AtomId> neg_body;
    std::optional<std::int64_t> bound;
    // Weight and Minimize rules: one weight per literal, negative literals first.
    std::vector<std::int64_t> weights;
    // Unknown type codes: every integer after the code, verbatim.
    std::vector<std::int64_t> raw;

    std::size_t body_size() const { return pos_body.size() + neg_body.size(); }

    bool operator==(const GroundRule&) const = default;
};

struct GroundProgram {
    std::vector<GroundRule> rules;
    std::map<AtomId, std::string> symbols;
    std::optional<AtomId> false_atom;
    // Compute statement (B+ / B- blocks); the false atom is implicit and never stored here.
    std::vector<AtomId> compute_pos;
    std::vector<AtomId> compute_neg;
    std::int64_t models = 1;
    std::size_t n_atoms = 0;

    bool operator==(const GroundProgram&) const = default;
};

// Number of distinct atom ids in rule heads/bodies and symbol table keys.
std::size_t count_atoms(const GroundProgram& program);

GroundProgram parse_numeric(std::istream& in);
GroundProgram parse_numeric(std::string_view text);

void emit_numeric(const GroundProgram& program, std::ostream& out);
std::string emit_numeric(const GroundProgram& program);

// Textual dialect: `h1 | h2 :- b1, not b2.`, facts `a.`, constraints `:- body.`,
// `%` comments. `v` is accepted as a head separator for DLV output.
GroundProgram parse_text_ground(std::istream& in);
GroundProgram parse_text_ground(std::string_view text);

// Inverse of parse_text_ground for Basic, ConstraintEncoding and Disjunctive rules.
// Throws Error on any other kind. Unnamed atoms are written as `_x<id>`.
std::string emit_text_ground(const GroundProgram& program);

}  // namespace measp
