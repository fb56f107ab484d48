#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace measp {

// Predicate symbol; strong negation is part of the name (`-p` differs from `p`).
struct Predicate {
    std::string name;
    std::size_t arity = 0;

    std::string key() const { return name + "/" + std::to_string(arity); }
    auto operator<=>(const Predicate&) const = default;
};

struct NonGroundAtom {
    Predicate predicate;
    std::string text;  // source spelling without whitespace, e.g. `reach(X,Y)`

    bool operator==(const NonGroundAtom&) const = default;
};

struct NonGroundRule {
    std::vector<NonGroundAtom> head;  // empty: constraint or query; two or more: disjunctive
    std::vector<NonGroundAtom> pos_body;
    std::vector<NonGroundAtom> neg_body;
    std::vector<std::string> builtins;  // comparison literals, verbatim
    bool is_query = false;

    bool is_disjunctive() const { return head.size() >= 2; }
    bool is_constraint() const { return head.empty() && !is_query; }
};

struct NonGroundProgram {
    std::vector<NonGroundRule> rules;
    std::set<Predicate> predicates;
    std::set<std::string> functions;
    bool has_query = false;
    // Non-fatal findings such as a predicate name used with several arities.
    std::vector<std::string> warnings;
};

// ASP-Core-1 subset: rules `h1 | h2 :- l1, not l2, X < Y.`, constraints,
// facts, queries `p(X)?` and `%` comments. Throws ParseError with line and column.
NonGroundProgram parse_nonground(std::string_view text);
NonGroundProgram parse_nonground(std::istream& in);

// Predicate dependency graph with nodes kept in sorted order; edges are
// (from, to) node indices and always point from a body predicate to a head predicate.
struct DependencyGraph {
    std::vector<std::string> nodes;
    std::set<std::pair<std::size_t, std::size_t>> pos_edges;
    std::set<std::pair<std::size_t, std::size_t>> neg_edges;

    std::size_t size() const { return nodes.size(); }
    // Throws Error for an unknown node.
    std::size_t index_of(std::string_view node) const;
};

DependencyGraph dependency_graph(const NonGroundProgram& program);

enum class EdgeSet { All, Positive };

// Components hold sorted node indices; components are ordered by their least member.
using Partition = std::vector<std::vector<std::size_t>>;

Partition scc(const DependencyGraph& graph, EdgeSet edges = EdgeSet::All);

// Number of components in `positive_sccs` (the SCCs of the positive graph of
// `graph`) where no rule has two distinct head predicates inside the component.
std::size_t hcf_components(const NonGroundProgram& program, const DependencyGraph& graph,
                           const Partition& positive_sccs);

// True iff no negative edge lies inside a strongly connected component.
bool is_stratified(const DependencyGraph& graph);

}  // namespace measp
