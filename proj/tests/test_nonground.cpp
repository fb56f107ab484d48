#include "doctest.h"
#include "measp/error.hpp"
#include "measp/nonground_features.hpp"
#include "measp/nonground_program.hpp"
#include "support.hpp"

using namespace measp;

namespace {

std::set<std::string> predicate_keys(const NonGroundProgram& p) {
    std::set<std::string> out;
    for (const auto& pr : p.predicates) out.insert(pr.key());
    return out;
}

std::set<std::pair<std::string, std::string>> named(const DependencyGraph& g,
                                                     const std::set<std::pair<std::size_t, std::size_t>>& edges) {
    std::set<std::pair<std::string, std::string>> out;
    for (auto [u, v] : edges) out.insert({g.nodes[u], g.nodes[v]});
    return out;
}

std::size_t hcf_of(const std::string& text) {
    const auto p = parse_nonground(text);
    const auto g = dependency_graph(p);
    return hcf_components(p, g, scc(g, EdgeSet::Positive));
}

// Propositional program over atoms a..f with random rule shapes.
std::string random_propositional(support::Rng& rng, int rules) {
    const char* atoms[] = {"a", "b", "c", "d", "e", "f"};
    auto atom = [&] { return std::string(atoms[support::uniform(rng, 0, 5)]); };
    std::string out;
    for (int i = 0; i < rules; ++i) {
        const int heads = support::uniform(rng, 0, 3);
        for (int h = 0; h < heads; ++h) out += (h ? " | " : "") + atom();
        const int body = support::uniform(rng, heads == 0 ? 1 : 0, 3);
        for (int b = 0; b < body; ++b) out += (b ? ", " : " :- ") + std::string(support::coin(rng, 0.3) ? "not " : "") + atom();
        out += ".\n";
    }
    return out;
}

}  // namespace

TEST_CASE("parsing the non-ground subset") {
    SUBCASE("single fact") {
        const auto p = parse_nonground("p(a).");
        CHECK(p.rules.size() == 1);
        CHECK(predicate_keys(p) == std::set<std::string>{"p/1"});
        CHECK(p.functions.empty());
        CHECK_FALSE(p.has_query);
    }
    SUBCASE("rule with negation") {
        const auto p = parse_nonground("q(X) :- p(X), not r(X).\np(a).");
        CHECK(p.rules.size() == 2);
        CHECK(predicate_keys(p) == std::set<std::string>{"p/1", "q/1", "r/1"});
        CHECK(p.rules[0].neg_body.size() == 1);
    }
    SUBCASE("function symbols") {
        const auto p =
            parse_nonground("reach(X,Y) :- edge(X,Y). reach(X,Z) :- reach(X,Y), edge(Y,Z). p(f(X)) :- reach(X,X).");
        CHECK(p.functions == std::set<std::string>{"f"});
        CHECK(predicate_keys(p) == std::set<std::string>{"edge/2", "p/1", "reach/2"});
    }
    SUBCASE("queries, builtins, strong negation and comments") {
        const auto p = parse_nonground("% c\n-p(X) :- q(X), X < 3, X != Y+1.\nq(1).\nq(X)?\n");
        CHECK(p.has_query);
        CHECK(p.rules.size() == 3);
        CHECK(p.rules[2].is_query);
        CHECK_FALSE(p.rules[2].is_constraint());
        CHECK(p.rules[0].builtins.size() == 2);
        CHECK(predicate_keys(p) == std::set<std::string>{"-p/1", "q/1"});
    }
    SUBCASE("arity overload is a warning") {
        const auto p = parse_nonground("p(a). p(a,b).");
        CHECK(predicate_keys(p).size() == 2);
        CHECK_FALSE(p.warnings.empty());
    }
    SUBCASE("syntax errors are located") {
        try {
            parse_nonground("p(a).\nq(X) :- p(X\n");
            FAIL("accepted");
        } catch (const ParseError& e) {
            CHECK(e.line() >= 2);
            CHECK(e.column() > 0);
        }
        CHECK_THROWS_AS(parse_nonground("p(a)"), ParseError);
        CHECK_THROWS_AS(parse_nonground("p(a) :- ."), ParseError);
        CHECK_THROWS_AS(parse_nonground("p(a) :- q(#)."), ParseError);
    }
}

TEST_CASE("dependency graph edges") {
    {
        const auto g = dependency_graph(parse_nonground("q(X) :- p(X)."));
        CHECK(named(g, g.pos_edges) == std::set<std::pair<std::string, std::string>>{{"p/1", "q/1"}});
        CHECK(g.neg_edges.empty());
    }
    {
        const auto g = dependency_graph(parse_nonground("p(X) :- not p(X)."));
        CHECK(named(g, g.neg_edges) == std::set<std::pair<std::string, std::string>>{{"p/1", "p/1"}});
    }
    {
        const auto g = dependency_graph(
            parse_nonground("reach(X,Y) :- edge(X,Y). reach(X,Z) :- reach(X,Y), edge(Y,Z). p(f(X)) :- reach(X,X)."));
        CHECK(named(g, g.pos_edges) == std::set<std::pair<std::string, std::string>>{
                                           {"edge/2", "reach/2"}, {"reach/2", "reach/2"}, {"reach/2", "p/1"}});
        CHECK(std::is_sorted(g.nodes.begin(), g.nodes.end()));
        CHECK_THROWS_AS(g.index_of("nope/0"), Error);
    }
}

TEST_CASE("strongly connected components") {
    SUBCASE("isolated nodes") {
        support::Digraph d(4);
        CHECK(scc(support::to_dependency_graph(d)) == Partition{{0}, {1}, {2}, {3}});
    }
    SUBCASE("three-cycle") {
        support::Digraph d(3);
        d.pos[0][1] = d.pos[1][2] = d.pos[2][0] = true;
        CHECK(scc(support::to_dependency_graph(d)) == Partition{{0, 1, 2}});
    }
    SUBCASE("random 10-node digraphs match the closure oracle") {
        support::Rng rng(31);
        for (int i = 0; i < 300; ++i) {
            const auto d = support::random_digraph(rng, 10, support::uniform_real(rng, 0.05, 0.4), 0.3);
            const auto g = support::to_dependency_graph(d);
            CHECK(scc(g) == support::closure_components(d));
            CHECK(scc(g, EdgeSet::Positive) == support::closure_components(d, true));
        }
    }
}

TEST_CASE("head-cycle freeness") {
    CHECK(hcf_of("a :- b. b :- a. c :- a.") == 2);
    CHECK(hcf_of("a | b. a :- b. b :- a.") == 0);
    CHECK(hcf_of("a | b. a :- c.") == 3);
    // Negative dependencies do not create head cycles.
    CHECK(hcf_of("a | b. a :- not b. b :- not a.") == 2);
}

TEST_CASE("removing a disjunctive rule never lowers the HCF count") {
    support::Rng rng(32);
    for (int i = 0; i < 400; ++i) {
        const auto text = random_propositional(rng, support::uniform(rng, 1, 10));
        const auto p = parse_nonground(text);
        const auto g = dependency_graph(p);
        const std::size_t before = hcf_components(p, g, scc(g, EdgeSet::Positive));
        for (std::size_t r = 0; r < p.rules.size(); ++r) {
            if (!p.rules[r].is_disjunctive()) continue;
            auto q = p;
            q.rules.erase(q.rules.begin() + static_cast<std::ptrdiff_t>(r));
            // Keep the node set so counts are comparable.
            auto gq = dependency_graph(q);
            gq.nodes = g.nodes;
            gq.pos_edges.clear();
            gq.neg_edges.clear();
            const auto fresh = dependency_graph(q);
            for (auto [u, v] : fresh.pos_edges) gq.pos_edges.insert({g.index_of(fresh.nodes[u]), g.index_of(fresh.nodes[v])});
            for (auto [u, v] : fresh.neg_edges) gq.neg_edges.insert({g.index_of(fresh.nodes[u]), g.index_of(fresh.nodes[v])});
            CHECK(hcf_components(q, gq, scc(gq, EdgeSet::Positive)) >= before);
        }
    }
}

TEST_CASE("stratification") {
    auto stratified = [](const char* text) { return is_stratified(dependency_graph(parse_nonground(text))); };
    CHECK(stratified("p :- q. q :- r. r :- p."));
    CHECK_FALSE(stratified("p :- not p."));
    CHECK_FALSE(stratified("p :- not q. q :- r. r :- p."));
    CHECK(stratified("p :- not q. q :- r."));
    CHECK(stratified(""));

    support::Rng rng(33);
    for (int i = 0; i < 300; ++i) {
        const auto d = support::random_digraph(rng, 8, support::uniform_real(rng, 0.05, 0.3), 0.2);
        const bool s = is_stratified(support::to_dependency_graph(d));
        CHECK(s == !support::has_negative_cycle(d));
        CHECK(s == support::layering_exists(d));
    }
}

TEST_CASE("non-ground features") {
    SUBCASE("empty program") {
        const auto fv = extract_nonground(parse_nonground(""));
        REQUIRE(fv.size() == 11);
        for (std::size_t i = 0; i < fv.size(); ++i) CHECK(fv.values[i] == (fv.names[i] == "is_stratified" ? 1 : 0));
    }
    SUBCASE("fact and rule") {
        const auto fv = extract_nonground(parse_nonground("p(a). q(X) :- p(X)."));
        CHECK(fv.at("n_disj_rules") == 0);
        CHECK(fv.at("has_query") == 0);
        CHECK(fv.at("n_functions") == 0);
        CHECK(fv.at("n_predicates") == 2);
        CHECK(fv.at("n_scc") == 2);
        CHECK(fv.at("n_hcf_components") == 2);
        CHECK(fv.at("is_stratified") == 1);
        CHECK(fv.at("n_rules") == 2);
        CHECK(fv.at("max_predicate_arity") == 1);
    }
    SUBCASE("head cycle") {
        const auto fv = extract_nonground(parse_nonground("a | b. a :- b. b :- a."));
        CHECK(fv.at("n_disj_rules") == 1);
        CHECK(fv.at("n_scc") == 1);
        CHECK(fv.at("n_hcf_components") == 0);
        CHECK(fv.at("is_stratified") == 1);
        CHECK(fv.at("frac_disj_rules") == doctest::Approx(1.0 / 3));
    }
    SUBCASE("constraints, queries and arity") {
        const auto fv = extract_nonground(parse_nonground(":- p(X), q(X,Y,Z). p(g(1)). r(X)?"));
        CHECK(fv.at("n_constraints") == 1);
        CHECK(fv.at("has_query") == 1);
        CHECK(fv.at("n_functions") == 1);
        CHECK(fv.at("max_predicate_arity") == 3);
    }
    SUBCASE("graph entries agree with direct calls") {
        support::Rng rng(34);
        for (int i = 0; i < 200; ++i) {
            const auto p = parse_nonground(random_propositional(rng, support::uniform(rng, 0, 12)));
            const auto g = dependency_graph(p);
            const auto fv = extract_nonground(p);
            REQUIRE(fv.size() == 11);
            CHECK(fv.at("n_scc") == scc(g).size());
            CHECK(fv.at("n_hcf_components") == hcf_components(p, g, scc(g, EdgeSet::Positive)));
            CHECK(fv.at("is_stratified") == (is_stratified(g) ? 1 : 0));
            CHECK((fv.at("has_query") == 0 || fv.at("has_query") == 1));
        }
    }
}
