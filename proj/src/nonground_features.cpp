#include "measp/nonground_features.hpp"

#include <algorithm>

namespace measp {

FeatureVector extract_nonground(const NonGroundProgram& program) {
    const DependencyGraph graph = dependency_graph(program);
    const Partition all = scc(graph, EdgeSet::All);
    const Partition positive = scc(graph, EdgeSet::Positive);

    double n_disj = 0, n_constraints = 0;
    for (const auto& rule : program.rules) {
        if (rule.is_disjunctive()) ++n_disj;
        if (rule.is_constraint()) ++n_constraints;
    }
    std::size_t max_arity = 0;
    for (const auto& p : program.predicates) max_arity = std::max(max_arity, p.arity);
    const double n_rules = static_cast<double>(program.rules.size());

    return make_features(kNonGroundManifest, {
        n_disj,
        program.has_query ? 1.0 : 0.0,
        static_cast<double>(program.functions.size()),
        static_cast<double>(program.predicates.size()),
        static_cast<double>(all.size()),
        static_cast<double>(hcf_components(program, graph, positive)),
        is_stratified(graph) ? 1.0 : 0.0,
        n_rules,
        n_constraints,
        static_cast<double>(max_arity),
        n_rules == 0 ? 0.0 : n_disj / n_rules,
    });
}

}  // namespace measp
