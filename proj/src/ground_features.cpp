#include "measp/ground_features.hpp"

#include <array>
#include <cmath>

namespace measp {

namespace {

double ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

bool is_horn(const GroundRule& r) {
    return (r.kind == RuleKind::Basic || r.kind == RuleKind::ConstraintEncoding) && r.head.size() <= 1 &&
           r.neg_body.empty();
}

}  // namespace

FeatureVector extract_ground(const GroundProgram& program) {
    double n_horn = 0, n_unary = 0, n_binary = 0, n_ternary = 0;
    double n_true_facts = 0, n_disj_facts = 0, n_constraints = 0, n_normal = 0;

    for (const auto& r : program.rules) {
        if (r.kind == RuleKind::Unknown) continue;
        const std::size_t body = r.body_size();
        if (is_horn(r)) ++n_horn;
        if (body == 1) ++n_unary;
        if (body == 2) ++n_binary;
        if (body == 3) ++n_ternary;
        switch (r.kind) {
            case RuleKind::Basic:
                ++n_normal;
                if (body == 0) ++n_true_facts;
                break;
            case RuleKind::Disjunctive:
                if (body == 0) ++n_disj_facts;
                break;
            case RuleKind::ConstraintEncoding:
                ++n_constraints;
                break;
            default:
                break;
        }
    }

    const double n_rules = static_cast<double>(program.rules.size());
    const double n_atoms = static_cast<double>(program.n_atoms);

    std::vector<double> v = {n_rules, n_atoms, n_horn, n_unary, n_binary,
                             n_ternary, n_true_facts, n_disj_facts, n_constraints, n_normal};
    const std::array<double, 8> ratios = {
        ratio(n_horn, n_rules),       ratio(n_unary, n_rules),        ratio(n_binary, n_rules),
        ratio(n_ternary, n_rules),    ratio(n_true_facts, n_rules),   ratio(n_disj_facts, n_rules),
        ratio(n_constraints, n_rules), ratio(n_normal, n_rules),
    };
    v.insert(v.end(), ratios.begin(), ratios.end());
    v.push_back(ratio(n_rules, n_atoms));
    v.push_back(ratio(n_atoms, n_rules));
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        for (std::size_t j = i + 1; j < ratios.size(); ++j) v.push_back(ratios[i] * ratios[j]);
    }
    v.push_back(std::log1p(n_rules));
    v.push_back(std::log1p(n_atoms));
    v.push_back(ratio(n_true_facts + n_disj_facts, n_rules));
    v.push_back(ratio(n_unary + n_binary + n_ternary, n_rules));
    return make_features(kGroundManifest, std::move(v));
}

}  // namespace measp
