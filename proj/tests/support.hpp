// Independent reference implementations and random generators shared by the
// unit tests and the acceptance suite.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "measp/classifiers.hpp"
#include "measp/engines.hpp"
#include "measp/features.hpp"
#include "measp/ground_program.hpp"
#include "measp/harness.hpp"
#include "measp/nonground_program.hpp"

namespace support {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

// ---------------------------------------------------------------------------
// Numeric ground format, decoded token by token.

struct RefRule {
    long code = 0;
    std::vector<long> head, neg, pos, weights, raw;
    bool has_bound = false;
    long bound = 0;
};

struct RefDoc {
    std::vector<RefRule> rules;
    std::map<long, std::string> symbols;
    std::vector<long> bplus, bminus;
    long models = -1;
};

inline RefDoc reference_decode(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    RefDoc doc;
    auto ints = [](const std::string& l) {
        std::istringstream s(l);
        std::vector<long> v;
        long x;
        while (s >> x) v.push_back(x);
        return v;
    };
    while (std::getline(in, line)) {
        auto t = ints(line);
        if (t.empty()) continue;
        if (t[0] == 0) break;
        RefRule r;
        r.code = t[0];
        std::size_t i = 1;
        auto take = [&](std::size_t n) {
            std::vector<long> out(t.begin() + static_cast<long>(i), t.begin() + static_cast<long>(i + n));
            i += n;
            return out;
        };
        auto body = [&](bool bound_after) {
            long n = t[i++], neg = t[i++];
            if (bound_after) {
                r.has_bound = true;
                r.bound = t[i++];
            }
            r.neg = take(static_cast<std::size_t>(neg));
            r.pos = take(static_cast<std::size_t>(n - neg));
            return static_cast<std::size_t>(n);
        };
        if (r.code == 1) {
            r.head = take(1);
            body(false);
        } else if (r.code == 2) {
            r.head = take(1);
            body(true);
        } else if (r.code == 3 || r.code == 8) {
            long nh = t[i++];
            r.head = take(static_cast<std::size_t>(nh));
            body(false);
        } else if (r.code == 5) {
            r.head = take(1);
            r.has_bound = true;
            r.bound = t[i++];
            r.weights = take(body(false));
        } else if (r.code == 6) {
            r.has_bound = true;
            r.bound = t[i++];
            r.weights = take(body(false));
        } else {
            r.raw.assign(t.begin() + 1, t.end());
        }
        doc.rules.push_back(r);
    }
    while (std::getline(in, line)) {
        std::istringstream s(line);
        long id;
        if (!(s >> id)) continue;
        if (id == 0) break;
        std::string name;
        s >> std::ws;
        std::getline(s, name);
        doc.symbols[id] = name;
    }
    auto block = [&](std::vector<long>& out) {
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            long v = std::stol(line);
            if (v == 0) return;
            out.push_back(v);
        }
    };
    if (in.peek() != std::char_traits<char>::eof()) {
        block(doc.bplus);
        block(doc.bminus);
        if (std::getline(in, line)) doc.models = std::stol(line);
    }
    return doc;
}

// Does `p` (a parse result) describe the document `doc`?
inline bool agrees(const measp::GroundProgram& p, const RefDoc& doc, std::string* why = nullptr) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    auto same = [](const std::vector<measp::AtomId>& a, const std::vector<long>& b) {
        return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](auto x, long y) { return long(x) == y; });
    };
    if (p.rules.size() != doc.rules.size()) return fail("rule count");
    for (std::size_t i = 0; i < p.rules.size(); ++i) {
        const auto& r = p.rules[i];
        const auto& ref = doc.rules[i];
        if (r.type_code != ref.code) return fail("code of rule " + std::to_string(i));
        if (r.kind == measp::RuleKind::Unknown) {
            if (r.raw != std::vector<std::int64_t>(ref.raw.begin(), ref.raw.end())) return fail("raw");
            continue;
        }
        std::vector<measp::AtomId> head = r.head;
        if (r.kind == measp::RuleKind::ConstraintEncoding) {
            if (!p.false_atom) return fail("constraint without false atom");
            head = {*p.false_atom};
        }
        if (!same(head, ref.head)) return fail("head of rule " + std::to_string(i));
        if (!same(r.pos_body, ref.pos) || !same(r.neg_body, ref.neg)) return fail("body of rule " + std::to_string(i));
        if (r.bound.has_value() != ref.has_bound || (ref.has_bound && *r.bound != ref.bound)) return fail("bound");
        if (r.weights != std::vector<std::int64_t>(ref.weights.begin(), ref.weights.end())) return fail("weights");
    }
    if (p.symbols.size() != doc.symbols.size()) return fail("symbol count");
    for (const auto& [id, name] : p.symbols) {
        auto it = doc.symbols.find(id);
        if (it == doc.symbols.end() || it->second != name) return fail("symbol " + std::to_string(id));
    }
    return true;
}

// ---------------------------------------------------------------------------
// Random ground programs that satisfy every GroundProgram invariant.

struct GroundGenOptions {
    int max_rules = 30;
    int max_atoms = 20;
    bool all_kinds = true;  // false: Basic, ConstraintEncoding and Disjunctive only
    bool name_all = false;
    // Disjunctive heads of 2-3 distinct atoms, as the textual dialect can express them.
    bool text_safe = false;
};

inline measp::GroundProgram random_ground_program(Rng& rng, const GroundGenOptions& o = {}) {
    using namespace measp;
    GroundProgram p;
    const int n_atoms = uniform(rng, 1, o.max_atoms);
    const int n_rules = uniform(rng, 0, o.max_rules);
    auto atom = [&] { return static_cast<AtomId>(uniform(rng, 1, n_atoms)); };
    auto body = [&](GroundRule& r, int max_lits) {
        std::set<AtomId> used;
        const int n = uniform(rng, 0, std::min(max_lits, n_atoms));
        while (static_cast<int>(used.size()) < n) used.insert(atom());
        std::vector<AtomId> lits(used.begin(), used.end());
        std::shuffle(lits.begin(), lits.end(), rng);
        for (AtomId a : lits) (coin(rng, 0.3) ? r.neg_body : r.pos_body).push_back(a);
    };
    bool constraints = false;
    for (int i = 0; i < n_rules; ++i) {
        GroundRule r;
        const int pick = o.all_kinds ? uniform(rng, 0, 7) : uniform(rng, 0, 2);
        switch (pick) {
            case 0:
                r.kind = RuleKind::Basic;
                r.type_code = rule_code::basic;
                r.head = {atom()};
                body(r, 4);
                break;
            case 1:
                r.kind = RuleKind::ConstraintEncoding;
                r.type_code = rule_code::basic;
                body(r, 4);
                constraints = true;
                break;
            case 2: {
                r.kind = RuleKind::Disjunctive;
                r.type_code = rule_code::disjunctive;
                const int h = !o.text_safe ? uniform(rng, 1, 3) : (n_atoms < 2 ? 1 : uniform(rng, 2, std::min(3, n_atoms)));
                while (static_cast<int>(r.head.size()) < h) {
                    const AtomId a = atom();
                    if (!o.text_safe || std::find(r.head.begin(), r.head.end(), a) == r.head.end()) r.head.push_back(a);
                }
                if (o.text_safe && h < 2) {
                    r.kind = RuleKind::Basic;
                    r.type_code = rule_code::basic;
                }
                body(r, 3);
                break;
            }
            case 3: {
                r.kind = RuleKind::Choice;
                r.type_code = rule_code::choice;
                const int h = uniform(rng, 0, 3);
                for (int k = 0; k < h; ++k) r.head.push_back(atom());
                body(r, 3);
                break;
            }
            case 4:
                r.kind = RuleKind::Weight;
                r.type_code = rule_code::weight;
                r.head = {atom()};
                body(r, 4);
                r.bound = uniform(rng, 0, 9);
                for (std::size_t k = 0; k < r.body_size(); ++k) r.weights.push_back(uniform(rng, 1, 5));
                break;
            case 5:
                r.kind = RuleKind::Weight;
                r.type_code = rule_code::cardinality;
                r.head = {atom()};
                body(r, 4);
                r.bound = uniform(rng, 0, 4);
                break;
            case 6:
                r.kind = RuleKind::Minimize;
                r.type_code = rule_code::minimize;
                body(r, 4);
                r.bound = 0;
                for (std::size_t k = 0; k < r.body_size(); ++k) r.weights.push_back(uniform(rng, 1, 5));
                break;
            default: {
                r.kind = RuleKind::Unknown;
                const int codes[] = {4, 7, 9, 42};
                r.type_code = codes[uniform(rng, 0, 3)];
                const int n = uniform(rng, 0, 5);
                for (int k = 0; k < n; ++k) r.raw.push_back(uniform(rng, -3, 30));
                break;
            }
        }
        p.rules.push_back(std::move(r));
    }
    for (int a = 1; a <= n_atoms; ++a) {
        if (o.name_all || coin(rng, 0.6)) p.symbols[static_cast<AtomId>(a)] = "p" + std::to_string(a);
    }
    // Compute blocks only mention named atoms so none of them looks like the false atom.
    for (const auto& [id, name] : p.symbols) {
        if (coin(rng, 0.1)) {
            p.compute_pos.push_back(id);
        } else if (coin(rng, 0.1)) {
            p.compute_neg.push_back(id);
        }
    }
    if (constraints || coin(rng, 0.1)) p.false_atom = static_cast<AtomId>(n_atoms + 1);
    p.models = uniform(rng, 0, 3);
    p.n_atoms = measp::count_atoms(p);
    return p;
}

// ---------------------------------------------------------------------------
// Ground features recounted from the rule list, one feature at a time.

inline std::map<std::string, double> recount_ground(const measp::GroundProgram& p) {
    using measp::RuleKind;
    const auto& rs = p.rules;
    auto count = [&](auto pred) {
        return static_cast<double>(std::count_if(rs.begin(), rs.end(), [&](const measp::GroundRule& r) {
            return r.kind != RuleKind::Unknown && pred(r);
        }));
    };
    std::set<measp::AtomId> atoms;
    for (const auto& r : rs) {
        for (const auto* v : {&r.head, &r.pos_body, &r.neg_body}) atoms.insert(v->begin(), v->end());
    }
    for (const auto& kv : p.symbols) atoms.insert(kv.first);

    std::map<std::string, double> f;
    f["n_rules"] = static_cast<double>(rs.size());
    f["n_atoms"] = static_cast<double>(atoms.size());
    f["n_horn"] = count([](const auto& r) {
        return (r.kind == RuleKind::Basic || r.kind == RuleKind::ConstraintEncoding) && r.head.size() <= 1 &&
               r.neg_body.empty();
    });
    f["n_unary"] = count([](const auto& r) { return r.pos_body.size() + r.neg_body.size() == 1; });
    f["n_binary"] = count([](const auto& r) { return r.pos_body.size() + r.neg_body.size() == 2; });
    f["n_ternary"] = count([](const auto& r) { return r.pos_body.size() + r.neg_body.size() == 3; });
    f["n_true_facts"] = count([](const auto& r) { return r.kind == RuleKind::Basic && r.pos_body.empty() && r.neg_body.empty(); });
    f["n_disj_facts"] = count([](const auto& r) {
        return r.kind == RuleKind::Disjunctive && r.pos_body.empty() && r.neg_body.empty();
    });
    f["n_constraints"] = count([](const auto& r) { return r.kind == RuleKind::ConstraintEncoding; });
    f["n_normal"] = count([](const auto& r) { return r.kind == RuleKind::Basic; });
    auto div = [](double a, double b) { return b == 0 ? 0.0 : a / b; };
    const std::vector<std::pair<std::string, std::string>> ratio_of = {
        {"ratio_horn", "n_horn"},           {"ratio_unary", "n_unary"},
        {"ratio_binary", "n_binary"},       {"ratio_ternary", "n_ternary"},
        {"ratio_true_facts", "n_true_facts"}, {"ratio_disj_facts", "n_disj_facts"},
        {"frac_constraints", "n_constraints"}, {"frac_normal", "n_normal"},
    };
    for (const auto& [r, c] : ratio_of) f[r] = div(f[c], f["n_rules"]);
    f["rules_per_atom"] = div(f["n_rules"], f["n_atoms"]);
    f["atoms_per_rule"] = div(f["n_atoms"], f["n_rules"]);
    for (std::size_t i = 0; i < ratio_of.size(); ++i) {
        for (std::size_t j = i + 1; j < ratio_of.size(); ++j) {
            f[ratio_of[i].first + "_x_" + ratio_of[j].first] = f[ratio_of[i].first] * f[ratio_of[j].first];
        }
    }
    f["log_n_rules"] = std::log(1 + f["n_rules"]);
    f["log_n_atoms"] = std::log(1 + f["n_atoms"]);
    f["facts_ratio"] = div(f["n_true_facts"] + f["n_disj_facts"], f["n_rules"]);
    f["short_rule_ratio"] = div(f["n_unary"] + f["n_binary"] + f["n_ternary"], f["n_rules"]);
    return f;
}

// ---------------------------------------------------------------------------
// Graph oracles over an adjacency matrix.

struct Digraph {
    int n = 0;
    std::vector<std::vector<bool>> pos, neg;  // pos[u][v]: edge u -> v

    explicit Digraph(int nodes = 0)
        : n(nodes), pos(nodes, std::vector<bool>(nodes)), neg(nodes, std::vector<bool>(nodes)) {}
    bool any(int u, int v) const { return pos[u][v] || neg[u][v]; }
};

inline measp::DependencyGraph to_dependency_graph(const Digraph& g) {
    measp::DependencyGraph d;
    for (int i = 0; i < g.n; ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "n%02d", i);
        d.nodes.push_back(name);
    }
    for (int u = 0; u < g.n; ++u) {
        for (int v = 0; v < g.n; ++v) {
            if (g.pos[u][v]) d.pos_edges.insert({u, v});
            if (g.neg[u][v]) d.neg_edges.insert({u, v});
        }
    }
    return d;
}

// Mutual reachability from a Floyd-Warshall transitive closure.
inline measp::Partition closure_components(const Digraph& g, bool positive_only = false) {
    std::vector<std::vector<bool>> r(g.n, std::vector<bool>(g.n));
    for (int u = 0; u < g.n; ++u) {
        r[u][u] = true;
        for (int v = 0; v < g.n; ++v) {
            if (positive_only ? g.pos[u][v] : g.any(u, v)) r[u][v] = true;
        }
    }
    for (int k = 0; k < g.n; ++k) {
        for (int i = 0; i < g.n; ++i) {
            for (int j = 0; j < g.n; ++j) {
                if (r[i][k] && r[k][j]) r[i][j] = true;
            }
        }
    }
    measp::Partition parts;
    std::vector<bool> placed(g.n);
    for (int i = 0; i < g.n; ++i) {
        if (placed[i]) continue;
        std::vector<std::size_t> comp;
        for (int j = i; j < g.n; ++j) {
            if (r[i][j] && r[j][i]) {
                comp.push_back(static_cast<std::size_t>(j));
                placed[j] = true;
            }
        }
        parts.push_back(comp);
    }
    return parts;
}

// Enumerates simple cycles (each rooted at its least node) and reports whether
// one of them uses a negative edge.
inline bool has_negative_cycle(const Digraph& g) {
    bool found = false;
    std::vector<bool> on_path(g.n);
    std::function<void(int, int, bool)> dfs = [&](int root, int u, bool negative) {
        if (found) return;
        for (int v = root; v < g.n && !found; ++v) {
            if (!g.any(u, v)) continue;
            // Parallel positive and negative edges: the negative one forms a cycle too.
            const bool neg_edge = g.neg[u][v];
            if (v == root) {
                if (negative || neg_edge) found = true;
                continue;
            }
            if (on_path[v]) continue;
            on_path[v] = true;
            dfs(root, v, negative || neg_edge);
            on_path[v] = false;
        }
    };
    for (int root = 0; root < g.n && !found; ++root) {
        on_path[root] = true;
        dfs(root, root, false);
        on_path[root] = false;
    }
    return found;
}

// Stratum assignment by relaxation: level(head) >= level(body), strictly
// greater through negation. Succeeds iff levels stay below n.
inline bool layering_exists(const Digraph& g) {
    std::vector<int> level(g.n, 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (int u = 0; u < g.n; ++u) {
            for (int v = 0; v < g.n; ++v) {
                int need = -1;
                if (g.pos[u][v]) need = level[u];
                if (g.neg[u][v]) need = level[u] + 1;
                if (need > level[v]) {
                    level[v] = need;
                    if (level[v] >= g.n) return false;
                    changed = true;
                }
            }
        }
    }
    return true;
}

inline Digraph random_digraph(Rng& rng, int n, double p_edge, double p_neg) {
    Digraph g(n);
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (!coin(rng, p_edge)) continue;
            if (coin(rng, p_neg)) {
                g.neg[u][v] = true;
                if (coin(rng, 0.1)) g.pos[u][v] = true;
            } else {
                g.pos[u][v] = true;
            }
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Classifier oracles.

inline measp::FeatureVector custom_vector(std::vector<double> values) {
    measp::FeatureVector fv;
    fv.manifest_id = "custom";
    for (std::size_t i = 0; i < values.size(); ++i) fv.names.push_back("f" + std::to_string(i));
    fv.values = std::move(values);
    return fv;
}

// Fits min/max itself, sorts every distance and votes.
inline std::string knn_oracle(const measp::TrainingSet& data, std::size_t k, const measp::FeatureVector& x) {
    const std::size_t dim = x.size();
    std::vector<double> lo(dim, INFINITY), hi(dim, -INFINITY);
    for (const auto& row : data.rows) {
        for (std::size_t f = 0; f < dim; ++f) {
            lo[f] = std::min(lo[f], row.features.values[f]);
            hi[f] = std::max(hi[f], row.features.values[f]);
        }
    }
    auto scale = [&](double v, std::size_t f) {
        if (!(hi[f] > lo[f])) return 0.0;
        double s = (v - lo[f]) / (hi[f] - lo[f]);
        return s < 0 ? 0.0 : (s > 1 ? 1.0 : s);
    };
    struct Cand {
        double d;
        std::size_t idx;
    };
    std::vector<Cand> all;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        double d = 0;
        for (std::size_t f = 0; f < dim; ++f) {
            const double diff = scale(data.rows[i].features.values[f], f) - scale(x.values[f], f);
            d += diff * diff;
        }
        all.push_back({d, i});
    }
    std::stable_sort(all.begin(), all.end(), [](const Cand& a, const Cand& b) { return a.d < b.d; });
    const auto priority = data.label_order();
    std::vector<std::size_t> votes(priority.size(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& label = data.rows[all[i].idx].label;
        ++votes[static_cast<std::size_t>(std::find(priority.begin(), priority.end(), label) - priority.begin())];
    }
    // First maximum in priority order.
    return priority[static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin())];
}

// Checks rules one by one, looking conditions up by name.
inline std::string interpret_decision_list(const measp::DecisionList& d, const measp::FeatureVector& x) {
    for (const auto& rule : d.rules) {
        bool all = true;
        for (const auto& c : rule.conditions) {
            const double v = x.at(c.name);
            if (c.less_equal ? !(v <= c.threshold) : !(v > c.threshold)) {
                all = false;
                break;
            }
        }
        if (all) return rule.label;
    }
    return d.default_label;
}

inline measp::TrainingSet random_training_set(Rng& rng, std::size_t rows, std::size_t dim, std::size_t n_labels,
                                              int value_range = 20) {
    measp::TrainingSet data;
    for (std::size_t i = 0; i < rows; ++i) {
        std::vector<double> v(dim);
        for (auto& x : v) x = uniform(rng, 0, value_range);
        data.rows.push_back({custom_vector(v), "L" + std::to_string(uniform(rng, 0, static_cast<int>(n_labels) - 1))});
    }
    return data;
}

// ---------------------------------------------------------------------------
// Runtime tables.

inline measp::RuntimeTable random_table(Rng& rng, std::size_t n_instances, std::size_t n_engines, double limit,
                                        double p_solved = 0.6) {
    measp::RuntimeTable t;
    t.limit = limit;
    for (std::size_t e = 0; e < n_engines; ++e) t.engines.push_back("e" + std::to_string(e));
    for (std::size_t i = 0; i < n_instances; ++i) {
        t.instances.push_back({"i" + std::to_string(i), "d" + std::to_string(i % 3), {}});
        for (const auto& e : t.engines) {
            measp::RunRecord r;
            r.instance_id = t.instances.back().id;
            r.engine_name = e;
            if (coin(rng, p_solved)) {
                r.status = coin(rng) ? measp::RunStatus::SolvedSat : measp::RunStatus::SolvedUnsat;
                r.cpu_seconds = std::round(uniform_real(rng, 0.01, limit * 0.99) * 100) / 100;
            } else {
                const int k = uniform(rng, 0, 2);
                r.status = k == 0 ? measp::RunStatus::Timeout : (k == 1 ? measp::RunStatus::Memout : measp::RunStatus::Error);
                r.cpu_seconds = r.status == measp::RunStatus::Timeout ? limit : uniform_real(rng, 0, limit);
            }
            r.wall_seconds = r.cpu_seconds;
            t.records[{r.instance_id, e}] = r;
        }
    }
    return t;
}

inline measp::MockTable mock_table_for(const measp::RuntimeTable& t, const std::string& engine) {
    measp::MockTable m;
    for (const auto& inst : t.instances) {
        const auto* r = t.find(inst.id, engine);
        m[inst.id] = {r->status, r->cpu_seconds};
    }
    return m;
}

}  // namespace support
