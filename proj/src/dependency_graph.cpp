#include <algorithm>
#include <map>

#include "measp/error.hpp"
#include "measp/nonground_program.hpp"

namespace measp {

std::size_t DependencyGraph::index_of(std::string_view node) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
    if (it == nodes.end() || *it != node) throw Error("unknown graph node '" + std::string(node) + "'");
    return static_cast<std::size_t>(it - nodes.begin());
}

DependencyGraph dependency_graph(const NonGroundProgram& program) {
    DependencyGraph g;
    for (const auto& p : program.predicates) g.nodes.push_back(p.key());
    std::sort(g.nodes.begin(), g.nodes.end());

    for (const auto& rule : program.rules) {
        for (const auto& h : rule.head) {
            const std::size_t to = g.index_of(h.predicate.key());
            for (const auto& b : rule.pos_body) g.pos_edges.emplace(g.index_of(b.predicate.key()), to);
            for (const auto& b : rule.neg_body) g.neg_edges.emplace(g.index_of(b.predicate.key()), to);
        }
    }
    return g;
}

namespace {

std::vector<std::vector<std::size_t>> adjacency(const DependencyGraph& g, EdgeSet edges) {
    std::vector<std::vector<std::size_t>> adj(g.size());
    for (auto [from, to] : g.pos_edges) adj.at(from).push_back(to);
    if (edges == EdgeSet::All) {
        for (auto [from, to] : g.neg_edges) adj.at(from).push_back(to);
    }
    for (auto& succ : adj) {
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    }
    return adj;
}

constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);

}  // namespace

// Tarjan's algorithm with an explicit call stack.
Partition scc(const DependencyGraph& graph, EdgeSet edges) {
    const auto adj = adjacency(graph, edges);
    const std::size_t n = adj.size();
    std::vector<std::size_t> index(n, kUnvisited), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    Partition components;

    struct Frame {
        std::size_t node;
        std::size_t next_succ;
    };
    std::vector<Frame> calls;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        calls.push_back({root, 0});
        index[root] = lowlink[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!calls.empty()) {
            Frame& f = calls.back();
            const std::size_t v = f.node;
            if (f.next_succ < adj[v].size()) {
                const std::size_t w = adj[v][f.next_succ++];
                if (index[w] == kUnvisited) {
                    index[w] = lowlink[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    calls.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
                continue;
            }
            if (lowlink[v] == index[v]) {
                std::vector<std::size_t> component;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component.push_back(w);
                } while (w != v);
                std::sort(component.begin(), component.end());
                components.push_back(std::move(component));
            }
            calls.pop_back();
            if (!calls.empty()) {
                const std::size_t parent = calls.back().node;
                lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
            }
        }
    }

    std::sort(components.begin(), components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return components;
}

std::size_t hcf_components(const NonGroundProgram& program, const DependencyGraph& graph,
                           const Partition& positive_sccs) {
    std::vector<std::size_t> component_of(graph.size(), kUnvisited);
    for (std::size_t c = 0; c < positive_sccs.size(); ++c) {
        for (std::size_t node : positive_sccs[c]) component_of.at(node) = c;
    }
    std::vector<bool> violated(positive_sccs.size(), false);
    for (const auto& rule : program.rules) {
        if (rule.head.size() < 2) continue;
        std::vector<std::size_t> heads;
        for (const auto& h : rule.head) heads.push_back(graph.index_of(h.predicate.key()));
        std::sort(heads.begin(), heads.end());
        heads.erase(std::unique(heads.begin(), heads.end()), heads.end());
        for (std::size_t i = 0; i < heads.size(); ++i) {
            for (std::size_t j = i + 1; j < heads.size(); ++j) {
                const std::size_t ci = component_of[heads[i]];
                if (ci != kUnvisited && ci == component_of[heads[j]]) violated[ci] = true;
            }
        }
    }
    return static_cast<std::size_t>(std::count(violated.begin(), violated.end(), false));
}

bool is_stratified(const DependencyGraph& graph) {
    const Partition components = scc(graph, EdgeSet::All);
    std::vector<std::size_t> component_of(graph.size());
    for (std::size_t c = 0; c < components.size(); ++c) {
        for (std::size_t node : components[c]) component_of[node] = c;
    }
    return std::none_of(graph.neg_edges.begin(), graph.neg_edges.end(),
                        [&](const auto& e) { return component_of[e.first] == component_of[e.second]; });
}

}  // namespace measp
