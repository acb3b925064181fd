#include "covtarget/netgraph.hpp"

#include "covtarget/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace covtarget {
namespace {

using VertexSet = std::vector<int>;  // always sorted

VertexSet intersect_neighbors(const ThresholdGraph& g, const VertexSet& s, int v) {
    VertexSet out;
    for (int u : s) {
        if (g.adjacent(u, v)) out.push_back(u);
    }
    return out;
}

void bron_kerbosch(const ThresholdGraph& g, VertexSet& r, VertexSet p, VertexSet x, CliqueSet& out) {
    if (p.empty()) {
        if (x.empty()) {
            Clique c = r;
            std::sort(c.begin(), c.end());
            out.push_back(std::move(c));
        }
        return;
    }
    // pivot u in P ∪ X maximizing |P ∩ N(u)|; first such vertex in sorted order
    int pivot = -1;
    std::size_t best = 0;
    for (const VertexSet* s : {&p, &x}) {
        for (int u : *s) {
            const std::size_t cnt = intersect_neighbors(g, p, u).size();
            if (pivot < 0 || cnt > best) {
                pivot = u;
                best = cnt;
            }
        }
    }
    VertexSet candidates;
    for (int v : p) {
        if (!g.adjacent(pivot, v)) candidates.push_back(v);
    }
    for (int v : candidates) {
        r.push_back(v);
        bron_kerbosch(g, r, intersect_neighbors(g, p, v), intersect_neighbors(g, x, v), out);
        r.pop_back();
        p.erase(std::find(p.begin(), p.end(), v));
        x.insert(std::upper_bound(x.begin(), x.end(), v), v);
    }
}

double jaccard(const Clique& a, const Clique& b) {
    Clique both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    const std::size_t uni = a.size() + b.size() - both.size();
    return uni == 0 ? 1.0 : static_cast<double>(both.size()) / static_cast<double>(uni);
}

bool edge_less(const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
}

}  // namespace

ThresholdGraph build_graph(const Matrix& corr, std::vector<std::string> labels, double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("threshold delta must lie in [0, 1)");
    require_symmetric(corr, "build_graph");
    const Eigen::Index n = corr.rows();
    if (labels.empty()) {
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
    }
    if (static_cast<Eigen::Index>(labels.size()) != n) throw ShapeError("build_graph: label count mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(corr(i, i) - 1.0) > 1e-10) throw DomainError("build_graph: correlation diagonal must be 1");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(corr(i, j)) > 1.0 + 1e-12) throw DomainError("build_graph: correlation outside [-1, 1]");
        }
    }
    ThresholdGraph g;
    g.labels = std::move(labels);
    g.delta = delta;
    g.adjacency = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(corr(i, j)) > delta) {
                g.edges.push_back({static_cast<int>(i), static_cast<int>(j), corr(i, j)});
                g.adjacency(i, j) = g.adjacency(j, i) = corr(i, j);
            }
        }
    }
    return g;
}

ThresholdGraph graph_from_edges(std::vector<std::string> labels, double delta, const std::vector<Edge>& edges) {
    ThresholdGraph g;
    const auto n = static_cast<Eigen::Index>(labels.size());
    g.labels = std::move(labels);
    g.delta = delta;
    g.adjacency = Matrix::Zero(n, n);
    for (Edge e : edges) {
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= n || e.i == e.j) throw DomainError("graph: edge endpoint out of range or self-loop");
        if (e.weight == 0.0) throw DomainError("graph: edge weight must be nonzero");
        if (g.adjacency(e.i, e.j) != 0.0) continue;
        g.adjacency(e.i, e.j) = g.adjacency(e.j, e.i) = e.weight;
        g.edges.push_back(e);
    }
    std::sort(g.edges.begin(), g.edges.end(), edge_less);
    return g;
}

CliqueSet maximal_cliques(const ThresholdGraph& g) {
    CliqueSet out;
    VertexSet p(static_cast<std::size_t>(g.order()));
    for (int v = 0; v < g.order(); ++v) p[static_cast<std::size_t>(v)] = v;
    VertexSet r;
    if (!p.empty()) bron_kerbosch(g, r, p, {}, out);
    std::sort(out.begin(), out.end());
    return out;
}

GraphComparison compare_graphs(const ThresholdGraph& observed, const ThresholdGraph& simulated) {
    if (observed.labels != simulated.labels) throw DomainError("compare_graphs: label mismatch");
    if (observed.delta != simulated.delta) throw DomainError("compare_graphs: delta mismatch");

    GraphComparison cmp;
    std::set_difference(observed.edges.begin(), observed.edges.end(), simulated.edges.begin(), simulated.edges.end(),
                        std::back_inserter(cmp.edges_only_observed), edge_less);
    std::set_difference(simulated.edges.begin(), simulated.edges.end(), observed.edges.begin(), observed.edges.end(),
                        std::back_inserter(cmp.edges_only_simulated), edge_less);
    const std::size_t common = observed.edges.size() - cmp.edges_only_observed.size();
    const std::size_t uni = common + cmp.edges_only_observed.size() + cmp.edges_only_simulated.size();
    cmp.edge_jaccard = uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);

    cmp.observed_cliques = maximal_cliques(observed);
    cmp.simulated_cliques = maximal_cliques(simulated);
    for (const auto& c : cmp.observed_cliques) {
        double best = 0.0;
        for (const auto& s : cmp.simulated_cliques) {
            if (s == c) ++cmp.cliques_matched;
            best = std::max(best, jaccard(c, s));
        }
        cmp.clique_best_jaccard.push_back(best);
    }
    return cmp;
}

std::string to_dot(const ThresholdGraph& g) {
    std::string out = "graph G {\n";
    for (int v = 0; v < g.order(); ++v) {
        std::string label;
        for (char c : g.labels[static_cast<std::size_t>(v)]) {
            if (c == '"' || c == '\\') label += '\\';
            label += c;
        }
        out += "  " + std::to_string(v + 1) + " [label=\"" + label + "\"];\n";
    }
    char buf[96];
    for (const Edge& e : g.edges) {
        std::snprintf(buf, sizeof buf, "  %d -- %d [weight=\"%.4f\"];\n", e.i + 1, e.j + 1, e.weight);
        out += buf;
    }
    out += "}\n";
    return out;
}

}  // namespace covtarget
