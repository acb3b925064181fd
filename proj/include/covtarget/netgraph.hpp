#pragma once

#include "covtarget/linalg.hpp"

#include <string>
#include <vector>

namespace covtarget {

struct Edge {
    int i = 0;  ///< i < j, 0-based
    int j = 0;
    double weight = 0.0;

    friend bool operator==(const Edge& a, const Edge& b) { return a.i == b.i && a.j == b.j; }
};

/// Correlation graph G(delta): an edge (i, j) iff |rho_ij| > delta.
struct ThresholdGraph {
    std::vector<std::string> labels;
    double delta = 0.0;
    std::vector<Edge> edges;  ///< sorted by (i, j)
    Matrix adjacency;         ///< weighted: rho_ij on edges, 0 elsewhere

    int order() const noexcept { return static_cast<int>(labels.size()); }
    bool adjacent(int a, int b) const { return a != b && adjacency(a, b) != 0.0; }
};

/// Maximal cliques, each sorted ascending, the list sorted lexicographically.
using Clique = std::vector<int>;
using CliqueSet = std::vector<Clique>;

struct GraphComparison {
    std::vector<Edge> edges_only_observed;
    std::vector<Edge> edges_only_simulated;
    double edge_jaccard = 1.0;
    int cliques_matched = 0;
    CliqueSet observed_cliques;
    CliqueSet simulated_cliques;
    std::vector<double> clique_best_jaccard;  ///< per observed clique
};

/// Throws DomainError for a non-unit diagonal, |rho| > 1 or delta outside [0, 1).
ThresholdGraph build_graph(const Matrix& corr, std::vector<std::string> labels, double delta);

/// Builds a graph from an explicit edge list (e.g. a parsed JSON export).
ThresholdGraph graph_from_edges(std::vector<std::string> labels, double delta, const std::vector<Edge>& edges);

/// Bron-Kerbosch with pivoting.
CliqueSet maximal_cliques(const ThresholdGraph& g);

/// Throws DomainError when labels or delta differ.
GraphComparison compare_graphs(const ThresholdGraph& observed, const ThresholdGraph& simulated);

/// DOT export: vertex label = ticker, edge attribute weight="%.4f".
std::string to_dot(const ThresholdGraph& g);

}  // namespace covtarget
