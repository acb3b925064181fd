#include "covtarget/clustering.hpp"

#include "covtarget/error.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace covtarget {

Matrix corr_distance(const Matrix& corr) {
    require_symmetric(corr, "corr_distance");
    Matrix d = (1.0 - corr.array()).matrix();
    d = d.cwiseMax(0.0).cwiseMin(2.0);
    d.diagonal().setZero();
    return d;
}

Dendrogram complete_linkage(const Matrix& distance, std::vector<std::string> labels) {
    require_symmetric(distance, "complete_linkage");
    const int n = static_cast<int>(distance.rows());
    if (labels.empty()) {
        for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
    }
    if (static_cast<int>(labels.size()) != n) throw ShapeError("complete_linkage: label count mismatch");
    if ((distance.array() < 0.0).any()) throw DomainError("complete_linkage: negative distance");

    Dendrogram dend;
    dend.labels = std::move(labels);
    if (n == 0) return dend;

    // distances between active clusters, keyed by id; ids are ordered so
    // iteration visits candidate pairs lexicographically
    std::map<int, std::map<int, double>> dist;
    std::map<int, int> size;
    for (int i = 0; i < n; ++i) {
        size[i] = 1;
        for (int j = 0; j < n; ++j) {
            if (i != j) dist[i][j] = distance(i, j);
        }
    }

    for (int step = 0; step < n - 1; ++step) {
        int best_a = -1;
        int best_b = -1;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [a, row] : dist) {
            for (const auto& [b, d] : row) {
                if (b > a && (best_a < 0 || d < best)) {
                    best = d;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        const int id = n + step;
        if (!dend.merges.empty() && best < dend.merges.back().height - 1e-12) {
            throw std::logic_error("complete_linkage: merge heights decreased");
        }
        dend.merges.push_back({best_a, best_b, best, size[best_a] + size[best_b]});

        std::map<int, double> merged;
        for (const auto& [c, d] : dist[best_a]) {
            if (c != best_b) merged[c] = std::max(d, dist[best_b][c]);
        }
        dist.erase(best_a);
        dist.erase(best_b);
        for (auto& [c, row] : dist) {
            row.erase(best_a);
            row.erase(best_b);
            row[id] = merged[c];
        }
        dist[id] = std::move(merged);
        size[id] = dend.merges.back().size;
    }
    return dend;
}

std::vector<int> cut_tree(const Dendrogram& dend, int k) {
    const int n = static_cast<int>(dend.labels.size());
    if (k < 1 || k > n) throw DomainError("cut_tree: k must lie in [1, N]");
    std::vector<int> parent(static_cast<std::size_t>(2 * n), 0);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)];
        return v;
    };
    for (int m = 0; m < n - k; ++m) {
        const Merge& mg = dend.merges[static_cast<std::size_t>(m)];
        parent[static_cast<std::size_t>(find(mg.a))] = n + m;
        parent[static_cast<std::size_t>(find(mg.b))] = n + m;
    }
    std::vector<int> out(static_cast<std::size_t>(n));
    std::map<int, int> numbering;
    for (int leaf = 0; leaf < n; ++leaf) {
        const int root = find(leaf);
        const auto it = numbering.emplace(root, static_cast<int>(numbering.size())).first;
        out[static_cast<std::size_t>(leaf)] = it->second;
    }
    return out;
}

std::string to_newick(const Dendrogram& dend) {
    const int n = static_cast<int>(dend.labels.size());
    if (n == 0) return ";";
    if (n == 1) return dend.labels.front() + ";";
    auto height = [&](int id) { return id < n ? 0.0 : dend.merges[static_cast<std::size_t>(id - n)].height; };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    auto render = [&](auto&& self, int id) -> std::string {
        if (id < n) return dend.labels[static_cast<std::size_t>(id)];
        const Merge& m = dend.merges[static_cast<std::size_t>(id - n)];
        return "(" + self(self, m.a) + ":" + fmt(m.height - height(m.a)) + "," + self(self, m.b) + ":" +
               fmt(m.height - height(m.b)) + ")";
    };
    return render(render, 2 * n - 2) + ";";
}

}  // namespace covtarget
