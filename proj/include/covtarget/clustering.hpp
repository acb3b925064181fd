#pragma once

#include "covtarget/linalg.hpp"

#include <string>
#include <vector>

namespace covtarget {

/// One agglomeration step. Leaves are 0..N−1; the cluster created by merge k
/// gets id N+k. `a < b` always.
struct Merge {
    int a = 0;
    int b = 0;
    double height = 0.0;
    int size = 0;
};

struct Dendrogram {
    std::vector<std::string> labels;
    std::vector<Merge> merges;  ///< N−1 entries, heights nondecreasing
};

/// d_ij = 1 − rho_ij with a zero diagonal.
Matrix corr_distance(const Matrix& corr);

/// Complete-linkage agglomeration. Ties go to the lexicographically
/// smallest (a, b) pair of cluster ids.
Dendrogram complete_linkage(const Matrix& distance, std::vector<std::string> labels = {});

/// Cluster index per leaf after undoing the last k−1 merges. Clusters are
/// numbered by their smallest leaf. Throws DomainError unless 1 <= k <= N.
std::vector<int> cut_tree(const Dendrogram& dend, int k);

/// Newick string with branch lengths.
std::string to_newick(const Dendrogram& dend);

}  // namespace covtarget
