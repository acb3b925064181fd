#include "covtarget/clustering.hpp"
#include "covtarget/error.hpp"

#include "market_tables.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace covtarget;

namespace {

Matrix three_points() {
    Matrix d(3, 3);
    d << 0, 1, 4, 1, 0, 5, 4, 5, 0;
    return d;
}

std::set<std::set<std::string>> partition(const Dendrogram& d, int k) {
    const std::vector<int> a = cut_tree(d, k);
    std::map<int, std::set<std::string>> groups;
    for (std::size_t i = 0; i < a.size(); ++i) groups[a[i]].insert(d.labels[i]);
    std::set<std::set<std::string>> out;
    for (auto& [id, g] : groups) out.insert(g);
    return out;
}

}  // namespace

TEST_CASE("correlation distance") {
    Matrix r(3, 3);
    r << 1, 0.7712, -1, 0.7712, 1, 0, -1, 0, 1;
    const Matrix d = corr_distance(r);
    CHECK(d(0, 0) == 0.0);
    CHECK(d(0, 1) == doctest::Approx(0.2288));
    CHECK(d(0, 2) == 2.0);
}

TEST_CASE("two leaves") {
    Matrix d(2, 2);
    d << 0, 0.3, 0.3, 0;
    const Dendrogram dend = complete_linkage(d, {"a", "b"});
    REQUIRE(dend.merges.size() == 1);
    CHECK(dend.merges[0].height == 0.3);
    CHECK(dend.merges[0].size == 2);
}

TEST_CASE("three-point hand agglomeration") {
    const Dendrogram dend = complete_linkage(three_points(), {"1", "2", "3"});
    REQUIRE(dend.merges.size() == 2);
    CHECK(dend.merges[0].a == 0);
    CHECK(dend.merges[0].b == 1);
    CHECK(dend.merges[0].height == 1.0);
    CHECK(dend.merges[1].a == 2);
    CHECK(dend.merges[1].b == 3);
    CHECK(dend.merges[1].height == 5.0);
    CHECK(partition(dend, 2) == std::set<std::set<std::string>>{{"1", "2"}, {"3"}});
    CHECK(to_newick(dend).back() == ';');
}

TEST_CASE("cut_tree extremes and range") {
    const Dendrogram dend = complete_linkage(corr_distance(fixtures::corr15()), fixtures::tickers15());
    const std::vector<int> all = cut_tree(dend, 15);
    CHECK(std::set<int>(all.begin(), all.end()).size() == 15);
    const std::vector<int> one = cut_tree(dend, 1);
    CHECK(std::all_of(one.begin(), one.end(), [](int c) { return c == 0; }));
    for (int k = 1; k <= 15; ++k) CHECK(partition(dend, k).size() == static_cast<std::size_t>(k));
    CHECK_THROWS_AS(cut_tree(dend, 0), DomainError);
    CHECK_THROWS_AS(cut_tree(dend, 16), DomainError);
}

TEST_CASE("fifteen-asset panel matches scipy complete linkage") {
    const Dendrogram dend = complete_linkage(corr_distance(fixtures::corr15()), fixtures::tickers15());
    const double heights[] = {0.1093, 0.1442, 0.217,  0.2288, 0.2512, 0.2867, 0.3037,
                              0.3145, 0.3162, 0.3596, 0.3879, 0.4458, 0.5865, 0.7712};
    REQUIRE(dend.merges.size() == 14);
    for (std::size_t k = 0; k < 14; ++k) CHECK(dend.merges[k].height == doctest::Approx(heights[k]).epsilon(1e-12));
    using Groups = std::set<std::set<std::string>>;
    CHECK(partition(dend, 4) == Groups{{"MSFT", "AMZN", "FB", "AAPL"},
                                       {"GOOG", "V", "KO", "BA"},
                                       {"GS", "JPM"},
                                       {"CRM", "VZ", "GM", "INTC", "CSCO"}});
}

TEST_CASE("partition invariant under leaf permutation") {
    const Matrix d = corr_distance(fixtures::corr15());
    const auto& labels = fixtures::tickers15();
    std::vector<int> perm(15);
    for (int i = 0; i < 15; ++i) perm[i] = i;
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::string> plabels;
        for (int p : perm) plabels.push_back(labels[p]);
        const Dendrogram a = complete_linkage(d, labels);
        const Dendrogram b = complete_linkage(fixtures::pick(d, perm), plabels);
        for (int k = 1; k <= 15; ++k) CHECK(partition(a, k) == partition(b, k));
    }
}

TEST_CASE("input checks") {
    CHECK_THROWS_AS(complete_linkage(Matrix::Zero(2, 3)), ShapeError);
    Matrix d = three_points();
    d(0, 1) = 2.0;
    CHECK_THROWS_AS(complete_linkage(d), ShapeError);
}
