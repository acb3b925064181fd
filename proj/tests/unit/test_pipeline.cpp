#include "covtarget/error.hpp"
#include "covtarget/json_io.hpp"
#include "covtarget/pipeline.hpp"

#include "market_tables.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace covtarget;

namespace {

ReturnPanel market(std::uint64_t seed, Eigen::Index t = 252) {
    const Matrix corr = fixtures::pick(fixtures::corr5(), {0, 1, 3});
    const Vector vol = Vector::Constant(3, 0.015);
    const Matrix l = cholesky(Matrix(vol.asDiagonal() * corr * vol.asDiagonal())).lower();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix r(t, 3);
    for (Eigen::Index i = 0; i < t; ++i) {
        Vector e(3);
        for (int j = 0; j < 3; ++j) e(j) = g(rng);
        r.row(i) = (l * e).transpose();
    }
    return make_return_panel(std::move(r), {"MSFT", "AMZN", "FB"});
}

OptimizerOptions quick() {
    OptimizerOptions o;
    o.n_starts = 1;
    o.max_iters = 300;
    return o;
}

}  // namespace

TEST_CASE("model kind names") {
    for (ModelKind k : {ModelKind::Bekk, ModelKind::BekkMod, ModelKind::Dcc, ModelKind::DccMod}) {
        CHECK(parse_model_kind(to_string(k)) == k);
    }
    CHECK(is_modified(ModelKind::DccMod));
    CHECK_FALSE(is_bekk(ModelKind::Dcc));
    CHECK_THROWS_AS(parse_model_kind("garch"), DomainError);
}

TEST_CASE("modified variants need a target") {
    CHECK_THROWS_AS(fit_model(ModelKind::BekkMod, market(1), std::nullopt, quick()), DomainError);
}

TEST_CASE("fitted models survive a JSON round trip") {
    const ReturnPanel panel = market(2);
    const TargetSpec target = build_target(sample_moments(panel), 0.5);
    for (ModelKind k : {ModelKind::BekkMod, ModelKind::Dcc}) {
        const FittedModel m = fit_model(k, panel, target, quick());
        const Json j = to_json(m);
        const FittedModel back = fitted_model_from_json(Json::parse(j.dump()));
        CHECK(to_json(back).dump() == j.dump());
        CHECK(back.periods == panel.periods());
        CHECK(back.target.has_value() == is_modified(k));
        const CovPath a = fitted_covariance_path(m, panel);
        const CovPath b = fitted_covariance_path(back, panel);
        CHECK((a.back() - b.back()).norm() == 0.0);
        CHECK(simulate_model(m, 50, 3).returns == simulate_model(back, 50, 3).returns);
    }
}

TEST_CASE("malformed parameter JSON") {
    CHECK_THROWS_AS(fitted_model_from_json(Json::parse("{}")), ParseError);
    CHECK_THROWS_AS(fitted_model_from_json(Json::parse(R"({"model":"bekk","variant":"bekk","n":2})")), ParseError);
}

TEST_CASE("fitted path reproduces the reported likelihood") {
    const ReturnPanel panel = market(3);
    const FittedModel m = fit_model(ModelKind::Bekk, panel, std::nullopt, quick());
    const auto& s = std::get<BekkState>(m.state);
    CHECK(bekk_loglik(panel.demeaned(), s.params, s.h1) == doctest::Approx(m.fit.loglik).epsilon(1e-12));
    const CovPath path = fitted_covariance_path(m, panel);
    CHECK(path.size() == static_cast<std::size_t>(panel.periods()));
}

TEST_CASE("evaluate report agrees with an independent recomputation") {
    const ReturnPanel panel = market(4);
    EvalConfig cfg;
    cfg.models = {ModelKind::Bekk, ModelKind::DccMod};
    cfg.delta = 0.6;
    cfg.seed = 7;
    cfg.optimizer = quick();
    const EvalReport rep = evaluate(panel, cfg);
    REQUIRE(rep.models.size() == 2);
    CHECK(rep.sim_len == panel.periods());
    const SampleMoments mom = sample_moments(panel);
    for (const auto& ev : rep.models) {
        const CovPath path = fitted_covariance_path(ev.model, panel);
        CHECK(std::abs(ev.frobenius_target - frobenius_path_loss(path, rep.target.sigma_hat)) < 1e-10);
        CHECK(std::abs(ev.frobenius_sample - frobenius_path_loss(path, mom.cov)) < 1e-10);
        const Matrix sim_cov = column_covariance(simulate_model(ev.model, rep.sim_len, cfg.seed).returns);
        CHECK(std::abs(ev.kl_sample - kl_divergence(mom.cov, sim_cov)) < 1e-10);
        CHECK(ev.kl_target >= 0.0);
        CHECK(ev.frobenius_sample > 0.0);
    }
    const Json j = to_json(rep);
    CHECK(j["models"].size() == 2);
    const std::string table = format_table(rep);
    CHECK(table.find("KL (d=0.6)") != std::string::npos);
    CHECK(table.find("dcc_mod") != std::string::npos);
}

TEST_CASE("evaluate on the 5-asset correlation at 0.71 reports the observed cliques") {
    const Matrix corr = fixtures::corr5();
    const Matrix l = cholesky(corr).lower();
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix z(4000, 5);
    for (int i = 0; i < 4000; ++i) {
        Vector e(5);
        for (int j = 0; j < 5; ++j) e(j) = g(rng);
        z.row(i) = (l * e).transpose() * 0.01;
    }
    // exact sample correlation equal to the table: whiten then recolour
    const Matrix c = column_covariance(z);
    const Matrix w = cholesky(c).lower().inverse();
    Matrix zc = z.rowwise() - z.colwise().mean();
    zc = (zc * w.transpose()) * cholesky(corr).lower().transpose() * 0.01;
    const ReturnPanel panel = make_return_panel(zc, fixtures::tickers5());
    REQUIRE((sample_moments(panel).corr - corr).cwiseAbs().maxCoeff() < 1e-9);
    const ThresholdGraph g71 = build_graph(sample_moments(panel).corr, panel.labels, 0.71);
    CHECK(maximal_cliques(g71) == CliqueSet{{0, 1, 2}, {2, 3}, {2, 4}});
}

TEST_CASE("graph JSON round trip and atomic writes") {
    const ThresholdGraph g = build_graph(fixtures::corr8(), fixtures::tickers8(), 0.5);
    const ThresholdGraph back = graph_from_json(Json::parse(to_json(g).dump()));
    CHECK(back.labels == g.labels);
    CHECK(back.edges.size() == g.edges.size());
    CHECK(maximal_cliques(back) == maximal_cliques(g));
    CHECK_THROWS_AS(graph_from_json(Json::parse(R"({"labels":["a"],"delta":0.5,"edges":[[0,3,0.9]]})")),
                    std::exception);

    const auto path = std::filesystem::temp_directory_path() / "covtarget_atomic_test.txt";
    write_file_atomic(path, "one");
    write_file_atomic(path, "two");
    CHECK(read_text_file(path) == "two");
    std::filesystem::remove(path);
}
