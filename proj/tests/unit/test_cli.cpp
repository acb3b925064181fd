#include "covtarget/json_io.hpp"
#include "covtarget/market_data.hpp"

#include "market_tables.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace covtarget;
namespace fs = std::filesystem;

namespace {

const fs::path& work() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "covtarget_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + COVTARGET_CLI + "\" " + args + " > \"" +
                            (work() / "stdout.txt").string() + "\" 2> \"" + (work() / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

fs::path prices_file() {
    const fs::path p = work() / "prices.csv";
    if (fs::exists(p)) return p;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 0.012);
    std::ostringstream s;
    s << "date,A,B,C\n";
    double a = 100, b = 50, c = 20;
    for (int i = 0; i < 200; ++i) {
        char date[16];
        std::snprintf(date, sizeof date, "2019-%02d-%02d", 1 + i / 28, 1 + i % 28);
        s << date << "," << a << "," << b << "," << c << "\n";
        const double common = g(rng);
        a *= std::exp(common + g(rng));
        b *= std::exp(common + g(rng));
        c *= std::exp(0.5 * common + g(rng));
    }
    write_file_atomic(p, s.str());
    return p;
}

fs::path correlation_file(const Matrix& corr, const std::vector<std::string>& labels, const std::string& name) {
    std::ostringstream s;
    s << "#correlation\n";
    for (const auto& l : labels) s << "," << l;
    s << "\n";
    for (Eigen::Index i = 0; i < corr.rows(); ++i) {
        s << labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < corr.cols(); ++j) s << "," << corr(i, j);
        s << "\n";
    }
    const fs::path p = work() / name;
    write_file_atomic(p, s.str());
    return p;
}

}  // namespace

TEST_CASE("graph DOT export of the 8-asset table") {
    const fs::path in = correlation_file(fixtures::corr8(), fixtures::tickers8(), "corr8.csv");
    const fs::path out = work() / "g8";
    REQUIRE(run("graph --input " + q(in) + " --delta 0.5 --format dot --out-dir " + q(out)) == 0);
    const std::string dot = read_text_file(out / "graph.dot");
    int edges = 0;
    for (std::size_t p = dot.find("--"); p != std::string::npos; p = dot.find("--", p + 2)) ++edges;
    CHECK(edges == 17);
}

TEST_CASE("cliques from exported K5 graph JSON") {
    const fs::path in = correlation_file(fixtures::corr5(), fixtures::tickers5(), "corr5.csv");
    const fs::path out = work() / "k5";
    REQUIRE(run("graph --input " + q(in) + " --delta 0.5 --out-dir " + q(out)) == 0);
    REQUIRE(run("cliques --input " + q(out / "graph.json") + " --out-dir " + q(out)) == 0);
    const Json cliques = Json::parse(read_text_file(out / "cliques.json"));
    REQUIRE(cliques.size() == 1);
    CHECK(cliques[0].size() == 5);

    REQUIRE(run("cliques --input " + q(in) + " --delta 0.71 --out-dir " + q(out)) == 0);
    CHECK(Json::parse(read_text_file(out / "cliques.json")).size() == 3);
}

TEST_CASE("cluster with a cut") {
    const fs::path in = correlation_file(fixtures::corr15(), fixtures::tickers15(), "corr15.csv");
    const fs::path out = work() / "cl";
    REQUIRE(run("cluster --input " + q(in) + " --k 4 --out-dir " + q(out)) == 0);
    const Json d = Json::parse(read_text_file(out / "dendrogram.json"));
    CHECK(d["merges"].size() == 14);
    CHECK(d["cut"]["groups"].size() == 4);
}

TEST_CASE("fit then simulate is deterministic") {
    const fs::path out = work() / "fit";
    REQUIRE(run("fit --model bekk_mod --delta 0.5 --starts 1 --input " + q(prices_file()) + " --out-dir " + q(out)) ==
            0);
    const Json params = Json::parse(read_text_file(out / "params.bekk_mod.json"));
    CHECK(params["target"]["delta"] == 0.5);
    CHECK(params["target"].contains("pd_adjusted"));

    REQUIRE(run("simulate --params " + q(out / "params.bekk_mod.json") + " --seed 42 --out-dir " + q(out / "s1")) == 0);
    REQUIRE(run("simulate --params " + q(out / "params.bekk_mod.json") + " --seed 42 --out-dir " + q(out / "s2")) == 0);
    const std::string a = read_text_file(out / "s1" / "simulated.bekk_mod.csv");
    CHECK(a == read_text_file(out / "s2" / "simulated.bekk_mod.csv"));
    CHECK(parse_returns(a).periods() == 199);
}

TEST_CASE("config file supplies flags and the command line overrides") {
    const fs::path cfg = work() / "run.toml";
    write_file_atomic(cfg, "delta = 1.5\nstarts = 1\nmodel = \"dcc_mod\"\n");
    const fs::path out = work() / "cfg";
    CHECK(run("fit --config " + q(cfg) + " --input " + q(prices_file()) + " --out-dir " + q(out)) == 2);
    REQUIRE(run("fit --config " + q(cfg) + " --delta 0.4 --input " + q(prices_file()) + " --out-dir " + q(out)) == 0);
    CHECK(Json::parse(read_text_file(out / "params.dcc_mod.json"))["target"]["delta"] == 0.4);
}

TEST_CASE("exit codes") {
    const fs::path out = work() / "err";
    CHECK(run("fit --model dcc_mod --input " + q(prices_file()) + " --out-dir " + q(out)) == 2);
    CHECK(run("fit --model nonsense --input " + q(prices_file())) == 2);
    CHECK(run("--bogus-flag") == 2);
    CHECK(run("") == 2);
    CHECK(run("--help") == 0);

    const fs::path bad = work() / "bad.csv";
    write_file_atomic(bad, "date,A\n2020-01-02,100\n2020-01-03,0\n");
    CHECK(run("graph --delta 0.5 --input " + q(bad)) == 3);
    CHECK(run("graph --delta 0.5 --input " + q(work() / "missing.csv")) == 3);
    CHECK(run("fit --model bekk --input " + q(work() / "corr5.csv")) == 3);
}
