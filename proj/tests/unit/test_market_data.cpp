#include "covtarget/error.hpp"
#include "covtarget/market_data.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace covtarget;

namespace {

std::string iso_date(int day) {
    // consecutive days from 2019-01-01, good enough for ordering tests
    char buf[16];
    std::snprintf(buf, sizeof buf, "2019-%02d-%02d", 1 + day / 28, 1 + day % 28);
    return buf;
}

std::string price_csv(int rows, int assets, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.01);
    std::ostringstream s;
    s << "date";
    for (int j = 0; j < assets; ++j) s << ",T" << j + 1;
    s << "\n";
    std::vector<double> p(static_cast<std::size_t>(assets), 100.0);
    for (int i = 0; i < rows; ++i) {
        s << iso_date(i);
        for (auto& v : p) {
            s << "," << v;
            v *= std::exp(g(rng));
        }
        s << "\n";
    }
    return s.str();
}

template <class E>
E capture(const std::string& text) {
    try {
        parse_prices(text);
    } catch (const E& e) {
        return e;
    }
    FAIL("expected exception");
    throw;
}

}  // namespace

TEST_CASE("minimal price file") {
    const PricePanel p = parse_prices("date,MSFT\n2020-01-02,100\n2020-01-03,110\n");
    CHECK(p.rows() == 2);
    CHECK(p.assets() == 1);
    CHECK(p.labels == std::vector<std::string>{"MSFT"});
    const ReturnPanel r = log_returns(p);
    CHECK(r.periods() == 1);
    CHECK(std::abs(r.returns(0, 0) - std::log(1.1)) < 1e-15);
    CHECK(r.dates == std::vector<std::string>{"2020-01-03"});
}

TEST_CASE("flat price gives zero return") {
    const ReturnPanel r = log_returns(parse_prices("date,A\n2020-01-02,100\n2020-01-03,100\n"));
    CHECK(r.returns(0, 0) == 0.0);
}

TEST_CASE("tolerates BOM, CRLF, whitespace and unsorted rows") {
    const std::string text = "\xEF\xBB\xBF" "date, A ,B\r\n2020-01-03, 110 ,50\r\n2020-01-02,100,40\r\n\r\n";
    const PricePanel p = parse_prices(text);
    CHECK(p.labels == std::vector<std::string>{"A", "B"});
    CHECK(p.dates.front() == "2020-01-02");
    CHECK(p.prices(0, 0) == 100.0);
    CHECK(p.prices(1, 1) == 50.0);
}

TEST_CASE("price file errors") {
    CHECK_THROWS_AS(parse_prices("date,A\n2020-01-02,0\n2020-01-03,1\n"), DomainError);
    CHECK_THROWS_AS(parse_prices("date,A\n2020-01-02,-3\n2020-01-03,1\n"), DomainError);
    CHECK_THROWS_AS(parse_prices("date,A\n2020-01-02,1\n2020-01-02,2\n"), DomainError);
    CHECK_THROWS_AS(parse_prices("date,A,A\n2020-01-02,1,1\n"), DomainError);

    const ParseError missing = capture<ParseError>("date,A,B\n2020-01-02,1,2\n2020-01-03,NA,2\n");
    CHECK(missing.row() == 3);
    CHECK(missing.column() == 2);
    const ParseError malformed = capture<ParseError>("date,A,B\n2020-01-02,1,2x\n");
    CHECK(malformed.row() == 2);
    CHECK(malformed.column() == 3);
    CHECK_THROWS_AS(parse_prices("date,A\n02/01/2020,1\n"), ParseError);
    CHECK_THROWS_AS(parse_prices("day,A\n2020-01-02,1\n"), ParseError);
    CHECK_THROWS_AS(parse_prices("date,A\n2020-01-02,1,5\n"), ParseError);
    CHECK_THROWS_AS(parse_prices(""), ParseError);
}

TEST_CASE("too few prices for returns") {
    CHECK_THROWS_AS(log_returns(parse_prices("date,A\n2020-01-02,1\n")), InsufficientDataError);
}

TEST_CASE("253 x 15 panel gives 252 returns") {
    const ReturnPanel r = parse_returns(price_csv(253, 15, 1));
    CHECK(r.periods() == 252);
    CHECK(r.assets() == 15);
    CHECK(r.dates.size() == 252);
}

TEST_CASE("returns file round trip") {
    Matrix x(3, 2);
    x << 0.01, -0.02, 0.003, 0.0, -1e-5, 0.25;
    const ReturnPanel panel = make_return_panel(x, {"A", "B"});
    const ReturnPanel back = parse_returns(format_returns_csv(panel));
    CHECK(back.labels == panel.labels);
    CHECK(back.returns == panel.returns);
    CHECK(back.dates.size() == 3);
}

TEST_CASE("load from disk and missing file") {
    const auto path = std::filesystem::temp_directory_path() / "covtarget_md_test.csv";
    {
        std::ofstream out(path);
        out << price_csv(10, 2, 3);
    }
    CHECK(load_prices(path).rows() == 10);
    CHECK(load_returns(path).periods() == 9);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_prices(path), ParseError);
}

TEST_CASE("sample moments: identical columns and degenerate series") {
    Matrix x(5, 2);
    x << 1, 1, 2, 2, 0, 0, 5, 5, 3, 3;
    const SampleMoments m = sample_moments(make_return_panel(x, {"A", "B"}));
    CHECK(m.corr(0, 1) == 1.0);

    Matrix c(4, 2);
    c << 1, 0.1, 2, 0.1, 3, 0.1, 4, 0.1;
    try {
        sample_moments(make_return_panel(c, {"A", "FLAT"}));
        FAIL("expected DegenerateSeriesError");
    } catch (const DegenerateSeriesError& e) {
        CHECK(e.label() == "FLAT");
    }
}

TEST_CASE("sample correlation matches pairwise Pearson formula") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(100, 3);
    for (int i = 0; i < 100; ++i) {
        x(i, 0) = g(rng);
        x(i, 1) = 0.5 * x(i, 0) + g(rng);
        x(i, 2) = -0.3 * x(i, 1) + 2.0 * g(rng);
    }
    const SampleMoments m = sample_moments(make_return_panel(x));
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const double ma = x.col(a).mean();
            const double mb = x.col(b).mean();
            double sab = 0, saa = 0, sbb = 0;
            for (int i = 0; i < 100; ++i) {
                sab += (x(i, a) - ma) * (x(i, b) - mb);
                saa += (x(i, a) - ma) * (x(i, a) - ma);
                sbb += (x(i, b) - mb) * (x(i, b) - mb);
            }
            CHECK(std::abs(m.corr(a, b) - sab / std::sqrt(saa * sbb)) < 1e-12);
        }
    }
    CHECK((m.gamma * m.corr * m.gamma - m.cov).norm() < 1e-12 * m.cov.norm());
}

TEST_CASE("correlation file") {
    const std::string text = "#correlation\n,A,B\nA,1,0.5\nB,0.5,1\n";
    CHECK(is_correlation_text(text));
    CHECK_FALSE(is_correlation_text("date,A\n"));
    const CorrelationInput in = parse_correlation(text);
    CHECK(in.labels == std::vector<std::string>{"A", "B"});
    CHECK(in.corr(1, 0) == 0.5);
    CHECK_THROWS_AS(parse_correlation("#correlation\n,A,B\nA,1,0.5\nC,0.5,1\n"), ParseError);
    CHECK_THROWS_AS(parse_correlation("#correlation\n,A,B\nA,1,0.5\n"), ParseError);
}
