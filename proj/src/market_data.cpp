#include "covtarget/market_data.hpp"

#include "covtarget/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace covtarget {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string_view rest(text);
    if (rest.substr(0, 3) == "\xEF\xBB\xBF") rest.remove_prefix(3);
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        lines.emplace_back(trim(line));
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

bool is_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

double parse_number(std::string_view cell, std::size_t row, std::size_t col) {
    if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null") {
        throw ParseError("missing value", row, col);
    }
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError("malformed number '" + std::string(cell) + "'", row, col);
    }
    if (!std::isfinite(value)) throw ParseError("non-finite value", row, col);
    return value;
}

struct RawTable {
    std::vector<std::string> dates;
    std::vector<std::string> labels;
    Matrix values;
};

// Header `date,T1,...,TN` followed by ISO-dated rows. `first_line` is the
// 0-based index of the header within `lines`; reported rows are 1-based.
RawTable parse_dated_table(const std::vector<std::string>& lines, std::size_t first_line) {
    if (lines.size() <= first_line) throw ParseError("missing header row", first_line + 1, 0);
    const auto header = split_cells(lines[first_line]);
    if (header.size() < 2) throw ParseError("header needs a date column and at least one ticker", first_line + 1, 0);
    std::string first(header[0]);
    std::transform(first.begin(), first.end(), first.begin(), [](unsigned char c) { return std::tolower(c); });
    if (first != "date") throw ParseError("first header cell must be 'date'", first_line + 1, 1);

    RawTable table;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty()) throw ParseError("empty ticker name", first_line + 1, c + 1);
        table.labels.emplace_back(header[c]);
    }
    {
        auto sorted = table.labels;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw DomainError("duplicate ticker in header");
        }
    }

    const std::size_t n = table.labels.size();
    struct Row {
        std::string date;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    for (std::size_t li = first_line + 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::size_t row_no = li + 1;
        const auto cells = split_cells(lines[li]);
        if (cells.size() != n + 1) {
            throw ParseError("expected " + std::to_string(n + 1) + " cells, found " + std::to_string(cells.size()),
                             row_no, std::min(cells.size(), n + 1) + (cells.size() < n + 1 ? 1 : 0));
        }
        if (!is_iso_date(cells[0])) throw ParseError("invalid ISO-8601 date '" + std::string(cells[0]) + "'", row_no, 1);
        Row row{std::string(cells[0]), {}};
        row.values.reserve(n);
        for (std::size_t c = 1; c <= n; ++c) row.values.push_back(parse_number(cells[c], row_no, c + 1));
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) throw DomainError("duplicate date " + rows[i].date);
    }

    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        table.dates.push_back(rows[i].date);
        for (std::size_t j = 0; j < n; ++j) {
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
        }
    }
    return table;
}

}  // namespace

Matrix ReturnPanel::demeaned() const {
    return returns.rowwise() - mean.transpose();
}

ReturnPanel make_return_panel(Matrix returns, std::vector<std::string> labels, std::vector<std::string> dates) {
    if (!returns.allFinite()) throw DomainError("returns contain non-finite values");
    if (labels.empty()) {
        for (Eigen::Index j = 0; j < returns.cols(); ++j) labels.push_back("A" + std::to_string(j + 1));
    }
    if (static_cast<Eigen::Index>(labels.size()) != returns.cols()) {
        throw ShapeError("label count does not match column count");
    }
    if (!dates.empty() && static_cast<Eigen::Index>(dates.size()) != returns.rows()) {
        throw ShapeError("date count does not match row count");
    }
    ReturnPanel r;
    r.mean = returns.rows() > 0 ? Vector(returns.colwise().mean().transpose()) : Vector::Zero(returns.cols());
    r.returns = std::move(returns);
    r.labels = std::move(labels);
    r.dates = std::move(dates);
    return r;
}

PricePanel parse_prices(const std::string& text) {
    const auto lines = split_lines(text);
    if (!lines.empty() && lines[0].rfind("#returns", 0) == 0) {
        throw ParseError("file holds returns, not prices", 1, 1);
    }
    RawTable t = parse_dated_table(lines, 0);
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < t.values.cols(); ++j) {
            if (!(t.values(i, j) > 0.0)) {
                throw DomainError("non-positive price for " + t.labels[static_cast<std::size_t>(j)] + " on " +
                                  t.dates[static_cast<std::size_t>(i)]);
            }
        }
    }
    return PricePanel{std::move(t.dates), std::move(t.labels), std::move(t.values)};
}

PricePanel load_prices(const std::filesystem::path& path) {
    return parse_prices(read_text_file(path));
}

ReturnPanel parse_returns(const std::string& text) {
    const auto lines = split_lines(text);
    if (!lines.empty() && lines[0].rfind("#returns", 0) == 0) {
        RawTable t = parse_dated_table(lines, 1);
        if (t.values.rows() < 1) throw InsufficientDataError("returns file has no data rows");
        return make_return_panel(std::move(t.values), std::move(t.labels), std::move(t.dates));
    }
    return log_returns(parse_prices(text));
}

ReturnPanel load_returns(const std::filesystem::path& path) {
    return parse_returns(read_text_file(path));
}

ReturnPanel log_returns(const PricePanel& p) {
    if (p.rows() < 2) throw InsufficientDataError("log-returns need at least two price rows");
    const Eigen::Index t = p.rows() - 1;
    Matrix r(t, p.assets());
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = 0; j < p.assets(); ++j) r(i, j) = std::log(p.prices(i + 1, j) / p.prices(i, j));
    }
    std::vector<std::string> dates;
    if (!p.dates.empty()) dates.assign(p.dates.begin() + 1, p.dates.end());
    return make_return_panel(std::move(r), p.labels, std::move(dates));
}

SampleMoments sample_moments(const ReturnPanel& r) {
    if (r.periods() < 2) throw InsufficientDataError("sample moments need at least two observations");
    for (Eigen::Index j = 0; j < r.assets(); ++j) {
        const auto col = r.returns.col(j);
        if ((col.array() == col(0)).all()) throw DegenerateSeriesError(r.labels[static_cast<std::size_t>(j)]);
    }
    SampleMoments m;
    m.cov = column_covariance(r.returns);
    m.gamma = m.cov.diagonal().cwiseSqrt().asDiagonal();
    m.corr = column_correlation(r.returns);
    return m;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string(), 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_correlation_text(const std::string& text) {
    const auto lines = split_lines(text);
    return !lines.empty() && lines[0].rfind("#correlation", 0) == 0;
}

CorrelationInput parse_correlation(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0].rfind("#correlation", 0) != 0) {
        throw ParseError("missing #correlation sentinel", 1, 1);
    }
    if (lines.size() < 2) throw ParseError("missing header row", 2, 0);
    const auto header = split_cells(lines[1]);
    CorrelationInput in;
    for (std::size_t c = 1; c < header.size(); ++c) in.labels.emplace_back(header[c]);
    const auto n = static_cast<Eigen::Index>(in.labels.size());
    if (n == 0) throw ParseError("header lists no assets", 2, 0);
    if (static_cast<Eigen::Index>(lines.size()) < n + 2) throw ParseError("too few matrix rows", lines.size() + 1, 0);
    in.corr.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::size_t row_no = static_cast<std::size_t>(i) + 3;
        const auto cells = split_cells(lines[static_cast<std::size_t>(i) + 2]);
        if (static_cast<Eigen::Index>(cells.size()) != n + 1) throw ParseError("wrong number of cells", row_no, 0);
        if (cells[0] != in.labels[static_cast<std::size_t>(i)]) throw ParseError("row label does not match header", row_no, 1);
        for (Eigen::Index j = 0; j < n; ++j) {
            in.corr(i, j) = parse_number(cells[static_cast<std::size_t>(j) + 1], row_no, static_cast<std::size_t>(j) + 2);
        }
    }
    require_symmetric(in.corr, "correlation input");
    return in;
}

std::string format_returns_csv(const ReturnPanel& r) {
    std::string out = "#returns\ndate";
    for (const auto& l : r.labels) out += "," + l;
    out += "\n";
    char buf[64];
    for (Eigen::Index i = 0; i < r.periods(); ++i) {
        if (!r.dates.empty()) {
            out += r.dates[static_cast<std::size_t>(i)];
        } else {
            // synthetic panels get consecutive ordinal days from 2000-01-01
            std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", 2000 + static_cast<int>(i / 336),
                          1 + static_cast<int>((i / 28) % 12), 1 + static_cast<int>(i % 28));
            out += buf;
        }
        for (Eigen::Index j = 0; j < r.assets(); ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", r.returns(i, j));
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace covtarget
