#pragma once

#include "covtarget/linalg.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace covtarget {

/// (T+1)×N strictly positive closing prices, rows in increasing date order.
struct PricePanel {
    std::vector<std::string> dates;
    std::vector<std::string> labels;
    Matrix prices;

    Eigen::Index rows() const noexcept { return prices.rows(); }
    Eigen::Index assets() const noexcept { return prices.cols(); }
};

/// T×N log-returns with the column means held as the constant mean vector.
struct ReturnPanel {
    std::vector<std::string> dates;  ///< may be empty for synthetic panels
    std::vector<std::string> labels;
    Matrix returns;
    Vector mean;

    Eigen::Index periods() const noexcept { return returns.rows(); }
    Eigen::Index assets() const noexcept { return returns.cols(); }

    /// returns − mean, row by row.
    Matrix demeaned() const;
};

struct SampleMoments {
    Matrix corr;
    Matrix cov;    ///< divisor T−1
    Matrix gamma;  ///< diagonal matrix of sample standard deviations
};

/// Builds a ReturnPanel from a raw T×N matrix; labels default to A1..AN.
ReturnPanel make_return_panel(Matrix returns, std::vector<std::string> labels = {},
                              std::vector<std::string> dates = {});

PricePanel parse_prices(const std::string& text);
PricePanel load_prices(const std::filesystem::path& path);

/// Reads either a price file or a `#returns` file and yields log-returns.
ReturnPanel parse_returns(const std::string& text);
ReturnPanel load_returns(const std::filesystem::path& path);

ReturnPanel log_returns(const PricePanel& p);

SampleMoments sample_moments(const ReturnPanel& r);

/// Correlation matrix with asset labels.
struct CorrelationInput {
    std::vector<std::string> labels;
    Matrix corr;
};

/// True when the text starts with the `#correlation` sentinel line.
bool is_correlation_text(const std::string& text);

/// `#correlation`, then a header `,T1,...,TN`, then one labelled row per asset.
CorrelationInput parse_correlation(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);

/// CSV text in the `#returns` format, 17 significant digits.
std::string format_returns_csv(const ReturnPanel& r);

}  // namespace covtarget
