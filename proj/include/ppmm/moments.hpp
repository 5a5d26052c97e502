#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ppmm {

/// Mean vector and covariance matrix of (proxy X, outcome Y) within one
/// response pattern. Proxy moments are always in unscaled proxy units.
struct PatternMoments {
    double mu_x = 0.0;
    double mu_y = 0.0;
    double var_x = 1.0;
    double var_y = 1.0;
    double cov_xy = 0.0;

    double sd_x() const;
    double sd_y() const;
    double correlation() const;

    bool operator==(const PatternMoments&) const = default;
};

/// Everything the data identify: respondent (X, Y) moments, nonrespondent
/// proxy moments and the response rate.
struct ObservedSummary {
    PatternMoments respondent;
    double nonresp_mu_x = 0.0;
    double nonresp_var_x = 1.0;
    double pi = 0.5;  // response rate r/n

    /// π·μx⁽¹⁾ + (1−π)·μx⁽⁰⁾, the default fixed proxy value for curves.
    double overall_mean_x() const;

    bool operator==(const ObservedSummary&) const = default;
};

struct ProxyFit {
    Eigen::VectorXd coefficients;  // intercept first
    Eigen::VectorXd proxy_values;  // one per unit in design_all
    double r_squared = 0.0;
    double respondent_rho = 0.0;
};

enum class VarianceDenominator { Unbiased, MaximumLikelihood };

// Throws NonPositiveVariance / NotPositiveDefinite; returns the input otherwise.
const PatternMoments& validate_pattern_moments(const PatternMoments& m);
const ObservedSummary& validate_observed_summary(const ObservedSummary& s);

/// Ordinary least squares of the respondent outcome on the design columns
/// (an intercept is added internally), then the proxy is the fitted value
/// for every sampled unit. Solved through the normal equations with a
/// pivoted LDLᵀ factorization; a pivot smaller than 1e-10 times the largest
/// (after unit-diagonal equilibration) is reported as RankDeficientDesign.
ProxyFit fit_proxy(const Eigen::Ref<const Eigen::VectorXd>& y_respondents,
                   const Eigen::Ref<const Eigen::MatrixXd>& design_respondents,
                   const Eigen::Ref<const Eigen::MatrixXd>& design_all);

struct SummaryResult {
    ObservedSummary summary;
    std::size_t respondents = 0;
    std::size_t nonrespondents = 0;
};

/// Pattern-wise moments of (proxy, outcome); a missing outcome marks a
/// nonrespondent.
SummaryResult summarize(std::span<const double> proxy,
                        std::span<const std::optional<double>> y,
                        VarianceDenominator denominator = VarianceDenominator::Unbiased);

// ---------------------------------------------------------------------------
// Covariate tables and design encoding

/// Column-major table of raw string cells, as read from CSV.
struct RawTable {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    std::ptrdiff_t find(const std::string& name) const;
};

bool is_missing_cell(const std::string& cell);

struct DesignColumn {
    std::string source;  // originating table column
    std::string level;   // empty for numeric columns
};

struct EncodedDesign {
    Eigen::MatrixXd matrix;
    std::vector<DesignColumn> columns;
    std::vector<std::string> warnings;
};

/// Numeric columns pass through; any column with a non-numeric cell is
/// categorical and becomes indicators for every level except the first one
/// observed. Columns with a single value are dropped with a warning.
EncodedDesign encode_design(const RawTable& table);

}  // namespace ppmm
