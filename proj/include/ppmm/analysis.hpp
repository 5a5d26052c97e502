#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppmm/curves.hpp"
#include "ppmm/identification.hpp"
#include "ppmm/moments.hpp"

namespace ppmm {

struct AnalyzeOptions {
    std::string outcome;                   // outcome column, or
    std::vector<std::string> outcome_sum;  // items summed; missing if any item is missing
    std::vector<std::string> exclude;      // columns that are neither outcome nor covariate
    VarianceDenominator denominator = VarianceDenominator::Unbiased;

    std::vector<double> phi_grid = make_phi_grid(0.0, 1.0, 0.01);
    std::vector<double> prob_phi_levels{0.0, 0.25, 0.5, 0.75, 1.0};
    std::optional<std::vector<double>> y_grid;  // default: 51 points over the observed outcome range
    std::optional<double> x_fix;                // default: overall proxy mean
    double delta = 1.0;
    double bound_step = 0.01;
};

struct NamedCoefficient {
    std::string name;
    double value = 0.0;
    bool operator==(const NamedCoefficient&) const = default;
};

struct AnalysisReport {
    ObservedSummary summary;
    std::size_t respondents = 0;
    std::size_t nonrespondents = 0;
    std::vector<NamedCoefficient> proxy_coefficients;
    double r_squared = 0.0;
    double respondent_rho = 0.0;
    std::vector<std::string> warnings;
    PhiInterval phi_bound;
    std::vector<CurveSeries> series;

    bool operator==(const AnalysisReport&) const = default;
};

inline bool operator==(const PhiInterval& a, const PhiInterval& b) {
    return a.lower == b.lower && a.upper == b.upper && a.complete == b.complete;
}

/// Design encoding, proxy fit, pattern summary, validity bound and the
/// odds-ratio, probability and marginal-mean sweeps for one table.
AnalysisReport analyze_table(const RawTable& table, const AnalyzeOptions& options);
AnalysisReport analyze(const std::string& csv_path, const AnalyzeOptions& options);

}  // namespace ppmm
