#include "ppmm/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "ppmm/csv.hpp"
#include "ppmm/error.hpp"

namespace ppmm {

namespace {

double parse_outcome_cell(const std::string& cell, const std::string& column, std::size_t row) {
    std::string t = cell;
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::Parse, "line " + std::to_string(row + 2) + ": outcome '" + column +
                                          "' value '" + cell + "' is not numeric");
    }
    return v;
}

std::vector<std::optional<double>> extract_outcome(const RawTable& table, const std::vector<std::string>& items) {
    std::vector<std::optional<double>> y(table.rows(), 0.0);
    for (const auto& name : items) {
        const auto idx = table.find(name);
        if (idx < 0) throw Error(ErrorCode::InvalidArgument, "outcome column '" + name + "' not found");
        const auto& cells = table.columns[static_cast<std::size_t>(idx)];
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!y[i]) continue;
            if (is_missing_cell(cells[i])) {
                y[i].reset();
            } else {
                *y[i] += parse_outcome_cell(cells[i], name, i);
            }
        }
    }
    return y;
}

}  // namespace

AnalysisReport analyze_table(const RawTable& table, const AnalyzeOptions& options) {
    std::vector<std::string> outcome_items = options.outcome_sum;
    if (outcome_items.empty()) {
        if (options.outcome.empty()) throw Error(ErrorCode::InvalidArgument, "no outcome column given");
        outcome_items.push_back(options.outcome);
    }
    const auto y = extract_outcome(table, outcome_items);

    std::set<std::string> skip(outcome_items.begin(), outcome_items.end());
    skip.insert(options.exclude.begin(), options.exclude.end());
    for (const auto& name : options.exclude) {
        if (table.find(name) < 0) throw Error(ErrorCode::InvalidArgument, "excluded column '" + name + "' not found");
    }
    RawTable covariates;
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        if (skip.contains(table.names[c])) continue;
        covariates.names.push_back(table.names[c]);
        covariates.columns.push_back(table.columns[c]);
    }
    const EncodedDesign design = encode_design(covariates);

    std::vector<Eigen::Index> resp_rows;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i]) resp_rows.push_back(static_cast<Eigen::Index>(i));
    }
    if (resp_rows.size() < 2 || y.size() - resp_rows.size() < 2) {
        // summarize raises the canonical error; check early so the fit does not mask it
        std::vector<double> dummy(y.size(), 0.0);
        summarize(dummy, y, options.denominator);
    }
    Eigen::VectorXd y_resp(static_cast<Eigen::Index>(resp_rows.size()));
    for (std::size_t k = 0; k < resp_rows.size(); ++k) y_resp[static_cast<Eigen::Index>(k)] = *y[static_cast<std::size_t>(resp_rows[k])];
    const Eigen::MatrixXd x_resp = design.matrix(resp_rows, Eigen::all);
    const ProxyFit fit = fit_proxy(y_resp, x_resp, design.matrix);

    std::vector<double> proxy(fit.proxy_values.data(), fit.proxy_values.data() + fit.proxy_values.size());
    const SummaryResult summary = summarize(proxy, y, options.denominator);

    AnalysisReport report;
    report.summary = summary.summary;
    report.respondents = summary.respondents;
    report.nonrespondents = summary.nonrespondents;
    report.proxy_coefficients.push_back({"(intercept)", fit.coefficients[0]});
    for (std::size_t j = 0; j < design.columns.size(); ++j) {
        const auto& col = design.columns[j];
        const std::string name = col.level.empty() ? col.source : col.source + "=" + col.level;
        report.proxy_coefficients.push_back({name, fit.coefficients[static_cast<Eigen::Index>(j) + 1]});
    }
    report.r_squared = fit.r_squared;
    report.respondent_rho = fit.respondent_rho;
    report.warnings = design.warnings;

    validate_observed_summary(report.summary);
    report.phi_bound = phi_validity_bound(report.summary, options.bound_step);

    const std::string id = "data";
    const auto levels = standard_outcome_levels(report.summary);
    report.series = sweep_or(report.summary, id, options.phi_grid, levels, options.x_fix, options.delta);

    std::vector<double> y_grid;
    if (options.y_grid) {
        y_grid = *options.y_grid;
    } else {
        const double lo = *std::min_element(y_resp.data(), y_resp.data() + y_resp.size());
        const double hi = *std::max_element(y_resp.data(), y_resp.data() + y_resp.size());
        for (int i = 0; i <= 50; ++i) y_grid.push_back(lo + (hi - lo) * i / 50.0);
    }
    auto prob = sweep_prob(report.summary, id, options.prob_phi_levels, y_grid, options.x_fix);
    report.series.insert(report.series.end(), prob.begin(), prob.end());
    report.series.push_back(sweep_mean(report.summary, id, options.phi_grid));
    return report;
}

AnalysisReport analyze(const std::string& csv_path, const AnalyzeOptions& options) {
    return analyze_table(read_csv(csv_path), options);
}

}  // namespace ppmm
