#include "ppmm/moments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include "ppmm/error.hpp"

namespace ppmm {

namespace {

constexpr double kPivotTolerance = 1e-10;

bool finite_all(std::initializer_list<double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& cell) {
    const std::string t = trim(cell);
    if (t.empty()) return std::nullopt;
    const char* begin = t.data();
    if (*begin == '+') ++begin;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

double PatternMoments::sd_x() const { return std::sqrt(var_x); }
double PatternMoments::sd_y() const { return std::sqrt(var_y); }
double PatternMoments::correlation() const { return cov_xy / std::sqrt(var_x * var_y); }

double ObservedSummary::overall_mean_x() const {
    return pi * respondent.mu_x + (1.0 - pi) * nonresp_mu_x;
}

const PatternMoments& validate_pattern_moments(const PatternMoments& m) {
    if (!finite_all({m.mu_x, m.mu_y, m.var_x, m.var_y, m.cov_xy})) {
        throw Error(ErrorCode::InvalidArgument, "pattern moments must be finite");
    }
    if (!(m.var_x > 0.0) || !(m.var_y > 0.0)) {
        throw Error(ErrorCode::NonPositiveVariance, "var_x and var_y must be positive");
    }
    if (m.cov_xy * m.cov_xy >= m.var_x * m.var_y) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "cov_xy^2 must be smaller than var_x * var_y (|rho| < 1)");
    }
    return m;
}

const ObservedSummary& validate_observed_summary(const ObservedSummary& s) {
    validate_pattern_moments(s.respondent);
    if (!finite_all({s.nonresp_mu_x, s.nonresp_var_x, s.pi})) {
        throw Error(ErrorCode::InvalidArgument, "observed summary must be finite");
    }
    if (!(s.nonresp_var_x > 0.0)) {
        throw Error(ErrorCode::NonPositiveVariance, "nonrespondent proxy variance must be positive");
    }
    if (!(s.pi > 0.0 && s.pi < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "response rate must lie strictly inside (0, 1)");
    }
    return s;
}

ProxyFit fit_proxy(const Eigen::Ref<const Eigen::VectorXd>& y_respondents,
                   const Eigen::Ref<const Eigen::MatrixXd>& design_respondents,
                   const Eigen::Ref<const Eigen::MatrixXd>& design_all) {
    const Eigen::Index n = design_respondents.rows();
    const Eigen::Index p = design_respondents.cols();
    if (design_all.cols() != p) {
        throw Error(ErrorCode::InvalidArgument, "respondent and full design matrices differ in column count");
    }
    if (y_respondents.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "outcome length does not match respondent design rows");
    }
    if (n < p + 2) {
        throw Error(ErrorCode::InvalidArgument, "need at least columns + 2 respondent rows (intercept included)");
    }

    Eigen::MatrixXd a(n, p + 1);
    a.col(0).setOnes();
    a.rightCols(p) = design_respondents;

    const Eigen::MatrixXd gram = a.transpose() * a;
    Eigen::VectorXd scale = gram.diagonal();
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
        if (!(scale[j] > 0.0)) throw Error(ErrorCode::RankDeficientDesign, "design column is identically zero");
        scale[j] = 1.0 / std::sqrt(scale[j]);
    }
    const Eigen::MatrixXd scaled = scale.asDiagonal() * gram * scale.asDiagonal();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
    const Eigen::VectorXd pivots = ldlt.vectorD();
    const double largest = pivots.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(pivots.minCoeff() > kPivotTolerance * largest)) {
        throw Error(ErrorCode::RankDeficientDesign, "collinear design columns (pivot below 1e-10 of largest)");
    }
    const Eigen::VectorXd rhs = scale.asDiagonal() * (a.transpose() * y_respondents);
    const Eigen::VectorXd beta = scale.asDiagonal() * ldlt.solve(rhs);

    ProxyFit fit;
    fit.coefficients = beta;
    fit.proxy_values = (design_all * beta.tail(p)).array() + beta[0];

    const Eigen::VectorXd fitted = a * beta;
    const double y_mean = y_respondents.mean();
    const double sst = (y_respondents.array() - y_mean).square().sum();
    if (!(sst > 0.0)) throw Error(ErrorCode::InvalidArgument, "respondent outcome is constant");
    const double sse = (y_respondents - fitted).squaredNorm();
    fit.r_squared = std::clamp(1.0 - sse / sst, 0.0, 1.0);

    const Eigen::ArrayXd fc = fitted.array() - fitted.mean();
    const Eigen::ArrayXd yc = y_respondents.array() - y_mean;
    const double sff = fc.square().sum();
    fit.respondent_rho = sff > 0.0 ? (fc * yc).sum() / std::sqrt(sff * sst) : 0.0;
    return fit;
}

SummaryResult summarize(std::span<const double> proxy,
                        std::span<const std::optional<double>> y,
                        VarianceDenominator denominator) {
    if (proxy.size() != y.size()) {
        throw Error(ErrorCode::InvalidArgument, "proxy and outcome lengths differ");
    }
    std::size_t n1 = 0;
    double sx1 = 0.0, sy1 = 0.0, sx0 = 0.0;
    for (std::size_t i = 0; i < proxy.size(); ++i) {
        if (y[i]) {
            ++n1;
            sx1 += proxy[i];
            sy1 += *y[i];
        } else {
            sx0 += proxy[i];
        }
    }
    const std::size_t n0 = proxy.size() - n1;
    if (n1 < 2 || n0 < 2) {
        throw Error(ErrorCode::InsufficientPattern,
                    "need at least 2 respondents and 2 nonrespondents (got " + std::to_string(n1) + " and " +
                        std::to_string(n0) + ")");
    }
    const double mx1 = sx1 / static_cast<double>(n1);
    const double my1 = sy1 / static_cast<double>(n1);
    const double mx0 = sx0 / static_cast<double>(n0);

    double qxx1 = 0.0, qyy1 = 0.0, qxy1 = 0.0, qxx0 = 0.0;
    for (std::size_t i = 0; i < proxy.size(); ++i) {
        if (y[i]) {
            const double dx = proxy[i] - mx1;
            const double dy = *y[i] - my1;
            qxx1 += dx * dx;
            qyy1 += dy * dy;
            qxy1 += dx * dy;
        } else {
            const double dx = proxy[i] - mx0;
            qxx0 += dx * dx;
        }
    }
    const double offset = denominator == VarianceDenominator::Unbiased ? 1.0 : 0.0;
    const double d1 = static_cast<double>(n1) - offset;
    const double d0 = static_cast<double>(n0) - offset;

    SummaryResult out;
    out.respondents = n1;
    out.nonrespondents = n0;
    out.summary.respondent = PatternMoments{mx1, my1, qxx1 / d1, qyy1 / d1, qxy1 / d1};
    out.summary.nonresp_mu_x = mx0;
    out.summary.nonresp_var_x = qxx0 / d0;
    out.summary.pi = static_cast<double>(n1) / static_cast<double>(proxy.size());
    return out;
}

std::ptrdiff_t RawTable::find(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : std::distance(names.begin(), it);
}

bool is_missing_cell(const std::string& cell) {
    const std::string t = trim(cell);
    return t.empty() || t == "NA";
}

EncodedDesign encode_design(const RawTable& table) {
    EncodedDesign out;
    const std::size_t rows = table.rows();
    std::vector<std::vector<double>> built;

    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const auto& name = table.names[c];
        const auto& cells = table.columns[c];
        if (cells.size() != rows) throw Error(ErrorCode::InvalidArgument, "ragged table column '" + name + "'");

        std::size_t missing = 0;
        std::size_t first_missing = 0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (is_missing_cell(cells[i])) {
                if (missing++ == 0) first_missing = i;
            }
        }
        if (missing == rows) throw Error(ErrorCode::EmptyColumn, "covariate column '" + name + "' has no values");
        if (missing > 0) {
            // +2: header line plus 1-based numbering
            throw Error(ErrorCode::Parse, "missing covariate '" + name + "' at line " +
                                              std::to_string(first_missing + 2));
        }

        std::vector<double> numeric(rows);
        bool is_numeric = true;
        for (std::size_t i = 0; i < rows && is_numeric; ++i) {
            auto v = parse_number(cells[i]);
            if (v) numeric[i] = *v; else is_numeric = false;
        }

        if (is_numeric) {
            const bool constant = std::all_of(numeric.begin(), numeric.end(),
                                              [&](double v) { return v == numeric.front(); });
            if (constant) {
                out.warnings.push_back("dropped constant numeric column '" + name + "'");
                continue;
            }
            built.push_back(std::move(numeric));
            out.columns.push_back({name, {}});
            continue;
        }

        std::vector<std::string> levels;
        std::unordered_map<std::string, std::size_t> index;
        std::vector<std::size_t> codes(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            const std::string key = trim(cells[i]);
            auto [it, inserted] = index.try_emplace(key, levels.size());
            if (inserted) levels.push_back(key);
            codes[i] = it->second;
        }
        if (levels.size() < 2) {
            out.warnings.push_back("dropped single-level categorical column '" + name + "'");
            continue;
        }
        for (std::size_t level = 1; level < levels.size(); ++level) {
            std::vector<double> indicator(rows);
            for (std::size_t i = 0; i < rows; ++i) indicator[i] = codes[i] == level ? 1.0 : 0.0;
            built.push_back(std::move(indicator));
            out.columns.push_back({name, levels[level]});
        }
    }

    out.matrix.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(built.size()));
    for (std::size_t j = 0; j < built.size(); ++j) {
        out.matrix.col(static_cast<Eigen::Index>(j)) =
            Eigen::Map<const Eigen::VectorXd>(built[j].data(), static_cast<Eigen::Index>(rows));
    }
    return out;
}

}  // namespace ppmm
