#include "ppmm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppmm/error.hpp"

namespace ppmm {

namespace {
constexpr double kResidualTolerance = 1e-14;
constexpr double kLogitSaturation = 700.0;
}  // namespace

ConditionalParams conditional_params(const PatternMoments& m) {
    validate_pattern_moments(m);
    ConditionalParams c;
    c.alpha = m.cov_xy / m.var_x;
    c.beta = m.mu_y - c.alpha * m.mu_x;
    c.resid_var = m.var_y - m.cov_xy * m.cov_xy / m.var_x;
    if (!(c.resid_var > kResidualTolerance * m.var_y)) {
        throw Error(ErrorCode::NotStrictlyPositiveResidual, "residual variance of Y given X is not positive");
    }
    return c;
}

SelectionCoefficients lambda_coefficients(const IdentifiedModel& model) {
    const PatternMoments& m1 = model.respondent;
    const PatternMoments& m0 = model.nonrespondent;
    const ConditionalParams c1 = conditional_params(m1);
    const ConditionalParams c0 = conditional_params(m0);
    const double pi = model.pi;

    SelectionCoefficients s;
    auto& l = s.lambda;
    l[0] = std::log((1.0 - pi) / pi) + m1.mu_x * m1.mu_x / (2.0 * m1.var_x) - m0.mu_x * m0.mu_x / (2.0 * m0.var_x) +
           0.5 * std::log(m1.var_x / m0.var_x) + c1.beta * c1.beta / (2.0 * c1.resid_var) -
           c0.beta * c0.beta / (2.0 * c0.resid_var) + 0.5 * std::log(c1.resid_var / c0.resid_var);
    l[1] = m0.mu_x / m0.var_x - m1.mu_x / m1.var_x + c1.beta * c1.alpha / c1.resid_var -
           c0.beta * c0.alpha / c0.resid_var;
    l[2] = 1.0 / (2.0 * m1.var_x) - 1.0 / (2.0 * m0.var_x) + c1.alpha * c1.alpha / (2.0 * c1.resid_var) -
           c0.alpha * c0.alpha / (2.0 * c0.resid_var);
    l[3] = c0.beta / c0.resid_var - c1.beta / c1.resid_var;
    l[4] = c0.alpha / c0.resid_var - c1.alpha / c1.resid_var;
    l[5] = 1.0 / (2.0 * c1.resid_var) - 1.0 / (2.0 * c0.resid_var);
    return s;
}

double logit_nonresponse(const SelectionCoefficients& c, double x, double y) {
    const auto& l = c.lambda;
    return l[0] + l[1] * x + l[2] * x * x + l[3] * y + l[4] * x * y + l[5] * y * y;
}

double inverse_logit(double logit) {
    const double z = std::clamp(logit, -kLogitSaturation, kLogitSaturation);
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double prob_nonresponse(const SelectionCoefficients& c, double x, double y) {
    return inverse_logit(logit_nonresponse(c, x, y));
}

double odds_ratio_y(const SelectionCoefficients& c, double x, double y, double delta) {
    const auto& l = c.lambda;
    return std::exp(l[3] * delta + l[4] * x * delta + l[5] * (2.0 * y * delta + delta * delta));
}

MarginalSelectionCoefficients tau_coefficients(double pi, NormalMoments respondent_x,
                                               NormalMoments nonrespondent_x) {
    if (!(respondent_x.var > 0.0) || !(nonrespondent_x.var > 0.0)) {
        throw Error(ErrorCode::NonPositiveVariance, "proxy variances must be positive");
    }
    const auto [m1, v1] = respondent_x;
    const auto [m0, v0] = nonrespondent_x;
    MarginalSelectionCoefficients t;
    t.tau0 = std::log((1.0 - pi) / pi) + m1 * m1 / (2.0 * v1) - m0 * m0 / (2.0 * v0) + 0.5 * std::log(v1 / v0);
    t.tau1 = m0 / v0 - m1 / v1;
    t.tau2 = 1.0 / (2.0 * v1) - 1.0 / (2.0 * v0);
    return t;
}

NoCovariateCoefficients gamma_coefficients(double pi, NormalMoments respondent_y,
                                           NormalMoments nonrespondent_y) {
    const auto t = tau_coefficients(pi, respondent_y, nonrespondent_y);
    return {t.tau0, t.tau1, t.tau2};
}

std::array<double, 3> conditional_contribution(const ConditionalParams& c1, const ConditionalParams& c0) {
    return {
        c1.beta * c1.beta / (2.0 * c1.resid_var) - c0.beta * c0.beta / (2.0 * c0.resid_var) +
            0.5 * std::log(c1.resid_var / c0.resid_var),
        c1.beta * c1.alpha / c1.resid_var - c0.beta * c0.alpha / c0.resid_var,
        c1.alpha * c1.alpha / (2.0 * c1.resid_var) - c0.alpha * c0.alpha / (2.0 * c0.resid_var),
    };
}

}  // namespace ppmm
