#pragma once

#include <array>

#include "ppmm/identification.hpp"

namespace ppmm {

/// Y | X, R = r  ~  N(beta + alpha·X, resid_var)
struct ConditionalParams {
    double alpha = 0.0;
    double beta = 0.0;
    double resid_var = 1.0;
};

/// logit P(R=0 | x, y) = λ0 + λ1 x + λ2 x² + λ3 y + λ4 xy + λ5 y²
struct SelectionCoefficients {
    std::array<double, 6> lambda{};

    double operator[](std::size_t i) const { return lambda[i]; }
};

/// logit P(R=0 | x) = τ0 + τ1 x + τ2 x²
struct MarginalSelectionCoefficients {
    double tau0 = 0.0, tau1 = 0.0, tau2 = 0.0;
};

/// logit P(R=0 | y) = γ0 + γ1 y + γ2 y², outcome only, no covariate.
struct NoCovariateCoefficients {
    double gamma0 = 0.0, gamma1 = 0.0, gamma2 = 0.0;
};

struct NormalMoments {
    double mean = 0.0;
    double var = 1.0;
};

// Slope is the regression coefficient cov_xy / var_x.
ConditionalParams conditional_params(const PatternMoments& m);

SelectionCoefficients lambda_coefficients(const IdentifiedModel& model);

double logit_nonresponse(const SelectionCoefficients& c, double x, double y);
double prob_nonresponse(const SelectionCoefficients& c, double x, double y);

/// Odds ratio of nonresponse for moving y to y + delta at fixed x.
double odds_ratio_y(const SelectionCoefficients& c, double x, double y, double delta = 1.0);

MarginalSelectionCoefficients tau_coefficients(double pi, NormalMoments respondent_x,
                                               NormalMoments nonrespondent_x);
NoCovariateCoefficients gamma_coefficients(double pi, NormalMoments respondent_y,
                                           NormalMoments nonrespondent_y);

/// The x-polynomial left over in λ0..λ2 after removing the proxy-marginal
/// logit: the squared conditional-mean difference plus the residual-variance
/// log ratio. λk = τk + component k.
std::array<double, 3> conditional_contribution(const ConditionalParams& respondent,
                                               const ConditionalParams& nonrespondent);

/// Inverse logit clamped to the open interval (0, 1).
double inverse_logit(double logit);

}  // namespace ppmm
