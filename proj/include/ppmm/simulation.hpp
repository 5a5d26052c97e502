#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ppmm/identification.hpp"
#include "ppmm/selection.hpp"

namespace ppmm {

struct SimulatedDataset {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::uint8_t> r;  // 1 = respondent
    std::uint64_t seed = 0;
    std::string mechanism_id;

    std::size_t size() const { return x.size(); }
};

struct LogisticFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd standard_errors;
    bool converged = false;
    int iterations = 0;
    bool ridge_applied = false;  // 1e-8 added to the information diagonal at some step
    double deviance = 0.0;
    std::vector<double> deviance_trace;  // starting deviance, then one entry per iteration
};

/// Exact log-density of the bivariate normal with the given pattern moments.
double bvn_logpdf(const PatternMoments& m, double x, double y);

/// log[(1−π)·f0(x,y)] − log[π·f1(x,y)] from the two pattern densities.
double bayes_logit_oracle(const IdentifiedModel& model, double x, double y);

/// Draws R ~ Bernoulli(π) per unit, then (X, Y) from that pattern's
/// bivariate normal via the Cholesky factor of its covariance.
SimulatedDataset simulate(const IdentifiedModel& model, std::size_t n, std::uint64_t seed,
                          std::string mechanism_id = {});

/// Columns 1, x, x², y, xy, y².
Eigen::MatrixXd quadratic_features(std::span<const double> x, std::span<const double> y);

/// Logistic regression by iteratively reweighted least squares with
/// step-halving. `features` must contain any intercept column the caller
/// wants. Throws RankDeficient or Separation; non-convergence is reported
/// through LogisticFit::converged.
LogisticFit irls_logistic(const Eigen::Ref<const Eigen::MatrixXd>& features,
                          std::span<const std::uint8_t> response, int max_iter = 50, double tol = 1e-10);

struct CoefficientComparison {
    std::string name;
    double analytic = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    double z = 0.0;

    bool operator==(const CoefficientComparison&) const = default;
};

struct RecoveryReport {
    LogisticFit fit;
    std::vector<CoefficientComparison> terms;
    std::size_t nonrespondents = 0;

    double max_abs_z() const;
    bool passed(double z_threshold = 4.0) const { return fit.converged && max_abs_z() < z_threshold; }
};

/// Simulates n units from the model, fits logit P(R=0) on the quadratic
/// features and compares each estimate with the analytic coefficient.
RecoveryReport mc_recover_lambdas(const IdentifiedModel& model, std::size_t n, std::uint64_t seed);

}  // namespace ppmm
