#include "ppmm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "ppmm/error.hpp"
#include "ppmm/rng.hpp"

namespace ppmm {

namespace {

constexpr double kPivotTolerance = 1e-10;
constexpr double kRidge = 1e-8;
constexpr double kSeparationNorm = 1e3;

double softplus(double eta) {
    return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

// Equilibrated LDLT with the relative pivot check; nullopt when singular.
std::optional<Eigen::MatrixXd> spd_inverse(const Eigen::MatrixXd& a) {
    Eigen::VectorXd scale = a.diagonal();
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
        if (!(scale[j] > 0.0)) return std::nullopt;
        scale[j] = 1.0 / std::sqrt(scale[j]);
    }
    const Eigen::MatrixXd scaled = scale.asDiagonal() * a * scale.asDiagonal();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
    const Eigen::VectorXd d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || !(d.minCoeff() > kPivotTolerance * d.cwiseAbs().maxCoeff())) {
        return std::nullopt;
    }
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    return Eigen::MatrixXd(scale.asDiagonal() * ldlt.solve(identity) * scale.asDiagonal());
}

struct Evaluation {
    double deviance = 0.0;
    Eigen::VectorXd score;
    Eigen::MatrixXd information;
};

Evaluation evaluate(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                    bool with_derivatives) {
    const Eigen::VectorXd eta = x * beta;
    Evaluation e;
    Eigen::VectorXd mu(eta.size()), w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        e.deviance += 2.0 * (softplus(eta[i]) - y[i] * eta[i]);
        mu[i] = inverse_logit(eta[i]);
        w[i] = mu[i] * (1.0 - mu[i]);
    }
    if (with_derivatives) {
        e.score = x.transpose() * (y - mu);
        e.information = x.transpose() * w.asDiagonal() * x;
    }
    return e;
}

}  // namespace

double bvn_logpdf(const PatternMoments& m, double x, double y) {
    const double det = m.var_x * m.var_y - m.cov_xy * m.cov_xy;
    if (!(m.var_x > 0.0) || !(m.var_y > 0.0) || !(det > 1e-14 * m.var_x * m.var_y)) {
        throw Error(ErrorCode::NotStrictlyPositiveDefinite, "bivariate normal covariance is not positive definite");
    }
    const double dx = x - m.mu_x;
    const double dy = y - m.mu_y;
    const double quad = (m.var_y * dx * dx - 2.0 * m.cov_xy * dx * dy + m.var_x * dy * dy) / det;
    return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * quad;
}

double bayes_logit_oracle(const IdentifiedModel& model, double x, double y) {
    return std::log((1.0 - model.pi) / model.pi) + bvn_logpdf(model.nonrespondent, x, y) -
           bvn_logpdf(model.respondent, x, y);
}

SimulatedDataset simulate(const IdentifiedModel& model, std::size_t n, std::uint64_t seed, std::string mechanism_id) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "simulate needs n >= 1");

    struct Factor {
        double mu_x, mu_y, sd_x, load, resid_sd;
    };
    auto factor = [](const PatternMoments& m) {
        const double sd_x = m.sd_x();
        const double load = m.cov_xy / sd_x;
        const double resid = m.var_y - load * load;
        if (!(resid > 0.0)) {
            throw Error(ErrorCode::NotStrictlyPositiveDefinite, "pattern covariance is not positive definite");
        }
        return Factor{m.mu_x, m.mu_y, sd_x, load, std::sqrt(resid)};
    };
    const std::array<Factor, 2> patterns{factor(model.nonrespondent), factor(model.respondent)};

    SimulatedDataset out;
    out.seed = seed;
    out.mechanism_id = std::move(mechanism_id);
    out.x.resize(n);
    out.y.resize(n);
    out.r.resize(n);

    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t r = rng.bernoulli(model.pi) ? 1 : 0;
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const Factor& f = patterns[r];
        out.r[i] = r;
        out.x[i] = f.mu_x + f.sd_x * z1;
        out.y[i] = f.mu_y + f.load * z1 + f.resid_sd * z2;
    }
    return out;
}

Eigen::MatrixXd quadratic_features(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "x and y lengths differ");
    Eigen::MatrixXd f(static_cast<Eigen::Index>(x.size()), 6);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        f(row, 0) = 1.0;
        f(row, 1) = x[i];
        f(row, 2) = x[i] * x[i];
        f(row, 3) = y[i];
        f(row, 4) = x[i] * y[i];
        f(row, 5) = y[i] * y[i];
    }
    return f;
}

LogisticFit irls_logistic(const Eigen::Ref<const Eigen::MatrixXd>& features, std::span<const std::uint8_t> response,
                          int max_iter, double tol) {
    const Eigen::Index n = features.rows();
    const Eigen::Index p = features.cols();
    if (static_cast<std::size_t>(n) != response.size()) {
        throw Error(ErrorCode::InvalidArgument, "feature rows and response length differ");
    }
    if (p == 0 || n < p) throw Error(ErrorCode::InvalidArgument, "need at least as many rows as features");

    Eigen::VectorXd y(n);
    std::size_t events = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (response[static_cast<std::size_t>(i)] > 1) throw Error(ErrorCode::InvalidArgument, "response must be 0/1");
        y[i] = response[static_cast<std::size_t>(i)];
        events += response[static_cast<std::size_t>(i)];
    }
    if (events == 0 || events == static_cast<std::size_t>(n)) {
        throw Error(ErrorCode::InvalidArgument, "response is constant");
    }
    if (!spd_inverse(features.transpose() * features)) {
        throw Error(ErrorCode::RankDeficient, "feature matrix is not of full column rank");
    }

    LogisticFit fit;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Evaluation current = evaluate(features, y, beta, true);
    const double initial_deviance = current.deviance;
    fit.deviance_trace.push_back(current.deviance);

    for (int iter = 1; iter <= max_iter; ++iter) {
        auto inverse = spd_inverse(current.information);
        if (!inverse) {
            Eigen::MatrixXd ridged = current.information;
            ridged.diagonal().array() += kRidge;
            inverse = spd_inverse(ridged);
            fit.ridge_applied = true;
            if (!inverse) throw Error(ErrorCode::RankDeficient, "weighted information matrix is singular");
        }
        const Eigen::VectorXd step = *inverse * current.score;

        Eigen::VectorXd candidate = beta + step;
        Evaluation next = evaluate(features, y, candidate, false);
        for (int halving = 0; halving < 30 && !(next.deviance <= current.deviance); ++halving) {
            candidate = beta + step * std::ldexp(1.0, -(halving + 1));
            next = evaluate(features, y, candidate, false);
        }
        if (!(next.deviance <= current.deviance)) {
            // No descent along the Newton direction: already at the optimum to rounding.
            candidate = beta;
            next = current;
        }
        const double previous_deviance = current.deviance;
        beta = candidate;
        current = evaluate(features, y, beta, true);
        fit.deviance_trace.push_back(current.deviance);
        fit.iterations = iter;

        if (beta.norm() > kSeparationNorm || current.deviance < 1e-6 * initial_deviance) {
            throw Error(ErrorCode::Separation, "fitted probabilities diverge to 0/1 (separated data)");
        }
        const double max_score = current.score.cwiseAbs().maxCoeff();
        const double rel_change = std::abs(previous_deviance - current.deviance) / (std::abs(current.deviance) + 0.1);
        if (max_score < tol || rel_change < tol) {
            fit.converged = true;
            break;
        }
    }

    fit.coefficients = beta;
    fit.deviance = current.deviance;
    auto cov = spd_inverse(current.information);
    if (!cov) {
        Eigen::MatrixXd ridged = current.information;
        ridged.diagonal().array() += kRidge;
        cov = spd_inverse(ridged);
        fit.ridge_applied = true;
    }
    fit.standard_errors = cov ? Eigen::VectorXd(cov->diagonal().cwiseSqrt())
                              : Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    return fit;
}

double RecoveryReport::max_abs_z() const {
    double m = 0.0;
    for (const auto& t : terms) m = std::max(m, std::abs(t.z));
    return m;
}

RecoveryReport mc_recover_lambdas(const IdentifiedModel& model, std::size_t n, std::uint64_t seed) {
    if (n < 10000) throw Error(ErrorCode::InvalidArgument, "Monte-Carlo recovery needs n >= 10^4");
    const SelectionCoefficients analytic = lambda_coefficients(model);
    const SimulatedDataset data = simulate(model, n, seed);

    std::vector<std::uint8_t> nonresponse(n);
    std::size_t missing = 0;
    for (std::size_t i = 0; i < n; ++i) {
        nonresponse[i] = data.r[i] == 0 ? 1 : 0;
        missing += nonresponse[i];
    }

    RecoveryReport report;
    report.nonrespondents = missing;
    report.fit = irls_logistic(quadratic_features(data.x, data.y), nonresponse);
    for (std::size_t k = 0; k < 6; ++k) {
        CoefficientComparison c;
        c.name = "lambda" + std::to_string(k);
        c.analytic = analytic.lambda[k];
        c.estimate = report.fit.coefficients[static_cast<Eigen::Index>(k)];
        c.se = report.fit.standard_errors[static_cast<Eigen::Index>(k)];
        c.z = (c.estimate - c.analytic) / c.se;
        report.terms.push_back(std::move(c));
    }
    return report;
}

}  // namespace ppmm
