#include <doctest.h>

#include <numbers>

#include "ppmm/error.hpp"
#include "ppmm/mechanisms.hpp"
#include "ppmm/rng.hpp"
#include "ppmm/simulation.hpp"
#include "support/oracles.hpp"

using namespace ppmm;

namespace {

IdentifiedModel mech_model(const char* id, double phi) { return identify(builtin_mechanism(id).summary(), Phi(phi)); }

struct SampleMoments {
    std::size_t n = 0;
    PatternMoments m;
};

SampleMoments pattern_moments(const SimulatedDataset& d, std::uint8_t pattern) {
    SampleMoments out;
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.r[i] != pattern) continue;
        ++out.n;
        sx += d.x[i];
        sy += d.y[i];
    }
    const double n = static_cast<double>(out.n);
    out.m.mu_x = sx / n;
    out.m.mu_y = sy / n;
    double qxx = 0, qyy = 0, qxy = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.r[i] != pattern) continue;
        const double dx = d.x[i] - out.m.mu_x, dy = d.y[i] - out.m.mu_y;
        qxx += dx * dx;
        qyy += dy * dy;
        qxy += dx * dy;
    }
    out.m.var_x = qxx / (n - 1);
    out.m.var_y = qyy / (n - 1);
    out.m.cov_xy = qxy / (n - 1);
    return out;
}

void check_moments_within(const SampleMoments& s, const PatternMoments& truth, double k) {
    const double n = static_cast<double>(s.n);
    CHECK(std::abs(s.m.mu_x - truth.mu_x) < k * std::sqrt(truth.var_x / n));
    CHECK(std::abs(s.m.mu_y - truth.mu_y) < k * std::sqrt(truth.var_y / n));
    CHECK(std::abs(s.m.var_x - truth.var_x) < k * truth.var_x * std::sqrt(2.0 / (n - 1)));
    CHECK(std::abs(s.m.var_y - truth.var_y) < k * truth.var_y * std::sqrt(2.0 / (n - 1)));
    const double cov_se = std::sqrt((truth.var_x * truth.var_y + truth.cov_xy * truth.cov_xy) / n);
    CHECK(std::abs(s.m.cov_xy - truth.cov_xy) < k * cov_se);
}

}  // namespace

TEST_CASE("bvn_logpdf closed-form values") {
    CHECK(bvn_logpdf({0, 0, 1, 1, 0}, 0, 0) == doctest::Approx(-std::log(2.0 * std::numbers::pi)).epsilon(1e-15));
    const PatternMoments m{1.5, -0.5, 2.0, 0.7, 0.0};
    for (double d : {0.3, 1.1, 2.5}) {
        CHECK(bvn_logpdf(m, 1.5 + d, -0.5 - 0.4 * d) == doctest::Approx(bvn_logpdf(m, 1.5 - d, -0.5 + 0.4 * d)));
    }
    Rng rng(3);
    const PatternMoments c{0.4, 1.2, 1.7, 0.9, -0.6};
    for (int i = 0; i < 100; ++i) {
        const double x = rng.normal() * 3, y = rng.normal() * 3;
        CHECK(std::abs(bvn_logpdf(c, x, y) - oracle::bvn_logpdf_matrix(c, x, y)) < 1e-12);
    }
    CHECK_THROWS_AS(bvn_logpdf({0, 0, 1, 1, 1.0}, 0, 0), Error);
}

TEST_CASE("bvn density integrates to one") {
    for (const PatternMoments& m : {PatternMoments{1, 1, 1, 1, 0.2}, PatternMoments{-2, 3, 0.5, 4.0, 1.2},
                                    PatternMoments{0, 0, 1, 1, -0.8}}) {
        const double mass = oracle::trapezoid_mass(m, [](const PatternMoments& p, double x, double y) {
            return bvn_logpdf(p, x, y);
        });
        CHECK(std::abs(mass - 1.0) < 1e-6);
    }
}

TEST_CASE("bayes_logit_oracle") {
    const PatternMoments p{0.3, 0.1, 1.2, 0.8, 0.4};
    const IdentifiedModel same{p, p, 0.7, Phi(0.2)};
    for (double x : {-2.0, 0.0, 3.0}) {
        CHECK(bayes_logit_oracle(same, x, -x) == doctest::Approx(std::log(0.3 / 0.7)).epsilon(1e-14));
    }
    const auto m7 = mech_model("7", 0.5);
    CHECK(bayes_logit_oracle(m7, 1.0, 1.0) == doctest::Approx(-1.131945622001443).epsilon(1e-13));
    CHECK(std::abs(bayes_logit_oracle(m7, 1.0, 1.0) - logit_nonresponse(lambda_coefficients(m7), 1.0, 1.0)) < 1e-12);
}

TEST_CASE("simulate is deterministic per seed") {
    const auto model = mech_model("16", 0.5);
    const auto a = simulate(model, 1000, 42, "16");
    const auto b = simulate(model, 1000, 42, "16");
    const auto c = simulate(model, 1000, 43, "16");
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.r == b.r);
    CHECK(a.x != c.x);
    CHECK(a.mechanism_id == "16");
    CHECK(a.seed == 42);

    const auto one = simulate(model, 1, 7);
    REQUIRE(one.size() == 1);
    CHECK(one.r[0] <= 1);
    CHECK_THROWS_AS(simulate(model, 0, 1), Error);
}

TEST_CASE("simulate moment convergence at n = 10^6") {
    const auto model = mech_model("7", 0.5);
    const std::size_t n = 1000000;
    const auto d = simulate(model, n, 2024);
    const auto resp = pattern_moments(d, 1);
    const auto nonresp = pattern_moments(d, 0);

    const double expected = model.pi * n;
    CHECK(std::abs(static_cast<double>(resp.n) - expected) < 5.0 * std::sqrt(expected * (1.0 - model.pi)));
    CHECK(std::abs(resp.m.mu_x - 1.0) < 4.0 * 1.0 / std::sqrt(n * model.pi));
    check_moments_within(resp, model.respondent, 5.0);
    check_moments_within(nonresp, model.nonrespondent, 5.0);
}

TEST_CASE("irls_logistic recovers a known logistic model") {
    const int n = 100000;
    Rng rng(555);
    Eigen::MatrixXd x(n, 3);
    std::vector<std::uint8_t> y(n);
    const Eigen::Vector3d truth(-0.5, 0.8, -1.2);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = rng.normal();
        x(i, 2) = rng.uniform() * 2.0 - 1.0;
        y[i] = rng.bernoulli(inverse_logit(x.row(i).dot(truth))) ? 1 : 0;
    }
    const LogisticFit fit = irls_logistic(x, y);
    REQUIRE(fit.converged);
    CHECK_FALSE(fit.ridge_applied);
    for (int k = 0; k < 3; ++k) {
        CHECK(fit.standard_errors[k] > 0.0);
        CHECK(std::abs(fit.coefficients[k] - truth[k]) < 4.0 * fit.standard_errors[k]);
    }
    for (std::size_t i = 1; i < fit.deviance_trace.size(); ++i) {
        CHECK(fit.deviance_trace[i] <= fit.deviance_trace[i - 1]);
    }
}

TEST_CASE("irls_logistic intercept-only fit is the sample log-odds") {
    const int n = 1000;
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
    std::vector<std::uint8_t> y(n, 0);
    for (int i = 0; i < 237; ++i) y[i * 4] = 1;
    const LogisticFit fit = irls_logistic(ones, y);
    CHECK(fit.converged);
    CHECK(std::abs(fit.coefficients[0] - std::log(0.237 / 0.763)) < 1e-8);
}

TEST_CASE("irls_logistic error paths") {
    Eigen::MatrixXd sep(6, 2);
    sep << 1, -3, 1, -2, 1, -1, 1, 1, 1, 2, 1, 3;
    const std::vector<std::uint8_t> y{0, 0, 0, 1, 1, 1};
    try {
        irls_logistic(sep, y);
        FAIL("expected Separation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Separation);
    }

    Eigen::MatrixXd dup(6, 2);
    dup << 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1;
    const std::vector<std::uint8_t> mixed{0, 1, 0, 1, 1, 0};
    try {
        irls_logistic(dup, mixed);
        FAIL("expected RankDeficient");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RankDeficient);
    }

    const std::vector<std::uint8_t> constant(6, 1);
    CHECK_THROWS_AS(irls_logistic(sep, constant), Error);
}

TEST_CASE("mc_recover_lambdas") {
    SUBCASE("mechanism 10 at phi 0.5") {
        const auto rep = mc_recover_lambdas(mech_model("10", 0.5), 200000, 10);
        CHECK(rep.fit.converged);
        REQUIRE(rep.terms.size() == 6);
        for (const auto& t : rep.terms) {
            CAPTURE(t.name);
            CHECK(std::abs(t.z) < 4.0);
        }
        CHECK(rep.passed());
    }
    SUBCASE("phi 0 leaves no outcome terms") {
        const auto rep = mc_recover_lambdas(mech_model("16", 0.0), 200000, 11);
        for (std::size_t k : {3u, 4u, 5u}) CHECK(std::abs(rep.fit.coefficients[k]) < 4.0 * rep.fit.standard_errors[k]);
    }
    SUBCASE("equal variances leave no quadratic terms") {
        const auto rep = mc_recover_lambdas(mech_model("8", 0.7), 200000, 12);
        for (std::size_t k : {2u, 4u, 5u}) CHECK(std::abs(rep.fit.coefficients[k]) < 4.0 * rep.fit.standard_errors[k]);
    }
    CHECK_THROWS_AS(mc_recover_lambdas(mech_model("8", 0.5), 5000, 1), Error);
}

TEST_CASE("mc_recover_lambdas calibration over seeded replications") {
    const auto model = mech_model("16", 0.5);
    int passing = 0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        if (mc_recover_lambdas(model, 50000, seed).passed()) ++passing;
    }
    CHECK(passing >= 19);
}
