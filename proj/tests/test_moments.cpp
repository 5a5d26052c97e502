#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "ppmm/error.hpp"
#include "ppmm/moments.hpp"
#include "ppmm/rng.hpp"

using namespace ppmm;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected ppmm::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("validate_pattern_moments accepts proper moments and rejects improper ones") {
    CHECK_NOTHROW(validate_pattern_moments({1, 1, 1, 1, 0.2}));
    CHECK_NOTHROW(validate_pattern_moments({0, 0, 1, 1, 0}));
    CHECK(code_of([] { validate_pattern_moments({1, 1, 1, 1, 1.5}); }) == ErrorCode::NotPositiveDefinite);
    CHECK(code_of([] { validate_pattern_moments({1, 1, 1, 1, 1.0}); }) == ErrorCode::NotPositiveDefinite);
    CHECK(code_of([] { validate_pattern_moments({1, 1, 0, 1, 0}); }) == ErrorCode::NonPositiveVariance);
    CHECK(code_of([] { validate_pattern_moments({1, 1, 1, -2, 0}); }) == ErrorCode::NonPositiveVariance);
}

TEST_CASE("validate_observed_summary checks the response rate") {
    ObservedSummary s{{1, 1, 1, 1, 0.2}, 0.8, 1.0, 0.75};
    CHECK_NOTHROW(validate_observed_summary(s));
    s.pi = 1.0;
    CHECK(code_of([&] { validate_observed_summary(s); }) == ErrorCode::InvalidArgument);
    s.pi = 0.5;
    s.nonresp_var_x = 0.0;
    CHECK(code_of([&] { validate_observed_summary(s); }) == ErrorCode::NonPositiveVariance);
}

TEST_CASE("fit_proxy with an exact linear outcome is a perfect proxy") {
    Eigen::MatrixXd all(8, 2);
    all << 1, 0, 2, 1, 3, 0, 4, 1, 5, 0, 6, 1, 7, 1, 8, 0;
    const Eigen::MatrixXd resp = all.topRows(6);
    const Eigen::VectorXd y = 2.0 + 3.0 * resp.col(0).array();
    const ProxyFit fit = fit_proxy(y, resp, all);
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.respondent_rho == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(fit.coefficients.size() == 3);
    CHECK(fit.coefficients[0] == doctest::Approx(2.0));
    CHECK(fit.coefficients[1] == doctest::Approx(3.0));
    CHECK(std::abs(fit.coefficients[2]) < 1e-10);
    REQUIRE(fit.proxy_values.size() == 8);
    CHECK(fit.proxy_values[7] == doctest::Approx(26.0));
}

TEST_CASE("fit_proxy on an outcome independent of the design has near-zero R^2") {
    const int n = 10000;
    Rng rng(20240611);
    Eigen::MatrixXd z(n, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) z(i, j) = rng.normal();
        y[i] = rng.normal();
    }
    const ProxyFit fit = fit_proxy(y, z, z);
    // Each null correlation is ~N(0, 1/n); with three columns R^2 ~ chi2_3 / n.
    const double bound = 3.0 / std::sqrt(static_cast<double>(n));
    CHECK(fit.r_squared < 3.0 * bound * bound);
    CHECK(fit.respondent_rho >= 0.0);
    CHECK(fit.respondent_rho * fit.respondent_rho == doctest::Approx(fit.r_squared).epsilon(1e-8));
}

TEST_CASE("fit_proxy rejects collinear designs") {
    Eigen::MatrixXd z(6, 2);
    z << 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6;
    const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(6, 0, 5);
    CHECK(code_of([&] { fit_proxy(y, z, z); }) == ErrorCode::RankDeficientDesign);

    Eigen::MatrixXd constant = Eigen::MatrixXd::Ones(6, 1);  // duplicates the intercept
    CHECK(code_of([&] { fit_proxy(y, constant, constant); }) == ErrorCode::RankDeficientDesign);
}

TEST_CASE("property: squared respondent correlation equals R^2") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Rng rng(seed);
        const int n = 40 + static_cast<int>(seed) * 7;
        const int p = 1 + static_cast<int>(seed % 4);
        Eigen::MatrixXd z(n, p);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            double signal = 0.0;
            for (int j = 0; j < p; ++j) {
                z(i, j) = rng.normal() * (1.0 + j);
                signal += (j % 2 ? -0.4 : 0.7) * z(i, j);
            }
            y[i] = signal * rng.uniform() + rng.normal();
        }
        const ProxyFit fit = fit_proxy(y, z, z);
        CAPTURE(seed);
        CHECK(fit.respondent_rho >= -1e-12);
        CHECK(std::abs(fit.respondent_rho * fit.respondent_rho - fit.r_squared) < 1e-8);
    }
}

TEST_CASE("summarize splits units by outcome missingness") {
    const std::vector<double> proxy{1, 1, 3, 3};
    const std::vector<std::optional<double>> y{2.0, 4.0, std::nullopt, std::nullopt};
    // two units per pattern with identical proxy values: variance 0 is fine here
    const auto res = summarize(proxy, y);
    CHECK(res.summary.respondent.mu_x == 1.0);
    CHECK(res.summary.respondent.mu_y == 3.0);
    CHECK(res.summary.respondent.var_y == 2.0);
    CHECK(res.summary.nonresp_mu_x == 3.0);
    CHECK(res.summary.pi == 0.5);
    CHECK(res.respondents == 2);
    CHECK(res.nonrespondents == 2);
}

TEST_CASE("summarize variance denominators") {
    const std::vector<double> proxy{0, 2, 4, 1, 3};
    const std::vector<std::optional<double>> y{1.0, 2.0, 6.0, std::nullopt, std::nullopt};
    const auto unbiased = summarize(proxy, y, VarianceDenominator::Unbiased).summary;
    const auto mle = summarize(proxy, y, VarianceDenominator::MaximumLikelihood).summary;
    CHECK(unbiased.respondent.var_x == doctest::Approx(4.0));
    CHECK(mle.respondent.var_x == doctest::Approx(8.0 / 3.0));
    CHECK(unbiased.respondent.cov_xy == doctest::Approx(5.0));
    CHECK(unbiased.nonresp_var_x == doctest::Approx(2.0));
    CHECK(mle.nonresp_var_x == doctest::Approx(1.0));
    CHECK(unbiased.pi == doctest::Approx(0.6));
}

TEST_CASE("summarize requires two units in each pattern") {
    const std::vector<double> proxy{1, 2, 3};
    const std::vector<std::optional<double>> all_observed{1.0, 2.0, 3.0};
    CHECK(code_of([&] { summarize(proxy, all_observed); }) == ErrorCode::InsufficientPattern);
    const std::vector<std::optional<double>> one_missing{1.0, 2.0, std::nullopt};
    CHECK(code_of([&] { summarize(proxy, one_missing); }) == ErrorCode::InsufficientPattern);
}

TEST_CASE("property: summarize is permutation invariant and yields valid moments") {
    Rng rng(77);
    const std::size_t n = 500;
    std::vector<double> proxy(n);
    std::vector<std::optional<double>> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        proxy[i] = rng.normal() * 2.0 + 1.0;
        if (rng.uniform() < 0.7) y[i] = proxy[i] * 0.5 + rng.normal();
    }
    const auto base = summarize(proxy, y).summary;
    CHECK_NOTHROW(validate_observed_summary(base));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffler(5);
    for (int rep = 0; rep < 10; ++rep) {
        std::shuffle(order.begin(), order.end(), shuffler);
        std::vector<double> p2(n);
        std::vector<std::optional<double>> y2(n);
        for (std::size_t i = 0; i < n; ++i) {
            p2[i] = proxy[order[i]];
            y2[i] = y[order[i]];
        }
        const auto s = summarize(p2, y2).summary;
        CHECK(std::abs(s.respondent.mu_x - base.respondent.mu_x) < 1e-12);
        CHECK(std::abs(s.respondent.mu_y - base.respondent.mu_y) < 1e-12);
        CHECK(std::abs(s.respondent.var_x - base.respondent.var_x) < 1e-12);
        CHECK(std::abs(s.respondent.var_y - base.respondent.var_y) < 1e-12);
        CHECK(std::abs(s.respondent.cov_xy - base.respondent.cov_xy) < 1e-12);
        CHECK(std::abs(s.nonresp_mu_x - base.nonresp_mu_x) < 1e-12);
        CHECK(std::abs(s.nonresp_var_x - base.nonresp_var_x) < 1e-12);
        CHECK(s.pi == base.pi);
    }
}

TEST_CASE("encode_design one-hot encodes categoricals against the first level") {
    RawTable t;
    t.names = {"age", "region", "flag"};
    t.columns = {{"30", "41.5", "52", "30"}, {"b", "a", "c", "a"}, {"yes", "yes", "yes", "yes"}};
    const EncodedDesign d = encode_design(t);
    REQUIRE(d.matrix.cols() == 3);
    REQUIRE(d.columns.size() == 3);
    CHECK(d.columns[0].source == "age");
    CHECK(d.columns[0].level.empty());
    CHECK(d.columns[1].level == "a");
    CHECK(d.columns[2].level == "c");
    CHECK(d.matrix(1, 0) == 41.5);
    CHECK(d.matrix(0, 1) == 0.0);
    CHECK(d.matrix(1, 1) == 1.0);
    CHECK(d.matrix(2, 2) == 1.0);
    REQUIRE(d.warnings.size() == 1);
    CHECK(d.warnings[0].find("flag") != std::string::npos);
}

TEST_CASE("encode_design errors") {
    RawTable empty;
    empty.names = {"z"};
    empty.columns = {{"", "NA", " "}};
    CHECK(code_of([&] { encode_design(empty); }) == ErrorCode::EmptyColumn);

    RawTable partial;
    partial.names = {"z"};
    partial.columns = {{"1", "NA", "3"}};
    try {
        encode_design(partial);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("encode_design drops constant numeric columns") {
    RawTable t;
    t.names = {"k", "v"};
    t.columns = {{"5", "5", "5"}, {"1", "2", "3"}};
    const auto d = encode_design(t);
    CHECK(d.matrix.cols() == 1);
    CHECK(d.columns[0].source == "v");
    CHECK(d.warnings.size() == 1);
}
