#include <doctest.h>

#include "ppmm/validation.hpp"

using namespace ppmm;

TEST_CASE("max_oracle_discrepancy is at rounding level") {
    const auto model = identify(builtin_mechanism("14").summary(), Phi(0.6));
    CHECK(max_oracle_discrepancy(model) < 1e-10);
    CHECK_THROWS(max_oracle_discrepancy(model, 1));
}

TEST_CASE("validate across the factorial design") {
    ValidationOptions opt;
    opt.run_mc = false;
    const ValidationReport rep = validate(builtin_mechanisms(), opt);
    CHECK(rep.passed);
    CHECK(rep.max_discrepancy < 1e-10);
    CHECK(rep.oracle.size() == 18 * 11);
    std::size_t excluded = 0;
    for (const auto& e : rep.oracle) {
        if (e.excluded) {
            ++excluded;
            CHECK(e.passed);
            CHECK_FALSE(e.reason.empty());
        }
    }
    // mechanisms with a smaller nonrespondent proxy variance lose large phi values
    CHECK(excluded > 0);
    CHECK(rep.recovery.empty());
}

TEST_CASE("validate runs Monte-Carlo recovery on request") {
    ValidationOptions opt;
    opt.phi_grid = {0.0, 0.5, 1.0};
    opt.mc_mechanisms = {"10"};
    opt.mc_phis = {0.5, 1.0};
    opt.n_mc = 200000;
    opt.seed = 3;
    const ValidationReport rep = validate({builtin_mechanism("10"), builtin_mechanism("1")}, opt);
    REQUIRE(rep.recovery.size() == 2);
    CHECK(rep.recovery[0].mechanism_id == "10");
    CHECK(rep.recovery[0].terms.size() == 6);
    CHECK(rep.recovery[0].passed);
    CHECK(rep.passed);
}

TEST_CASE("invalid pairs are excluded, not failed") {
    ValidationOptions opt;
    opt.phi_grid = {1.0};
    opt.mc_phis = {1.0};
    opt.n_mc = 20000;
    const ValidationReport rep = validate({builtin_mechanism("1")}, opt);
    REQUIRE(rep.oracle.size() == 1);
    CHECK(rep.oracle[0].excluded);
    REQUIRE(rep.recovery.size() == 1);
    CHECK(rep.recovery[0].excluded);
    CHECK(rep.passed);
}
