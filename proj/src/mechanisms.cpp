#include "ppmm/mechanisms.hpp"

#include <array>

#include "ppmm/error.hpp"

namespace ppmm {

Mechanism Mechanism::from_summary(std::string id, const ObservedSummary& s) {
    return Mechanism{std::move(id), s.respondent, s.nonresp_mu_x, s.nonresp_var_x, s.pi};
}

std::vector<Mechanism> builtin_mechanisms() {
    constexpr std::array<double, 3> nonresp_vars{0.9, 1.0, 1.1};
    constexpr std::array<double, 2> nonresp_means{0.8, 1.2};
    constexpr std::array<double, 3> rhos{0.2, 0.5, 0.8};

    std::vector<Mechanism> out;
    out.reserve(18);
    for (double var0 : nonresp_vars) {
        for (double mu0 : nonresp_means) {
            for (double rho : rhos) {
                Mechanism m;
                m.id = std::to_string(out.size() + 1);
                m.respondent = PatternMoments{1.0, 1.0, 1.0, 1.0, rho};
                m.nonresp_mu_x = mu0;
                m.nonresp_var_x = var0;
                m.pi = 0.75;
                out.push_back(std::move(m));
            }
        }
    }
    return out;
}

Mechanism builtin_mechanism(const std::string& id) {
    for (auto& m : builtin_mechanisms()) {
        if (m.id == id) return m;
    }
    throw Error(ErrorCode::InvalidArgument, "no built-in mechanism with id '" + id + "' (expected 1-18)");
}

double respondent_residual_variance(const Mechanism& m) {
    const auto& r = m.respondent;
    return r.var_y - r.cov_xy * r.cov_xy / r.var_x;
}

}  // namespace ppmm
