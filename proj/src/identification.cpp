#include "ppmm/identification.hpp"

#include <cmath>

#include "ppmm/error.hpp"

namespace ppmm {

namespace {
constexpr double kRhoTolerance = 1e-12;
constexpr double kResidualTolerance = 1e-14;
}  // namespace

Phi::Phi(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "phi must lie in [0, 1], got " + std::to_string(value));
    }
}

double g_factor(Phi phi, double rho1) {
    const double p = phi.value();
    if (!(rho1 >= -kRhoTolerance && rho1 <= 1.0 + kRhoTolerance)) {
        throw Error(ErrorCode::DegenerateProxy, "proxy correlation must lie in [0, 1], got " + std::to_string(rho1));
    }
    if (p == 1.0 && rho1 <= kRhoTolerance) {
        throw Error(ErrorCode::DegenerateProxy, "phi = 1 requires a proxy with positive correlation");
    }
    return (p + (1.0 - p) * rho1) / (p * rho1 + (1.0 - p));
}

IdentifiedModel identify(const ObservedSummary& obs, Phi phi) {
    validate_observed_summary(obs);
    const PatternMoments& r = obs.respondent;
    const double g = g_factor(phi, r.correlation());
    const double slope = r.sd_y() / r.sd_x();
    const double dvar = obs.nonresp_var_x - r.var_x;

    PatternMoments nr;
    nr.mu_x = obs.nonresp_mu_x;
    nr.var_x = obs.nonresp_var_x;
    nr.mu_y = r.mu_y + slope * g * (obs.nonresp_mu_x - r.mu_x);
    nr.var_y = r.var_y + (r.var_y / r.var_x) * g * g * dvar;
    nr.cov_xy = r.cov_xy + slope * g * dvar;

    if (!(nr.var_y > 0.0)) {
        throw Error(ErrorCode::InvalidIdentification,
                    "implied nonrespondent outcome variance " + std::to_string(nr.var_y) + " is not positive at phi " +
                        std::to_string(phi.value()));
    }
    const double resid = nr.var_y - nr.cov_xy * nr.cov_xy / nr.var_x;
    if (!(resid > kResidualTolerance * nr.var_y)) {
        throw Error(ErrorCode::InvalidIdentification,
                    "implied nonrespondent residual variance of Y given X is not positive at phi " +
                        std::to_string(phi.value()));
    }
    return IdentifiedModel{r, nr, obs.pi, phi};
}

double marginal_mean(const IdentifiedModel& model) {
    return model.pi * model.respondent.mu_y + (1.0 - model.pi) * model.nonrespondent.mu_y;
}

PhiInterval phi_validity_bound(const ObservedSummary& obs, double grid_step) {
    if (!(grid_step > 0.0 && grid_step <= 0.1)) {
        throw Error(ErrorCode::InvalidArgument, "grid step must lie in (0, 0.1]");
    }
    validate_observed_summary(obs);
    PhiInterval out;
    double last_valid = 0.0;
    for (double phi : make_phi_grid(0.0, 1.0, grid_step)) {
        try {
            identify(obs, Phi(phi));
            last_valid = phi;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InvalidIdentification && e.code() != ErrorCode::DegenerateProxy) throw;
            out.complete = false;
            break;
        }
    }
    out.upper = last_valid;
    return out;
}

std::vector<double> make_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop) || !(start <= stop)) {
        throw Error(ErrorCode::InvalidArgument, "grid needs start <= stop and step > 0");
    }
    const double span = stop - start;
    const double ratio = span / step;
    if (ratio > 1e7) throw Error(ErrorCode::InvalidArgument, "grid would exceed 10^7 points");
    const double whole = std::round(ratio);
    std::vector<double> grid;
    if (std::abs(ratio - whole) <= 1e-9 * std::max(1.0, whole)) {
        // step divides the span: place points at exact fractions so 0.3 prints as 0.3
        const auto n = static_cast<long>(whole);
        grid.reserve(static_cast<std::size_t>(n) + 1);
        for (long i = 0; i <= n; ++i) grid.push_back(n == 0 ? start : start + span * static_cast<double>(i) / static_cast<double>(n));
        grid.back() = stop;
        return grid;
    }
    const auto n = static_cast<long>(std::floor(ratio));
    grid.reserve(static_cast<std::size_t>(n) + 2);
    for (long i = 0; i <= n; ++i) grid.push_back(start + static_cast<double>(i) * step);
    grid.push_back(stop);
    return grid;
}

std::vector<double> make_phi_grid(double start, double stop, double step) {
    if (!(start >= 0.0) || !(stop <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "phi grid needs 0 <= start <= stop <= 1 and step > 0");
    }
    return make_grid(start, stop, step);
}

}  // namespace ppmm
