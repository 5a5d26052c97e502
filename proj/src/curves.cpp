#include "ppmm/curves.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ppmm/error.hpp"
#include "ppmm/identification.hpp"
#include "ppmm/selection.hpp"

namespace ppmm {

namespace {

void require_increasing(std::span<const double> grid, const char* what) {
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be strictly increasing");
        }
    }
}

bool is_identification_failure(const Error& e) {
    return e.code() == ErrorCode::InvalidIdentification || e.code() == ErrorCode::DegenerateProxy ||
           e.code() == ErrorCode::NotStrictlyPositiveResidual;
}

// Evaluates f(φ) and records an explicit gap when identification fails.
template <typename F>
CurvePoint phi_point(double phi, F&& f) {
    CurvePoint p{phi, std::nullopt, {}};
    try {
        p.value = f(Phi(phi));
    } catch (const Error& e) {
        if (!is_identification_failure(e)) throw;
        p.reason = e.what();
    }
    return p;
}

std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::size_t CurveSeries::valid_count() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](auto& p) { return p.valid(); }));
}

std::vector<OutcomeLevel> standard_outcome_levels(const ObservedSummary& obs) {
    const double mean = obs.respondent.mu_y;
    const double sd = obs.respondent.sd_y();
    return {{"mean-sd", mean - sd}, {"mean", mean}, {"mean+sd", mean + sd}};
}

std::vector<CurveSeries> sweep_or(const ObservedSummary& obs, const std::string& id, std::span<const double> phi_grid,
                                  std::span<const OutcomeLevel> y_levels, std::optional<double> x_fix, double delta) {
    validate_observed_summary(obs);
    require_increasing(phi_grid, "phi grid");
    const double x = x_fix.value_or(obs.overall_mean_x());

    std::vector<CurveSeries> out;
    for (const auto& level : y_levels) {
        CurveSeries s;
        s.name = "or_" + id + "_" + level.label;
        s.abscissa_name = "phi";
        s.mechanism_id = id;
        s.fixed_x = x;
        s.fixed_y = level.y;
        s.delta = delta;
        for (double phi : phi_grid) {
            s.points.push_back(phi_point(phi, [&](Phi p) {
                return odds_ratio_y(lambda_coefficients(identify(obs, p)), x, level.y, delta);
            }));
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<CurveSeries> sweep_prob(const ObservedSummary& obs, const std::string& id,
                                    std::span<const double> phi_levels, std::span<const double> y_grid,
                                    std::optional<double> x_fix) {
    validate_observed_summary(obs);
    require_increasing(y_grid, "outcome grid");
    const double x = x_fix.value_or(obs.overall_mean_x());

    std::vector<CurveSeries> out;
    for (double phi : phi_levels) {
        CurveSeries s;
        s.name = "prob_" + id + "_phi" + format_number(phi);
        s.abscissa_name = "y";
        s.mechanism_id = id;
        s.fixed_x = x;
        s.phi = phi;

        std::optional<SelectionCoefficients> coeffs;
        std::string reason;
        try {
            coeffs = lambda_coefficients(identify(obs, Phi(phi)));
        } catch (const Error& e) {
            if (!is_identification_failure(e)) throw;
            reason = e.what();
        }
        for (double y : y_grid) {
            CurvePoint p{y, std::nullopt, reason};
            if (coeffs) p.value = prob_nonresponse(*coeffs, x, y);
            s.points.push_back(std::move(p));
        }
        out.push_back(std::move(s));
    }
    return out;
}

CurveSeries sweep_mean(const ObservedSummary& obs, const std::string& id, std::span<const double> phi_grid) {
    validate_observed_summary(obs);
    require_increasing(phi_grid, "phi grid");
    CurveSeries s;
    s.name = "mean_" + id;
    s.abscissa_name = "phi";
    s.mechanism_id = id;
    for (double phi : phi_grid) {
        s.points.push_back(phi_point(phi, [&](Phi p) { return marginal_mean(identify(obs, p)); }));
    }
    return s;
}

}  // namespace ppmm
