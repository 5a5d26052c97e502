#pragma once

#include <vector>

#include "ppmm/moments.hpp"

namespace ppmm {

/// Sensitivity parameter in [0, 1]: 0 is missing at random, 1 makes
/// response depend on the outcome alone.
class Phi {
public:
    explicit Phi(double value);
    double value() const noexcept { return value_; }
    bool operator==(const Phi&) const = default;

private:
    double value_;
};

struct IdentifiedModel {
    PatternMoments respondent;
    PatternMoments nonrespondent;
    double pi = 0.5;
    Phi phi{0.0};
};

/// (φ + (1−φ)ρ) / (φρ + (1−φ)), the multiplier applied to the proxy shifts.
/// Throws DegenerateProxy for ρ outside [0, 1] or for φ = 1 with ρ ≤ 1e-12.
double g_factor(Phi phi, double rho1);

/// Nonrespondent outcome moments implied by the identifying restriction.
/// Throws InvalidIdentification if the implied nonrespondent variance or
/// residual variance of Y given X is not positive.
IdentifiedModel identify(const ObservedSummary& obs, Phi phi);

/// π·μy⁽¹⁾ + (1−π)·μy⁽⁰⁾
double marginal_mean(const IdentifiedModel& model);

struct PhiInterval {
    double lower = 0.0;
    double upper = 1.0;
    bool complete = true;  // true when every grid point identified
};

/// Largest prefix [0, φmax] of the grid 0, step, ..., 1 on which identify
/// succeeds.
PhiInterval phi_validity_bound(const ObservedSummary& obs, double grid_step = 0.01);

/// Evenly spaced grid from start to stop inclusive. When step divides the
/// span the points sit at exact fractions of it; otherwise stop is appended.
std::vector<double> make_grid(double start, double stop, double step);

/// make_grid restricted to [0, 1].
std::vector<double> make_phi_grid(double start = 0.0, double stop = 1.0, double step = 0.01);

}  // namespace ppmm
