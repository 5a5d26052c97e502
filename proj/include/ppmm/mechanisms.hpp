#pragma once

#include <string>
#include <vector>

#include "ppmm/moments.hpp"

namespace ppmm {

/// One named configuration of observed moments: respondent (X, Y) moments,
/// nonrespondent proxy moments and the response rate.
struct Mechanism {
    std::string id;
    PatternMoments respondent;
    double nonresp_mu_x = 0.0;
    double nonresp_var_x = 1.0;
    double pi = 0.5;

    ObservedSummary summary() const { return {respondent, nonresp_mu_x, nonresp_var_x, pi}; }
    static Mechanism from_summary(std::string id, const ObservedSummary& s);

    bool operator==(const Mechanism&) const = default;
};

/// The 3×2×3 factorial design: unit respondent moments, ρ ∈ {0.2, 0.5, 0.8},
/// nonrespondent proxy mean ∈ {0.8, 1.2}, nonrespondent proxy variance
/// ∈ {0.9, 1.0, 1.1}, π = 0.75. Ids "1".."18"; the variance level varies
/// slowest, then the mean, then ρ.
std::vector<Mechanism> builtin_mechanisms();

/// Looks up a built-in mechanism by id; throws InvalidArgument if absent.
Mechanism builtin_mechanism(const std::string& id);

/// σ²_{y|x} = σ²y − σ²xy/σ²x for the respondent pattern.
double respondent_residual_variance(const Mechanism& m);

}  // namespace ppmm
