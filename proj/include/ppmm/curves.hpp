#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppmm/moments.hpp"

namespace ppmm {

struct CurvePoint {
    double abscissa = 0.0;
    std::optional<double> value;  // empty when the model is not identified here
    std::string reason;           // why value is empty

    bool valid() const { return value.has_value(); }
    bool operator==(const CurvePoint&) const = default;
};

struct CurveSeries {
    std::string name;
    std::string abscissa_name;  // "phi" or "y"
    std::vector<CurvePoint> points;

    std::string mechanism_id;
    std::optional<double> fixed_x;
    std::optional<double> fixed_y;
    std::optional<double> phi;
    std::optional<double> delta;

    std::size_t valid_count() const;
    bool operator==(const CurveSeries&) const = default;
};

/// A labelled outcome level at which odds ratios are evaluated.
struct OutcomeLevel {
    std::string label;
    double y = 0.0;
};

/// μy⁽¹⁾ − σy⁽¹⁾, μy⁽¹⁾, μy⁽¹⁾ + σy⁽¹⁾ labelled "mean-sd", "mean", "mean+sd".
std::vector<OutcomeLevel> standard_outcome_levels(const ObservedSummary& obs);

/// Odds ratio of nonresponse for y → y + delta as a function of φ, one
/// series per outcome level, with x fixed (default: overall proxy mean).
std::vector<CurveSeries> sweep_or(const ObservedSummary& obs, const std::string& id, std::span<const double> phi_grid,
                                  std::span<const OutcomeLevel> y_levels, std::optional<double> x_fix = std::nullopt,
                                  double delta = 1.0);

/// Nonresponse probability along an outcome grid, one series per φ level.
std::vector<CurveSeries> sweep_prob(const ObservedSummary& obs, const std::string& id,
                                    std::span<const double> phi_levels, std::span<const double> y_grid,
                                    std::optional<double> x_fix = std::nullopt);

/// Marginal outcome mean as a function of φ.
CurveSeries sweep_mean(const ObservedSummary& obs, const std::string& id, std::span<const double> phi_grid);

}  // namespace ppmm
