#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ppmm/analysis.hpp"
#include "ppmm/curves.hpp"
#include "ppmm/identification.hpp"
#include "ppmm/mechanisms.hpp"
#include "ppmm/selection.hpp"
#include "ppmm/simulation.hpp"
#include "ppmm/validation.hpp"

namespace ppmm {

using nlohmann::json;

void to_json(json& j, const PatternMoments& m);
void from_json(const json& j, PatternMoments& m);
void to_json(json& j, const ObservedSummary& s);
void from_json(const json& j, ObservedSummary& s);
void to_json(json& j, const Mechanism& m);
void from_json(const json& j, Mechanism& m);
void to_json(json& j, const IdentifiedModel& m);
void to_json(json& j, const SelectionCoefficients& c);
void to_json(json& j, const MarginalSelectionCoefficients& c);
void to_json(json& j, const PhiInterval& p);
void from_json(const json& j, PhiInterval& p);
void to_json(json& j, const CurvePoint& p);
void from_json(const json& j, CurvePoint& p);
void to_json(json& j, const CurveSeries& s);
void from_json(const json& j, CurveSeries& s);
void to_json(json& j, const NamedCoefficient& c);
void from_json(const json& j, NamedCoefficient& c);
void to_json(json& j, const AnalysisReport& r);
void from_json(const json& j, AnalysisReport& r);
void to_json(json& j, const CoefficientComparison& c);
void from_json(const json& j, CoefficientComparison& c);
void to_json(json& j, const OracleEntry& e);
void from_json(const json& j, OracleEntry& e);
void to_json(json& j, const RecoveryEntry& e);
void from_json(const json& j, RecoveryEntry& e);
void to_json(json& j, const ValidationReport& r);
void from_json(const json& j, ValidationReport& r);

/// Accepts a single mechanism object or an array of them. Throws Parse.
std::vector<Mechanism> load_mechanisms(const std::string& path);
std::vector<Mechanism> parse_mechanisms(const std::string& text);

}  // namespace ppmm
