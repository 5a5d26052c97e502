#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppmm/mechanisms.hpp"
#include "ppmm/simulation.hpp"

namespace ppmm {

struct ValidationOptions {
    std::vector<double> phi_grid;      // oracle sweep; default 0:1:0.1
    std::size_t grid_points = 31;      // per axis
    double grid_sd = 4.0;              // grid spans respondent mean ± grid_sd·sd on each axis
    double oracle_tolerance = 1e-10;

    bool run_mc = true;
    std::vector<std::string> mc_mechanisms;  // ids to run Monte-Carlo recovery on; empty = all inputs
    std::vector<double> mc_phis{0.5};
    std::size_t n_mc = 200000;
    std::uint64_t seed = 1;
    double z_threshold = 4.0;
};

struct OracleEntry {
    std::string mechanism_id;
    double phi = 0.0;
    bool excluded = false;  // model not identified at this φ
    std::string reason;
    double max_discrepancy = 0.0;
    bool passed = true;

    bool operator==(const OracleEntry&) const = default;
};

struct RecoveryEntry {
    std::string mechanism_id;
    double phi = 0.0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    bool excluded = false;
    std::string reason;
    bool converged = false;
    std::vector<CoefficientComparison> terms;
    bool passed = true;

    bool operator==(const RecoveryEntry&) const = default;
};

struct ValidationReport {
    std::vector<OracleEntry> oracle;
    std::vector<RecoveryEntry> recovery;
    double max_discrepancy = 0.0;
    double oracle_tolerance = 1e-10;
    double z_threshold = 4.0;
    bool passed = true;

    bool operator==(const ValidationReport&) const = default;
};

/// Largest |λ-polynomial logit − density-ratio logit| over a square grid
/// around the respondent means.
double max_oracle_discrepancy(const IdentifiedModel& model, std::size_t grid_points = 31, double grid_sd = 4.0);

/// Runs the oracle-equivalence sweep for every input and φ, then Monte-Carlo
/// recovery where requested. Non-identified (mechanism, φ) pairs are
/// recorded as excluded rather than failed.
ValidationReport validate(const std::vector<Mechanism>& inputs, const ValidationOptions& options);

}  // namespace ppmm
