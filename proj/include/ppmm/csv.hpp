#pragma once

#include <iosfwd>
#include <string>

#include "ppmm/curves.hpp"
#include "ppmm/moments.hpp"
#include "ppmm/simulation.hpp"

namespace ppmm {

/// Comma-delimited, header row required, RFC 4180 quoting. Throws Parse
/// with the offending line number on ragged rows or unterminated quotes.
RawTable parse_csv(std::istream& in);
RawTable read_csv(const std::string& path);

/// Columns abscissa, value, valid; gaps leave value empty with valid = 0.
void write_series_csv(std::ostream& out, const CurveSeries& series);

/// Columns x, y, r.
void write_dataset_csv(std::ostream& out, const SimulatedDataset& data);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace ppmm
