#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scatter/potential.hpp"

namespace scatter {

/// Parse {"channels", "range", "segments": [{"lo", "hi", "matrix"}], "deltas": [{"pos", "matrix"}]}.
/// Malformed input raises InvalidSpec; the result is validated.
ValidatedPotential parse_spec(const std::string& json_text);
ValidatedPotential load_spec(const std::string& path);

/// Sampled parts have no file form and raise InvalidSpec.
std::string spec_to_json(const ValidatedPotential& potential);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

enum class Format { csv, json };

Format parse_format(const std::string& name);

/// CSV with a header row, or a JSON array of objects keyed by column name.
/// Floats are written with 17 significant digits. Any NaN or infinity raises
/// NonFiniteOutput before a byte is written.
void write_table(const Table& table, Format format, std::ostream& out);

/// Empty path writes to `fallback`.
void emit(const Table& table, Format format, const std::string& path, std::ostream& fallback);

}  // namespace scatter
