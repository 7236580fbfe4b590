#include "scatter/io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace scatter {

namespace {

using nlohmann::json;

Matrix read_matrix(const json& j, Index n, const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n)
    throw Error(ErrorKind::InvalidSpec, where + ": matrix must have " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n)
      throw Error(ErrorKind::InvalidSpec, where + ": row " + std::to_string(r) + " must have " +
                                              std::to_string(n) + " entries");
    for (Index c = 0; c < n; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw Error(ErrorKind::InvalidSpec, where + ": entries must be numbers");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

double read_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw Error(ErrorKind::InvalidSpec, where + ": missing numeric field '" + key + "'");
  return obj[key].get<double>();
}

json write_matrix(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ValidatedPotential parse_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, std::string("spec is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorKind::InvalidSpec, "spec must be a JSON object");
  if (!root.contains("channels") || !root["channels"].is_number_integer() || root["channels"].get<long>() < 1)
    throw Error(ErrorKind::InvalidSpec, "spec: 'channels' must be a positive integer");

  PotentialSpec spec;
  spec.channels = root["channels"].get<Index>();
  spec.range = read_number(root, "range", "spec");
  if (root.contains("segments")) {
    if (!root["segments"].is_array()) throw Error(ErrorKind::InvalidSpec, "spec: 'segments' must be an array");
    std::size_t i = 0;
    for (const json& s : root["segments"]) {
      const std::string where = "segment " + std::to_string(i++);
      if (!s.is_object() || !s.contains("matrix")) throw Error(ErrorKind::InvalidSpec, where + ": missing 'matrix'");
      spec.segments.push_back({read_number(s, "lo", where), read_number(s, "hi", where),
                               read_matrix(s["matrix"], spec.channels, where)});
    }
  }
  if (root.contains("deltas")) {
    if (!root["deltas"].is_array()) throw Error(ErrorKind::InvalidSpec, "spec: 'deltas' must be an array");
    std::size_t i = 0;
    for (const json& d : root["deltas"]) {
      const std::string where = "delta " + std::to_string(i++);
      if (!d.is_object() || !d.contains("matrix")) throw Error(ErrorKind::InvalidSpec, where + ": missing 'matrix'");
      spec.deltas.push_back({read_number(d, "pos", where), read_matrix(d["matrix"], spec.channels, where)});
    }
  }
  return validate(std::move(spec));
}

ValidatedPotential load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::string spec_to_json(const ValidatedPotential& potential) {
  if (potential.is_sampled()) throw Error(ErrorKind::InvalidSpec, "sampled potentials have no file form");
  json root;
  root["channels"] = potential.channels();
  root["range"] = potential.range();
  root["segments"] = json::array();
  for (const auto& s : potential.segments())
    root["segments"].push_back({{"lo", s.lo}, {"hi", s.hi}, {"matrix", write_matrix(s.matrix)}});
  root["deltas"] = json::array();
  for (const auto& d : potential.deltas())
    root["deltas"].push_back({{"pos", d.position}, {"matrix", write_matrix(d.strength)}});
  return root.dump(2);
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw Error(ErrorKind::InvalidSpec, "unknown output format '" + name + "'");
}

void write_table(const Table& table, Format format, std::ostream& out) {
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.columns.size())
      throw Error(ErrorKind::InvalidSpec, "row " + std::to_string(r) + " does not match the header");
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      if (!std::isfinite(table.rows[r][c]))
        throw Error(ErrorKind::NonFiniteOutput,
                    "non-finite value in column '" + table.columns[c] + "' row " + std::to_string(r));
  }

  std::ostringstream os;
  if (format == Format::csv) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
      os << '\n';
    }
  } else {
    // Hand-written so the numbers keep 17 significant digits.
    os << '[';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      os << (r ? ",\n " : "\n ") << '{';
      for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? ", " : "") << json(table.columns[c]).dump() << ": " << format_double(table.rows[r][c]);
      os << '}';
    }
    os << (table.rows.empty() ? "]\n" : "\n]\n");
  }
  out << os.str();
  if (!out) throw Error(ErrorKind::IoError, "failed to write output");
}

void emit(const Table& table, Format format, const std::string& path, std::ostream& fallback) {
  if (path.empty()) {
    write_table(table, format, fallback);
    return;
  }
  std::ostringstream body;
  write_table(table, format, body);
  std::ofstream file(path);
  if (!file) throw Error(ErrorKind::IoError, "cannot open output file '" + path + "'");
  file << body.str();
  if (!file) throw Error(ErrorKind::IoError, "failed to write '" + path + "'");
}

}  // namespace scatter
