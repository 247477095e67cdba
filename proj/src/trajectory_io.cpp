#include "chemdyn/trajectory_io.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace chemdyn {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool parse_double(std::string_view token, double* out) {
  const std::string buf(token);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty()) return false;
  *out = v;
  return true;
}

bool parse_int(std::string_view token, long* out) {
  const std::string buf(token);
  char* end = nullptr;
  const long v = std::strtol(buf.c_str(), &end, 10);
  if (end != buf.c_str() + buf.size() || buf.empty()) return false;
  *out = v;
  return true;
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// key=value pairs; values may be double-quoted to contain spaces.
std::vector<std::pair<std::string, std::string>> parse_kv_line(
    const std::string& line, int line_no) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= n) break;
    std::size_t eq = line.find('=', i);
    if (eq == std::string::npos) {
      // Bare token without '='; keep it as a key with empty value.
      std::size_t j = i;
      while (j < n && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      out.emplace_back(line.substr(i, j - i), "");
      i = j;
      continue;
    }
    std::string key = line.substr(i, eq - i);
    i = eq + 1;
    std::string value;
    if (i < n && line[i] == '"') {
      std::size_t close = line.find('"', i + 1);
      if (close == std::string::npos) {
        throw ParseError(line_no, "unterminated quote in comment line");
      }
      value = line.substr(i + 1, close - i - 1);
      i = close + 1;
    } else {
      std::size_t j = i;
      while (j < n && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      value = line.substr(i, j - i);
      i = j;
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

struct LineReader {
  std::istream& in;
  int line_no = 0;

  bool next(std::string* line) {
    if (!std::getline(in, *line)) return false;
    ++line_no;
    if (!line->empty() && line->back() == '\r') line->pop_back();
    return true;
  }
};

std::string format_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  // Avoid the distinct "-0.000000" spelling.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

}  // namespace

ExtxyzResult parse_extxyz(std::istream& in, bool strict) {
  ExtxyzResult result;
  LineReader reader{in};
  std::string line;
  int frame_index = 0;

  while (true) {
    // Atom count line; skip blank lines between frames.
    bool got = false;
    while (reader.next(&line)) {
      if (!split_ws(line).empty()) {
        got = true;
        break;
      }
    }
    if (!got) break;

    ++frame_index;
    long natoms = 0;
    {
      const auto toks = split_ws(line);
      if (toks.size() != 1 || !parse_int(toks[0], &natoms) || natoms < 1) {
        throw ParseError(reader.line_no,
                         "frame " + std::to_string(frame_index) +
                             ": malformed atom count '" + line + "'");
      }
    }

    Frame frame;
    if (!reader.next(&line)) {
      throw ParseError(reader.line_no, "missing comment line");
    }
    bool saw_lattice = false;
    bool saw_pbc = false;
    for (const auto& [key, value] : parse_kv_line(line, reader.line_no)) {
      const std::string k = lower(key);
      if (k == "lattice") {
        const auto nums = split_ws(value);
        if (nums.size() != 9) {
          throw ParseError(reader.line_no, "Lattice needs 9 numbers");
        }
        for (int idx = 0; idx < 9; ++idx) {
          double v = 0.0;
          if (!parse_double(nums[idx], &v)) {
            throw ParseError(reader.line_no, "non-numeric Lattice entry");
          }
          frame.cell.basis(idx / 3, idx % 3) = v;
        }
        saw_lattice = true;
      } else if (k == "pbc") {
        const auto flags = split_ws(value);
        if (flags.size() != 3) {
          throw ParseError(reader.line_no, "pbc needs 3 flags");
        }
        for (int idx = 0; idx < 3; ++idx) {
          if (flags[idx] == "T" || lower(flags[idx]) == "true") {
            frame.cell.pbc[idx] = true;
          } else if (flags[idx] == "F" || lower(flags[idx]) == "false") {
            frame.cell.pbc[idx] = false;
          } else {
            throw ParseError(reader.line_no, "pbc flag must be T or F");
          }
        }
        saw_pbc = true;
      } else if (k == "energy") {
        double v = 0.0;
        if (!parse_double(value, &v)) {
          throw ParseError(reader.line_no, "non-numeric energy");
        }
        frame.energy = v;
      } else {
        if (strict) {
          throw ParseError(reader.line_no, "unknown comment key '" + key + "'");
        }
        result.diagnostics.warnings.emplace_back(
            reader.line_no, "ignored comment key '" + key + "'");
      }
    }
    if (saw_pbc && !saw_lattice && frame.cell.periodic()) {
      throw ParseError(reader.line_no, "pbc set without Lattice");
    }

    frame.elements.reserve(natoms);
    frame.positions.resize(natoms, 3);
    for (long i = 0; i < natoms; ++i) {
      if (!reader.next(&line)) {
        throw ParseError(reader.line_no,
                         "unexpected end of file inside frame " +
                             std::to_string(frame_index));
      }
      const auto toks = split_ws(line);
      if (toks.size() != 4) {
        throw ParseError(reader.line_no, "atom line needs 'Symbol x y z'");
      }
      const auto elem = element_from_symbol(toks[0]);
      if (!elem) {
        throw ParseError(reader.line_no, "unknown element symbol '" + toks[0] + "'");
      }
      frame.elements.push_back(*elem);
      for (int k = 0; k < 3; ++k) {
        double v = 0.0;
        if (!parse_double(toks[k + 1], &v) || !std::isfinite(v)) {
          throw ParseError(reader.line_no, "non-numeric coordinate");
        }
        frame.positions(i, k) = v;
      }
    }

    if (!result.trajectory.frames.empty()) {
      const Frame& first = result.trajectory.frames.front();
      if (frame.elements != first.elements) {
        throw ParseError(reader.line_no,
                         "frame " + std::to_string(frame_index) +
                             " has a different atom set than frame 1");
      }
      if (frame.cell.pbc != first.cell.pbc) {
        throw ParseError(reader.line_no,
                         "frame " + std::to_string(frame_index) +
                             " has different pbc flags than frame 1");
      }
    }
    result.trajectory.frames.push_back(std::move(frame));
  }

  if (result.trajectory.frames.empty()) {
    throw ParseError(reader.line_no, "no frames found");
  }
  result.diagnostics.frame_count = result.trajectory.frame_count();
  return result;
}

ExtxyzResult parse_extxyz(const std::string& text, bool strict) {
  std::istringstream in(text);
  return parse_extxyz(in, strict);
}

ExtxyzResult parse_extxyz_file(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_extxyz(in, strict);
}

void write_extxyz(const Trajectory& t, std::ostream& out) {
  for (const Frame& f : t.frames) {
    out << f.atom_count() << "\n";
    std::vector<std::string> parts;
    const bool has_cell = f.cell.periodic() || !f.cell.basis.isZero(0.0);
    if (has_cell) {
      std::string lat = "Lattice=\"";
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          if (r != 0 || c != 0) lat += ' ';
          lat += format_coord(f.cell.basis(r, c));
        }
      }
      lat += '"';
      parts.push_back(std::move(lat));
      std::string pbc = "pbc=\"";
      for (int d = 0; d < 3; ++d) {
        if (d) pbc += ' ';
        pbc += f.cell.pbc[d] ? 'T' : 'F';
      }
      pbc += '"';
      parts.push_back(std::move(pbc));
    }
    if (f.energy) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "energy=%.12g", *f.energy);
      parts.emplace_back(buf);
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) out << ' ';
      out << parts[i];
    }
    out << "\n";
    for (int i = 0; i < f.atom_count(); ++i) {
      out << f.elements[i].symbol() << ' ' << format_coord(f.positions(i, 0))
          << ' ' << format_coord(f.positions(i, 1)) << ' '
          << format_coord(f.positions(i, 2)) << "\n";
    }
  }
}

std::string write_extxyz(const Trajectory& t) {
  std::ostringstream os;
  write_extxyz(t, os);
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

json parse_json_line(const std::string& line, int line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(line_no, std::string("invalid record: ") + e.what());
  }
}

std::string get_string(const json& j, const char* field, int line_no) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw ParseError(line_no, std::string("missing or non-string field '") +
                                  field + "'");
  }
  return j[field].get<std::string>();
}

double get_number(const json& j, const char* field, int line_no) {
  if (!j.contains(field) || !j[field].is_number()) {
    throw ParseError(line_no, std::string("missing or non-numeric field '") +
                                  field + "'");
  }
  return j[field].get<double>();
}

int get_integer(const json& j, const char* field, int line_no) {
  if (!j.contains(field) || !j[field].is_number_integer()) {
    throw ParseError(line_no, std::string("missing or non-integer field '") +
                                  field + "'");
  }
  return j[field].get<int>();
}

std::optional<std::string> opt_string(const json& j, const char* field,
                                      int line_no) {
  if (!j.contains(field) || j[field].is_null()) return std::nullopt;
  if (!j[field].is_string()) {
    throw ParseError(line_no, std::string("non-string field '") + field + "'");
  }
  return j[field].get<std::string>();
}

std::optional<double> opt_number(const json& j, const char* field,
                                 int line_no) {
  if (!j.contains(field) || j[field].is_null()) return std::nullopt;
  if (!j[field].is_number()) {
    throw ParseError(line_no, std::string("non-numeric field '") + field + "'");
  }
  return j[field].get<double>();
}

std::optional<int> opt_integer(const json& j, const char* field, int line_no) {
  if (!j.contains(field) || j[field].is_null()) return std::nullopt;
  if (!j[field].is_number_integer()) {
    throw ParseError(line_no, std::string("non-integer field '") + field + "'");
  }
  return j[field].get<int>();
}

template <typename Row, typename Fn>
std::vector<Row> read_rows(std::istream& in, Fn parse_row) {
  std::vector<Row> out;
  LineReader reader{in};
  std::string line;
  while (reader.next(&line)) {
    if (split_ws(line).empty()) continue;
    out.push_back(parse_row(parse_json_line(line, reader.line_no), reader.line_no));
  }
  return out;
}

}  // namespace

std::vector<GasRecordRow> read_gas_rows(std::istream& in) {
  return read_rows<GasRecordRow>(in, [](const json& j, int line_no) {
    GasRecordRow row;
    row.id = get_string(j, "id", line_no);
    row.reactant_path = get_string(j, "reactant_path", line_no);
    row.ts_path = get_string(j, "ts_path", line_no);
    row.product_path = get_string(j, "product_path", line_no);
    row.reactant_smiles = get_string(j, "reactant_smiles", line_no);
    row.product_smiles = get_string(j, "product_smiles", line_no);
    row.barrier_ev = get_number(j, "barrier_ev", line_no);
    row.enthalpy_ev = get_number(j, "enthalpy_ev", line_no);
    return row;
  });
}

std::vector<CatalyticRecordRow> read_catalytic_rows(std::istream& in) {
  return read_rows<CatalyticRecordRow>(in, [](const json& j, int line_no) {
    CatalyticRecordRow row;
    row.id = get_string(j, "id", line_no);
    row.trajectory_path = get_string(j, "trajectory_path", line_no);
    row.reaction_type = get_string(j, "reaction_type", line_no);
    if (!reaction_type_from_string(row.reaction_type)) {
      throw ParseError(line_no, "unknown reaction_type '" + row.reaction_type +
                                    "' in field 'reaction_type'");
    }
    row.adsorbate_smiles = get_string(j, "adsorbate_smiles", line_no);
    row.product_smiles = get_string(j, "product_smiles", line_no);
    row.ts_step = get_integer(j, "ts_step", line_no);
    row.barrier_ev = get_number(j, "barrier_ev", line_no);
    row.enthalpy_ev = get_number(j, "enthalpy_ev", line_no);
    return row;
  });
}

std::string write_gas_rows(const std::vector<GasRecordRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    ordered_json j;
    j["id"] = r.id;
    j["reactant_path"] = r.reactant_path;
    j["ts_path"] = r.ts_path;
    j["product_path"] = r.product_path;
    j["reactant_smiles"] = r.reactant_smiles;
    j["product_smiles"] = r.product_smiles;
    j["barrier_ev"] = r.barrier_ev;
    j["enthalpy_ev"] = r.enthalpy_ev;
    os << j.dump() << "\n";
  }
  return os.str();
}

std::string write_catalytic_rows(const std::vector<CatalyticRecordRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    ordered_json j;
    j["id"] = r.id;
    j["trajectory_path"] = r.trajectory_path;
    j["reaction_type"] = r.reaction_type;
    j["adsorbate_smiles"] = r.adsorbate_smiles;
    j["product_smiles"] = r.product_smiles;
    j["ts_step"] = r.ts_step;
    j["barrier_ev"] = r.barrier_ev;
    j["enthalpy_ev"] = r.enthalpy_ev;
    os << j.dump() << "\n";
  }
  return os.str();
}

namespace {

Frame load_single_frame(const std::filesystem::path& path) {
  const auto parsed = parse_extxyz_file(path);
  if (parsed.trajectory.frame_count() != 1) {
    throw std::runtime_error(path.string() + ": expected exactly one frame, got " +
                             std::to_string(parsed.trajectory.frame_count()));
  }
  return parsed.trajectory.frames.front();
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& rel) {
  const std::filesystem::path p(rel);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

ReactionRecord load_gas_record(const GasRecordRow& row,
                               const std::filesystem::path& base_dir) {
  ReactionRecord rec;
  rec.id = row.id;
  rec.reactant = load_single_frame(resolve(base_dir, row.reactant_path));
  rec.transition_state = load_single_frame(resolve(base_dir, row.ts_path));
  rec.product = load_single_frame(resolve(base_dir, row.product_path));
  rec.reactant_smiles = row.reactant_smiles;
  rec.product_smiles = row.product_smiles;
  rec.barrier_ev = row.barrier_ev;
  rec.enthalpy_ev = row.enthalpy_ev;
  const auto issues = validate_reaction_record(rec);
  if (!issues.empty()) {
    throw std::runtime_error("record " + rec.id + ": " + issues.front());
  }
  return rec;
}

CatalyticRecord load_catalytic_record(const CatalyticRecordRow& row,
                                      const std::filesystem::path& base_dir) {
  CatalyticRecord rec;
  rec.id = row.id;
  rec.trajectory =
      parse_extxyz_file(resolve(base_dir, row.trajectory_path)).trajectory;
  rec.profile.energies.reserve(rec.trajectory.frames.size());
  for (std::size_t k = 0; k < rec.trajectory.frames.size(); ++k) {
    const auto& e = rec.trajectory.frames[k].energy;
    if (!e) {
      throw std::runtime_error("record " + rec.id + ": frame " +
                               std::to_string(k) + " has no energy");
    }
    rec.profile.energies.push_back(*e);
  }
  const auto type = reaction_type_from_string(row.reaction_type);
  if (!type) {
    throw std::runtime_error("record " + rec.id + ": unknown reaction_type '" +
                             row.reaction_type + "'");
  }
  rec.reaction_type = *type;
  rec.adsorbate_smiles = row.adsorbate_smiles;
  rec.product_smiles = row.product_smiles;
  rec.ts_step = row.ts_step;
  rec.barrier_ev = row.barrier_ev;
  rec.enthalpy_ev = row.enthalpy_ev;
  const auto issues = validate_catalytic_record(rec);
  if (!issues.empty()) {
    throw std::runtime_error("record " + rec.id + ": " + issues.front());
  }
  return rec;
}

std::vector<ReactionRecord> read_gas_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto rows = read_gas_rows(in);
  std::vector<ReactionRecord> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    out.push_back(load_gas_record(row, path.parent_path()));
  }
  return out;
}

std::vector<CatalyticRecord> read_catalytic_records(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto rows = read_catalytic_rows(in);
  std::vector<CatalyticRecord> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    out.push_back(load_catalytic_record(row, path.parent_path()));
  }
  return out;
}

std::vector<GasPrediction> read_gas_predictions(std::istream& in) {
  std::unordered_set<std::string> seen;
  return read_rows<GasPrediction>(in, [&seen](const json& j, int line_no) {
    GasPrediction p;
    p.id = get_string(j, "id", line_no);
    if (!seen.insert(p.id).second) {
      throw ParseError(line_no, "duplicate id '" + p.id + "'");
    }
    p.product_smiles = opt_string(j, "product_smiles", line_no);
    p.barrier_ev = opt_number(j, "barrier_ev", line_no);
    p.enthalpy_ev = opt_number(j, "enthalpy_ev", line_no);
    return p;
  });
}

std::vector<CatalyticPrediction> read_catalytic_predictions(std::istream& in) {
  std::unordered_set<std::string> seen;
  return read_rows<CatalyticPrediction>(in, [&seen](const json& j, int line_no) {
    CatalyticPrediction p;
    p.id = get_string(j, "id", line_no);
    if (!seen.insert(p.id).second) {
      throw ParseError(line_no, "duplicate id '" + p.id + "'");
    }
    p.reaction_type_raw = opt_string(j, "reaction_type", line_no);
    if (p.reaction_type_raw) {
      p.reaction_type = reaction_type_from_string(*p.reaction_type_raw);
    }
    p.adsorbate_smiles = opt_string(j, "adsorbate_smiles", line_no);
    p.product_smiles = opt_string(j, "product_smiles", line_no);
    p.ts_step = opt_integer(j, "ts_step", line_no);
    p.barrier_ev = opt_number(j, "barrier_ev", line_no);
    p.enthalpy_ev = opt_number(j, "enthalpy_ev", line_no);
    return p;
  });
}

std::string write_gas_predictions(const std::vector<GasPrediction>& rows) {
  std::ostringstream os;
  for (const auto& p : rows) {
    ordered_json j;
    j["id"] = p.id;
    if (p.product_smiles) j["product_smiles"] = *p.product_smiles;
    if (p.barrier_ev) j["barrier_ev"] = *p.barrier_ev;
    if (p.enthalpy_ev) j["enthalpy_ev"] = *p.enthalpy_ev;
    os << j.dump() << "\n";
  }
  return os.str();
}

std::string write_catalytic_predictions(
    const std::vector<CatalyticPrediction>& rows) {
  std::ostringstream os;
  for (const auto& p : rows) {
    ordered_json j;
    j["id"] = p.id;
    if (p.reaction_type_raw) j["reaction_type"] = *p.reaction_type_raw;
    if (p.adsorbate_smiles) j["adsorbate_smiles"] = *p.adsorbate_smiles;
    if (p.product_smiles) j["product_smiles"] = *p.product_smiles;
    if (p.ts_step) j["ts_step"] = *p.ts_step;
    if (p.barrier_ev) j["barrier_ev"] = *p.barrier_ev;
    if (p.enthalpy_ev) j["enthalpy_ev"] = *p.enthalpy_ev;
    os << j.dump() << "\n";
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace chemdyn
