#pragma once

#include "chemdyn/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chemdyn {

/// Parse failure with location. `line` is 1-based; 0 when unknown.
struct ParseError : std::runtime_error {
  ParseError(int line_number, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_number) + ": " +
                           message),
        line(line_number) {}
  int line;
};

struct ParseDiagnostics {
  std::vector<std::pair<int, std::string>> warnings;  // (line, message)
  int frame_count = 0;
};

struct ExtxyzResult {
  Trajectory trajectory;
  ParseDiagnostics diagnostics;
};

/// Multi-frame extended XYZ. Per frame: an atom-count line, a key=value
/// comment line (Lattice="ax ay az bx by bz cx cy cz", pbc="T T F",
/// energy=<real>; unknown keys are kept as warnings), then one
/// "Symbol x y z" line per atom. Missing Lattice/pbc means non-periodic.
/// With strict=true, unknown comment keys become errors.
ExtxyzResult parse_extxyz(std::istream& in, bool strict = false);
ExtxyzResult parse_extxyz(const std::string& text, bool strict = false);
ExtxyzResult parse_extxyz_file(const std::filesystem::path& path,
                               bool strict = false);

/// Emits LF-terminated extended XYZ with 6-decimal coordinates; parsing the
/// result reproduces the trajectory to 1e-6 A.
std::string write_extxyz(const Trajectory& t);
void write_extxyz(const Trajectory& t, std::ostream& out);

// ---------------------------------------------------------------------------
// Line-delimited benchmark records (one JSON object per line).

/// Gas-phase record row as stored on disk; geometry is referenced by path.
struct GasRecordRow {
  std::string id;
  std::string reactant_path;
  std::string ts_path;
  std::string product_path;
  std::string reactant_smiles;
  std::string product_smiles;
  double barrier_ev = 0.0;
  double enthalpy_ev = 0.0;
};

/// Catalytic record row; the trajectory file carries per-frame energies
/// that become the record's energy profile.
struct CatalyticRecordRow {
  std::string id;
  std::string trajectory_path;
  std::string reaction_type;
  std::string adsorbate_smiles;
  std::string product_smiles;
  int ts_step = 0;
  double barrier_ev = 0.0;
  double enthalpy_ev = 0.0;
};

std::vector<GasRecordRow> read_gas_rows(std::istream& in);
std::vector<CatalyticRecordRow> read_catalytic_rows(std::istream& in);
std::string write_gas_rows(const std::vector<GasRecordRow>& rows);
std::string write_catalytic_rows(const std::vector<CatalyticRecordRow>& rows);

/// Loads the referenced geometry (relative paths resolve against base_dir)
/// and validates the assembled record. Throws ParseError / runtime_error on
/// I/O or validation failure.
ReactionRecord load_gas_record(const GasRecordRow& row,
                               const std::filesystem::path& base_dir);
CatalyticRecord load_catalytic_record(const CatalyticRecordRow& row,
                                      const std::filesystem::path& base_dir);

/// Eager file readers: rows plus geometry in one call.
std::vector<ReactionRecord> read_gas_records(const std::filesystem::path& path);
std::vector<CatalyticRecord> read_catalytic_records(
    const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Prediction rows. Missing numeric fields stay absent rather than zero.

struct GasPrediction {
  std::string id;
  std::optional<std::string> product_smiles;
  std::optional<double> barrier_ev;
  std::optional<double> enthalpy_ev;
};

struct CatalyticPrediction {
  std::string id;
  std::optional<std::string> reaction_type_raw;
  std::optional<ReactionType> reaction_type;  // empty when raw is unknown
  std::optional<std::string> adsorbate_smiles;
  std::optional<std::string> product_smiles;
  std::optional<int> ts_step;
  std::optional<double> barrier_ev;
  std::optional<double> enthalpy_ev;
};

/// Unknown reaction_type strings keep the row with reaction_type empty (the
/// row then counts as a wrong type). Duplicate ids are an error.
std::vector<GasPrediction> read_gas_predictions(std::istream& in);
std::vector<CatalyticPrediction> read_catalytic_predictions(std::istream& in);
std::string write_gas_predictions(const std::vector<GasPrediction>& rows);
std::string write_catalytic_predictions(
    const std::vector<CatalyticPrediction>& rows);

/// Writes text to `path` atomically (temp file + rename), creating parent
/// directories as needed.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace chemdyn
