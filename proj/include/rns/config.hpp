#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rns/params.hpp"

namespace rns {

// One additive profile for an initial-data field.
struct ProfileSpec {
  std::string field;         // v | u | theta | z
  std::string type;          // gaussian | sine | constant
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;
  int wavenumber = 1;
};

struct InitialDataConfig {
  std::vector<ProfileSpec> profiles;
  std::vector<JumpSpec> v_jumps;
  std::optional<double> target_delta_pert;  // rescale amplitudes to match
};

struct SolverConfig {
  double t_sharp = 0.1;
  double tol = 1e-10;
  int n_max = 12;
  std::string mode = "both";  // picard | reference | both
  double t_end = 1.0;
  int snapshots = 33;
  double nu0 = 0.1;
  double cfl = 0.35;
  int mesh_subdiv = 8;
};

struct SpectralConfig {
  double eta_min = 1e-3;
  double eta_max = 1e3;
  int eta_count = 200;
  std::vector<double> t_list = {0.05, 0.1, 0.2};
  double k_budget = 100.0;
  double probe_min = 1.0;
  double probe_max = 100.0;
};

struct RunConfig {
  GasParameters parameters;
  ReactionRate reaction;
  GridSpec grid;
  InitialDataConfig initial_data;
  SolverConfig solver;
  SpectralConfig spectral;
  std::string output_dir = "runs";
  unsigned long long seed = 1;
};

// Parses and validates a JSON run configuration. Unknown keys, duplicate
// keys, wrong types and missing required keys raise SchemaError with a JSON
// pointer to the offending entry; missing files raise IoError.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Materializes the configured initial data on the configured grid (with
// smallness measured, and amplitudes rescaled if target_delta_pert is set).
InitialData build_initial_data(const RunConfig& cfg);

// FNV-1a hash of the canonical serialized configuration.
std::string config_hash(const RunConfig& cfg);
std::string canonical_json(const RunConfig& cfg);

}  // namespace rns
