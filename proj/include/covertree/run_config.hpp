#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "covertree/barrier_events.hpp"
#include "covertree/excursion_gw.hpp"

namespace covertree {

/// Pass/fail policy. The finite-n tolerances are choices of this tool, not
/// properties of the limit laws.
struct Thresholds {
  double ks_stability = 0.05;
  double ks_mixture = 0.05;
  double ks_shift = 0.06;
  double tail_c_lo = 1.0;
  double tail_c_hi = 1.35;
  double sigma_probability = 4.0;
  double sigma_closed_form = 3.0;
  double variance_relative = 0.03;
  double chi_square_p = 1e-3;
  double identity_relative = 1e-10;
};

struct Caps {
  std::uint64_t steps = 0;  ///< 0 selects the engine default
  std::uint64_t excursions = kDefaultExcursionCap;
};

struct RunConfig {
  std::string command;
  std::string kind;
  int n = 10;
  int ell = 4;
  double z = 1.0;
  std::optional<std::uint64_t> s;  ///< overrides floor(s_{n,z}) for event runs
  std::uint64_t replicas = 1000;
  std::uint64_t replica_start = 0;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::vector<std::string> inputs;
  std::string out;
  double delta = kDefaultDelta;
  Thresholds thresholds;
  Caps caps;
  // gamma_tilde grid: replica i sits at y_min + i * y_step.
  double y_min = 0.0;
  double y_step = 0.25;
  std::uint64_t inner_replicas = 10000;
  // fit tail window
  double z_lo = 1.0;
  double z_hi = 3.5;
  /// Multiplies the sample sizes of the verify suites.
  double scale = 1.0;

  /// Throws DomainError on an inconsistent configuration.
  void validate() const;
};

/// $COVERTREE_DATA_DIR, or the working directory.
std::filesystem::path default_data_dir();

/// Output path for a simulate run: cfg.out if given (relative paths are taken
/// as they are), otherwise <data dir>/<kind>_n<n>_seed<seed>.csv.
std::filesystem::path output_path(const RunConfig& cfg);

}  // namespace covertree
