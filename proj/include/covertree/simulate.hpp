#pragma once

#include <filesystem>

#include "covertree/rng.hpp"
#include "covertree/run_config.hpp"
#include "covertree/sample_io.hpp"

namespace covertree {

/// Stream for one replica: a hash of (kind, n, replica) and, for event and
/// gamma_tilde rows, of ell and z. Any replica can be regenerated alone.
Rng replica_stream(const RunConfig& cfg, SampleKind kind, std::uint64_t replica);

/// Rows for replicas [replica_start, replica_start + replicas) of cfg.kind,
/// in replica order. The result depends only on the config, never on
/// cfg.workers. A row that hits a cap is kept with status "cap_exceeded".
SampleFile simulate_rows(const RunConfig& cfg);

/// simulate_rows appended to output_path(cfg); returns the path written.
std::filesystem::path cmd_simulate(const RunConfig& cfg);

}  // namespace covertree
