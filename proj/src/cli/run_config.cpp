#include "covertree/run_config.hpp"

#include <cstdlib>

#include "covertree/errors.hpp"
#include "covertree/sample_io.hpp"

namespace covertree {

void RunConfig::validate() const {
  if (replicas < 1) throw DomainError("replicas must be >= 1");
  if (!(delta > 0.0 && delta < 1.0 / 6.0)) throw DomainError("delta must lie in (0, 1/6)");
  if (workers < 1) throw DomainError("workers must be >= 1");
  if (n < 0) throw DomainError("n must be >= 0");
  if (!(y_step > 0.0)) throw DomainError("y-step must be positive");
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  if (inner_replicas < 1) throw DomainError("inner replicas must be >= 1");
  if (replica_start + replicas < replica_start) throw DomainError("replica range overflows");
}

std::filesystem::path default_data_dir() {
  if (const char* d = std::getenv("COVERTREE_DATA_DIR"); d && *d) return d;
  return std::filesystem::current_path();
}

std::filesystem::path output_path(const RunConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  std::string name = cfg.kind + "_n" + std::to_string(cfg.n);
  if (uses_ell_z(parse_kind(cfg.kind))) name += "_ell" + std::to_string(cfg.ell) + "_z" + format_number(cfg.z);
  name += "_seed" + std::to_string(cfg.seed) + ".csv";
  return default_data_dir() / name;
}

}  // namespace covertree
