#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace covertree {

inline constexpr int kSchemaVersion = 1;

enum class SampleKind { cover, tstar, brw_xprime, event, gamma_tilde };

std::string_view kind_name(SampleKind kind);
/// Throws DomainError for an unknown name.
SampleKind parse_kind(std::string_view name);
/// Per-kind value columns, in file order.
std::span<const std::string_view> value_columns(SampleKind kind);
/// Whether rows of this kind carry ell and z.
bool uses_ell_z(SampleKind kind);

/// One CSV record. Values are stored already formatted so that a read-write
/// round trip is byte-exact.
struct SampleRow {
  int schema_version = kSchemaVersion;
  SampleKind kind = SampleKind::tstar;
  int n = 0;
  int ell = 0;
  double z = 0.0;
  std::uint64_t replica = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::vector<std::string> values;

  /// Identity of a row: (kind, seed, replica, n), extended by (ell, z) for
  /// the kinds that carry them.
  auto key() const { return std::tuple(static_cast<int>(kind), seed, replica, n, ell, z); }
  bool ok() const { return status == "ok"; }
  /// Value of a named column as a number; throws DataError if missing or empty.
  double number(std::string_view column) const;
};

/// Shortest round-trip decimal form.
std::string format_number(double x);
std::string format_number(std::uint64_t x);

std::string header_line(SampleKind kind);
std::string format_row(const SampleRow& row);

struct SampleFile {
  SampleKind kind = SampleKind::tstar;
  std::vector<SampleRow> rows;
};

/// Throws DataError on a malformed file, or one whose header does not match a kind.
SampleFile read_samples(const std::filesystem::path& path);

/// Writes header and rows (truncating).
void write_samples(const std::filesystem::path& path, const SampleFile& file);

/// Appends rows to `path`, creating it with a header if absent. Rows whose
/// key is already present raise ConflictError before anything is written.
void append_samples(const std::filesystem::path& path, const SampleFile& file);

/// Union of files of one kind, ordered by key. Duplicate keys raise
/// ConflictError, so merging a file with itself is rejected.
SampleFile merge_samples(std::span<const SampleFile> files);

/// Values of one column over the rows with status ok.
std::vector<double> column(const SampleFile& file, std::string_view name);

}  // namespace covertree
