#include "covertree/sample_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "covertree/errors.hpp"

namespace covertree {

namespace {

constexpr std::array<std::string_view, 5> kNames{"cover", "tstar", "brw_xprime", "event", "gamma_tilde"};

constexpr std::array<std::string_view, 5> kCover{"t_star", "cover_steps", "steps_at_s", "y_cover", "y_tstar"};
constexpr std::array<std::string_view, 2> kTStar{"t_star", "y_tstar"};
constexpr std::array<std::string_view, 4> kBrw{"x_prime", "gbar", "x", "x_tilde"};
constexpr std::array<std::string_view, 4> kEvent{"lambda", "gamma", "g_event", "uncovered"};
constexpr std::array<std::string_view, 4> kGamma{"y", "estimate", "stderr", "replicas"};

constexpr std::string_view kFixed = "schema_version,kind,n,ell,z,replica,seed,status";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

template <class T>
T parse_int(const std::string& s, const std::string& where) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw DataError(where + ": bad integer '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": bad number '" + s + "'");
  }
}

void write_rows(std::ostream& os, std::span<const SampleRow> rows) {
  for (const auto& r : rows) os << format_row(r) << '\n';
}

}  // namespace

std::string_view kind_name(SampleKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

SampleKind parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<SampleKind>(i);
  }
  throw DomainError("unknown sample kind '" + std::string(name) + "'");
}

std::span<const std::string_view> value_columns(SampleKind kind) {
  switch (kind) {
    case SampleKind::cover: return kCover;
    case SampleKind::tstar: return kTStar;
    case SampleKind::brw_xprime: return kBrw;
    case SampleKind::event: return kEvent;
    case SampleKind::gamma_tilde: return kGamma;
  }
  return {};
}

bool uses_ell_z(SampleKind kind) { return kind == SampleKind::event || kind == SampleKind::gamma_tilde; }

double SampleRow::number(std::string_view name) const {
  const auto cols = value_columns(kind);
  const auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw DataError("column '" + std::string(name) + "' not in " + std::string(kind_name(kind)));
  const auto& v = values.at(static_cast<std::size_t>(it - cols.begin()));
  if (v.empty()) throw DataError("column '" + std::string(name) + "' is empty in replica " + std::to_string(replica));
  return parse_double(v, std::string(name));
}

std::string format_number(double x) {
  std::array<char, 32> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), p);
}

std::string format_number(std::uint64_t x) { return std::to_string(x); }

std::string header_line(SampleKind kind) {
  std::string h(kFixed);
  for (auto c : value_columns(kind)) {
    h += ',';
    h += c;
  }
  return h;
}

std::string format_row(const SampleRow& r) {
  std::string s = std::to_string(r.schema_version);
  s += ',';
  s += kind_name(r.kind);
  s += ',' + std::to_string(r.n) + ',';
  if (uses_ell_z(r.kind)) s += std::to_string(r.ell);
  s += ',';
  if (uses_ell_z(r.kind)) s += format_number(r.z);
  s += ',' + std::to_string(r.replica) + ',' + std::to_string(r.seed) + ',' + r.status;
  for (const auto& v : r.values) s += ',' + v;
  return s;
}

SampleFile read_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  SampleFile file;
  bool matched = false;
  for (std::size_t i = 0; i < kNames.size() && !matched; ++i) {
    if (line == header_line(static_cast<SampleKind>(i))) {
      file.kind = static_cast<SampleKind>(i);
      matched = true;
    }
  }
  if (!matched) throw DataError(path.string() + ": unrecognized header '" + line + "'");
  const std::size_t width = 8 + value_columns(file.kind).size();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    auto f = split(line);
    if (f.size() != width) throw DataError(where + ": expected " + std::to_string(width) + " fields");
    SampleRow r;
    r.schema_version = parse_int<int>(f[0], where);
    if (r.schema_version != kSchemaVersion) throw DataError(where + ": unsupported schema version");
    if (f[1] != kind_name(file.kind)) throw DataError(where + ": kind differs from header");
    r.kind = file.kind;
    r.n = parse_int<int>(f[2], where);
    if (uses_ell_z(r.kind)) {
      r.ell = parse_int<int>(f[3], where);
      r.z = parse_double(f[4], where);
    }
    r.replica = parse_int<std::uint64_t>(f[5], where);
    r.seed = parse_int<std::uint64_t>(f[6], where);
    r.status = f[7];
    r.values.assign(std::make_move_iterator(f.begin() + 8), std::make_move_iterator(f.end()));
    file.rows.push_back(std::move(r));
  }
  return file;
}

void write_samples(const std::filesystem::path& path, const SampleFile& file) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << header_line(file.kind) << '\n';
  write_rows(out, file.rows);
  if (!out) throw DataError("write failed: " + path.string());
}

void append_samples(const std::filesystem::path& path, const SampleFile& file) {
  if (!std::filesystem::exists(path)) {
    write_samples(path, file);
    return;
  }
  const SampleFile existing = read_samples(path);
  if (existing.kind != file.kind) {
    throw ConflictError(path.string() + " holds " + std::string(kind_name(existing.kind)) + " rows, not " +
                        std::string(kind_name(file.kind)));
  }
  std::set<decltype(SampleRow{}.key())> keys;
  for (const auto& r : existing.rows) keys.insert(r.key());
  for (const auto& r : file.rows) {
    if (keys.count(r.key())) {
      throw ConflictError(path.string() + " already has replica " + std::to_string(r.replica) + " for seed " +
                          std::to_string(r.seed));
    }
  }
  std::ofstream out(path, std::ios::app);
  write_rows(out, file.rows);
  if (!out) throw DataError("write failed: " + path.string());
}

SampleFile merge_samples(std::span<const SampleFile> files) {
  if (files.empty()) throw DataError("merge: no input files");
  SampleFile out;
  out.kind = files.front().kind;
  std::map<decltype(SampleRow{}.key()), const SampleRow*> by_key;
  for (const auto& f : files) {
    if (f.kind != out.kind) throw ConflictError("merge: files hold different kinds");
    for (const auto& r : f.rows) {
      if (!by_key.emplace(r.key(), &r).second) {
        throw ConflictError("merge: duplicate row (seed " + std::to_string(r.seed) + ", replica " +
                            std::to_string(r.replica) + ", n " + std::to_string(r.n) + ")");
      }
    }
  }
  for (const auto& [k, r] : by_key) out.rows.push_back(*r);
  return out;
}

std::vector<double> column(const SampleFile& file, std::string_view name) {
  std::vector<double> out;
  for (const auto& r : file.rows) {
    if (r.ok()) out.push_back(r.number(name));
  }
  return out;
}

}  // namespace covertree
