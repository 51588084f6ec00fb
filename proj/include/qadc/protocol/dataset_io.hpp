#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/common/format.hpp"
#include "qadc/linop/types.hpp"
#include "qadc/protocol/records.hpp"

namespace qadc::protocol {

inline constexpr const char* kQuantumHeader = "phase_index,phase_rad,shot_index,m6,m5,m4,m3,m2,m1,m0,b1,b2,b3";
inline constexpr const char* kClassicalHeader = "phase_index,phase_rad,shot_index,c6,c5,c4,c3,c2,c1,c0";

inline void write_quantum_csv(std::ostream& os, const QuantumDataset& d) {
  os << kQuantumHeader << '\n';
  for (std::size_t j = 0; j < d.n_phases(); ++j) {
    const std::string prefix = std::to_string(j) + ',' + fmt12(d.phases[j]) + ',';
    for (const auto& s : d.shots[j]) {
      os << prefix << s.shot_index;
      for (int i = 6; i >= 0; --i) os << ',' << s.record.bit(i);
      os << ',' << s.record.b1() << ',' << s.record.b2() << ',' << s.record.b3() << '\n';
    }
  }
}

inline void write_classical_csv(std::ostream& os, const ClassicalDataset& d) {
  os << kClassicalHeader << '\n';
  for (std::size_t j = 0; j < d.n_phases(); ++j) {
    const std::string prefix = std::to_string(j) + ',' + fmt12(d.phases[j]) + ',';
    for (const auto& s : d.shots[j]) {
      os << prefix << s.shot_index;
      for (int i = 6; i >= 0; --i) os << ',' << ((s.c >> i) & 1);
      os << '\n';
    }
  }
}

namespace detail {

struct CsvRow {
  std::size_t phase_index = 0;
  double phase = 0.0;
  std::uint64_t shot_index = 0;
  std::vector<int> bits;
  std::size_t line = 0;
};

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& s, std::size_t row, const char* what) {
  try {
    std::size_t used = 0;
    T v;
    if constexpr (std::is_floating_point_v<T>) v = std::stod(s, &used);
    else v = static_cast<T>(std::stoull(s, &used));
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(row, std::string("bad ") + what + " '" + s + "'");
  }
}

/// Reads the rows of either dataset format; `n_bits` columns follow shot_index.
inline std::vector<CsvRow> read_rows(std::istream& is, const std::string& header, std::size_t n_bits) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw ParseError(1, "unexpected header '" + line + "'");
  std::vector<CsvRow> rows;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 3 + n_bits)
      throw ParseError(row, "expected " + std::to_string(3 + n_bits) + " fields, got " + std::to_string(cells.size()));
    CsvRow r;
    r.line = row;
    r.phase_index = parse_number<std::size_t>(cells[0], row, "phase_index");
    r.phase = parse_number<double>(cells[1], row, "phase_rad");
    r.shot_index = parse_number<std::uint64_t>(cells[2], row, "shot_index");
    if (!(r.phase >= 0.0 && r.phase < kTwoPi)) throw ParseError(row, "phase_rad outside [0, 2pi)");
    for (std::size_t k = 0; k < n_bits; ++k) {
      if (cells[3 + k] != "0" && cells[3 + k] != "1") throw ParseError(row, "bit field is not 0/1");
      r.bits.push_back(cells[3 + k] == "1");
    }
    if (!rows.empty() && r.phase_index == rows.back().phase_index && r.shot_index <= rows.back().shot_index)
      throw ParseError(row, "shot_index not increasing within a phase");
    if (!rows.empty() && r.phase_index < rows.back().phase_index)
      throw ParseError(row, "phase_index not sorted");
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Phase grid of a dataset with `n` phases: taken from the rows where present,
/// otherwise the uniform grid value.
template <class Shot>
void shape_dataset(Dataset<Shot>& d, std::size_t n) {
  d.phases.resize(n);
  for (std::size_t j = 0; j < n; ++j) d.phases[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
  d.shots.assign(n, {});
  d.stats.assign(n, {});
}

}  // namespace detail

/// `n_phases` = 0 infers the grid size from the largest phase_index.
inline QuantumDataset read_quantum_csv(std::istream& is, std::size_t n_phases = 0) {
  const auto rows = detail::read_rows(is, kQuantumHeader, 10);
  std::size_t n = n_phases;
  for (const auto& r : rows) n = std::max(n, r.phase_index + 1);
  QuantumDataset d;
  detail::shape_dataset(d, n);
  for (const auto& r : rows) {
    std::uint8_t m = 0;
    for (int k = 0; k < 7; ++k) m |= static_cast<std::uint8_t>(r.bits[k] << (6 - k));
    const ShotRecord rec{m};
    if (r.bits[7] != rec.b1() || r.bits[8] != rec.b2() || r.bits[9] != rec.b3())
      throw ParseError(r.line, "b columns disagree with m");
    d.phases[r.phase_index] = r.phase;
    d.shots[r.phase_index].push_back({r.shot_index, rec});
  }
  for (std::size_t j = 0; j < n; ++j) d.stats[j].valid = d.shots[j].size();
  return d;
}

inline ClassicalDataset read_classical_csv(std::istream& is, std::size_t n_phases = 0) {
  const auto rows = detail::read_rows(is, kClassicalHeader, 7);
  std::size_t n = n_phases;
  for (const auto& r : rows) n = std::max(n, r.phase_index + 1);
  ClassicalDataset d;
  detail::shape_dataset(d, n);
  for (const auto& r : rows) {
    std::uint8_t c = 0;
    for (int k = 0; k < 7; ++k) c |= static_cast<std::uint8_t>(r.bits[k] << (6 - k));
    d.phases[r.phase_index] = r.phase;
    d.shots[r.phase_index].push_back({r.shot_index, c});
  }
  for (std::size_t j = 0; j < n; ++j) d.stats[j].valid = d.shots[j].size();
  return d;
}

}  // namespace qadc::protocol
