#pragma once

// Molecular integrals and the FCIDUMP interchange format.
//
// Two-body integrals are stored in chemist notation (pq|rs) over spatial
// orbitals, densely, with all eight real-orbital permutation images filled.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gaugekit/error.hpp"
#include "gaugekit/pauli.hpp"

namespace gaugekit {

class MolecularIntegrals {
 public:
  MolecularIntegrals() = default;
  MolecularIntegrals(int n_spatial_orbitals, int n_electrons)
      : n_orb_(n_spatial_orbitals),
        n_elec_(n_electrons),
        one_(static_cast<std::size_t>(n_spatial_orbitals) * n_spatial_orbitals, 0.0),
        two_(static_cast<std::size_t>(n_spatial_orbitals) * n_spatial_orbitals * n_spatial_orbitals *
                 n_spatial_orbitals,
             0.0) {
    if (n_spatial_orbitals < 1 || n_spatial_orbitals > 32) throw Error("MolecularIntegrals: bad orbital count");
    if (n_electrons < 0 || n_electrons > 2 * n_spatial_orbitals)
      throw Error("MolecularIntegrals: electron count out of range");
  }

  int n_spatial_orbitals() const { return n_orb_; }
  int n_spin_orbitals() const { return 2 * n_orb_; }
  int n_electrons() const { return n_elec_; }

  double core_energy = 0.0;
  std::optional<double> bond_distance;

  double one_body(int p, int q) const { return one_[idx2(p, q)]; }
  double two_body(int p, int q, int r, int s) const { return two_[idx4(p, q, r, s)]; }

  void set_one_body(int p, int q, double v) {
    one_[idx2(p, q)] = v;
    one_[idx2(q, p)] = v;
  }

  /// Sets (pq|rs) and its seven permutation images.
  void set_two_body(int p, int q, int r, int s, double v) {
    for (const auto& [a, b, c, d] : images(p, q, r, s)) two_[idx4(a, b, c, d)] = v;
  }

  static std::array<std::array<int, 4>, 8> images(int p, int q, int r, int s) {
    return {{{p, q, r, s}, {q, p, r, s}, {p, q, s, r}, {q, p, s, r},
             {r, s, p, q}, {s, r, p, q}, {r, s, q, p}, {s, r, q, p}}};
  }

  /// Checks the invariants: symmetric one-body and 8-fold symmetric two-body tensors.
  void validate(double tol = 1e-10) const {
    if (n_elec_ <= 0 || n_elec_ > 2 * n_orb_) throw Error("MolecularIntegrals: electron count out of range");
    for (int p = 0; p < n_orb_; ++p)
      for (int q = 0; q < n_orb_; ++q)
        if (std::abs(one_body(p, q) - one_body(q, p)) > tol) throw Error("MolecularIntegrals: one-body not symmetric");
    for (int p = 0; p < n_orb_; ++p)
      for (int q = 0; q < n_orb_; ++q)
        for (int r = 0; r < n_orb_; ++r)
          for (int s = 0; s < n_orb_; ++s)
            for (const auto& [a, b, c, d] : images(p, q, r, s))
              if (std::abs(two_body(a, b, c, d) - two_body(p, q, r, s)) > tol)
                throw Error("MolecularIntegrals: two-body lacks permutation symmetry");
  }

 private:
  std::size_t idx2(int p, int q) const {
    check(p), check(q);
    return static_cast<std::size_t>(p) * n_orb_ + q;
  }
  std::size_t idx4(int p, int q, int r, int s) const {
    check(p), check(q), check(r), check(s);
    const auto m = static_cast<std::size_t>(n_orb_);
    return ((static_cast<std::size_t>(p) * m + q) * m + r) * m + s;
  }
  void check(int p) const {
    if (p < 0 || p >= n_orb_) throw Error("MolecularIntegrals: orbital index out of range");
  }

  int n_orb_ = 0;
  int n_elec_ = 0;
  std::vector<double> one_;
  std::vector<double> two_;
};

namespace detail {

inline std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

inline std::optional<int> namelist_int(const std::string& header, const std::string& key) {
  const std::regex re("(^|[^A-Z0-9_])" + key + R"(\s*=\s*(-?\d+))");
  std::smatch m;
  if (!std::regex_search(header, m, re)) return std::nullopt;
  return std::stoi(m[2].str());
}

inline double parse_fortran_double(std::string tok) {
  std::replace(tok.begin(), tok.end(), 'D', 'E');
  std::replace(tok.begin(), tok.end(), 'd', 'e');
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw std::invalid_argument(tok);
  return v;
}

}  // namespace detail

/// Reads the FCIDUMP convention: a namelist header carrying NORB and NELEC,
/// then "value p q r s" lines with 1-based indices. "value p q 0 0" is a
/// one-body entry, "value 0 0 0 0" the core energy, "value p 0 0 0" an orbital
/// energy (ignored).
inline MolecularIntegrals parse_fcidump(std::istream& in) {
  std::string line, header;
  int line_no = 0;
  bool started = false, closed = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string u = detail::upper(line);
    if (!started) {
      if (u.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (u.find("&FCI") == std::string::npos)
        throw Error("line " + std::to_string(line_no) + ": expected '&FCI' namelist header");
      started = true;
    }
    header += u + ' ';
    std::string trimmed = u;
    trimmed.erase(std::remove_if(trimmed.begin(), trimmed.end(), [](unsigned char c) { return std::isspace(c); }),
                  trimmed.end());
    if (u.find("&END") != std::string::npos || u.find("$END") != std::string::npos || trimmed == "/" ||
        (!trimmed.empty() && trimmed.back() == '/')) {
      closed = true;
      break;
    }
  }
  if (!started) throw Error("malformed header: empty input");
  if (!closed) throw Error("malformed header: namelist never terminated");
  const auto norb = detail::namelist_int(header, "NORB");
  const auto nelec = detail::namelist_int(header, "NELEC");
  if (!norb || !nelec) throw Error("malformed header: NORB and NELEC are required");
  if (*norb < 1) throw Error("malformed header: NORB must be positive");
  if (*nelec < 1 || *nelec > 2 * *norb) throw Error("malformed header: NELEC out of range");

  MolecularIntegrals ints(*norb, *nelec);
  const int m = *norb;
  const auto mm = static_cast<std::size_t>(m);
  std::vector<char> seen1(mm * mm, 0), seen2(mm * mm * mm * mm, 0);
  bool core_seen = false;
  constexpr double kConsistency = 1e-10;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    double value = 0.0;
    int idx[4];
    try {
      value = detail::parse_fortran_double(tok);
    } catch (const std::exception&) {
      throw Error(where + "bad numeric value '" + tok + "'");
    }
    for (int& k : idx)
      if (!(ls >> k)) throw Error(where + "expected four indices");
    for (int k : idx)
      if (k < 0 || k > m) throw Error(where + "index out of range");
    const int p = idx[0] - 1, q = idx[1] - 1, r = idx[2] - 1, s = idx[3] - 1;
    const int nonzero = (idx[0] > 0) + (idx[1] > 0) + (idx[2] > 0) + (idx[3] > 0);

    if (nonzero == 0) {
      if (core_seen && std::abs(ints.core_energy - value) > kConsistency)
        throw Error(where + "duplicate inconsistent core energy");
      ints.core_energy = value;
      core_seen = true;
    } else if (nonzero == 4) {
      const auto imgs = MolecularIntegrals::images(p, q, r, s);
      for (const auto& [a, b, c, d] : imgs) {
        const std::size_t k = ((static_cast<std::size_t>(a) * mm + b) * mm + c) * mm + d;
        if (seen2[k] && std::abs(ints.two_body(a, b, c, d) - value) > kConsistency)
          throw Error(where + "duplicate inconsistent two-body entry");
      }
      for (const auto& [a, b, c, d] : imgs) seen2[((static_cast<std::size_t>(a) * mm + b) * mm + c) * mm + d] = 1;
      ints.set_two_body(p, q, r, s, value);
    } else if (idx[0] > 0 && idx[1] > 0 && idx[2] == 0 && idx[3] == 0) {
      if (seen1[static_cast<std::size_t>(p) * mm + q] && std::abs(ints.one_body(p, q) - value) > kConsistency)
        throw Error(where + "duplicate inconsistent one-body entry");
      seen1[static_cast<std::size_t>(p) * mm + q] = seen1[static_cast<std::size_t>(q) * mm + p] = 1;
      ints.set_one_body(p, q, value);
    } else if (idx[0] > 0 && nonzero == 1) {
      // orbital energy; not needed
    } else {
      throw Error(where + "unrecognised index pattern");
    }
  }
  return ints;
}

inline MolecularIntegrals parse_fcidump(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

inline MolecularIntegrals load_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(path.string() + ": cannot open file");
  try {
    return parse_fcidump(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

/// Writes integrals back out; the inverse of parse_fcidump up to dropped zeros.
inline std::string write_fcidump(const MolecularIntegrals& ints, double tol = 1e-15) {
  std::ostringstream out;
  const int m = ints.n_spatial_orbitals();
  out << " &FCI NORB=" << m << ",NELEC=" << ints.n_electrons() << ",MS2=0,\n  ORBSYM=";
  for (int p = 0; p < m; ++p) out << "1,";
  out << "\n  ISYM=1,\n &END\n";
  for (int p = 0; p < m; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s <= r; ++s) {
          if (p * (p + 1) / 2 + q < r * (r + 1) / 2 + s) continue;
          const double v = ints.two_body(p, q, r, s);
          if (std::abs(v) > tol)
            out << format_double(v) << ' ' << p + 1 << ' ' << q + 1 << ' ' << r + 1 << ' ' << s + 1 << '\n';
        }
  for (int p = 0; p < m; ++p)
    for (int q = 0; q <= p; ++q)
      if (std::abs(ints.one_body(p, q)) > tol) out << format_double(ints.one_body(p, q)) << ' ' << p + 1 << ' ' << q + 1 << " 0 0\n";
  out << format_double(ints.core_energy) << " 0 0 0 0\n";
  return out.str();
}

/// Orbitals removed at ingestion. Frozen orbitals must be doubly occupied in
/// the aufbau determinant; their mean field is folded into the core energy and
/// the one-body integrals. Dropped orbitals must be empty and are discarded.
struct ActiveSpace {
  std::vector<int> frozen;
  std::vector<int> dropped;
  bool empty() const { return frozen.empty() && dropped.empty(); }
};

inline MolecularIntegrals apply_active_space(const MolecularIntegrals& in, const ActiveSpace& space) {
  if (space.empty()) return in;
  const int m = in.n_spatial_orbitals();
  const int n_docc = in.n_electrons() / 2;
  const int highest_occupied = (in.n_electrons() + 1) / 2 - 1;
  std::set<int> frozen(space.frozen.begin(), space.frozen.end());
  std::set<int> dropped(space.dropped.begin(), space.dropped.end());
  for (int c : frozen)
    if (c < 0 || c >= n_docc) throw Error("active space: frozen orbital " + std::to_string(c) + " is not doubly occupied");
  for (int v : dropped) {
    if (v < 0 || v >= m) throw Error("active space: dropped orbital " + std::to_string(v) + " out of range");
    if (v <= highest_occupied) throw Error("active space: dropped orbital " + std::to_string(v) + " is occupied");
  }
  std::vector<int> active;
  for (int p = 0; p < m; ++p)
    if (!frozen.count(p) && !dropped.count(p)) active.push_back(p);
  if (active.empty()) throw Error("active space: no orbitals left");
  const int n_elec = in.n_electrons() - 2 * static_cast<int>(frozen.size());
  if (n_elec <= 0) throw Error("active space: no electrons left");

  MolecularIntegrals out(static_cast<int>(active.size()), n_elec);
  out.bond_distance = in.bond_distance;
  double core = in.core_energy;
  for (int c : frozen) {
    core += 2.0 * in.one_body(c, c);
    for (int d : frozen) core += 2.0 * in.two_body(c, c, d, d) - in.two_body(c, d, d, c);
  }
  out.core_energy = core;
  const int na = static_cast<int>(active.size());
  for (int i = 0; i < na; ++i)
    for (int j = 0; j <= i; ++j) {
      const int p = active[i], q = active[j];
      double h = in.one_body(p, q);
      for (int c : frozen) h += 2.0 * in.two_body(p, q, c, c) - in.two_body(p, c, c, q);
      out.set_one_body(i, j, h);
    }
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      for (int k = 0; k < na; ++k)
        for (int l = 0; l < na; ++l)
          out.set_two_body(i, j, k, l, in.two_body(active[i], active[j], active[k], active[l]));
  return out;
}

}  // namespace gaugekit
