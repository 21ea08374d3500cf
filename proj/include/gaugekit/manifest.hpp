#pragma once

// Fixture manifests: a JSON file listing FCIDUMP paths, bond distances and
// SHA-256 checksums next to the files themselves.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "gaugekit/error.hpp"
#include "gaugekit/fcidump.hpp"
#include "gaugekit/fermion.hpp"
#include "json.hpp"

namespace gaugekit {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

struct ManifestPoint {
  std::filesystem::path path;
  double distance = 0.0;
  std::string sha256;
  std::optional<double> hf_energy, fci_energy, casci_energy;
};

struct Manifest {
  std::string molecule;
  std::filesystem::path directory;
  Mapping mapping = Mapping::bravyi_kitaev;
  ActiveSpace active_space;
  std::vector<ManifestPoint> points;

  /// Loads the point, checks its checksum, applies the active space.
  MolecularIntegrals load(const ManifestPoint& p, bool verify = true) const {
    const std::string bytes = read_file(p.path);
    if (verify && !p.sha256.empty() && sha256_hex(bytes) != p.sha256)
      throw Error(p.path.string() + ": checksum mismatch");
    MolecularIntegrals ints;
    try {
      ints = parse_fcidump(bytes);
    } catch (const Error& e) {
      throw Error(p.path.string() + ": " + e.what());
    }
    ints.bond_distance = p.distance;
    return apply_active_space(ints, active_space);
  }

  const ManifestPoint& nearest(double distance) const {
    if (points.empty()) throw Error("manifest has no points");
    const ManifestPoint* best = &points.front();
    for (const auto& p : points)
      if (std::abs(p.distance - distance) < std::abs(best->distance - distance)) best = &p;
    return *best;
  }
};

inline Manifest load_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  Manifest m;
  m.directory = path.parent_path();
  try {
    m.molecule = j.value("molecule", std::string{});
    if (j.contains("mapping")) m.mapping = parse_mapping(j.at("mapping").get<std::string>());
    if (j.contains("active_space")) {
      const auto& a = j.at("active_space");
      m.active_space.frozen = a.value("frozen", std::vector<int>{});
      m.active_space.dropped = a.value("dropped", std::vector<int>{});
    }
    for (const auto& e : j.at("points")) {
      ManifestPoint p;
      p.path = m.directory / e.at("path").get<std::string>();
      p.distance = e.at("distance").get<double>();
      p.sha256 = e.value("sha256", std::string{});
      if (e.contains("hf_energy")) p.hf_energy = e.at("hf_energy").get<double>();
      if (e.contains("fci_energy")) p.fci_energy = e.at("fci_energy").get<double>();
      if (e.contains("casci_energy")) p.casci_energy = e.at("casci_energy").get<double>();
      m.points.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  if (m.points.empty()) throw Error(path.string() + ": manifest lists no points");
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    if (!std::filesystem::exists(m.points[i].path))
      throw Error(path.string() + ": missing fixture " + m.points[i].path.string());
    if (i > 0 && !(m.points[i].distance > m.points[i - 1].distance))
      throw Error(path.string() + ": distances must be strictly increasing");
  }
  return m;
}

}  // namespace gaugekit
