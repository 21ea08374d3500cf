#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "gaugekit/manifest.hpp"
#include "gaugekit/pauli.hpp"

namespace testing_support {

using namespace gaugekit;

inline std::filesystem::path data_dir() { return GAUGEKIT_DATA_DIR; }

inline Manifest h2_manifest() { return load_manifest(data_dir() / "h2" / "manifest.json"); }

inline MolecularIntegrals h2_equilibrium() {
  const auto m = h2_manifest();
  return m.load(m.nearest(0.7414));
}

inline PauliWord random_word(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<std::uint64_t> d(0, qubit_mask(n));
  return PauliWord{d(rng), d(rng), n};
}

inline PauliSum random_sum(std::mt19937_64& rng, int n, int terms, bool hermitian) {
  std::normal_distribution<double> g;
  PauliSum s(n);
  for (int k = 0; k < terms; ++k) s.add(random_word(rng, n), hermitian ? cplx{g(rng), 0.0} : cplx{g(rng), g(rng)});
  return s;
}

inline Eigen::VectorXcd random_vector(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = cplx{g(rng), g(rng)};
  return v.normalized();
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing_support
