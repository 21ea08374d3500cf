#pragma once

// Digitized adiabatic state preparation with optional counter-diabatic terms.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gaugekit/agp.hpp"
#include "gaugekit/error.hpp"
#include "gaugekit/fermion.hpp"
#include "gaugekit/pauli.hpp"
#include "gaugekit/statevector.hpp"

namespace gaugekit {

/// 1 kcal/mol in Hartree.
inline constexpr double kChemicalAccuracy = 1.5936e-3;

enum class TermOrder { lexicographic, magnitude_descending };
enum class CdLayout { merged, separate };

inline std::string to_string(TermOrder o) { return o == TermOrder::lexicographic ? "lexicographic" : "magnitude"; }
inline std::string to_string(CdLayout l) { return l == CdLayout::merged ? "merged" : "separate"; }

inline TermOrder parse_term_order(const std::string& s) {
  if (s == "lexicographic" || s == "lex") return TermOrder::lexicographic;
  if (s == "magnitude" || s == "magnitude-descending") return TermOrder::magnitude_descending;
  throw Error("unknown term order '" + s + "'");
}

inline CdLayout parse_cd_layout(const std::string& s) {
  if (s == "merged") return CdLayout::merged;
  if (s == "separate") return CdLayout::separate;
  throw Error("unknown CD layout '" + s + "'");
}

struct EvolutionConfig {
  int n_steps = 100;
  double dt = 0.05;
  std::optional<int> cd_order;  // absent: bare adiabatic evolution
  TermOrder term_order = TermOrder::lexicographic;
  CdLayout cd_layout = CdLayout::merged;
  bool record_trajectory = false;

  double total_time() const { return n_steps * dt; }
  void validate() const {
    if (n_steps < 1) throw Error("EvolutionConfig: N must be at least 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("EvolutionConfig: step size must be positive");
  }
};

struct EvolutionResult {
  Statevector final_state{1};
  std::vector<double> trajectory;  // <H_lambda(t_n)> after step n
};

/// Word lists of one Trotter step, in application order.
using TrotterLayer = std::vector<std::pair<PauliWord, double>>;

namespace detail {

inline void order_layer(TrotterLayer& layer, TermOrder order) {
  if (order == TermOrder::lexicographic) {
    std::sort(layer.begin(), layer.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  } else {
    std::stable_sort(layer.begin(), layer.end(), [](const auto& a, const auto& b) {
      if (std::abs(a.second) != std::abs(b.second)) return std::abs(a.second) > std::abs(b.second);
      return a.first < b.first;
    });
  }
}

}  // namespace detail

class AdiabaticEvolver {
 public:
  AdiabaticEvolver(AdiabaticSplit split, std::optional<int> cd_order = std::nullopt)
      : split_(std::move(split)) {
    for (const auto& [w, c] : split_.h_one) coeffs_[w].first += c.real();
    for (const auto& [w, c] : split_.h_two) coeffs_[w].second += c.real();
    if (!split_.h_one.is_hermitian() || !split_.h_two.is_hermitian())
      throw Error("AdiabaticEvolver: Hamiltonian parts must be Hermitian");
    if (cd_order) cd_.emplace(split_, *cd_order);
  }

  const AdiabaticSplit& split() const { return split_; }
  std::optional<int> cd_order() const { return cd_ ? std::optional<int>(cd_->order()) : std::nullopt; }

  /// Words of H_lambda (identity dropped).
  TrotterLayer bare_layer(double lambda) const {
    TrotterLayer out;
    for (const auto& [w, ab] : coeffs_) {
      if (w.is_identity()) continue;
      const double c = ab.first + lambda * ab.second;
      if (c != 0.0) out.emplace_back(w, c);
    }
    return out;
  }

  TrotterLayer cd_layer(const SchedulePoint& p) const {
    TrotterLayer out;
    if (!cd_) return out;
    for (const auto& [w, c] : cd_->hamiltonian(p))
      if (!w.is_identity()) out.emplace_back(w, c.real());
    return out;
  }

  /// The step layers at schedule point p, ordered.
  std::vector<TrotterLayer> step_layers(const SchedulePoint& p, const EvolutionConfig& cfg) const {
    TrotterLayer bare = bare_layer(p.lambda);
    TrotterLayer cd = cd_ && cfg.cd_order ? cd_layer(p) : TrotterLayer{};
    if (cfg.cd_layout == CdLayout::merged) {
      bare.insert(bare.end(), cd.begin(), cd.end());
      detail::order_layer(bare, cfg.term_order);
      return {std::move(bare)};
    }
    detail::order_layer(bare, cfg.term_order);
    detail::order_layer(cd, cfg.term_order);
    return {std::move(bare), std::move(cd)};
  }

  EvolutionResult evolve(const Statevector& initial, const EvolutionConfig& cfg) const {
    cfg.validate();
    require_same_qubits(initial.n_qubits(), split_.n_qubits, "evolve");
    if (std::abs(initial.norm() - 1.0) > 1e-10) throw Error("evolve: initial state is not normalized");
    if (cfg.cd_order && (!cd_ || cd_->order() != *cfg.cd_order))
      throw Error("evolve: evolver was built for a different CD order");
    EvolutionResult r{initial, {}};
    const double T = cfg.total_time();
    for (int n = 1; n <= cfg.n_steps; ++n) {
      const double t = (n - 0.5) * cfg.dt;
      const SchedulePoint p = schedule_at(t, T);
      for (const auto& layer : step_layers(p, cfg))
        for (const auto& [w, c] : layer) apply_pauli_exp(r.final_state, w, cfg.dt * c);
      if (cfg.record_trajectory) r.trajectory.push_back(expectation(r.final_state, split_.at(p.lambda)));
    }
    return r;
  }

 private:
  AdiabaticSplit split_;
  std::map<PauliWord, std::pair<double, double>> coeffs_;
  std::optional<CdDriver> cd_;
};

inline EvolutionResult evolve(const AdiabaticSplit& split, const Statevector& initial, const EvolutionConfig& cfg) {
  return AdiabaticEvolver(split, cfg.cd_order).evolve(initial, cfg);
}

/// E(T) - E0; small negative values are numerical noise on a variational quantity.
inline double convergence_epsilon(const Statevector& final_state, const PauliSum& h_full, double e0) {
  const double eps = expectation(final_state, h_full) - e0;
  if (eps < -1e-9) throw Error("convergence_epsilon: energy below the ground-state oracle");
  return eps;
}

struct SweepRow {
  double dt = 0.0;
  int n_steps = 0;
  double total_time = 0.0;
  double eps_bare = std::numeric_limits<double>::quiet_NaN();
  double eps_cd = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // non-empty when the cell failed
};

struct SweepOptions {
  std::optional<int> cd_order = 1;  // absent: only the bare column is computed
  TermOrder term_order = TermOrder::lexicographic;
  CdLayout cd_layout = CdLayout::merged;
  int threads = 1;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); }));
  }
};

/// Every (dt, N) cell, rows in dt-major grid order regardless of thread count.
inline SweepResult sweep(const AdiabaticSplit& split, const Statevector& initial, const std::vector<double>& dt_grid,
                         const std::vector<int>& n_grid, double e0, const SweepOptions& opt = {}) {
  if (dt_grid.empty() || n_grid.empty()) throw Error("sweep: grids must be non-empty");
  const AdiabaticEvolver bare(split);
  std::optional<AdiabaticEvolver> assisted;
  if (opt.cd_order) assisted.emplace(split, opt.cd_order);
  const PauliSum h_full = split.full();

  SweepResult result;
  for (double dt : dt_grid)
    for (int n : n_grid) {
      SweepRow row;
      row.dt = dt;
      row.n_steps = n;
      row.total_time = dt * n;
      result.rows.push_back(row);
    }

  auto run_cell = [&](SweepRow& row) {
    try {
      EvolutionConfig cfg;
      cfg.n_steps = row.n_steps;
      cfg.dt = row.dt;
      cfg.term_order = opt.term_order;
      cfg.cd_layout = opt.cd_layout;
      row.eps_bare = convergence_epsilon(bare.evolve(initial, cfg).final_state, h_full, e0);
      if (assisted) {
        cfg.cd_order = opt.cd_order;
        row.eps_cd = convergence_epsilon(assisted->evolve(initial, cfg).final_state, h_full, e0);
        if (row.eps_cd != 0.0) row.ratio = row.eps_bare / row.eps_cd;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(result.rows.size())));
  if (threads == 1) {
    for (auto& row : result.rows) run_cell(row);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < result.rows.size(); i = next++) run_cell(result.rows[i]);
      });
    for (auto& t : pool) t.join();
  }
  return result;
}

}  // namespace gaugekit
