#pragma once

// Ansatz construction, energies and gradients, VQE driver, ADAPT and bond scans.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaugekit/agp.hpp"
#include "gaugekit/eigensolver.hpp"
#include "gaugekit/error.hpp"
#include "gaugekit/fermion.hpp"
#include "gaugekit/optimizer.hpp"
#include "gaugekit/pauli.hpp"
#include "gaugekit/statevector.hpp"

namespace gaugekit {

struct Generator {
  PauliSum op;  // Hermitian
  int parameter = 0;
};

struct Ansatz {
  std::string label;
  int n_qubits = 0;
  int n_parameters = 0;
  std::vector<Generator> generators;

  /// Non-identity words summed over generators.
  std::size_t pauli_term_count() const {
    std::size_t n = 0;
    for (const auto& g : generators)
      for (const auto& [w, c] : g.op) n += w.is_identity() ? 0 : 1;
    return n;
  }

  void add(PauliSum op, int parameter) {
    if (!op.is_hermitian(1e-12)) throw Error("Ansatz: generator is not Hermitian");
    if (op.n_qubits() != n_qubits) throw Error("Ansatz: generator qubit count mismatch");
    n_parameters = std::max(n_parameters, parameter + 1);
    generators.push_back({std::move(op), parameter});
  }

  void validate() const {
    for (const auto& g : generators)
      if (g.parameter < 0 || g.parameter >= n_parameters) throw Error("Ansatz: parameter index out of range");
  }
};

// ---------------------------------------------------------------------------
// Builders

inline Ansatz build_aga(const std::vector<PauliWord>& pool, int l) {
  if (pool.empty()) throw Error("build_aga: empty operator pool");
  Ansatz a{"AGA(" + std::to_string(l) + ")", pool.front().n_qubits, 0, {}};
  for (std::size_t k = 0; k < pool.size(); ++k) a.add(PauliSum::from_word(pool[k]), static_cast<int>(k));
  return a;
}

inline Ansatz build_agar(const std::vector<PauliWord>& pool, int max_weight = 2) {
  std::vector<PauliWord> kept;
  for (const auto& w : pool)
    if (w.weight() <= max_weight) kept.push_back(w);
  if (kept.empty()) throw Error("build_agar: weight filter leaves no operators");
  auto a = build_aga(kept, 1);
  a.label = "AGAR(1)";
  return a;
}

/// i(T - T^dagger) for T = a+_{to[0]} a+_{to[1]} .. a_{from[last]} .. a_{from[0]}.
inline FermionSum excitation_operator(const std::vector<int>& to, const std::vector<int>& from, int n_modes) {
  if (to.size() != from.size() || to.empty()) throw Error("excitation_operator: bad index lists");
  std::vector<LadderOp> ops;
  for (int p : to) ops.push_back(cre(p));
  for (auto it = from.rbegin(); it != from.rend(); ++it) ops.push_back(ann(*it));
  FermionSum f(n_modes);
  f.add(ops, cplx{0.0, 1.0});
  f += f.adjoint();
  return f;
}

inline PauliSum excitation_generator(const std::vector<int>& to, const std::vector<int>& from, int n_modes,
                                     Mapping mapping) {
  return FermionMapper(n_modes, mapping).map(excitation_operator(to, from, n_modes));
}

enum class ExcitationCounting { spin_orbital, spin_adapted };

inline std::string to_string(ExcitationCounting c) {
  return c == ExcitationCounting::spin_orbital ? "spin-orbital" : "spin-adapted";
}
inline ExcitationCounting parse_excitation_counting(const std::string& s) {
  if (s == "spin-orbital") return ExcitationCounting::spin_orbital;
  if (s == "spin-adapted") return ExcitationCounting::spin_adapted;
  throw Error("unknown excitation counting '" + s + "'");
}

struct Excitation {
  std::vector<int> to, from;  // spin-orbital modes
};

/// Sz-conserving singles and doubles from occupied to virtual spin orbitals, singles first.
inline std::vector<Excitation> spin_orbital_excitations(int n_electrons, int n_spatial,
                                                        SpinOrdering ordering = SpinOrdering::interleaved) {
  const int n = 2 * n_spatial;
  const std::uint64_t occ = hartree_fock_occupation(n_electrons, n, ordering);
  std::vector<int> o, v;
  std::vector<int> spin(static_cast<std::size_t>(n));
  for (int p = 0; p < n_spatial; ++p)
    for (Spin s : {Spin::alpha, Spin::beta}) spin[static_cast<std::size_t>(spin_orbital(p, s, n_spatial, ordering))] = static_cast<int>(s);
  for (int p = 0; p < n; ++p) ((occ >> p) & 1u ? o : v).push_back(p);
  auto sz = [&](int p) { return spin[static_cast<std::size_t>(p)]; };
  std::vector<Excitation> out;
  for (int i : o)
    for (int a : v)
      if (sz(i) == sz(a)) out.push_back({{a}, {i}});
  for (std::size_t x = 0; x < o.size(); ++x)
    for (std::size_t y = x + 1; y < o.size(); ++y)
      for (std::size_t p = 0; p < v.size(); ++p)
        for (std::size_t q = p + 1; q < v.size(); ++q) {
          const int i = o[x], j = o[y], a = v[p], b = v[q];
          if (sz(i) + sz(j) == sz(a) + sz(b)) out.push_back({{a, b}, {i, j}});
        }
  return out;
}

inline Ansatz build_uccsd(int n_electrons, int n_spatial, Mapping mapping,
                          ExcitationCounting counting = ExcitationCounting::spin_orbital,
                          SpinOrdering ordering = SpinOrdering::interleaved) {
  const int n = 2 * n_spatial;
  if (n_electrons < 1 || n_electrons >= n) throw Error("build_uccsd: no occupied/virtual split");
  Ansatz a{counting == ExcitationCounting::spin_orbital ? "UCCSD" : "UCCSD(spin-adapted)", n, 0, {}};
  const FermionMapper mapper(n, mapping);
  const auto exc = spin_orbital_excitations(n_electrons, n_spatial, ordering);
  if (counting == ExcitationCounting::spin_orbital) {
    for (const auto& e : exc) a.add(mapper.map(excitation_operator(e.to, e.from, n)), a.n_parameters);
    return a;
  }
  // one parameter per spatial pattern, spin components summed into one generator
  auto spatial = [&](int mode) {
    for (int p = 0; p < n_spatial; ++p)
      for (Spin s : {Spin::alpha, Spin::beta})
        if (spin_orbital(p, s, n_spatial, ordering) == mode) return p;
    return -1;
  };
  std::vector<std::pair<std::vector<int>, FermionSum>> groups;
  for (const auto& e : exc) {
    std::vector<int> key, f, t;
    for (int m : e.from) f.push_back(spatial(m));
    for (int m : e.to) t.push_back(spatial(m));
    std::sort(f.begin(), f.end());
    std::sort(t.begin(), t.end());
    key = f;
    key.insert(key.end(), t.begin(), t.end());
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.emplace_back(key, FermionSum(n));
      it = std::prev(groups.end());
    }
    it->second += excitation_operator(e.to, e.from, n);
  }
  for (const auto& [key, f] : groups) {
    auto g = mapper.map(f);
    if (!g.empty()) a.add(std::move(g), a.n_parameters);
  }
  return a;
}

/// k blocks of generalized same-spin singles over ordered pairs and paired doubles over ordered spatial pairs.
inline Ansatz build_kupccgsd(int k, int n_electrons, int n_spatial, Mapping mapping,
                             SpinOrdering ordering = SpinOrdering::interleaved) {
  if (k < 1) throw Error("build_kupccgsd: k must be at least 1");
  const int n = 2 * n_spatial;
  if (n_electrons < 0 || n_electrons > n) throw Error("build_kupccgsd: bad electron count");
  Ansatz a{std::to_string(k) + "-UpCCGSD", n, 0, {}};
  const FermionMapper mapper(n, mapping);
  std::vector<PauliSum> block;
  for (Spin s : {Spin::alpha, Spin::beta})
    for (int p = 0; p < n_spatial; ++p)
      for (int q = 0; q < n_spatial; ++q)
        if (p != q) {
          const int from = spin_orbital(p, s, n_spatial, ordering), to = spin_orbital(q, s, n_spatial, ordering);
          block.push_back(mapper.map(excitation_operator({to}, {from}, n)));
        }
  for (int p = 0; p < n_spatial; ++p)
    for (int q = 0; q < n_spatial; ++q)
      if (p != q) {
        const int pa = spin_orbital(p, Spin::alpha, n_spatial, ordering), pb = spin_orbital(p, Spin::beta, n_spatial, ordering);
        const int qa = spin_orbital(q, Spin::alpha, n_spatial, ordering), qb = spin_orbital(q, Spin::beta, n_spatial, ordering);
        block.push_back(mapper.map(excitation_operator({qa, qb}, {pa, pb}, n)));
      }
  for (int r = 0; r < k; ++r)
    for (const auto& g : block) a.add(g, a.n_parameters);
  return a;
}

/// Default ADAPT candidate set: the UCCSD spin-orbital excitations.
inline std::vector<PauliSum> excitation_pool(int n_electrons, int n_spatial, Mapping mapping,
                                             SpinOrdering ordering = SpinOrdering::interleaved) {
  const int n = 2 * n_spatial;
  const FermionMapper mapper(n, mapping);
  std::vector<PauliSum> pool;
  for (const auto& e : spin_orbital_excitations(n_electrons, n_spatial, ordering))
    pool.push_back(mapper.map(excitation_operator(e.to, e.from, n)));
  return pool;
}

// ---------------------------------------------------------------------------
// State preparation, energy, gradients

namespace detail {

struct Rotation {
  PauliWord word;
  double coefficient;
  int parameter;
};

inline std::vector<Rotation> rotations(const Ansatz& a) {
  std::vector<Rotation> out;
  for (const auto& g : a.generators)
    for (const auto& [w, c] : g.op)
      if (!w.is_identity()) out.push_back({w, c.real(), g.parameter});
  return out;
}

inline void check_parameters(const Ansatz& a, const Eigen::VectorXd& theta, const Statevector& initial) {
  a.validate();
  if (theta.size() != a.n_parameters) throw Error("ansatz: parameter vector has the wrong length");
  require_same_qubits(initial.n_qubits(), a.n_qubits, "ansatz");
}

}  // namespace detail

/// prod_j exp(-i theta_{idx(j)} G_j) |initial>, each generator as an ordered product of its word exponentials.
inline Statevector prepare_state(const Ansatz& a, const Eigen::VectorXd& theta, const Statevector& initial) {
  detail::check_parameters(a, theta, initial);
  Statevector s = initial;
  for (const auto& r : detail::rotations(a)) apply_pauli_exp(s, r.word, theta[r.parameter] * r.coefficient);
  return s;
}

inline double energy(const Ansatz& a, const Eigen::VectorXd& theta, const Statevector& initial, const PauliSum& h) {
  return expectation(prepare_state(a, theta, initial), h);
}

inline bool is_single_word(const PauliSum& g) {
  return g.size() == 1 && !g.begin()->first.is_identity();
}

/// Parameter shift where a parameter drives one single-word generator, central differences otherwise.
inline Eigen::VectorXd gradient(const Ansatz& a, const Eigen::VectorXd& theta, const Statevector& initial,
                                const PauliSum& h, double fd_step = 1e-5) {
  detail::check_parameters(a, theta, initial);
  std::vector<int> uses(static_cast<std::size_t>(a.n_parameters), 0);
  std::vector<const Generator*> owner(static_cast<std::size_t>(a.n_parameters), nullptr);
  for (const auto& g : a.generators) {
    ++uses[static_cast<std::size_t>(g.parameter)];
    owner[static_cast<std::size_t>(g.parameter)] = &g;
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(a.n_parameters);
  for (int j = 0; j < a.n_parameters; ++j) {
    const auto* g = owner[static_cast<std::size_t>(j)];
    if (!g) continue;
    Eigen::VectorXd tp = theta, tm = theta;
    if (uses[static_cast<std::size_t>(j)] == 1 && is_single_word(g->op)) {
      const double c = g->op.begin()->second.real();
      const double shift = std::numbers::pi / (4.0 * c);
      tp[j] += shift;
      tm[j] -= shift;
      grad[j] = c * (energy(a, tp, initial, h) - energy(a, tm, initial, h));
    } else {
      tp[j] += fd_step;
      tm[j] -= fd_step;
      grad[j] = (energy(a, tp, initial, h) - energy(a, tm, initial, h)) / (2.0 * fd_step);
    }
  }
  return grad;
}

/// Exact gradient by back-propagating H|psi> through the rotation list.
inline Eigen::VectorXd adjoint_gradient(const Ansatz& a, const Eigen::VectorXd& theta, const Statevector& initial,
                                        const CompiledPauliSum& h, double* energy_out = nullptr) {
  detail::check_parameters(a, theta, initial);
  const auto rot = detail::rotations(a);
  Statevector phi = prepare_state(a, theta, initial);
  Statevector lam(phi.n_qubits(), h.apply(phi.amplitudes()));
  if (energy_out) *energy_out = phi.inner(lam).real();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(a.n_parameters);
  Statevector tmp = phi;
  for (auto it = rot.rbegin(); it != rot.rend(); ++it) {
    tmp = phi;
    apply_pauli_word(tmp, it->word);
    grad[it->parameter] += 2.0 * it->coefficient * lam.inner(tmp).imag();
    const double angle = theta[it->parameter] * it->coefficient;
    apply_pauli_exp(phi, it->word, -angle);
    apply_pauli_exp(lam, it->word, -angle);
  }
  return grad;
}

inline Eigen::VectorXd adjoint_gradient(const Ansatz& a, const Eigen::VectorXd& theta, const Statevector& initial,
                                        const PauliSum& h) {
  return adjoint_gradient(a, theta, initial, CompiledPauliSum(h));
}

// ---------------------------------------------------------------------------
// Optimization

struct VqeOptions {
  OptimizerOptions optimizer;
  int starts = 3;             // zeros, zeros + perturbation, seeded uniform
  double perturbation = 1e-2;
  double random_width = 0.1;
  std::uint64_t seed = 0;
  std::optional<Eigen::VectorXd> initial_parameters;  // replaces the zero start
};

struct VqeResult {
  double energy = std::numeric_limits<double>::infinity();
  Eigen::VectorXd parameters;
  int iterations = 0;
  double gradient_norm = std::numeric_limits<double>::infinity();
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int best_start = -1;
  std::string status;
  std::vector<double> history;
  std::vector<std::string> start_errors;
};

inline std::vector<Eigen::VectorXd> start_points(int n, const VqeOptions& opt) {
  std::vector<Eigen::VectorXd> out;
  const Eigen::VectorXd base = opt.initial_parameters ? *opt.initial_parameters : Eigen::VectorXd::Zero(n);
  if (base.size() != n) throw Error("optimize: initial parameter vector has the wrong length");
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-opt.random_width, opt.random_width);
  for (int s = 0; s < opt.starts; ++s) {
    if (s == 0) {
      out.push_back(base);
    } else if (s == 1) {
      out.push_back(base + Eigen::VectorXd::Constant(n, opt.perturbation));
    } else {
      Eigen::VectorXd x(n);
      for (int k = 0; k < n; ++k) x[k] = u(rng);
      out.push_back(x);
    }
  }
  return out;
}

inline VqeResult optimize(const Ansatz& a, const Statevector& initial, const PauliSum& h, const VqeOptions& opt = {},
                          std::optional<double> e0 = std::nullopt) {
  if (opt.starts < 1) throw Error("optimize: at least one start is required");
  a.validate();
  const CompiledPauliSum ch(h);
  const Objective fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    double e = 0.0;
    const Eigen::VectorXd grad = adjoint_gradient(a, x, initial, ch, &e);
    if (g) *g = grad;
    return e;
  };
  VqeResult best;
  const auto starts = start_points(a.n_parameters, opt);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    try {
      const auto r = bfgs(fn, starts[s], opt.optimizer);
      if (r.value < best.energy) {
        best.energy = r.value;
        best.parameters = r.x;
        best.iterations = r.iterations;
        best.gradient_norm = r.gradient_norm;
        best.converged = r.converged;
        best.best_start = static_cast<int>(s);
        best.status = r.status;
        best.history = r.history;
      }
    } catch (const NonFiniteError& e) {
      best.start_errors.push_back("start " + std::to_string(s) + ": " + e.what());
    }
  }
  if (best.best_start < 0) throw Error("optimize: every start diverged");
  if (e0) best.epsilon = best.energy - *e0;
  return best;
}

// ---------------------------------------------------------------------------
// ADAPT

struct AdaptOptions {
  double threshold = 1e-3;  // on the pool gradient norm
  int max_operators = 30;
  VqeOptions vqe;
};

struct AdaptResult {
  Ansatz ansatz;
  VqeResult result;
  std::vector<int> selected;          // pool indices in order of addition
  std::vector<double> selected_gradients;
  std::vector<double> pool_gradient_norms;  // before each addition, then at exit
  bool stalled = false;
  bool converged = false;
};

/// dE/dtheta of exp(-i theta A) appended to |psi>, at theta = 0: 2 Im<H psi|A psi>.
inline std::vector<double> pool_gradients(const std::vector<CompiledPauliSum>& pool, const Statevector& psi,
                                          const CompiledPauliSum& h) {
  const Eigen::VectorXcd hpsi = h.apply(psi.amplitudes());
  std::vector<double> out;
  Eigen::VectorXcd tmp;
  for (const auto& op : pool) {
    op.apply(psi.amplitudes(), tmp);
    out.push_back(2.0 * hpsi.dot(tmp).imag());
  }
  return out;
}

inline AdaptResult adapt_vqe(const std::vector<PauliSum>& pool, const Statevector& initial, const PauliSum& h,
                             const AdaptOptions& opt = {}, std::optional<double> e0 = std::nullopt) {
  if (pool.empty()) throw Error("adapt_vqe: empty operator pool");
  std::vector<CompiledPauliSum> compiled;
  for (const auto& p : pool) {
    if (!p.is_hermitian()) throw Error("adapt_vqe: pool operator is not Hermitian");
    require_same_qubits(p.n_qubits(), initial.n_qubits(), "adapt_vqe");
    compiled.emplace_back(p);
  }
  const CompiledPauliSum ch(h);
  AdaptResult out;
  out.ansatz = Ansatz{"ADAPT", initial.n_qubits(), 0, {}};
  Statevector psi = initial;
  Eigen::VectorXd theta(0);
  out.result.energy = expectation(initial, h);
  out.result.parameters = theta;
  if (e0) out.result.epsilon = out.result.energy - *e0;

  while (true) {
    const auto g = pool_gradients(compiled, psi, ch);
    double norm2 = 0.0;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      norm2 += g[k] * g[k];
      if (std::abs(g[k]) > std::abs(g[arg])) arg = k;
    }
    out.pool_gradient_norms.push_back(std::sqrt(norm2));
    if (std::sqrt(norm2) < opt.threshold) {
      out.converged = true;
      out.stalled = out.selected.empty();
      break;
    }
    if (static_cast<int>(out.selected.size()) >= opt.max_operators) break;
    out.selected.push_back(static_cast<int>(arg));
    out.selected_gradients.push_back(g[arg]);
    out.ansatz.add(pool[arg], out.ansatz.n_parameters);

    VqeOptions vo = opt.vqe;
    Eigen::VectorXd warm(theta.size() + 1);
    warm << theta, 0.0;
    vo.initial_parameters = warm;
    out.result = optimize(out.ansatz, initial, h, vo, e0);
    theta = out.result.parameters;
    psi = prepare_state(out.ansatz, theta, initial);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bond scans

struct ScanCase {
  MolecularIntegrals integrals;
  Mapping mapping = Mapping::bravyi_kitaev;
};

/// Builds an ansatz for one geometry from its qubit split.
using AnsatzBuilder = std::function<Ansatz(const MolecularIntegrals&, const AdiabaticSplit&)>;

struct ScanRow {
  double distance = std::numeric_limits<double>::quiet_NaN();
  std::string ansatz;
  int n_parameters = 0;
  std::size_t n_terms = 0;
  double energy = std::numeric_limits<double>::quiet_NaN();
  double e0 = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  bool chemical_accuracy = false;
  std::string error;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); }));
  }
};

/// Ground energy in the Hartree-Fock particle sector.
inline double sector_ground_energy(const PauliSum& h, int n_electrons, Mapping mapping,
                                   SpinOrdering ordering = SpinOrdering::interleaved) {
  const int n = h.n_qubits();
  const auto sector = hartree_fock_sector(n_electrons, n, mapping, ordering);
  GroundStateOptions opt;
  opt.sector = &sector;
  opt.hint_index = hartree_fock_index(n_electrons, n, mapping, ordering);
  return ground_state(h, opt).energy;
}

inline ScanResult bond_scan(const std::vector<ScanCase>& points,
                            const std::vector<std::pair<std::string, AnsatzBuilder>>& builders,
                            const VqeOptions& opt = {}, double accuracy = 1.5936e-3) {
  ScanResult out;
  for (const auto& pt : points) {
    if (!pt.integrals.bond_distance) throw Error("bond_scan: integrals lack a bond distance");
    std::optional<AdiabaticSplit> split;
    double e0 = std::numeric_limits<double>::quiet_NaN();
    std::string point_error;
    try {
      split = adiabatic_split(pt.integrals, pt.mapping);
      e0 = sector_ground_energy(split->full(), pt.integrals.n_electrons(), pt.mapping);
    } catch (const std::exception& e) {
      point_error = e.what();
    }
    for (const auto& [name, build] : builders) {
      ScanRow row;
      row.distance = *pt.integrals.bond_distance;
      row.ansatz = name;
      row.e0 = e0;
      if (!point_error.empty()) {
        row.error = point_error;
        out.rows.push_back(row);
        continue;
      }
      try {
        const Ansatz a = build(pt.integrals, *split);
        row.n_parameters = a.n_parameters;
        row.n_terms = a.pauli_term_count();
        const auto hf = basis_state(hartree_fock_index(pt.integrals.n_electrons(), split->n_qubits, pt.mapping),
                                    split->n_qubits);
        const auto r = optimize(a, hf, split->full(), opt, e0);
        row.energy = r.energy;
        row.epsilon = r.epsilon;
        row.chemical_accuracy = r.epsilon < accuracy;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      out.rows.push_back(row);
    }
  }
  return out;
}

}  // namespace gaugekit
