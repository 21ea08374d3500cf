// gaugekit command-line driver.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gaugekit/adiabatic.hpp"
#include "gaugekit/agp.hpp"
#include "gaugekit/eigensolver.hpp"
#include "gaugekit/fcidump.hpp"
#include "gaugekit/fermion.hpp"
#include "gaugekit/manifest.hpp"
#include "gaugekit/report.hpp"
#include "gaugekit/statevector.hpp"
#include "gaugekit/vqe.hpp"

namespace fs = std::filesystem;
using namespace gaugekit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct ConfigError : Error {
  using Error::Error;
};

fs::path data_root() {
  if (const char* env = std::getenv("GAUGEKIT_DATA_DIR")) return env;
  return GAUGEKIT_DATA_DIR;
}

// ---------------------------------------------------------------------------
// shared options

struct GlobalOptions {
  std::string format = "json";
  std::string output;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct InputOptions {
  std::string fcidump;
  std::string manifest;
  std::string molecule = "h2";
  double distance = 0.7414;
  std::string mapping = "bk";
  std::vector<int> freeze, drop;
  bool no_checksum = false;

  void add(CLI::App* app) {
    app->add_option("--fcidump", fcidump, "FCIDUMP file (overrides --molecule)");
    app->add_option("--manifest", manifest, "fixture manifest.json (overrides --molecule)");
    app->add_option("--molecule", molecule, "bundled fixture: h2, lih or beh2")->capture_default_str();
    app->add_option("--distance", distance, "bond distance in Angstrom; nearest fixture point is used")
        ->capture_default_str();
    app->add_option("--mapping", mapping, "jw or bk")->capture_default_str();
    app->add_option("--freeze", freeze, "doubly occupied orbitals to fold into the core")->delimiter(',');
    app->add_option("--drop", drop, "virtual orbitals to drop")->delimiter(',');
    app->add_flag("--no-checksum", no_checksum, "skip fixture checksum verification");
  }
};

struct Problem {
  MolecularIntegrals ints;
  Mapping mapping = Mapping::bravyi_kitaev;
  std::string source;
  std::optional<ManifestPoint> point;
  AdiabaticSplit split;
  Statevector hf{1};

  int n_qubits() const { return split.n_qubits; }
};

Manifest resolve_manifest(const InputOptions& in) {
  const fs::path p = !in.manifest.empty() ? fs::path(in.manifest) : data_root() / in.molecule / "manifest.json";
  if (!fs::exists(p)) throw ConfigError("no manifest at " + p.string());
  return load_manifest(p);
}

Problem load_problem(const InputOptions& in) {
  Problem pr;
  pr.mapping = parse_mapping(in.mapping);
  const ActiveSpace override_space{in.freeze, in.drop};
  if (!in.fcidump.empty()) {
    if (!fs::exists(in.fcidump)) throw ConfigError("cannot open " + in.fcidump);
    pr.ints = apply_active_space(load_fcidump(in.fcidump), override_space);
    pr.source = in.fcidump;
  } else {
    Manifest m = resolve_manifest(in);
    if (!override_space.empty()) m.active_space = override_space;
    const auto& p = m.nearest(in.distance);
    pr.ints = m.load(p, !in.no_checksum);
    pr.point = p;
    pr.source = p.path.string();
  }
  pr.split = adiabatic_split(pr.ints, pr.mapping);
  if (pr.split.n_qubits > kMaxStateQubits) throw ConfigError("problem needs more qubits than the simulator supports");
  pr.hf = basis_state(hartree_fock_index(pr.ints.n_electrons(), pr.split.n_qubits, pr.mapping), pr.split.n_qubits);
  return pr;
}

Json input_config(const InputOptions& in, const Problem& pr) {
  Json j;
  j["source"] = fs::path(pr.source).filename().string();
  if (pr.point) {
    j["distance"] = pr.point->distance;
    j["sha256"] = pr.point->sha256;
  }
  j["mapping"] = to_string(pr.mapping);
  j["freeze"] = in.freeze;
  j["drop"] = in.drop;
  j["n_qubits"] = pr.n_qubits();
  j["n_electrons"] = pr.ints.n_electrons();
  j["n_spatial_orbitals"] = pr.ints.n_spatial_orbitals();
  return j;
}

double sector_e0(const Problem& pr, std::uint64_t seed) {
  const auto sector = hartree_fock_sector(pr.ints.n_electrons(), pr.n_qubits(), pr.mapping);
  GroundStateOptions opt;
  opt.sector = &sector;
  opt.seed = seed;
  opt.hint_index = hartree_fock_index(pr.ints.n_electrons(), pr.n_qubits(), pr.mapping);
  return ground_state(pr.split.full(), opt).energy;
}

void check_format(const GlobalOptions& g, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (g.format == f) return;
  throw ConfigError("unsupported --format '" + g.format + "' for this command");
}

std::string extension(const std::string& format) { return format == "text" ? "txt" : format; }

/// --output, else $GAUGEKIT_OUTPUT_DIR/<command>.<ext>, else stdout.
void emit(const GlobalOptions& g, const std::string& command, const std::string& body) {
  fs::path path = g.output;
  if (path.empty())
    if (const char* dir = std::getenv("GAUGEKIT_OUTPUT_DIR"); dir && *dir) path = fs::path(dir) / (command + "." + extension(g.format));
  if (path.empty()) {
    std::cout << body;
    return;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
  std::cerr << "wrote " << path.string() << "\n";
}

void emit_record(const GlobalOptions& g, const std::string& command, const Json& config, const Json& record) {
  check_format(g, {"json", "csv"});
  emit(g, command, g.format == "json" ? json_document(command, config, record) : record_csv(record, config));
}

// ---------------------------------------------------------------------------
// map

struct MapOptions {
  InputOptions in;
  bool verify = false;
};

int cmd_map(const GlobalOptions& g, const MapOptions& o) {
  check_format(g, {"text", "json", "csv"});
  const Problem pr = load_problem(o.in);
  const PauliSum h = pr.split.full();
  int max_w = 0;
  for (const auto& [w, c] : h) max_w = std::max(max_w, w.weight());
  Json stats;
  stats["n_qubits"] = h.n_qubits();
  stats["n_terms"] = h.size();
  stats["h_one_terms"] = pr.split.h_one.size();
  stats["h_two_terms"] = pr.split.h_two.size();
  stats["max_weight"] = max_w;
  stats["mean_weight"] = mean_weight(h);
  stats["one_norm"] = h.one_norm();

  int status = kExitOk;
  if (o.verify) {
    // spectrum of the other mapping must coincide
    const Mapping other = pr.mapping == Mapping::jordan_wigner ? Mapping::bravyi_kitaev : Mapping::jordan_wigner;
    const PauliSum h2 = adiabatic_split(pr.ints, other).full();
    double dev = 0.0;
    if (h.n_qubits() <= kMaxDenseEigenQubits) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a(to_dense_matrix(h), Eigen::EigenvaluesOnly),
          b(to_dense_matrix(h2), Eigen::EigenvaluesOnly);
      dev = (a.eigenvalues() - b.eigenvalues()).lpNorm<Eigen::Infinity>();
    } else {
      dev = std::abs(ground_state(h).energy - ground_state(h2).energy);
    }
    stats["verify_max_deviation"] = dev;
    stats["isospectral"] = dev < 1e-9;
    std::cerr << "verify: " << to_string(pr.mapping) << " vs " << to_string(other) << " max deviation "
              << format_double(dev) << (dev < 1e-9 ? " (isospectral)" : " (MISMATCH)") << "\n";
    if (dev >= 1e-9) status = kExitConfig;
  }
  Json config;
  config["input"] = input_config(o.in, pr);
  config["verify"] = o.verify;
  if (g.format == "text") {
    std::cerr << "terms " << h.size() << ", qubits " << h.n_qubits() << ", max weight " << max_w << ", mean weight "
              << format_double(mean_weight(h)) << "\n";
    emit(g, "map", to_text(h));
  } else if (g.format == "csv") {
    std::string body = csv_preamble(config) + "word,re,im\n";
    for (const auto& [w, c] : h) body += w.to_string() + "," + csv_number(c.real()) + "," + csv_number(c.imag()) + "\n";
    emit(g, "map", body);
  } else {
    Json result;
    result["stats"] = stats;
    result["terms"] = pauli_sum_json(h);
    emit(g, "map", json_document("map", config, result));
  }
  return status;
}

// ---------------------------------------------------------------------------
// ground-state

struct GroundOptions {
  InputOptions in;
  bool full_space = false;
  std::string dump_state;
};

int cmd_ground_state(const GlobalOptions& g, const GroundOptions& o) {
  const Problem pr = load_problem(o.in);
  const PauliSum h = pr.split.full();
  std::vector<char> sector;
  GroundStateOptions opt;
  opt.seed = g.seed;
  if (!o.full_space) {
    sector = hartree_fock_sector(pr.ints.n_electrons(), pr.n_qubits(), pr.mapping);
    opt.sector = &sector;
    opt.hint_index = hartree_fock_index(pr.ints.n_electrons(), pr.n_qubits(), pr.mapping);
  }
  const auto r = ground_state(h, opt);
  if (!o.dump_state.empty()) write_amplitudes(fs::path(o.dump_state), r.state);
  Json config;
  config["input"] = input_config(o.in, pr);
  config["sector"] = o.full_space ? "full" : "hartree-fock";
  config["seed"] = g.seed;
  Json rec;
  rec["n_qubits"] = pr.n_qubits();
  rec["n_terms"] = h.size();
  rec["hf_energy"] = expectation(pr.hf, h);
  rec["e0"] = r.energy;
  rec["correlation_energy"] = r.energy - expectation(pr.hf, h);
  rec["residual_norm"] = r.residual_norm;
  rec["iterations"] = r.iterations;
  rec["degenerate"] = r.degenerate;
  if (pr.point) {
    const auto ref = pr.point->casci_energy ? pr.point->casci_energy : pr.point->fci_energy;
    rec["reference_energy"] = ref ? Json(*ref) : Json(nullptr);
  }
  emit_record(g, "ground-state", config, rec);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evolve / sweep

struct EvolveOptions {
  InputOptions in;
  double dt = 0.05;
  int steps = 100;
  int cd_order = 0;
  std::string term_order = "lexicographic";
  std::string cd_layout = "merged";
  bool trajectory = false;
  std::string dump_state;
};

EvolutionConfig evolution_config(double dt, int steps, int cd_order, const std::string& order, const std::string& layout) {
  EvolutionConfig cfg;
  cfg.dt = dt;
  cfg.n_steps = steps;
  if (cd_order < 0 || cd_order > kDefaultMaxAgpOrder) throw ConfigError("--cd-order must be in 0.." + std::to_string(kDefaultMaxAgpOrder));
  if (cd_order > 0) cfg.cd_order = cd_order;
  cfg.term_order = parse_term_order(order);
  cfg.cd_layout = parse_cd_layout(layout);
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

Json evolution_json(const EvolutionConfig& cfg) {
  Json j;
  j["dt"] = cfg.dt;
  j["N"] = cfg.n_steps;
  j["T"] = cfg.total_time();
  j["cd_order"] = cfg.cd_order ? *cfg.cd_order : 0;
  j["term_order"] = to_string(cfg.term_order);
  j["cd_layout"] = to_string(cfg.cd_layout);
  j["schedule"] = "sin^2, midpoint sampling";
  return j;
}

int cmd_evolve(const GlobalOptions& g, const EvolveOptions& o) {
  auto cfg = evolution_config(o.dt, o.steps, o.cd_order, o.term_order, o.cd_layout);
  cfg.record_trajectory = o.trajectory;
  check_format(g, {"json", "csv"});
  if (o.trajectory && g.format != "json") throw ConfigError("--trajectory needs --format json");
  const Problem pr = load_problem(o.in);
  const double e0 = sector_e0(pr, g.seed);
  const auto r = evolve(pr.split, pr.hf, cfg);
  if (!o.dump_state.empty()) write_amplitudes(fs::path(o.dump_state), r.final_state);
  const double energy = expectation(r.final_state, pr.split.full());
  Json config;
  config["input"] = input_config(o.in, pr);
  config["evolution"] = evolution_json(cfg);
  Json rec;
  rec["dt"] = cfg.dt;
  rec["N"] = cfg.n_steps;
  rec["T"] = cfg.total_time();
  rec["cd_order"] = cfg.cd_order ? *cfg.cd_order : 0;
  rec["energy"] = energy;
  rec["e0"] = e0;
  rec["eps"] = convergence_epsilon(r.final_state, pr.split.full(), e0);
  rec["chemical_accuracy"] = rec["eps"].get<double>() < kChemicalAccuracy;
  if (o.trajectory) rec["trajectory"] = r.trajectory;
  emit_record(g, "evolve", config, rec);
  return kExitOk;
}

struct SweepCliOptions {
  InputOptions in;
  std::vector<double> dt_grid{0.05, 0.1, 0.2, 0.4};
  std::vector<int> n_grid{10, 25, 50, 100};
  int cd_order = 1;
  std::string term_order = "lexicographic";
  std::string cd_layout = "merged";
};

int cmd_sweep(const GlobalOptions& g, const SweepCliOptions& o) {
  check_format(g, {"json", "csv"});
  if (o.dt_grid.empty() || o.n_grid.empty()) throw ConfigError("sweep grids must be non-empty");
  for (double dt : o.dt_grid)
    for (int n : o.n_grid) evolution_config(dt, n, o.cd_order, o.term_order, o.cd_layout);
  if (g.threads < 1) throw ConfigError("--threads must be at least 1");
  const Problem pr = load_problem(o.in);
  const double e0 = sector_e0(pr, g.seed);
  SweepOptions so;
  if (o.cd_order > 0) so.cd_order = o.cd_order;
  else so.cd_order.reset();
  so.term_order = parse_term_order(o.term_order);
  so.cd_layout = parse_cd_layout(o.cd_layout);
  so.threads = g.threads;
  const auto r = sweep(pr.split, pr.hf, o.dt_grid, o.n_grid, e0, so);
  Json config;
  config["input"] = input_config(o.in, pr);
  config["dt_grid"] = o.dt_grid;
  config["n_grid"] = o.n_grid;
  config["cd_order"] = o.cd_order;
  config["term_order"] = to_string(so.term_order);
  config["cd_layout"] = to_string(so.cd_layout);
  config["e0"] = e0;
  if (g.format == "csv") emit(g, "sweep", sweep_csv(r, config));
  else emit(g, "sweep", json_document("sweep", config, sweep_json(r)));
  for (const auto& row : r.rows)
    if (!row.error.empty()) std::cerr << "cell dt=" << row.dt << " N=" << row.n_steps << " failed: " << row.error << "\n";
  return r.failures() ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------
// vqe / adapt / scan

struct VqeCliOptions {
  InputOptions in;
  std::string ansatz = "aga";
  int k = 3;
  int agp_order = 1;
  double reference_lambda = 0.5;
  std::string pool_reduction = "frozen-qubits";
  std::string counting = "spin-orbital";
  double opt_tol = 1e-8;
  int max_iter = 2000;
  int starts = 3;
  double threshold = 1e-3;
  int max_ops = 30;
};

const std::set<std::string> kAnsatze{"aga", "agar", "uccsd", "kupccgsd", "adapt"};

void validate_vqe(const VqeCliOptions& o) {
  if (!kAnsatze.count(o.ansatz)) throw ConfigError("unknown --ansatz '" + o.ansatz + "'");
  if (o.k < 1) throw ConfigError("--k must be at least 1");
  if (o.agp_order < 1 || o.agp_order > kDefaultMaxAgpOrder) throw ConfigError("--agp-order out of range");
  if (o.reference_lambda < 0.0 || o.reference_lambda > 1.0) throw ConfigError("--agp-reference-lambda must be in [0, 1]");
  if (!(o.opt_tol > 0.0)) throw ConfigError("--opt-tol must be positive");
  if (o.max_iter < 1 || o.starts < 1 || o.max_ops < 1) throw ConfigError("iteration, start and operator limits must be positive");
  parse_pool_reduction(o.pool_reduction);
  parse_excitation_counting(o.counting);
}

VqeOptions vqe_options(const GlobalOptions& g, const VqeCliOptions& o) {
  VqeOptions v;
  v.optimizer.gtol = o.opt_tol;
  v.optimizer.max_iterations = o.max_iter;
  v.starts = o.starts;
  v.seed = g.seed;
  return v;
}

Ansatz make_ansatz(const std::string& name, const VqeCliOptions& o, const MolecularIntegrals& ints,
                   const AdiabaticSplit& split, Mapping mapping) {
  PoolOptions po;
  po.reduction = parse_pool_reduction(o.pool_reduction);
  if (name == "aga") return build_aga(aga_pool(split, o.agp_order, o.reference_lambda, po), o.agp_order);
  if (name == "agar") return build_agar(aga_pool(split, 1, o.reference_lambda, po));
  if (name == "uccsd")
    return build_uccsd(ints.n_electrons(), ints.n_spatial_orbitals(), mapping, parse_excitation_counting(o.counting));
  if (name == "kupccgsd") return build_kupccgsd(o.k, ints.n_electrons(), ints.n_spatial_orbitals(), mapping);
  throw ConfigError("ansatz '" + name + "' cannot be built directly");
}

Json vqe_config(const GlobalOptions& g, const VqeCliOptions& o, const Problem& pr) {
  Json c;
  c["input"] = input_config(o.in, pr);
  c["ansatz"] = o.ansatz;
  if (o.ansatz == "kupccgsd") c["k"] = o.k;
  if (o.ansatz == "aga" || o.ansatz == "agar") {
    c["agp_order"] = o.ansatz == "aga" ? o.agp_order : 1;
    c["agp_reference_lambda"] = o.reference_lambda;
    c["pool_reduction"] = o.pool_reduction;
  }
  if (o.ansatz == "uccsd") c["counting"] = o.counting;
  if (o.ansatz == "adapt") {
    c["threshold"] = o.threshold;
    c["max_ops"] = o.max_ops;
  }
  c["opt_tol"] = o.opt_tol;
  c["max_iter"] = o.max_iter;
  c["starts"] = o.starts;
  c["seed"] = g.seed;
  return c;
}

Json vqe_record(const Ansatz& a, const VqeResult& r, double e0) {
  Json rec;
  rec["ansatz"] = a.label;
  rec["n_parameters"] = a.n_parameters;
  rec["n_terms"] = a.pauli_term_count();
  rec["energy"] = r.energy;
  rec["e0"] = e0;
  rec["eps"] = r.energy - e0;
  rec["chemical_accuracy"] = r.energy - e0 < kChemicalAccuracy;
  rec["iterations"] = r.iterations;
  rec["gradient_norm"] = json_number(r.gradient_norm);
  rec["converged"] = r.converged;
  rec["status"] = r.status;
  rec["best_start"] = r.best_start;
  rec["parameters"] = std::vector<double>(r.parameters.data(), r.parameters.data() + r.parameters.size());
  rec["history"] = r.history;
  if (!r.start_errors.empty()) rec["start_errors"] = r.start_errors;
  return rec;
}

int cmd_adapt(const GlobalOptions& g, VqeCliOptions o) {
  o.ansatz = "adapt";
  validate_vqe(o);
  check_format(g, {"json", "csv"});
  if (!(o.threshold > 0.0)) throw ConfigError("--threshold must be positive");
  const Problem pr = load_problem(o.in);
  const double e0 = sector_e0(pr, g.seed);
  AdaptOptions ao;
  ao.threshold = o.threshold;
  ao.max_operators = o.max_ops;
  ao.vqe = vqe_options(g, o);
  const auto pool = excitation_pool(pr.ints.n_electrons(), pr.ints.n_spatial_orbitals(), pr.mapping);
  const auto r = adapt_vqe(pool, pr.hf, pr.split.full(), ao, e0);
  Json rec = vqe_record(r.ansatz, r.result, e0);
  rec["pool_size"] = pool.size();
  rec["selected"] = r.selected;
  rec["selected_gradients"] = r.selected_gradients;
  rec["pool_gradient_norms"] = r.pool_gradient_norms;
  rec["adapt_converged"] = r.converged;
  rec["stalled"] = r.stalled;
  emit_record(g, "adapt", vqe_config(g, o, pr), rec);
  return kExitOk;
}

int cmd_vqe(const GlobalOptions& g, const VqeCliOptions& o) {
  validate_vqe(o);
  if (o.ansatz == "adapt") return cmd_adapt(g, o);
  check_format(g, {"json", "csv"});
  const Problem pr = load_problem(o.in);
  const double e0 = sector_e0(pr, g.seed);
  const Ansatz a = make_ansatz(o.ansatz, o, pr.ints, pr.split, pr.mapping);
  const auto r = optimize(a, pr.hf, pr.split.full(), vqe_options(g, o), e0);
  emit_record(g, "vqe", vqe_config(g, o, pr), vqe_record(a, r, e0));
  return kExitOk;
}

struct ScanCliOptions {
  VqeCliOptions vqe;
  std::string dir;
  std::vector<std::string> ansatze{"aga", "agar", "uccsd", "kupccgsd"};
};

int cmd_scan(const GlobalOptions& g, ScanCliOptions o) {
  check_format(g, {"json", "csv"});
  for (const auto& name : o.ansatze)
    if (!kAnsatze.count(name) || name == "adapt") throw ConfigError("scan: unsupported ansatz '" + name + "'");
  VqeCliOptions v = o.vqe;
  v.ansatz = "aga";
  validate_vqe(v);
  const Mapping mapping = parse_mapping(v.in.mapping);
  InputOptions in = v.in;
  if (!o.dir.empty()) in.manifest = (fs::path(o.dir) / "manifest.json").string();
  Manifest m = resolve_manifest(in);
  if (!in.freeze.empty() || !in.drop.empty()) m.active_space = {in.freeze, in.drop};

  std::vector<ScanCase> cases;
  for (const auto& p : m.points) cases.push_back({m.load(p, !in.no_checksum), mapping});
  std::vector<std::pair<std::string, AnsatzBuilder>> builders;
  for (const auto& name : o.ansatze)
    builders.emplace_back(name, [name, v, mapping](const MolecularIntegrals& ints, const AdiabaticSplit& s) {
      return make_ansatz(name, v, ints, s, mapping);
    });
  const auto r = bond_scan(cases, builders, vqe_options(g, v));

  Json config;
  config["molecule"] = m.molecule;
  config["manifest"] = fs::path(in.manifest.empty() ? in.molecule : in.manifest).filename().string();
  config["mapping"] = to_string(mapping);
  config["freeze"] = m.active_space.frozen;
  config["drop"] = m.active_space.dropped;
  config["distances"] = Json::array();
  for (const auto& p : m.points) config["distances"].push_back(p.distance);
  config["ansatze"] = o.ansatze;
  config["k"] = v.k;
  config["agp_reference_lambda"] = v.reference_lambda;
  config["pool_reduction"] = v.pool_reduction;
  config["opt_tol"] = v.opt_tol;
  config["max_iter"] = v.max_iter;
  config["starts"] = v.starts;
  config["seed"] = g.seed;
  if (g.format == "csv") emit(g, "scan", scan_csv(r, config));
  else emit(g, "scan", json_document("scan", config, scan_json(r)));
  return r.failures() ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------------------
// agp-check

int cmd_agp_check(const GlobalOptions& g, const InputOptions& in) {
  check_format(g, {"json", "text"});
  bool ok = true;
  Json lz = Json::array();
  double worst_res = 0.0, worst_cd = 0.0;
  for (double delta : {0.5, 1.0, 2.0})
    for (int k = 0; k <= 8; ++k) {
      const double lambda = 0.25 * k;
      const auto split = landau_zener(delta);
      const auto e = minimize_action(split, lambda, 1);
      const double residual = dense_excess_action(split, e);
      const double diff = simplify(e.potential() - landau_zener_exact_agp(delta, lambda)).one_norm();
      worst_res = std::max(worst_res, residual);
      worst_cd = std::max(worst_cd, diff);
      lz.push_back(Json{{"delta", delta}, {"lambda", lambda}, {"residual_action", residual}, {"agp_error", diff}});
    }
  const bool lz_ok = worst_res < 1e-24 && worst_cd < 1e-12;
  ok = ok && lz_ok;

  const Problem pr = load_problem(in);
  Json mol = Json::array();
  bool mono_ok = true, floor_ok = true;
  for (int k = 0; k <= 4; ++k) {
    const double lambda = 0.25 * k;
    Json row{{"lambda", lambda}};
    double prev = std::numeric_limits<double>::infinity();
    const double floor = dense_action_floor(pr.split, lambda);
    Json actions = Json::array();
    for (int l = 1; l <= kDefaultMaxAgpOrder; ++l) {
      const auto e = minimize_action(pr.split, lambda, l);
      actions.push_back(e.action);
      if (e.action > prev + 1e-10 * std::max(1.0, std::abs(prev))) mono_ok = false;
      if (e.action < floor - 1e-9 * std::max(1.0, floor)) floor_ok = false;
      prev = e.action;
    }
    row["actions"] = actions;
    row["floor"] = floor;
    mol.push_back(row);
  }
  ok = ok && mono_ok && floor_ok;

  Json config;
  config["input"] = input_config(in, pr);
  config["lz_tolerances"] = Json{{"residual_action", 1e-24}, {"agp_error", 1e-12}};
  Json result;
  result["landau_zener"] = Json{{"cases", lz}, {"max_residual_action", worst_res}, {"max_agp_error", worst_cd}, {"pass", lz_ok}};
  result["molecule"] = Json{{"points", mol}, {"monotone_in_order", mono_ok}, {"above_floor", floor_ok}};
  result["pass"] = ok;
  if (g.format == "json") {
    emit(g, "agp-check", json_document("agp-check", config, result));
  } else {
    std::ostringstream out;
    out << "landau-zener: max residual action " << format_double(worst_res) << ", max AGP error "
        << format_double(worst_cd) << (lz_ok ? "  PASS" : "  FAIL") << "\n";
    for (const auto& row : mol) {
      out << "lambda " << format_double(row["lambda"].get<double>()) << ": S_l =";
      for (const auto& a : row["actions"]) out << ' ' << format_double(a.get<double>());
      out << "  floor " << format_double(row["floor"].get<double>()) << "\n";
    }
    out << "S_l monotone in l: " << (mono_ok ? "PASS" : "FAIL") << ", above dense floor: " << (floor_ok ? "PASS" : "FAIL")
        << "\n";
    emit(g, "agp-check", out.str());
  }
  return ok ? kExitOk : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaugekit: counter-diabatic and variational ground-state tools"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI config file; flags override it");
  GlobalOptions g;
  app.add_option("--format", g.format, "csv, json (map also: text)")->capture_default_str();
  app.add_option("--output,-o", g.output, "output file (default: $GAUGEKIT_OUTPUT_DIR/<command>.<ext> or stdout)");
  app.add_option("--seed", g.seed, "seed for optimizer restarts and Lanczos")->capture_default_str();
  app.add_option("--threads", g.threads, "worker cap for sweeps")->capture_default_str();

  MapOptions map_o;
  auto* map = app.add_subcommand("map", "map FCIDUMP integrals to a qubit Hamiltonian");
  map_o.in.add(map);
  map->add_flag("--verify", map_o.verify, "check isospectrality against the other mapping");

  GroundOptions gs_o;
  auto* gs = app.add_subcommand("ground-state", "Lanczos ground energy in the Hartree-Fock sector");
  gs_o.in.add(gs);
  gs->add_flag("--full-space", gs_o.full_space, "search the whole Hilbert space");
  gs->add_option("--dump-state", gs_o.dump_state, "write amplitudes (little-endian re,im doubles)");

  EvolveOptions ev_o;
  auto* ev = app.add_subcommand("evolve", "digitized adiabatic evolution from Hartree-Fock");
  ev_o.in.add(ev);
  ev->add_option("--dt", ev_o.dt, "Trotter step")->capture_default_str();
  ev->add_option("--steps,-N", ev_o.steps, "number of Trotter steps")->capture_default_str();
  ev->add_option("--cd-order", ev_o.cd_order, "AGP order for CD terms, 0 = bare")->capture_default_str();
  ev->add_option("--term-order", ev_o.term_order, "lexicographic or magnitude")->capture_default_str();
  ev->add_option("--cd-layout", ev_o.cd_layout, "merged or separate")->capture_default_str();
  ev->add_flag("--trajectory", ev_o.trajectory, "record <H_lambda> per step");
  ev->add_option("--dump-state", ev_o.dump_state, "write final amplitudes");

  SweepCliOptions sw_o;
  auto* sw = app.add_subcommand("sweep", "(dt, N) grid of bare and CD-assisted evolutions");
  sw_o.in.add(sw);
  sw->add_option("--dt-grid", sw_o.dt_grid, "comma-separated step sizes")->delimiter(',')->capture_default_str();
  sw->add_option("--n-grid", sw_o.n_grid, "comma-separated step counts")->delimiter(',')->capture_default_str();
  sw->add_option("--cd-order", sw_o.cd_order, "AGP order of the CD column, 0 = bare only")->capture_default_str();
  sw->add_option("--term-order", sw_o.term_order)->capture_default_str();
  sw->add_option("--cd-layout", sw_o.cd_layout)->capture_default_str();

  auto add_vqe = [](CLI::App* sub, VqeCliOptions& o, bool with_ansatz) {
    o.in.add(sub);
    if (with_ansatz) sub->add_option("--ansatz", o.ansatz, "aga, agar, uccsd, kupccgsd or adapt")->capture_default_str();
    sub->add_option("--k", o.k, "k-UpCCGSD repetitions")->capture_default_str();
    sub->add_option("--agp-order", o.agp_order, "nested-commutator order of the AGA pool")->capture_default_str();
    sub->add_option("--agp-reference-lambda", o.reference_lambda, "lambda at which the pool is read off")->capture_default_str();
    sub->add_option("--pool-reduction", o.pool_reduction, "none, frozen-qubits or z-group")->capture_default_str();
    sub->add_option("--counting", o.counting, "UCCSD excitations: spin-orbital or spin-adapted")->capture_default_str();
    sub->add_option("--opt-tol", o.opt_tol, "gradient-norm tolerance")->capture_default_str();
    sub->add_option("--max-iter", o.max_iter, "optimizer iterations per start")->capture_default_str();
    sub->add_option("--starts", o.starts, "optimizer starts")->capture_default_str();
    sub->add_option("--threshold", o.threshold, "ADAPT pool-gradient threshold")->capture_default_str();
    sub->add_option("--max-ops", o.max_ops, "ADAPT operator cap")->capture_default_str();
  };
  VqeCliOptions vqe_o;
  auto* vqe = app.add_subcommand("vqe", "variational ground-state search");
  add_vqe(vqe, vqe_o, true);
  VqeCliOptions adapt_o;
  auto* adapt = app.add_subcommand("adapt", "ADAPT-VQE over the excitation pool");
  add_vqe(adapt, adapt_o, false);
  ScanCliOptions scan_o;
  auto* scan = app.add_subcommand("scan", "VQE over every geometry of a fixture manifest");
  add_vqe(scan, scan_o.vqe, false);
  scan->add_option("--dir", scan_o.dir, "directory holding manifest.json and its FCIDUMP files");
  scan->add_option("--ansatze", scan_o.ansatze, "comma-separated ansatz list")->delimiter(',')->capture_default_str();

  InputOptions check_o;
  auto* check = app.add_subcommand("agp-check", "Landau-Zener and molecular AGP validation");
  check_o.add(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (g.threads < 1) throw ConfigError("--threads must be at least 1");
    if (*map) return cmd_map(g, map_o);
    if (*gs) return cmd_ground_state(g, gs_o);
    if (*ev) return cmd_evolve(g, ev_o);
    if (*sw) return cmd_sweep(g, sw_o);
    if (*vqe) return cmd_vqe(g, vqe_o);
    if (*adapt) return cmd_adapt(g, adapt_o);
    if (*scan) return cmd_scan(g, scan_o);
    if (*check) return cmd_agp_check(g, check_o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
