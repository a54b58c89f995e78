#include "bulksurf/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bulksurf/conditions.hpp"
#include "bulksurf/energy.hpp"
#include "bulksurf/format.hpp"
#include "bulksurf/model_file.hpp"
#include "bulksurf/models.hpp"
#include "bulksurf/solver.hpp"
#include "bulksurf/verification.hpp"

namespace bulksurf::cli {

namespace {

namespace fs = std::filesystem;

// Raised for anything the user can fix by changing flags or files.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string point_string(const std::vector<double>& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_double(x[i]);
  return s + ")";
}

std::string opt_string(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }

ModelSpec load_spec(const std::string& path) {
  try {
    return load_model_file(path);
  } catch (const ModelFileError& e) {
    throw InputError(e.what());
  }
}

// ---- check ----------------------------------------------------------------

struct CheckArgs {
  std::string config;
  double box = 10.0;
  int samples = 10000;
  std::uint64_t seed = 42;
  std::string out;
};

void write_key_values(std::ostream& os, const ConditionReport& r, const TheoremVerdict& v) {
  os << "quasi_positivity=" << to_string(r.quasi_positivity) << '\n';
  os << "flux_nonnegative=" << to_string(r.flux_nonnegative) << '\n';
  os << "mass_control=" << to_string(r.mass_control) << '\n';
  os << "polynomial_growth=" << to_string(r.polynomial_growth) << '\n';
  os << "intermediate_sum=" << to_string(r.intermediate_sum) << '\n';
  os << "L=" << opt_string(r.L) << '\n';
  os << "K=" << opt_string(r.K) << '\n';
  os << "conservation=" << (r.conservation ? "true" : "false") << '\n';
  os << "exact_identity=" << (r.exact_identity ? "true" : "false") << '\n';
  os << "dissipation_L=" << opt_string(r.dissipation_L) << '\n';
  os << "K1=" << opt_string(r.K1) << '\n';
  os << "r=" << (r.r ? std::to_string(*r.r) : "none") << '\n';
  os << "L2=" << opt_string(r.L2) << '\n';
  os << "p_omega=" << opt_string(r.p_omega) << '\n';
  os << "p_M=" << opt_string(r.p_M) << '\n';
  os << "mu_M=" << opt_string(r.mu_M) << '\n';
  os << v.summary() << '\n';
}

int cmd_check(const CheckArgs& args, std::ostream& out) {
  ModelSpec spec = load_spec(args.config);
  ReactionSystem sys = spec.build();
  SamplingPlan plan;
  plan.box_radius = args.box;
  plan.random_samples = args.samples;
  plan.rng_seed = args.seed;
  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  ConditionReport report = check_all(sys, plan);
  TheoremVerdict verdict = classify_theorem(sys, report, spec.theorem);

  out << "model " << args.config << ": n=" << sys.n << " m1=" << sys.m1 << " m2=" << sys.m2 << '\n';
  out << "box [0, " << format_double(plan.box_radius) << "], " << plan.random_samples << " random samples, seed "
      << plan.rng_seed << '\n';
  for (const auto& c : report.checks) {
    out << "  [" << to_string(c.verdict) << "] " << c.name << " worst=" << format_double(c.worst_residual);
    if (!c.worst_point.empty()) out << " at " << point_string(c.worst_point);
    if (!c.note.empty()) out << " (" << c.note << ")";
    out << '\n';
  }
  for (const auto& reason : verdict.reasons) out << "  note: " << reason << '\n';
  bool sampling_only = false;
  bool failed = false;
  for (Verdict v : {report.quasi_positivity, report.mass_control, report.polynomial_growth, report.intermediate_sum}) {
    sampling_only = sampling_only || v == Verdict::SamplingOnlyPass;
    failed = failed || v == Verdict::Fail;
  }
  if (sampling_only) out << "warning: some verdicts rest on sampling only (pos() terms)\n";
  write_key_values(out, report, verdict);
  if (!args.out.empty()) {
    std::ofstream f(args.out);
    if (!f) throw InputError("cannot write " + args.out);
    write_key_values(f, report, verdict);
  }
  return failed ? kExitHypothesisFailed : kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out;
  std::string snapshots;
};

std::string snapshot_name(std::size_t k) {
  std::ostringstream os;
  os << "snap_" << std::setw(6) << std::setfill('0') << k << ".txt";
  return os.str();
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  ModelSpec spec = load_spec(args.config);
  if (!spec.sim) throw InputError(args.config + ": simulate needs a [sim] section");
  ReactionSystem sys = spec.build();
  SimConfig config = spec.sim->config();
  SimMeshes meshes;
  DiskState initial;
  try {
    config.validate();
    meshes = spec.sim->meshes(sys.n);
    initial = initial_state(sys, meshes, spec.initial_data());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  } catch (const ParseError& e) {
    throw InputError(std::string("initial data: ") + e.what());
  }
  const bool keep = !args.snapshots.empty();
  Trajectory traj = run_simulation(sys, initial, config, meshes, keep);
  std::ofstream csv(args.out);
  if (!csv) throw InputError("cannot write " + args.out);
  write_diagnostics_csv(csv, sys, config.lp_orders, traj.records);
  if (keep) {
    fs::create_directories(args.snapshots);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      std::ofstream f(fs::path(args.snapshots) / snapshot_name(k));
      write_snapshot(f, traj.snapshots[k], meshes);
    }
  }
  const auto& last = traj.records.back();
  out << "records=" << traj.records.size() << " t=" << format_double(last.t) << " halvings=" << last.halvings
      << " posviol=" << last.posviol << '\n';
  if (traj.blowup) {
    err << "blow-up detected at t=" << format_double(traj.t_blowup) << '\n';
    return kExitBlowup;
  }
  return kExitOk;
}

// ---- energy ---------------------------------------------------------------

struct EnergyArgs {
  std::string config;
  std::string traj;
  std::vector<int> p = {2};
  std::string out;
};

int cmd_energy(const EnergyArgs& args, std::ostream& out) {
  for (int p : args.p) {
    if (p < 2 || p > kMaxEnergyOrder) {
      throw InputError("energy order p=" + std::to_string(p) + " outside [2, " + std::to_string(kMaxEnergyOrder) + "]");
    }
  }
  ModelSpec spec = load_spec(args.config);
  ReactionSystem sys = spec.build();
  if (sys.m1 > kMaxEnergySpecies) throw InputError("energy evaluation supports at most 8 bulk species");
  std::vector<fs::path> files;
  if (fs::is_directory(args.traj)) {
    for (const auto& entry : fs::directory_iterator(args.traj)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("snap_", 0) == 0 && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
  }
  if (files.empty()) throw InputError("no snapshots (snap_*.txt) found in " + args.traj);
  std::sort(files.begin(), files.end());

  auto configs = energy_configs(sys, args.p);
  for (const auto& cfg : configs) {
    if (cfg.theta.empty()) throw InputError("theta selection overflowed for p=" + std::to_string(cfg.p));
  }
  std::ofstream file;
  if (!args.out.empty()) {
    file.open(args.out);
    if (!file) throw InputError("cannot write " + args.out);
  }
  std::ostream& os = args.out.empty() ? out : file;
  for (const auto& cfg : configs) {
    os << "# theta_p" << cfg.p << "=";
    for (std::size_t i = 0; i < cfg.theta.size(); ++i) os << (i ? "," : "") << format_double(cfg.theta[i]);
    os << '\n';
  }
  os << "t";
  for (const auto& cfg : configs) os << ",energy_p" << cfg.p;
  os << '\n';
  for (const auto& path : files) {
    std::ifstream in(path);
    Snapshot snap;
    try {
      snap = read_snapshot(in);
    } catch (const std::exception& e) {
      throw InputError(path.string() + ": " + e.what());
    }
    if (static_cast<int>(snap.state.u.size()) != sys.m1) {
      throw InputError(path.string() + ": snapshot species count differs from the model");
    }
    os << format_double(snap.state.t);
    for (const auto& cfg : configs) os << ',' << format_double(eval_Lp(snap.meshes.bulk.volume, snap.state.u, cfg));
    os << '\n';
  }
  return kExitOk;
}

// ---- verify ---------------------------------------------------------------

int cmd_verify(const std::string& suite, std::uint64_t seed, int cases, std::ostream& out) {
  std::vector<SuiteResult> results;
  try {
    results = run_suites(suite, seed, cases);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  bool ok = true;
  for (const auto& r : results) {
    out << "suite=" << r.suite << " cases=" << r.cases << " max_residual=" << format_double(r.max_residual)
        << " tolerance=" << format_double(r.tolerance);
    if (!r.detail.empty()) out << ' ' << r.detail;
    out << ' ' << (r.passed ? "PASS" : "FAIL") << '\n';
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitHypothesisFailed;
}

// ---- models ---------------------------------------------------------------

int cmd_models_list(std::ostream& out) {
  for (const auto& name : preset_names()) out << name << "  " << make_preset(name).description << '\n';
  return kExitOk;
}

int cmd_models_export(const std::string& name, const std::string& path, std::ostream& out) {
  ModelPreset preset;
  try {
    preset = make_preset(name);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::string text = "# " + preset.name + ": " + preset.description + "\n" + serialize_model(preset.spec);
  if (path.empty()) {
    out << text;
  } else {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path);
    f << text;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"bulksurf: bulk-surface reaction-diffusion lab"};
  app.require_subcommand(1);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "verify structural hypotheses and classify the theorem");
  c->add_option("--config", check.config, "model file")->required();
  c->add_option("--box", check.box, "sampling box radius");
  c->add_option("--samples", check.samples, "random samples");
  c->add_option("--seed", check.seed, "sampling seed");
  c->add_option("--out", check.out, "key-value report path");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "run the model and write diagnostics");
  s->add_option("--config", sim.config, "model file")->required();
  s->add_option("--out", sim.out, "diagnostics CSV path")->required();
  s->add_option("--snapshots", sim.snapshots, "directory for state snapshots");

  std::string suite = "all";
  std::uint64_t vseed = 42;
  int cases = 0;
  auto* v = app.add_subcommand("verify", "run identity suites");
  v->add_option("--suite", suite, "a1, a2, multinomial, mr or all")
      ->check(CLI::IsMember({"a1", "a2", "multinomial", "mr", "all"}));
  v->add_option("--seed", vseed, "random seed");
  v->add_option("--cases", cases, "cases per suite (0 = default)");

  EnergyArgs energy;
  auto* e = app.add_subcommand("energy", "evaluate L_p along saved snapshots");
  e->add_option("--config", energy.config, "model file")->required();
  e->add_option("--traj", energy.traj, "snapshot directory")->required();
  e->add_option("--p", energy.p, "orders, comma separated")->delimiter(',');
  e->add_option("--out", energy.out, "output CSV path");

  std::string export_name, export_out;
  auto* m = app.add_subcommand("models", "built-in models");
  m->require_subcommand(1);
  auto* ml = m->add_subcommand("list", "list presets");
  auto* me = m->add_subcommand("export", "write a preset as a model file");
  me->add_option("name", export_name, "preset name")->required();
  me->add_option("--out", export_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*c) return cmd_check(check, out);
    if (*s) return cmd_simulate(sim, out, err);
    if (*v) return cmd_verify(suite, vseed, cases, out);
    if (*e) return cmd_energy(energy, out);
    if (*ml) return cmd_models_list(out);
    if (*me) return cmd_models_export(export_name, export_out, out);
  } catch (const InputError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitInputError;
  } catch (const ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitInputError;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace bulksurf::cli
