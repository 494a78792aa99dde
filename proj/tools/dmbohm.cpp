// dmbohm command-line driver.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dmbohm/config.hpp"
#include "dmbohm/finite_dim.hpp"
#include "dmbohm/output.hpp"

namespace fs = std::filesystem;
using namespace dmbohm;

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory (default $DMBOHM_OUT_DIR or ./out)");
  cmd->add_option("--set", o.sets, "override section.key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--n", o.n, "trajectory count");
}

RunConfig resolve(const CommonOptions& o, std::optional<Variant> variant) {
  RunConfig c;
  if (!o.config.empty()) {
    c = load_config(o.config);
    if (variant && *variant != c.scenario.variant) {
      throw Error(ErrorCode::BadConfig, "config file describes " + std::string(to_string(c.scenario.variant)) +
                                            ", not " + std::string(to_string(*variant)));
    }
  } else {
    c.scenario = ScenarioConfig::defaults(variant.value_or(Variant::RealDm));
  }
  for (const std::string& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadConfig, "--set expects section.key=value, got " + s);
    apply_override(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed) c.scenario.seed = *o.seed;
  if (o.n) c.scenario.n = *o.n;
  if (!o.out.empty()) c.output.dir = o.out;
  c.scenario.validate();
  return c;
}

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int run_and_write(const RunConfig& c, const std::string& command) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario s = build_interferometer(c.scenario);
  const ScenarioResult r = run_scenario(s);

  const fs::path dir = output_directory(c.output) /
                       (std::string(to_string(c.scenario.variant)) + "-seed" + std::to_string(c.scenario.seed));
  RunManifest m;
  m.command = command;
  m.config_digest = config_digest(c);
  m.seed = c.scenario.seed;

  std::ostringstream traj;
  fs::path traj_path;
  if (c.output.format == TrajectoryFormat::Csv) {
    write_trajectories_csv(traj, r.ensemble);
    traj_path = dir / "trajectories.csv";
  } else {
    write_trajectories_jsonl(traj, r.ensemble);
    traj_path = dir / "trajectories.jsonl";
  }
  write_file(traj_path, traj.str());
  write_file(dir / "summary.json", summary_json(r, c));
  write_file(dir / "config.ini", serialize_config(c));
  m.artifacts = {traj_path, dir / "summary.json", dir / "config.ini"};
  if (c.output.svg) {
    write_file(dir / "trajectories.svg", emit_svg(r.ensemble));
    m.artifacts.push_back(dir / "trajectories.svg");
  }
  if (r.node_entries) m.flags.push_back("NodeEntry:" + std::to_string(r.node_entries));
  if (r.out_of_domain) m.flags.push_back("OutOfDomain:" + std::to_string(r.out_of_domain));
  if (r.boundary_leak()) m.flags.push_back("BoundaryLeak");
  m.artifacts.push_back(dir / "manifest.json");
  m.wall_clock_seconds = seconds_since(start);
  write_file(dir / "manifest.json", manifest_json(m));

  std::printf("%s: crossing_fraction=%s visibility=%s flagged=%zu -> %s\n",
              std::string(to_string(c.scenario.variant)).c_str(), format_number(r.crossing_fraction).c_str(),
              format_number(r.visibility).c_str(), r.node_entries + r.out_of_domain, dir.string().c_str());
  return r.flagged() ? 2 : 0;
}

int cmd_ensembles() {
  using namespace dmbohm::finite;
  const auto ensembles = half_identity_ensembles<double>();
  std::vector<DensityOperator<double>> ops;
  for (std::size_t e = 0; e < ensembles.size(); ++e) {
    std::printf("ensemble %zu:\n", e + 1);
    for (const auto& w : ensembles[e]) {
      std::printf("  p=%s  state=(", format_number(w.probability).c_str());
      for (Eigen::Index i = 0; i < w.state.size(); ++i) {
        std::printf("%s%s%+gi", i ? ", " : "", format_number(w.state[i].real()).c_str(), w.state[i].imag());
      }
      std::printf(")\n");
    }
    ops.push_back(ensemble_to_density(ensembles[e]));
    const auto& m = ops.back().matrix();
    std::printf("  rho = [[%s, %s], [%s, %s]]  S = %s\n", format_number(m(0, 0).real()).c_str(),
                format_number(m(0, 1).real()).c_str(), format_number(m(1, 0).real()).c_str(),
                format_number(m(1, 1).real()).c_str(), format_number(von_neumann_entropy(ops.back())).c_str());
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = a + 1; b < ops.size(); ++b) worst = std::max(worst, max_abs_difference(ops[a], ops[b]));
  }
  // Outcome probabilities on a fixed set of probe states.
  double spread = 0.0;
  for (int j = 0; j < 20; ++j) {
    const double theta = 0.157 * j;
    const double phi = 0.311 * j;
    VectorC<double> probe(2);
    probe << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
    double lo = 1.0;
    double hi = 0.0;
    for (const auto& op : ops) {
      const double p = outcome_probability(op, probe);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    spread = std::max(spread, hi - lo);
  }
  std::printf("max |rho_i - rho_j| = %s\n", format_number(worst).c_str());
  std::printf("max outcome-probability spread over 20 probes = %s\n", format_number(spread).c_str());
  const bool ok = worst < 1e-14 && spread < 1e-14;
  std::printf("indistinguishable: %s\n", ok ? "yes" : "no");
  return ok ? 0 : 1;
}

int cmd_evolve(const RunConfig& c, const std::string& command) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario s = build_interferometer(c.scenario);
  const fs::path dir = output_directory(c.output) / (std::string(to_string(c.scenario.variant)) + "-fields");
  RunManifest m;
  m.command = command;
  m.config_digest = config_digest(c);
  m.seed = c.scenario.seed;
  const auto steps = static_cast<std::int64_t>(std::llround(c.scenario.t_final / c.scenario.dt));
  const GuidanceOptions options{c.scenario.scheme, c.scenario.mass, 1e-12, false};
  double max_edge = 0.0;
  for (std::size_t j = 0; j < s.states.size(); ++j) {
    DensityEvolver evolver(s.states[j], PotentialField::zero(s.grid()), c.scenario.dt, c.scenario.mass);
    for (std::int64_t n = 0;; ++n) {
      if (n % c.scenario.record_stride == 0 || n == steps) {
        const GuidanceField g = make_guidance(evolver.state(), options);
        max_edge = std::max(max_edge, edge_density_ratio(g.density));
        char name[64];
        std::snprintf(name, sizeof name, "state%zu_step%07lld.csv", j, static_cast<long long>(n));
        std::ostringstream csv;
        write_field_csv(csv, g);
        write_file(dir / name, csv.str());
        m.artifacts.push_back(dir / name);
      }
      if (n == steps) break;
      evolver.advance();
    }
  }
  if (max_edge >= 1e-8) m.flags.push_back("BoundaryLeak");
  write_file(dir / "config.ini", serialize_config(c));
  m.artifacts.push_back(dir / "config.ini");
  m.artifacts.push_back(dir / "manifest.json");
  m.wall_clock_seconds = seconds_since(start);
  write_file(dir / "manifest.json", manifest_json(m));
  std::printf("wrote %zu field snapshots to %s\n", m.artifacts.size() - 2, dir.string().c_str());
  return m.flags.empty() ? 0 : 2;
}

int cmd_check(const RunConfig& c) {
  RunConfig rc = c;
  rc.scenario.variant = Variant::RealDm;
  const Scenario s = build_interferometer(rc.scenario);
  const ScenarioResult r = run_scenario(s);
  bool all = true;
  auto report = [&all](const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    all = all && ok;
  };
  report("continuity", r.max_continuity_residual < 1e-3,
         "max residual " + format_number(r.max_continuity_residual) + " < 1e-3");
  for (const auto& p : r.equivariance) {
    report("equivariance", p.tv < 0.05, "t=" + format_number(p.time) + " TV " + format_number(p.tv) + " < 0.05");
  }
  report("no-crossing", r.crossing_fraction == 0.0 && order_preserved(r.ensemble),
         "crossing fraction " + format_number(r.crossing_fraction) + ", order preserved");
  const double flagged = static_cast<double>(r.node_entries + r.out_of_domain) / static_cast<double>(rc.scenario.n);
  report("flags", flagged < 0.005, "flagged fraction " + format_number(flagged) + " < 0.005");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density-matrix Bohm trajectory simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DMBOHM_VERSION);

  app.add_subcommand("ensembles", "finite-dimensional ensemble table, operators and entropy");

  CommonOptions evolve_opts;
  auto* evolve = app.add_subcommand("evolve", "field evolution only; dumps P/J snapshots as CSV");
  add_common(evolve, evolve_opts);

  CommonOptions traj_opts;
  auto* traj = app.add_subcommand("trajectories", "guidance and trajectory ensemble run");
  add_common(traj, traj_opts);

  CommonOptions scen_opts;
  std::string variant_name;
  auto* scen = app.add_subcommand("scenario", "run an interferometer scenario");
  scen->add_option("variant", variant_name, "real-dm | assembly-rho1 | assembly-rho2 | measured-path | "
                                            "product-state | correlated-pointer | superposition")
      ->required();
  add_common(scen, scen_opts);

  CommonOptions check_opts;
  auto* check = app.add_subcommand("check", "built-in invariant suite on the real-dm scenario");
  add_common(check, check_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\nconfig schema:\n" << serialize_config(RunConfig{});
    return 1;
  }

  const std::string command = command_line(argc, argv);
  try {
    if (app.got_subcommand("ensembles")) return cmd_ensembles();
    if (app.got_subcommand(evolve)) return cmd_evolve(resolve(evolve_opts, std::nullopt), command);
    if (app.got_subcommand(traj)) return run_and_write(resolve(traj_opts, std::nullopt), command);
    if (app.got_subcommand(scen)) return run_and_write(resolve(scen_opts, parse_variant(variant_name)), command);
    if (app.got_subcommand(check)) return cmd_check(resolve(check_opts, std::nullopt));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::BadConfig) std::cerr << "\nconfig schema:\n" << serialize_config(RunConfig{});
    return 1;
  }
  return 1;
}
