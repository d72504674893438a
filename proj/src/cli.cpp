#include "fixmag/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "fixmag/annealed.hpp"
#include "fixmag/dynamics.hpp"
#include "fixmag/error.hpp"
#include "fixmag/graph.hpp"
#include "fixmag/parallel.hpp"
#include "fixmag/planted.hpp"
#include "fixmag/tree.hpp"
#include "fixmag/validation.hpp"

namespace fixmag {

namespace {

struct Config {
  int d = 3;
  double beta = 0.5;
  double eta = 0.0;
  int k = -1;
  int n = 100;
  std::uint64_t seed = 1;
  int replicas = 1;
  int sweeps = 100;
  int burn_in = 100;
  std::string out;
  double h = 0.0;
  int points = 201;
  int depth = 8;
  int samples = 1000;
  std::string variant = "glauber";
  std::string init = "uniform";
  int threads = 0;
};

int plus_count(const Config& c) {
  if (c.k >= 0) {
    if (c.k > c.n) throw InvalidParameter("--k must not exceed --n");
    return c.k;
  }
  if (!(std::abs(c.eta) <= 1.0)) throw InvalidParameter("--eta must lie in [-1, 1]");
  return static_cast<int>(std::lround(0.5 * (1.0 + c.eta) * c.n));
}

void require(bool ok, const char* message) {
  if (!ok) throw InvalidParameter(message);
}

// One-line JSON echo of everything that determines the output.
void metadata(std::ostream& os, const std::string& command, const Config& c, nlohmann::ordered_json extra = {}) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["params"] = {{"d", c.d},           {"beta", c.beta},       {"eta", c.eta},       {"k", c.k},
                 {"n", c.n},           {"replicas", c.replicas}, {"sweeps", c.sweeps}, {"burn_in", c.burn_in},
                 {"h", c.h},           {"points", c.points},   {"depth", c.depth},   {"samples", c.samples},
                 {"variant", c.variant}, {"init", c.init}};
  if (!extra.is_null()) j["derived"] = extra;
  j["seed"] = c.seed;
  j["rng"] = Philox::kName;
  j["version"] = kVersion;
  os << "# " << j.dump() << '\n';
}

void cmd_thresholds(const Config& c, std::ostream& os) {
  const Thresholds t = thresholds(c.d);
  metadata(os, "thresholds", c);
  os << "d,beta_c,beta_r\n" << c.d << ',' << t.beta_c << ',' << t.beta_r << '\n';
}

void cmd_free_energy_curve(const Config& c, std::ostream& os) {
  const FreeEnergyCurve curve = free_energy_curve(c.d, c.beta, c.points);
  const double f_star = free_energy(c.d, c.beta, curve.eta_star);
  nlohmann::ordered_json extra = {{"eta_star", curve.eta_star}};
  extra["eta_spinodal"] = curve.eta_spinodal ? nlohmann::ordered_json(*curve.eta_spinodal) : nlohmann::ordered_json();
  metadata(os, "free-energy-curve", c, extra);
  os << "eta,f,rho,F,rate\n";
  for (const auto& p : curve.points) {
    os << p.eta << ',' << p.f << ',' << p.rho << ',' << drift_function(c.d, c.beta, p.eta) << ',' << p.f - f_star
       << '\n';
  }
}

void cmd_bp(const Config& c, std::ostream& os) {
  const auto fixed = bp_fixed_points({c.d, c.beta, c.h});
  metadata(os, "bp", c);
  os << "R,h,eta,rho,stable,lambda2,ks_product\n";
  for (const auto& m : fixed) {
    os << m.R << ',' << m.h << ',' << m.eta << ',' << m.rho << ',' << (m.stable ? 1 : 0) << ','
       << second_eigenvalue(m) << ',' << kesten_stigum_product(m) << '\n';
  }
}

void cmd_reconstruction(const Config& c, std::ostream& os) {
  require(c.depth >= 1 && c.depth <= 14, "--depth must lie in [1, 14]");
  require(c.samples >= 1, "--samples must be positive");
  const auto rows = run_replicas(
      static_cast<std::size_t>(c.depth),
      [&](std::size_t i) {
        Philox rng(c.seed, i);
        return reconstruction_tv(c.d, c.beta, c.eta, static_cast<int>(i) + 1, c.samples, rng);
      },
      static_cast<std::size_t>(c.threads));
  metadata(os, "reconstruction", c);
  os << "depth,tv,stderr\n";
  for (std::size_t i = 0; i < rows.size(); ++i) os << i + 1 << ',' << rows[i].value << ',' << rows[i].std_error << '\n';
}

void cmd_sample_planted(const Config& c, std::ostream& os) {
  Philox rng(c.seed, 0);
  const PlantedSample s = sample_planted(c.n, c.d, c.beta, plus_count(c), rng);
  metadata(os, "sample-planted", c, {{"bichromatic_count", s.bichromatic_count}, {"H", s.config.H()}});
  write_planted(os, s);
}

void cmd_run_dynamics(const Config& c, std::ostream& os) {
  const Variant variant = parse_variant(c.variant);
  const InitKind init = parse_init(c.init);
  require(c.replicas >= 1 && c.sweeps >= 0, "--replicas must be positive and --sweeps non-negative");
  const int k = c.k;
  const auto runs = run_replicas(
      static_cast<std::size_t>(c.replicas),
      [&](std::size_t r) {
        Philox rng(c.seed, r);
        const Pairing pairing = sample_uniform_pairing(c.n, c.d, rng);
        if (variant == Variant::Kawasaki && k >= 0) {
          Chain chain(pairing, SpinConfig::random_with_k(pairing, plus_count(c), rng), c.beta, variant, rng.derive(rng()));
          return record_trajectory(chain, c.sweeps);
        }
        return mixing_experiment(pairing, c.beta, init, c.sweeps, rng, variant);
      },
      static_cast<std::size_t>(c.threads));
  metadata(os, "run-dynamics", c);
  os << "replica,t,k_plus,magnetization,H\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& p : runs[r]) os << r << ',' << p.t << ',' << p.k_plus << ',' << p.magnetization << ',' << p.H << '\n';
  }
}

void cmd_projection(const Config& c, std::ostream& os) {
  require(c.n >= 2 && c.sweeps >= 1 && c.burn_in >= 0, "--n >= 2, --sweeps >= 1 and --burn-in >= 0 required");
  Philox graph_rng(c.seed, 0);
  const Pairing pairing = sample_uniform_pairing(c.n, c.d, graph_rng);
  const int k_lo = (c.n + 1) / 2;
  const auto est = run_replicas(
      static_cast<std::size_t>(c.n - k_lo),
      [&](std::size_t i) {
        Philox rng(c.seed, 1 + i);
        return ratio_estimator(pairing, c.beta, k_lo + static_cast<int>(i), c.sweeps, c.burn_in, rng);
      },
      static_cast<std::size_t>(c.threads));
  std::vector<double> r, se;
  for (const auto& e : est) {
    r.push_back(e.value);
    se.push_back(e.std_error);
  }
  const ProjectionChain mr = projection_chain(c.n, k_lo, r, se, ProjectionConvention::MadrasRandall);
  const ProjectionChain display = projection_chain(c.n, k_lo, r, se, ProjectionConvention::DisplayedRates);
  metadata(os, "projection", c);
  os << "k,eta,ratio,stderr,F,up,down,drift,up_display,down_display,drift_display\n";
  for (std::size_t i = 0; i < mr.size(); ++i) {
    const int k = mr.state(i);
    const double eta = 2.0 * k / c.n - 1.0;
    os << k << ',' << eta << ',' << r[i] << ',' << se[i] << ',' << drift_function(c.d, c.beta, eta) << ',' << mr.up[i]
       << ',' << mr.down[i] << ',' << mr.drift(i) << ',' << display.up[i] << ',' << display.down[i] << ','
       << display.drift(i) << '\n';
  }
}

bool cmd_oracle_validate(const Config& c, std::ostream& os) {
  metadata(os, "oracle-validate", c);
  bool all = true;
  for (const auto& r : run_oracle_validation()) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name << ' ' << r.detail << '\n';
    all = all && r.passed;
  }
  os << (all ? "ALL PASS" : "FAILURES PRESENT") << '\n';
  return all;
}

void cmd_zb_check(const Config& c, std::ostream& os) {
  const ZBReport z = zb_check(c.d, c.beta, c.n, c.replicas, c.burn_in, c.sweeps, c.seed);
  metadata(os, "zb-check", c);
  const double half = 0.5 * c.d;
  os << "fixed_energy,fixed_stderr,fixed_target,anti_energy,anti_stderr,anti_target,sum,half_d,sum_rel_err\n";
  os << z.fixed_energy << ',' << z.fixed_error << ',' << z.fixed_target << ',' << z.anti_energy << ',' << z.anti_error
     << ',' << z.anti_target << ',' << z.sum() << ',' << half << ',' << std::abs(z.sum() - half) / half << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Ising model at fixed magnetization on random regular graphs"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "File of `key = value` lines; flags given on the command line take precedence");
  app.require_subcommand(1);
  app.add_option("--d", c.d, "Degree");
  app.add_option("--beta", c.beta, "Inverse temperature");
  app.add_option("--eta", c.eta, "Magnetization (used when --k is not given)");
  app.add_option("--k", c.k, "Plus count");
  app.add_option("--n", c.n, "Number of vertices");
  app.add_option("--seed", c.seed, "64-bit seed");
  app.add_option("--replicas", c.replicas, "Independent replicas");
  app.add_option("--sweeps", c.sweeps, "Sweeps (measurement sweeps where applicable)");
  app.add_option("--burn-in", c.burn_in, "Burn-in sweeps");
  app.add_option("--out", c.out, "Output file (default stdout)");
  app.add_option("--field", c.h, "External field h for bp");
  app.add_option("--points", c.points, "Grid points for free-energy-curve");
  app.add_option("--depth", c.depth, "Maximum depth for reconstruction");
  app.add_option("--samples", c.samples, "Monte Carlo samples per depth");
  app.add_option("--variant", c.variant, "glauber|kawasaki|hybrid|glauber_plus|hybrid_plus");
  app.add_option("--init", c.init, "uniform|all_plus|all_minus");
  app.add_option("--threads", c.threads, "Worker threads (0 = hardware)");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"thresholds", "Uniqueness and reconstruction thresholds"},
      {"free-energy-curve", "Annealed free energy, rho, drift and rate on an eta grid"},
      {"bp", "Fixed points of the tree recursion at field h"},
      {"reconstruction", "Root-boundary TV distance against depth"},
      {"sample-planted", "One exact planted (graph, configuration) sample"},
      {"run-dynamics", "Trajectories of a chain on random graphs"},
      {"projection", "Ratio estimates and projection-chain drift"},
      {"oracle-validate", "Exact oracle suite; exit 1 on any failure"},
      {"zb-check", "Zero-magnetization versus antiferromagnet energy identity"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) {
      err << "error: cannot open " << c.out << '\n';
      return kExitUsage;
    }
  }
  std::ostream& os = c.out.empty() ? out : file;
  os << std::setprecision(12);
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (!(c.beta >= 0.0) || !std::isfinite(c.beta)) throw InvalidParameter("beta must be finite and non-negative");
    if (name == "thresholds") cmd_thresholds(c, os);
    else if (name == "free-energy-curve") cmd_free_energy_curve(c, os);
    else if (name == "bp") cmd_bp(c, os);
    else if (name == "reconstruction") cmd_reconstruction(c, os);
    else if (name == "sample-planted") cmd_sample_planted(c, os);
    else if (name == "run-dynamics") cmd_run_dynamics(c, os);
    else if (name == "projection") cmd_projection(c, os);
    else if (name == "oracle-validate") return cmd_oracle_validate(c, os) ? kExitOk : kExitValidation;
    else if (name == "zb-check") cmd_zb_check(c, os);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace fixmag
