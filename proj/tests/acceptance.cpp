// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fixmag/annealed.hpp"
#include "fixmag/cli.hpp"
#include "fixmag/dynamics.hpp"
#include "fixmag/graph.hpp"
#include "fixmag/oracle.hpp"
#include "fixmag/parallel.hpp"
#include "fixmag/planted.hpp"
#include "fixmag/rng.hpp"
#include "fixmag/tree.hpp"
#include "fixmag/validation.hpp"

using namespace fixmag;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Pairing k4() { return Pairing::from_vertex_edges(4, 3, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}); }

Outcome closed_forms() {
  double f_err = 0.0, rho_err = 0.0, f0_err = 0.0, slope_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int d = 3 + i;
    for (int j = 0; j < 20; ++j) {
      const double beta = 0.1 * (j + 1);
      const double expected = std::log(2.0) + d / 2.0 * std::log((1.0 + std::exp(beta)) / 2.0);
      f_err = std::max(f_err, std::abs(free_energy(d, beta, 0.0) - expected));
      rho_err = std::max(rho_err, std::abs(rho_eta(beta, 0.0) - std::exp(beta) / (1.0 + std::exp(beta))));
      f0_err = std::max(f0_err, std::abs(drift_function(d, beta, 0.0) - 1.0));
      const double h = 1e-5;
      const double slope = (drift_function(d, beta, h) - drift_function(d, beta, -h)) / (2.0 * h);
      slope_err = std::max(slope_err, std::abs(slope - (-2.0 + d * (1.0 - std::exp(-beta)))));
    }
  }
  double ks_err = 0.0;
  for (int d = 3; d <= 22; ++d) {
    const TreeMeasure m = make_tree_measure(d, thresholds(d).beta_r, 0.0, 1.0);
    ks_err = std::max(ks_err, std::abs((d - 1) * std::pow(second_eigenvalue(m), 2) - 1.0));
  }
  const bool ok = f_err < 1e-12 && rho_err < 1e-12 && f0_err < 1e-12 && slope_err < 1e-6 && ks_err < 1e-10;
  return {ok, fmt("f0 %.1e rho0 %.1e F(0) %.1e F'(0) %.1e KS %.1e", f_err, rho_err, f0_err, slope_err, ks_err)};
}

// Maximizes g over rho by bisecting the sign of its central difference.
double argmax_g(int d, double beta, double eta) {
  double lo = std::abs(eta), hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double h = std::min({1e-7, 0.5 * (mid - std::abs(eta)), 0.5 * (1.0 - mid)});
    if (g_functional(d, beta, eta, mid + h) > g_functional(d, beta, eta, mid - h)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Outcome optimizer_vs_formula() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      for (int l = 0; l < 10; ++l) {
        const int d = 3 + i;
        const double beta = 0.05 + 0.2 * j;
        const double eta = -0.9 + 0.2 * l;
        worst = std::max(worst, std::abs(argmax_g(d, beta, eta) - rho_eta(beta, eta)));
      }
    }
  }
  return {worst < 1e-8, fmt("max |argmax - rho_eta| %.2e over 1000 points", worst)};
}

Outcome first_moment() {
  double worst = 0.0;
  int cases = 0;
  for (double beta : {0.0, 0.5, 1.5}) {
    for (int d = 1; d <= 12; ++d) {
      for (int n = 1; n * d <= 12; ++n) {
        if ((n * d) % 2) continue;
        const auto table = first_moment_table(n, d, beta);
        for (int k = 0; k <= n; ++k, ++cases) {
          worst = std::max(worst, rel(std::exp(log_annealed_first_moment(n, d, beta, k)), table[k]));
        }
      }
    }
  }
  return {worst < 1e-10, fmt("%d (n,d,k,beta) cases, max rel err %.2e", cases, worst)};
}

// Draws with the configuration (-, +) are mapped through the vertex swap, so
// every draw is a sample of the pairing law given the configuration (+, -).
Outcome planted_exactness() {
  constexpr int kDraws = 1000000;
  const std::map<int, double> chi2_critical = {{5, 20.515005652432876}, {8, 26.124481558376143}};  // p = 0.001
  std::string detail;
  bool ok = true;
  for (double beta : {0.0, 0.7}) {
    std::vector<Pairing> support;
    std::vector<double> weight;
    std::vector<long> stratum;
    const std::vector<std::int8_t> plus_minus = {1, -1};
    for_each_pairing(2, 3, [&](const Pairing& p) {
      const long h = oracle_energy(vertex_edges(p), plus_minus);
      support.push_back(p);
      weight.push_back(std::exp(beta * h));
      stratum.push_back(3 - h);
    });
    double total = 0.0;
    for (double w : weight) total += w;

    PlantedSampler sampler(2, 3, beta, 1);
    Philox rng(2024, static_cast<std::uint64_t>(beta * 10));
    std::vector<long> counts(support.size(), 0);
    for (int i = 0; i < kDraws; ++i) {
      const PlantedSample s = sampler(rng);
      std::vector<int> mate = s.pairing.mates();
      if (s.config.spin(0) < 0) {
        std::vector<int> swapped(6);
        for (int c = 0; c < 6; ++c) swapped[(c + 3) % 6] = (mate[c] + 3) % 6;
        mate = swapped;
      }
      const Pairing p(2, 3, mate);
      const auto it = std::find(support.begin(), support.end(), p);
      ++counts[static_cast<std::size_t>(it - support.begin())];
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) tv += std::abs(counts[i] / double(kDraws) - weight[i] / total);
    tv *= 0.5;
    ok = ok && tv < 0.005;
    detail += fmt("beta %.1f: %zu points TV %.5f;", beta, support.size(), tv);
    for (long b : {1L, 3L}) {
      long n_b = 0, size = 0;
      for (std::size_t i = 0; i < support.size(); ++i) {
        if (stratum[i] == b) {
          n_b += counts[i];
          ++size;
        }
      }
      const double expected = static_cast<double>(n_b) / size;
      double chi2 = 0.0;
      for (std::size_t i = 0; i < support.size(); ++i) {
        if (stratum[i] == b) chi2 += std::pow(counts[i] - expected, 2) / expected;
      }
      const double critical = chi2_critical.at(static_cast<int>(size - 1));
      ok = ok && chi2 < critical;
      detail += fmt(" B=%ld chi2 %.2f (df %ld, crit %.2f);", b, chi2, size - 1, critical);
    }
  }
  return {ok, detail};
}

Outcome ratio_identity() {
  double worst = 0.0;
  std::size_t total_graphs = 0;
  for (int n : {2, 4, 6}) {
    for (double beta : {0.3, 1.1}) {
      std::size_t graphs = 0;
      worst = std::max(worst, ratio_identity_error(n, 3, beta, &graphs));
      total_graphs += graphs;
    }
  }
  const Pairing g = k4();
  double k4_err = 0.0;
  for (double beta : {0.0, 0.4, 1.3}) {
    double mean = 0.0, z1 = 0.0;
    for_each_config_with_k(4, 1, [&](const std::vector<std::int8_t>& s) {
      const SpinConfig c(g, s);
      const double w = std::exp(beta * static_cast<double>(c.H()));
      z1 += w;
      mean += w * ratio_statistic(g, c, beta);
    });
    k4_err = std::max(k4_err, rel(mean / z1, 1.5 * std::exp(-beta)));
  }
  const bool ok = worst < 1e-10 && k4_err < 1e-13;
  return {ok, fmt("%zu multigraph instances, max rel err %.2e; K4 z2/z1 rel err %.2e", total_graphs, worst, k4_err)};
}

Outcome chain_correctness() {
  bool ok = true;
  std::string detail;
  double worst_balance = 0.0;
  for (double beta : {0.0, 0.5, 1.5}) {
    const ChainAudit a = audit_chains(4, 3, beta);
    worst_balance = std::max({worst_balance, a.worst_reversibility, a.worst_row_sum, a.worst_stationarity});
    ok = ok && a.comparison_holds && a.decomposition_holds;
    detail += fmt("beta %.1f margins %.2e/%.2e; ", beta, a.worst_comparison_margin, a.worst_decomposition_margin);
  }
  ok = ok && worst_balance < 1e-10;

  // Kawasaki fuzz: random graphs, slices and temperatures, conservation checked every step.
  Philox rng(77, 0);
  std::uint64_t steps = 0, violations = 0, energy_mismatch = 0;
  while (steps < 10000000) {
    const int d = 3 + static_cast<int>(rng.below(3));
    int n = 2 + static_cast<int>(rng.below(60));
    if ((n * d) % 2) ++n;
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(n + 1)));
    const double beta = 4.0 * rng.uniform() - 2.0;
    const Pairing p = sample_uniform_pairing(n, d, rng);
    Chain chain(p, SpinConfig::random_with_k(p, k, rng), beta, Variant::Kawasaki, rng.derive(rng()));
    for (int i = 0; i < 10000; ++i, ++steps) {
      chain.step();
      if (chain.config().k_plus() != k) ++violations;
    }
    if (chain.config().H() != count_mono(p, chain.config().spins())) ++energy_mismatch;
  }
  ok = ok && violations == 0 && energy_mismatch == 0;
  detail += fmt("balance err %.2e; %llu Kawasaki steps, %llu k violations, %llu H mismatches", worst_balance,
                static_cast<unsigned long long>(steps), static_cast<unsigned long long>(violations),
                static_cast<unsigned long long>(energy_mismatch));
  return {ok, detail};
}

Outcome reconstruction_bracket() {
  constexpr int kSamples = 10000;
  Philox a(7, 3), b(7, 8), c(7, 9);
  const Estimate shallow = reconstruction_tv(3, 1.2, 0.0, 3, kSamples, a);
  const Estimate deep = reconstruction_tv(3, 1.2, 0.0, 8, kSamples, b);
  const Estimate cold = reconstruction_tv(3, 2.5, 0.0, 8, kSamples, c);
  const double se = std::hypot(shallow.std_error, deep.std_error);
  const bool ok = deep.value < shallow.value - 3.0 * se && cold.value > 0.1;
  return {ok, fmt("beta 1.2: depth3 %.4f depth8 %.4f (3SE %.4f); beta 2.5: depth8 %.4f", shallow.value, deep.value,
                  3.0 * se, cold.value)};
}

Outcome zdeborova_boettcher() {
  const ZBReport z = zb_check(3, 0.5, 400, 8, 500, 2000, 11);
  const double sum_err = rel(z.sum(), 1.5);
  const double fixed_err = rel(z.fixed_energy, z.fixed_target);
  const double anti_err = rel(z.anti_energy, z.anti_target);
  const bool ok = sum_err < 0.03 && fixed_err < 0.03 && anti_err < 0.03;
  return {ok, fmt("fix %.4f (target %.4f), anti %.4f (target %.4f), sum %.4f vs 1.5: rel errs %.2e %.2e %.2e",
                  z.fixed_energy, z.fixed_target, z.anti_energy, z.anti_target, z.sum(), fixed_err, anti_err,
                  sum_err)};
}

Outcome phase_ordering() {
  constexpr int n = 500, d = 10, kReplicas = 20;
  constexpr double beta = 0.32;
  const double target = 0.9 * eta_star(d, beta);
  const int budget_sweeps = static_cast<int>(200.0 * std::log(n));

  const auto reached = run_replicas(kReplicas, [&](std::size_t r) {
    Philox rng(31, r);
    const Pairing p = sample_uniform_pairing(n, d, rng);
    const auto traj = mixing_experiment(p, beta, InitKind::Uniform, budget_sweeps, rng);
    for (const auto& pt : traj) {
      if (std::abs(pt.magnetization) >= target) return 1;
    }
    return 0;
  });
  int hits = 0;
  for (int r : reached) hits += r;

  const auto crossed = run_replicas(kReplicas, [&](std::size_t r) {
    Philox rng(32, r);
    const Pairing p = sample_uniform_pairing(n, d, rng);
    Chain chain(p, SpinConfig::uniform(p, 1), beta, Variant::Glauber, rng.derive(rng()));
    for (long s = 0; s < 10000L * n; ++s) {
      chain.step();
      if (2 * chain.config().k_plus() <= n) return 1;
    }
    return 0;
  });
  int crossings = 0;
  for (int c : crossed) crossings += c;
  const bool ok = hits >= 18 && crossings == 0;
  return {ok, fmt("%d/%d replicas reach |m| >= %.4f within %d sweeps; %d/%d all-plus runs reach m <= 0 in 1e4 sweeps",
                  hits, kReplicas, target, budget_sweeps, crossings, kReplicas)};
}

Outcome drift_profile() {
  constexpr int n = 500, d = 10, kWindow = 10;
  constexpr double beta = 0.32;
  Philox graph_rng(41, 0);
  const Pairing p = sample_uniform_pairing(n, d, graph_rng);
  const int k_lo = n / 2;
  const auto est = run_replicas(static_cast<std::size_t>(n - k_lo), [&](std::size_t i) {
    Philox rng(41, 1 + i);
    return ratio_estimator(p, beta, k_lo + static_cast<int>(i), 400, 100, rng);
  });
  std::vector<double> r;
  for (const auto& e : est) r.push_back(e.value);
  const ProjectionChain chain = projection_chain(n, k_lo, r);

  bool ok = true;
  std::string detail;
  for (double eta : {0.0, 0.2, 0.4}) {
    const int k = static_cast<int>(std::lround(0.5 * (1.0 + eta) * n));
    const double err = rel(r[static_cast<std::size_t>(k - k_lo)], drift_function(d, beta, eta));
    ok = ok && err < 0.05;
    detail += fmt("eta %.1f rel err %.4f; ", eta, err);
  }

  // Drift averaged over windows of consecutive plus-counts in (n/2, n).
  std::vector<double> centre, mean;
  for (int start = k_lo + 1; start < n; start += kWindow) {
    const int stop = std::min(n, start + kWindow);
    double s = 0.0;
    for (int k = start; k < stop; ++k) s += chain.drift(static_cast<std::size_t>(k - k_lo));
    mean.push_back(s / (stop - start));
    centre.push_back(2.0 * (0.5 * (start + stop - 1)) / n - 1.0);
  }
  int changes = 0;
  double root = 0.0;
  for (std::size_t i = 1; i < mean.size(); ++i) {
    if ((mean[i - 1] > 0) != (mean[i] > 0)) {
      ++changes;
      root = centre[i - 1] + (centre[i] - centre[i - 1]) * mean[i - 1] / (mean[i - 1] - mean[i]);
    }
  }
  int raw_changes = 0;
  for (std::size_t i = 2; i < chain.size(); ++i) raw_changes += (chain.drift(i - 1) > 0) != (chain.drift(i) > 0);
  const double m_star = drift_root(d, beta);
  ok = ok && changes == 1 && std::abs(root - m_star) <= 0.05;
  detail += fmt("window sign changes %d at eta %.4f vs m* %.4f (per-state changes %d)", changes, root, m_star,
                raw_changes);
  return {ok, detail};
}

Outcome local_clt() {
  const EdgeCountPMF pmf = edge_count_pmf(750, 750, 0.5);
  const double sigma = std::sqrt(pmf.sigma2);
  const double window = sigma * std::log(sigma);
  const double peak = *std::max_element(pmf.probabilities.begin(), pmf.probabilities.end());
  double sup = 0.0;
  std::size_t points = 0;
  for (std::size_t i = 0; i < pmf.support.size(); ++i) {
    const double x = static_cast<double>(pmf.support[i]) - pmf.mu;
    if (std::abs(x) > window) continue;
    ++points;
    const double gauss = 2.0 * std::exp(-x * x / (2.0 * pmf.sigma2)) / std::sqrt(2.0 * std::numbers::pi * pmf.sigma2);
    sup = std::max(sup, std::abs(pmf.probabilities[i] - gauss));
  }
  return {sup < 0.15 * peak && points > 0,
          fmt("mu %.3f sigma %.3f, %zu points, sup dev %.3e = %.2f%% of peak %.3e", pmf.mu, sigma, points, sup,
              100.0 * sup / peak, peak)};
}

std::string run_cli(const std::vector<std::string>& args, int* code) {
  std::vector<const char*> argv = {"fixmag"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  *code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands = {
      {"thresholds", "--d", "10"},
      {"free-energy-curve", "--d", "10", "--beta", "0.32", "--points", "2001"},
      {"bp", "--d", "3", "--beta", "1.5", "--field", "0.05"},
      {"reconstruction", "--d", "3", "--beta", "1.5", "--depth", "5", "--samples", "500", "--seed", "9"},
      {"sample-planted", "--n", "60", "--d", "3", "--beta", "0.8", "--eta", "0.2", "--seed", "5"},
      {"run-dynamics", "--n", "80", "--d", "4", "--beta", "0.6", "--replicas", "4", "--sweeps", "50", "--seed", "3"},
      {"run-dynamics", "--n", "40", "--d", "3", "--beta", "0.6", "--variant", "kawasaki", "--k", "25", "--sweeps",
       "30"},
      {"projection", "--n", "40", "--d", "3", "--beta", "0.9", "--sweeps", "40", "--burn-in", "10"},
      {"zb-check", "--n", "60", "--d", "3", "--beta", "0.5", "--replicas", "3", "--sweeps", "50", "--burn-in", "20"},
      {"oracle-validate"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& args : commands) {
    int c1 = -1, c2 = -1;
    const std::string a = run_cli(args, &c1);
    const std::string b = run_cli(args, &c2);
    const bool same = a == b && c1 == 0 && c2 == 0 && !a.empty();
    ok = ok && same;
    if (!same) detail += args[0] + " differs; ";
  }
  // Replica fan-out must not depend on the thread count.
  int c1 = -1, c2 = -1;
  auto threaded = [&](const char* threads, int* code) {
    return run_cli({"run-dynamics", "--n", "60", "--d", "3", "--beta", "0.7", "--replicas", "6", "--sweeps", "40",
                    "--threads", threads},
                   code);
  };
  const bool thread_stable = threaded("1", &c1) == threaded("4", &c2) && c1 == 0 && c2 == 0;
  ok = ok && thread_stable;
  detail += fmt("%zu subcommand runs byte-identical: %s; threads 1 vs 4 identical: %s", commands.size(),
                ok ? "yes" : "no", thread_stable ? "yes" : "no");
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"closed_form_identities", 1, closed_forms},
      {"optimizer_matches_formula", 10, optimizer_vs_formula},
      {"exact_first_moment", 60, first_moment},
      {"planted_sampler_exact", 300, planted_exactness},
      {"ratio_identity", 60, ratio_identity},
      {"chain_correctness", 60, chain_correctness},
      {"reconstruction_bracketing", 600, reconstruction_bracket},
      {"zdeborova_boettcher", 900, zdeborova_boettcher},
      {"phase_ordering", 1800, phase_ordering},
      {"drift_profile", 1800, drift_profile},
      {"local_clt", 60, local_clt},
      {"determinism", 600, determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool passed = o.passed && in_time;
    failures += passed ? 0 : 1;
    std::printf("%s %2zu %s (%.2f s of %.0f s) %s%s\n", passed ? "PASS" : "FAIL", i + 1, c.name, secs,
                c.budget_seconds, o.detail.c_str(), in_time ? "" : " [over time budget]");
    std::fflush(stdout);
  }
  std::printf("%s: %zu criteria, %d failed\n", failures ? "FAIL" : "PASS", criteria.size(), failures);
  return failures ? 1 : 0;
}
