#include "fixmag/validation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "fixmag/annealed.hpp"
#include "fixmag/dynamics.hpp"
#include "fixmag/graph.hpp"
#include "fixmag/oracle.hpp"
#include "fixmag/tree.hpp"

namespace fixmag {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Pairing k4() { return Pairing::from_vertex_edges(4, 3, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}); }

}  // namespace

ChainAudit audit_chains(int n, int d, double beta) {
  ChainAudit audit;
  for_each_multigraph(n, d, [&](const Pairing& p) {
    ++audit.graphs;
    std::vector<DenseChain> chains;
    for (Variant v : {Variant::Glauber, Variant::Hybrid, Variant::GlauberPlus, Variant::HybridPlus}) {
      chains.push_back(build_dense_chain(p, beta, v));
    }
    for (int k = 0; k <= n; ++k) chains.push_back(build_dense_chain(p, beta, Variant::Kawasaki, k));
    for (const auto& c : chains) {
      audit.worst_row_sum = std::max(audit.worst_row_sum, c.row_sum_error());
      audit.worst_reversibility = std::max(audit.worst_reversibility, c.reversibility_error());
      audit.worst_stationarity = std::max(audit.worst_stationarity, c.stationarity_error());
    }

    const DenseChain& glauber_plus = chains[2];
    const DenseChain& hybrid_plus = chains[3];
    const double comparison = glauber_plus.gap() - hybrid_plus.gap() / (3.0 * n * std::exp(beta * d));
    audit.worst_comparison_margin = std::min(audit.worst_comparison_margin, comparison);
    if (comparison < -1e-12) audit.comparison_holds = false;

    // Decompose the restricted hybrid chain into A_k = Omega_k u Omega_{k+1}.
    const int k_lo = (n + 1) / 2;
    if (k_lo >= n) return;
    const auto z = enumerate_z_table(p, beta);
    std::vector<double> ratios;
    for (int k = k_lo; k < n; ++k) ratios.push_back(z[k + 1] / z[k]);
    const DenseChain projected = dense_projection(projection_chain(n, k_lo, ratios));
    double worst_piece = 1.0;
    for (int k = k_lo; k < n; ++k) {
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < hybrid_plus.size(); ++i) {
        const int plus = n - std::popcount(hybrid_plus.states()[i]);
        if (plus == k || plus == k + 1) subset.push_back(i);
      }
      worst_piece = std::min(worst_piece, hybrid_plus.restrict_to(subset).gap());
    }
    const double decomposition = hybrid_plus.gap() - projected.gap() * worst_piece / 4.0;
    audit.worst_decomposition_margin = std::min(audit.worst_decomposition_margin, decomposition);
    if (decomposition < -1e-12) audit.decomposition_holds = false;
  });
  return audit;
}

double ratio_identity_error(int n, int d, double beta, std::size_t* graphs) {
  double worst = 0.0;
  std::size_t count = 0;
  for_each_multigraph(n, d, [&](const Pairing& p) {
    ++count;
    const auto z = enumerate_z_table(p, beta);
    const auto ve = vertex_edges(p);
    for (int k = 0; k < n; ++k) {
      double mean = 0.0;
      for_each_config_with_k(n, k, [&](const std::vector<std::int8_t>& s) {
        const SpinConfig c(p, s);
        mean += std::exp(beta * static_cast<double>(oracle_energy(ve, s))) * ratio_statistic(p, c, beta);
      });
      mean /= z[k];
      worst = std::max(worst, rel(mean, z[k + 1] / z[k]));
    }
  });
  if (graphs) *graphs = count;
  return worst;
}

std::vector<CheckResult> run_oracle_validation() {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool ok, std::string detail) { out.push_back({std::move(name), ok, std::move(detail)}); };

  {
    double worst = 0.0;
    for (long total = 0; total <= 20; total += 2) {
      for (long np = 0; np <= total; ++np) {
        const long nm = total - np;
        double sum = 0.0;
        for (long k = np % 2; k <= std::min(np, nm); k += 2) sum += std::exp(log_bichromatic_count(np, nm, k));
        worst = std::max(worst, rel(sum, std::exp(log_double_factorial_odd(total))));
      }
    }
    add("bichromatic_counts_sum_to_double_factorial", worst < 1e-9, fmt("max rel err %.3e", worst));
  }
  {
    const double b1 = std::exp(log_bichromatic_count(3, 3, 1)), b3 = std::exp(log_bichromatic_count(3, 3, 3));
    const bool ok = std::abs(b1 - 9.0) < 1e-9 && std::abs(b3 - 6.0) < 1e-9;
    add("bichromatic_counts_three_three", ok, fmt("b(1)=%.6f b(3)=%.6f", b1, b3));
  }
  {
    double worst = 0.0;
    for (double beta : {0.0, 0.5, 1.5}) {
      for (int d = 1; d <= 12; ++d) {
        for (int n = 1; n * d <= 12; ++n) {
          if ((n * d) % 2) continue;
          const auto table = first_moment_table(n, d, beta);
          for (int k = 0; k <= n; ++k) {
            worst = std::max(worst, rel(std::exp(log_annealed_first_moment(n, d, beta, k)), table[k]));
          }
        }
      }
    }
    add("first_moment_matches_enumeration", worst < 1e-10, fmt("max rel err %.3e", worst));
  }
  {
    const double beta = 0.7;
    const auto z = enumerate_z_table(k4(), beta);
    const double err = std::max({rel(z[0], std::exp(6 * beta)), rel(z[1], 4 * std::exp(3 * beta)),
                                 rel(z[2], 6 * std::exp(2 * beta)), rel(z[3], 4 * std::exp(3 * beta)),
                                 rel(z[4], std::exp(6 * beta))});
    add("k4_partition_table", err < 1e-12, fmt("max rel err %.3e", err));
  }
  for (double beta : {0.0, 0.5, 1.5}) {
    for (int n : {2, 4}) {
      const ChainAudit a = audit_chains(n, 3, beta);
      const double worst = std::max({a.worst_row_sum, a.worst_reversibility, a.worst_stationarity});
      add("detailed_balance_n" + std::to_string(n) + fmt("_beta%.1f", beta), worst < 1e-10,
          fmt("graphs %.0f max err %.3e", static_cast<double>(a.graphs), worst));
      if (n == 4) {
        add("spectral_comparison_n4" + fmt("_beta%.1f", beta), a.comparison_holds,
            fmt("min margin %.3e", a.worst_comparison_margin));
        add("spectral_decomposition_n4" + fmt("_beta%.1f", beta), a.decomposition_holds,
            fmt("min margin %.3e", a.worst_decomposition_margin));
      }
    }
  }
  {
    const DenseChain g = build_dense_chain(k4(), 0.0, Variant::Glauber);
    add("k4_glauber_gap_beta0", std::abs(g.gap() - 0.25) < 1e-12, fmt("gap %.15f", g.gap()));
    const DenseChain k = build_dense_chain(k4(), 1.3, Variant::Kawasaki, 2);
    const double dev = (k.stationary().array() - 1.0 / 6.0).abs().maxCoeff();
    add("k4_kawasaki_uniform_slice", dev < 1e-12, fmt("max dev %.3e", dev));
  }
  for (int n : {2, 4, 6}) {
    std::size_t graphs = 0;
    const double err = std::max(ratio_identity_error(n, 3, 0.5, &graphs), ratio_identity_error(n, 3, 1.5));
    add("ratio_identity_n" + std::to_string(n), err < 1e-10,
        fmt("graphs %.0f max rel err %.3e", static_cast<double>(graphs), err));
  }
  {
    const double beta = 0.9;
    const auto z = enumerate_z_table(k4(), beta);
    std::vector<double> r;
    for (int k = 2; k < 4; ++k) r.push_back(z[k + 1] / z[k]);
    const auto pi = projection_chain(4, 2, r).stationary();
    const double norm = (z[2] + z[3]) + (z[3] + z[4]);
    const double err = std::max(std::abs(pi[0] - (z[2] + z[3]) / norm), std::abs(pi[1] - (z[3] + z[4]) / norm));
    add("projection_stationary_law", err < 1e-12, fmt("max err %.3e", err));
  }
  {
    const double beta = 0.8;
    const auto pmf = edge_count_pmf(3, 3, beta);
    const double e = std::exp(2 * beta);
    const double err = std::abs(pmf.probability_of(1) - 9 * e / (9 * e + 6));
    add("bichromatic_pmf_three_three", err < 1e-12, fmt("err %.3e", err));
  }
  return out;
}

}  // namespace fixmag
