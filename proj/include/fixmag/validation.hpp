#pragma once

#include <string>
#include <vector>

namespace fixmag {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The exact-oracle suite: closed forms and Monte Carlo-free identities on tiny
/// instances. Deterministic; the output of two runs is identical.
std::vector<CheckResult> run_oracle_validation();

/// Worst detailed-balance errors and spectral comparison checks over every
/// d = 3 multigraph on n vertices. Shared by the suite and the tests.
struct ChainAudit {
  double worst_row_sum = 0.0;
  double worst_reversibility = 0.0;
  double worst_stationarity = 0.0;
  bool comparison_holds = true;     // gap(GlauberPlus) >= gap(HybridPlus) / (3 n e^{beta d})
  bool decomposition_holds = true;  // gap(HybridPlus) >= gap(P_H) min gap(P_i) / 4
  double worst_comparison_margin = 1e300;
  double worst_decomposition_margin = 1e300;
  std::size_t graphs = 0;
};

ChainAudit audit_chains(int n, int d, double beta);

/// Largest relative error of z_{k+1} / z_k against the enumerated mean of the
/// ratio statistic, over every d-regular multigraph on n vertices and every k < n.
double ratio_identity_error(int n, int d, double beta, std::size_t* graphs = nullptr);

}  // namespace fixmag
