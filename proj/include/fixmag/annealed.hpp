#pragma once

#include <optional>
#include <vector>

#include "fixmag/rng.hpp"

namespace fixmag {

// Annealed free energy of the fixed-magnetization model on the configuration
// model, and the exact finite-n combinatorics behind it.

/// Edge-statistic functional maximized by the annealed free energy. Throws
/// DomainError unless rho lies in (|eta|, 1).
double g_functional(int d, double beta, double eta, double rho);
/// d^2 g / d rho^2 in closed form; always negative on the domain.
double g_second_derivative(int d, double eta, double rho);

/// Annealed free energy density f_{d,beta}(eta) = g at rho = rho_eta.
double free_energy(int d, double beta, double eta);

/// Location of the global maximum of f on [0, 1); zero when beta <= beta_c.
double eta_star(int d, double beta);

/// Large-deviation rate function f(eta) - max f (non-positive).
double rate_function(int d, double beta, double eta);

/// Drift function F(eta): the limiting ratio z_{k+1} / z_k at k = (1 + eta) n / 2.
double drift_function(int d, double beta, double eta);

/// The unique m_* in (0, 1) with F(m_*) = 1. Throws NoInteriorRoot for beta <= beta_c.
double drift_root(int d, double beta);

struct FreeEnergyPoint {
  double eta;
  double f;
  double rho;
};

struct FreeEnergyCurve {
  int d = 3;
  double beta = 0.0;
  std::vector<FreeEnergyPoint> points;
  double eta_star = 0.0;
  /// Smallest positive inflection point of f; present only above beta_c.
  std::optional<double> eta_spinodal;
};

/// f on a uniform grid of `points` magnetizations spanning (-1, 1) symmetrically.
FreeEnergyCurve free_energy_curve(int d, double beta, int points);

/// Smallest positive eta where f'' changes sign (numeric; see free_energy_curve).
std::optional<double> spinodal(int d, double beta);

/// log of the number of perfect matchings of n_plus plus-clones and n_minus
/// minus-clones with exactly k bichromatic pairs. Throws InvalidCount on parity violation.
double log_bichromatic_count(long n_plus, long n_minus, long k);

/// log (m - 1)!! for even m >= 0, with (-1)!! = 1.
double log_double_factorial_odd(long m);

/// log E[Z_k] over the configuration model: exact finite-n sum over bichromatic counts.
double log_annealed_first_moment(int n, int d, double beta, int k_plus);

/// Law of the number of bichromatic pairs in the matching of n_plus and n_minus
/// clones weighted by e^{beta * monochromatic pairs}.
struct EdgeCountPMF {
  long n_plus = 0;
  long n_minus = 0;
  double beta = 0.0;
  std::vector<long> support;
  std::vector<double> log_weights;
  std::vector<double> probabilities;
  std::vector<double> cumulative;
  /// Mode and curvature scale of the smooth Stirling surrogate.
  double mu = 0.0;
  double sigma2 = 0.0;

  double mean() const;
  double variance() const;
  double probability_of(long k) const;
  /// Exact inverse-CDF draw.
  long sample(Philox& rng) const;
};

EdgeCountPMF edge_count_pmf(long n_plus, long n_minus, double beta);

/// Smooth surrogate of log p(k) up to the normalizing constant, defined for 0 < k < min(n_plus, n_minus).
double edge_count_log_surrogate(long n_plus, long n_minus, double beta, double k);

}  // namespace fixmag
