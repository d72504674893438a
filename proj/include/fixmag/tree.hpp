#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fixmag/rng.hpp"

namespace fixmag {

/// Index 0 is the plus spin, index 1 the minus spin, throughout.
inline constexpr int kPlus = 0;
inline constexpr int kMinus = 1;

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct ModelParams {
  int d = 3;
  double beta = 0.0;
  double h = 0.0;

  /// Throws InvalidParameter unless d >= 3 and beta >= 0.
  void validate() const;
};

struct Thresholds {
  double beta_c;  // uniqueness threshold 2 atanh(1/(d-1))
  double beta_r;  // Kesten-Stigum / reconstruction threshold at zero field
};

Thresholds thresholds(int d);

/// A translation-invariant Ising measure on the d-regular tree, identified by
/// its BP ratio R. `broadcast[parent][child]` is row-stochastic.
struct TreeMeasure {
  int d = 3;
  double beta = 0.0;
  double R = 1.0;
  double h = 0.0;
  double eta = 0.0;
  double rho = 0.5;
  Matrix2 broadcast{};
  bool stable = true;

  double plus_probability() const { return 0.5 * (1.0 + eta); }
};

/// The BP recursion map Phi(R) whose fixed points are the translation-invariant measures.
double bp_map(int d, double beta, double h, double R);
/// Closed-form dPhi/dR.
double bp_map_derivative(int d, double beta, double h, double R);

/// Root magnetization (R^2 - 1) / (R^2 + 2 e^{-beta} R + 1).
double magnetization_of_ratio(double beta, double R);

/// Assemble the measure for ratio R at field h. Does not check that R is a fixed point.
TreeMeasure make_tree_measure(int d, double beta, double h, double R);

/// All positive fixed points of the recursion at (d, beta, h), in increasing R.
std::vector<TreeMeasure> bp_fixed_points(const ModelParams& params);

/// The unique measure with magnetization eta, and the field that makes it a fixed point.
TreeMeasure field_for_magnetization(int d, double beta, double eta);

/// Monochromatic-edge probability of the measure with magnetization eta.
double rho_eta(double beta, double eta);

/// Non-unit eigenvalue of the broadcast matrix: trace - 1.
double second_eigenvalue(const TreeMeasure& measure);

/// (d-1) lambda_2^2; a reconstruction diagnostic, exactly the threshold only at eta = 0.
double kesten_stigum_product(const TreeMeasure& measure);

struct TreeSample {
  int depth = 0;
  /// levels[l] holds d (d-1)^{l-1} spins (+1/-1) for l >= 1 and the root at l = 0.
  /// Children of node i on level l >= 1 are (d-1) i, ..., (d-1) i + d - 2 on level l + 1.
  std::vector<std::vector<std::int8_t>> levels;
};

/// Number of vertices at distance `level` from the root of the d-regular tree.
std::size_t tree_level_size(int d, int level);

TreeSample sample_broadcast(const TreeMeasure& measure, int depth, Philox& rng);

struct SpinLaw {
  double plus = 0.5;
  double minus = 0.5;
};

/// Exact conditional law of the root given the depth-`depth` boundary spins.
SpinLaw root_posterior(const std::vector<std::int8_t>& boundary, int depth, const TreeMeasure& measure);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of E |nu(root = + | boundary) - nu(root = +)| at the given depth.
Estimate reconstruction_tv(int d, double beta, double eta, int depth, int num_samples, Philox& rng);

}  // namespace fixmag
