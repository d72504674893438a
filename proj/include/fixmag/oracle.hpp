#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fixmag/dynamics.hpp"
#include "fixmag/graph.hpp"

namespace fixmag {

// Brute-force ground truth on tiny instances. Nothing here reuses the
// incremental bookkeeping of the chains: energies are recounted from the
// vertex-level edge list and kernels are assembled from weight ratios.

/// Every perfect matching of d * n clones, in lexicographic order of choices. Requires d * n <= 16.
void for_each_pairing(int n, int d, const std::function<void(const Pairing&)>& fn);

/// One representative pairing per labelled d-regular multigraph on n vertices
/// (loops and multi-edges allowed). Energies depend only on the multigraph.
void for_each_multigraph(int n, int d, const std::function<void(const Pairing&)>& fn);

/// Every configuration with exactly k pluses; plus sets in colex order.
void for_each_config_with_k(int n, int k, const std::function<void(const std::vector<std::int8_t>&)>& fn);

/// State index <-> spins: bit (n - 1 - v) set means vertex v is minus, so
/// increasing indices are lexicographic in the spin vector with + before -.
std::vector<std::int8_t> config_from_index(int n, std::uint32_t index);
std::uint32_t index_from_config(const std::vector<std::int8_t>& spins);

/// Monochromatic count recomputed from the vertex-level edge list.
long oracle_energy(const std::vector<std::pair<int, int>>& vertex_edges, const std::vector<std::int8_t>& spins);
std::vector<std::pair<int, int>> vertex_edges(const Pairing& pairing);

/// (z_0, ..., z_n) with z_k = sum over k-plus configurations of e^{beta H}. Requires n <= 24.
std::vector<double> enumerate_z_table(const Pairing& pairing, double beta);
/// z_k alone by combination enumeration.
double enumerate_z(const Pairing& pairing, double beta, int k_plus);

/// E[z_k] over all (dn - 1)!! pairings, for every k. Requires d * n <= 12.
std::vector<double> first_moment_table(int n, int d, double beta);
double enumerate_first_moment(int n, int d, double beta, int k_plus);

/// A finite row-stochastic kernel with a known (or solved) target law.
class DenseChain {
 public:
  /// `target` may be empty, in which case the stationary law is solved for.
  DenseChain(Eigen::MatrixXd P, Eigen::VectorXd target = {}, std::vector<std::uint32_t> states = {});

  const Eigen::MatrixXd& P() const { return P_; }
  const Eigen::VectorXd& target() const { return target_; }
  const std::vector<std::uint32_t>& states() const { return states_; }
  std::size_t size() const { return static_cast<std::size_t>(P_.rows()); }

  /// Solves pi P = pi with sum(pi) = 1.
  Eigen::VectorXd stationary() const;
  /// Spectrum of the pi-symmetrized kernel, sorted by decreasing modulus.
  const std::vector<double>& eigenvalues() const;
  /// 1 - lambda_2, with lambda_2 the second largest eigenvalue.
  double gap() const;
  /// 1 - max |lambda| over non-unit eigenvalues.
  double absolute_gap() const;

  double row_sum_error() const;
  double stationarity_error() const;
  /// max |pi_i P_ij - pi_j P_ji| with pi the target.
  double reversibility_error() const;

  /// Kernel restricted to a subset of state indices: moves leaving it are held.
  DenseChain restrict_to(const std::vector<std::size_t>& subset) const;

 private:
  Eigen::MatrixXd P_;
  Eigen::VectorXd target_;
  std::vector<std::uint32_t> states_;
  mutable std::optional<std::vector<double>> eigenvalues_;
};

/// Exact one-step kernel of a dynamics variant, states as index_from_config values.
/// Kawasaki uses the slice k_plus (required); restricted variants use 2k >= n.
/// Throws TooLarge beyond 2 * 10^4 states.
DenseChain build_dense_chain(const Pairing& pairing, double beta, Variant variant, int k_plus = -1);

/// The projection chain as a dense kernel (states k_lo .. n - 1).
DenseChain dense_projection(const ProjectionChain& chain);

struct TVPoint {
  int t = 0;
  double tv = 0.0;
};

/// TV distance to the target at t = 0 .. horizon, by exact iteration of the law.
std::vector<TVPoint> exact_tv_curve(const DenseChain& chain, const Eigen::VectorXd& init, int horizon);

/// Regression record: parameters, z-table, gaps of every variant and the Glauber stationary law.
std::string golden_json(const Pairing& pairing, double beta);

}  // namespace fixmag
