#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "fixmag/rng.hpp"

namespace fixmag {

/// A perfect matching on d * n clones. Clone c belongs to vertex c / d.
class Pairing {
 public:
  Pairing() = default;
  /// Throws InvalidParameter unless `mate` is a fixed-point-free involution on d * n clones.
  Pairing(int n, int d, std::vector<int> mate);

  /// Realizes a vertex-level multigraph; clones are handed out in increasing order.
  /// A loop {v, v} uses two clones of v. Every vertex must end with degree d.
  static Pairing from_vertex_edges(int n, int d, const std::vector<std::pair<int, int>>& edges);

  int n() const { return n_; }
  int d() const { return d_; }
  int clones() const { return n_ * d_; }
  int mate(int c) const { return mate_[c]; }
  int vertex(int c) const { return c / d_; }
  const std::vector<int>& mates() const { return mate_; }

  /// Edges as clone pairs (c, mate(c)) with c < mate(c), in increasing c.
  std::vector<std::pair<int, int>> edges() const;

  bool operator==(const Pairing& other) const = default;

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<int> mate_;
};

/// Uniform over all (dn - 1)!! pairings: the lowest unmatched clone is matched
/// to a uniformly chosen remaining clone.
Pairing sample_uniform_pairing(int n, int d, Philox& rng);

/// Text format: header `n d`, then one `c mate(c)` line per edge with c < mate(c).
void write_pairing(std::ostream& out, const Pairing& pairing);
Pairing read_pairing(std::istream& in);

/// Replaces pairing edges (c1, c2), (c3, c4) by (c1, c4), (c2, c3) [Cross]
/// or by (c1, c3), (c2, c4) [Parallel].
struct Switch {
  enum class Mode { Cross, Parallel };
  int c1 = 0, c2 = 0, c3 = 0, c4 = 0;
  Mode mode = Mode::Cross;

  /// The switch that undoes this one on the switched pairing.
  Switch inverse() const;
};

/// Throws InvalidSwitch if the clones are not distinct or the edges are absent.
Pairing apply_switch(const Pairing& pairing, const Switch& sw);

/// Spins of +1 / -1 with cached plus count and monochromatic edge count H.
/// The cache is kept in sync by the mutators, which take the bound pairing.
class SpinConfig {
 public:
  SpinConfig() = default;
  SpinConfig(const Pairing& pairing, std::vector<std::int8_t> spins);
  static SpinConfig uniform(const Pairing& pairing, int spin);
  /// A uniform configuration among those with exactly k_plus plus spins.
  static SpinConfig random_with_k(const Pairing& pairing, int k_plus, Philox& rng);

  int n() const { return static_cast<int>(spins_.size()); }
  int spin(int v) const { return spins_[v]; }
  const std::vector<std::int8_t>& spins() const { return spins_; }
  int k_plus() const { return k_plus_; }
  long H() const { return H_; }
  double magnetization() const { return 2.0 * k_plus_ / n() - 1.0; }

  /// Change of H if v were flipped. Loops never change colour.
  int flip_delta(const Pairing& pairing, int v) const;
  void flip(const Pairing& pairing, int v);
  /// Change of H if the opposite spins at u and v were exchanged.
  int swap_delta(const Pairing& pairing, int u, int v) const;
  void swap(const Pairing& pairing, int u, int v);

  /// Recompute H from scratch, e.g. after the pairing changed.
  void rebind(const Pairing& pairing);

  SpinConfig negated(const Pairing& pairing) const;

  bool operator==(const SpinConfig& other) const { return spins_ == other.spins_; }

 private:
  std::vector<std::int8_t> spins_;
  int k_plus_ = 0;
  long H_ = 0;
};

/// Number of monochromatic pairing edges; loops count as monochromatic.
long count_mono(const Pairing& pairing, const std::vector<std::int8_t>& spins);

/// Change of H under the switch, computed from the four endpoints.
int switch_delta(const Pairing& pairing, const std::vector<std::int8_t>& spins, const Switch& sw);

/// BFS ball of radius r around a root vertex in the multigraph.
struct Ball {
  int root = 0;
  int radius = 0;
  std::vector<int> vertices;               // BFS order, root first
  std::vector<int> depth;                  // per entry of `vertices`
  std::vector<int> parent;                 // index into `vertices`, -1 for the root
  std::vector<std::vector<int>> children;  // indices into `vertices`
  long edges = 0;                          // pairing edges with an endpoint at depth < r
  bool is_tree = true;

  std::size_t boundary_size() const;
};

Ball neighborhood(const Pairing& pairing, int v, int r);

}  // namespace fixmag
