#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fixmag/graph.hpp"
#include "fixmag/rng.hpp"
#include "fixmag/tree.hpp"

namespace fixmag {

/// Edge types, oriented by clone index (lower clone first).
enum EdgeType : int { kPP = 0, kPM = 1, kMP = 2, kMM = 3 };

/// R[i][j]: fraction of edges of type i under sigma and type j under sigma'.
using OverlapMatrix = std::array<std::array<double, 4>, 4>;

struct EdgeTypeProbs {
  double p_pp = 0.25, p_pm = 0.25, p_mp = 0.25, p_mm = 0.25;
  std::array<double, 4> as_array() const { return {p_pp, p_pm, p_mp, p_mm}; }
};

OverlapMatrix edge_overlap(const Pairing& pairing, const std::vector<std::int8_t>& sigma,
                           const std::vector<std::int8_t>& sigma_prime);

EdgeTypeProbs edge_type_probs(const TreeMeasure& measure);

/// Outer product of the edge-type law with itself.
OverlapMatrix tree_reference_overlap(const TreeMeasure& measure);

double frobenius_distance(const OverlapMatrix& a, const OverlapMatrix& b);

/// Number of vertices plus under both configurations, recovered from the
/// overlap matrix of a d-regular pairing on n vertices.
double plus_plus_vertices(const OverlapMatrix& R, int n);

/// Mean Frobenius distance between the overlap of two independent Kawasaki
/// samples at plus-count k and the tree reference. `burn_in_sweeps` of 0
/// selects the default of 50 log n sweeps.
Estimate overlap_deviation(const Pairing& pairing, double beta, int k_plus, int num_pairs, int burn_in_sweeps,
                           Philox& rng);

struct LocalLawReport {
  double tv = 0.0;
  std::size_t tree_balls = 0;      // sampled vertices whose ball is a tree
  std::size_t non_tree_balls = 0;  // excluded from the comparison
  std::size_t observations = 0;    // tree balls times measurement sweeps
  std::size_t distinct_patterns = 0;
};

/// Canonical rooted-tree spin pattern of a ball: children sorted by their own pattern.
std::string canonical_pattern(const Ball& ball, const std::vector<std::int8_t>& spins);

/// Exact probability of a canonical pattern under the broadcast law on a depth-r tree.
double pattern_probability(const std::string& pattern, const TreeMeasure& measure);

/// Empirical law of canonical ball patterns against the broadcast law of the
/// tree measure with the same magnetization. Patterns are pooled over
/// `sweeps` Kawasaki sweeps after a burn-in of 50 log n sweeps (skipped when an
/// initial configuration is supplied, which is then assumed stationary).
LocalLawReport local_law_tv(const Pairing& pairing, double beta, int k_plus, int radius, int num_vertices, int sweeps,
                            Philox& rng, const std::optional<SpinConfig>& initial = std::nullopt);

}  // namespace fixmag
