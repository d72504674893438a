#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fixmag/annealed.hpp"
#include "fixmag/graph.hpp"
#include "fixmag/rng.hpp"

namespace fixmag {

struct PlantedSample {
  SpinConfig config;
  Pairing pairing;
  long bichromatic_count = 0;
};

/// Order in which the sequential sampler fills edge slots. The law of the
/// output does not depend on it; the choice exists so that this can be tested.
enum class SlotOrder { BichromaticFirst, MonochromaticFirst, Shuffled };

/// Draws (graph, configuration) from the planted model: a uniform configuration
/// with k_plus pluses, the bichromatic count B from its exact law, then a
/// pairing uniform among those with exactly B bichromatic edges.
class PlantedSampler {
 public:
  PlantedSampler(int n, int d, double beta, int k_plus, SlotOrder order = SlotOrder::BichromaticFirst);

  PlantedSample operator()(Philox& rng) const;

  const EdgeCountPMF& pmf() const { return pmf_; }
  int n() const { return n_; }
  int d() const { return d_; }
  int k_plus() const { return k_plus_; }
  double beta() const { return beta_; }

 private:
  int n_, d_, k_plus_;
  double beta_;
  SlotOrder order_;
  EdgeCountPMF pmf_;
};

PlantedSample sample_planted(int n, int d, double beta, int k_plus, Philox& rng,
                             SlotOrder order = SlotOrder::BichromaticFirst);

/// Pairing format followed by one line of n spins (+1/-1).
void write_planted(std::ostream& out, const PlantedSample& sample);

struct ConcentrationReport {
  std::size_t num_samples = 0;
  int n = 0;
  int d = 0;
  int k_plus = 0;
  double mean = 0.0;            // mean monochromatic fraction
  double std = 0.0;             // sample standard deviation across samples
  bool std_defined = false;     // false for fewer than two samples
  double scaled_std = 0.0;      // std * sqrt(n)
  double ceiling = 0.0;
  bool passed = true;
  double rho_reference = 0.0;   // tree value rho_eta
  double exact_mean = 0.0;      // finite-n mean from the bichromatic pmf
  double standard_error = 0.0;  // std / sqrt(num_samples)
};

/// Summarizes the spread of the monochromatic fraction across planted samples.
/// Throws InvalidInput on an empty list or mixed (n, d, k_plus).
ConcentrationReport planted_edge_concentration_test(const std::vector<PlantedSample>& samples, double beta,
                                                    double ceiling = 3.0);

struct NishimoriReport {
  double tv = 0.0;
  std::size_t num_outcomes = 0;
  std::size_t num_samples = 0;
};

/// TV distance between the planted sampler's empirical joint law and the exact
/// weight e^{beta H} over all (pairing, configuration) pairs. Requires d * n <= 8.
NishimoriReport nishimori_consistency_test(int n, int d, double beta, int k_plus, Philox& rng, std::size_t num_samples,
                                           SlotOrder order = SlotOrder::BichromaticFirst);

}  // namespace fixmag
