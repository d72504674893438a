#include "fixmag/planted.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "fixmag/error.hpp"
#include "fixmag/oracle.hpp"
#include "fixmag/tree.hpp"

namespace fixmag {

namespace {

// Unmatched clones of one colour, removable uniformly at random.
class ClonePool {
 public:
  void add(int c) { items_.push_back(c); }
  int draw(Philox& rng) {
    const auto j = rng.below(items_.size());
    const int c = items_[j];
    items_[j] = items_.back();
    items_.pop_back();
    return c;
  }

 private:
  std::vector<int> items_;
};

enum class Slot : std::uint8_t { Bichromatic, PlusPlus, MinusMinus };

}  // namespace

PlantedSampler::PlantedSampler(int n, int d, double beta, int k_plus, SlotOrder order)
    : n_(n), d_(d), k_plus_(k_plus), beta_(beta), order_(order) {
  if (n < 1 || d < 1) throw InvalidParameter("n and d must be positive");
  if ((static_cast<long>(n) * d) % 2 != 0) throw InvalidParameter("d * n must be even");
  if (k_plus < 0 || k_plus > n) throw InvalidParameter("k_plus must lie in [0, n]");
  pmf_ = edge_count_pmf(static_cast<long>(d) * k_plus, static_cast<long>(d) * (n - k_plus), beta);
}

PlantedSample PlantedSampler::operator()(Philox& rng) const {
  std::vector<std::int8_t> spins(n_, -1);
  std::fill(spins.begin(), spins.begin() + k_plus_, std::int8_t{1});
  shuffle(spins.begin(), spins.end(), rng);
  const long B = pmf_.sample(rng);

  ClonePool plus, minus;
  for (int v = 0; v < n_; ++v) {
    for (int c = v * d_; c < (v + 1) * d_; ++c) (spins[v] > 0 ? plus : minus).add(c);
  }
  const long n_plus = pmf_.n_plus;
  const long n_minus = pmf_.n_minus;
  std::vector<Slot> slots;
  slots.reserve(static_cast<std::size_t>((n_plus + n_minus) / 2));
  auto append = [&](Slot s, long count) { slots.insert(slots.end(), static_cast<std::size_t>(count), s); };
  if (order_ == SlotOrder::MonochromaticFirst) {
    append(Slot::MinusMinus, (n_minus - B) / 2);
    append(Slot::PlusPlus, (n_plus - B) / 2);
    append(Slot::Bichromatic, B);
  } else {
    append(Slot::Bichromatic, B);
    append(Slot::PlusPlus, (n_plus - B) / 2);
    append(Slot::MinusMinus, (n_minus - B) / 2);
    if (order_ == SlotOrder::Shuffled) shuffle(slots.begin(), slots.end(), rng);
  }

  std::vector<int> mate(static_cast<std::size_t>(n_) * d_, -1);
  for (Slot s : slots) {
    int a = 0, b = 0;
    switch (s) {
      case Slot::Bichromatic:
        a = plus.draw(rng);
        b = minus.draw(rng);
        break;
      case Slot::PlusPlus:
        a = plus.draw(rng);
        b = plus.draw(rng);
        break;
      case Slot::MinusMinus:
        a = minus.draw(rng);
        b = minus.draw(rng);
        break;
    }
    mate[a] = b;
    mate[b] = a;
  }
  Pairing pairing(n_, d_, std::move(mate));
  SpinConfig config(pairing, std::move(spins));
  return {std::move(config), std::move(pairing), B};
}

PlantedSample sample_planted(int n, int d, double beta, int k_plus, Philox& rng, SlotOrder order) {
  return PlantedSampler(n, d, beta, k_plus, order)(rng);
}

void write_planted(std::ostream& out, const PlantedSample& sample) {
  write_pairing(out, sample.pairing);
  const auto& s = sample.config.spins();
  for (std::size_t v = 0; v < s.size(); ++v) out << (v ? " " : "") << static_cast<int>(s[v]);
  out << '\n';
}

ConcentrationReport planted_edge_concentration_test(const std::vector<PlantedSample>& samples, double beta,
                                                    double ceiling) {
  if (samples.empty()) throw InvalidInput("no planted samples");
  ConcentrationReport r;
  r.num_samples = samples.size();
  r.n = samples.front().pairing.n();
  r.d = samples.front().pairing.d();
  r.k_plus = samples.front().config.k_plus();
  r.ceiling = ceiling;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& s : samples) {
    if (s.pairing.n() != r.n || s.pairing.d() != r.d || s.config.k_plus() != r.k_plus) {
      throw InvalidInput("planted samples have mixed parameters");
    }
    const double rho_hat = static_cast<double>(s.config.H()) / (0.5 * r.d * r.n);
    sum += rho_hat;
    sum_sq += rho_hat * rho_hat;
  }
  const double m = static_cast<double>(samples.size());
  r.mean = sum / m;
  r.std_defined = samples.size() >= 2;
  if (r.std_defined) {
    r.std = std::sqrt(std::max(0.0, (sum_sq - m * r.mean * r.mean) / (m - 1.0)));
    r.scaled_std = r.std * std::sqrt(static_cast<double>(r.n));
    r.standard_error = r.std / std::sqrt(m);
    r.passed = r.scaled_std <= ceiling;
  }
  const double eta = 2.0 * r.k_plus / r.n - 1.0;
  r.rho_reference = std::abs(eta) < 1.0 ? rho_eta(beta, eta) : 1.0;
  const EdgeCountPMF pmf = edge_count_pmf(static_cast<long>(r.d) * r.k_plus, static_cast<long>(r.d) * (r.n - r.k_plus), beta);
  r.exact_mean = 1.0 - pmf.mean() / (0.5 * r.d * r.n);
  return r;
}

NishimoriReport nishimori_consistency_test(int n, int d, double beta, int k_plus, Philox& rng, std::size_t num_samples,
                                           SlotOrder order) {
  if (static_cast<long>(n) * d > 8) throw TooLarge("exact joint law needs d * n <= 8");
  if (num_samples == 0) throw InvalidParameter("num_samples must be positive");
  // Exact joint weights over (pairing, configuration) pairs with k_plus pluses.
  std::map<std::pair<std::vector<int>, std::vector<std::int8_t>>, double> exact;
  double total = 0.0;
  for_each_pairing(n, d, [&](const Pairing& p) {
    for_each_config_with_k(n, k_plus, [&](const std::vector<std::int8_t>& spins) {
      const double w = std::exp(beta * static_cast<double>(count_mono(p, spins)));
      exact[{p.mates(), spins}] += w;
      total += w;
    });
  });
  std::map<std::pair<std::vector<int>, std::vector<std::int8_t>>, std::size_t> counts;
  const PlantedSampler sampler(n, d, beta, k_plus, order);
  for (std::size_t i = 0; i < num_samples; ++i) {
    PlantedSample s = sampler(rng);
    ++counts[{s.pairing.mates(), s.config.spins()}];
  }
  double tv = 0.0;
  for (const auto& [key, w] : exact) {
    const auto it = counts.find(key);
    const double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(num_samples);
    tv += std::abs(emp - w / total);
  }
  for (const auto& [key, c] : counts) {
    if (!exact.count(key)) tv += static_cast<double>(c) / static_cast<double>(num_samples);
  }
  return {0.5 * tv, exact.size(), num_samples};
}

}  // namespace fixmag
