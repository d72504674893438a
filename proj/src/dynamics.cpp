#include "fixmag/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "fixmag/error.hpp"
#include "fixmag/parallel.hpp"

namespace fixmag {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Estimate batch_means(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  double total = 0.0;
  for (double x : xs) total += x;
  const double mean = total / static_cast<double>(xs.size());
  const std::size_t batches = std::min<std::size_t>(20, xs.size());
  if (batches < 2) return {mean, 0.0};
  const std::size_t size = xs.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = b * size; i < (b + 1) * size; ++i) means[b] += xs[i];
    means[b] /= static_cast<double>(size);
  }
  double bm = 0.0;
  for (double m : means) bm += m;
  bm /= static_cast<double>(batches);
  double var = 0.0;
  for (double m : means) var += (m - bm) * (m - bm);
  var /= static_cast<double>(batches - 1);
  return {mean, std::sqrt(var / static_cast<double>(batches))};
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Glauber: return "glauber";
    case Variant::Kawasaki: return "kawasaki";
    case Variant::Hybrid: return "hybrid";
    case Variant::GlauberPlus: return "glauber_plus";
    case Variant::HybridPlus: return "hybrid_plus";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::Glauber, Variant::Kawasaki, Variant::Hybrid, Variant::GlauberPlus, Variant::HybridPlus}) {
    if (name == variant_name(v)) return v;
  }
  throw InvalidParameter("unknown chain variant '" + name + "'");
}

bool is_restricted(Variant v) { return v == Variant::GlauberPlus || v == Variant::HybridPlus; }

Chain::Chain(Pairing pairing, SpinConfig config, double beta, Variant variant, Philox rng)
    : pairing_(std::move(pairing)), config_(std::move(config)), beta_(beta), variant_(variant), rng_(rng) {
  const int n = pairing_.n();
  if (config_.n() != n) throw InvalidInput("config size does not match pairing");
  if (n < 1) throw InvalidParameter("chain needs at least one vertex");
  if (!std::isfinite(beta)) throw InvalidParameter("beta must be finite");
  if (is_restricted(variant) && 2 * config_.k_plus() < n) {
    throw InvalidParameter("restricted chains must start with non-negative magnetization");
  }
  config_.rebind(pairing_);
  slot_.assign(n, 0);
  for (int v = 0; v < n; ++v) {
    auto& list = config_.spin(v) > 0 ? plus_ : minus_;
    slot_[v] = static_cast<int>(list.size());
    list.push_back(v);
  }
}

double Chain::plus_probability(int v) const {
  const int d = pairing_.d();
  int field = 0;
  for (int c = v * d; c < (v + 1) * d; ++c) {
    const int w = pairing_.vertex(pairing_.mate(c));
    if (w != v) field += config_.spin(w);
  }
  // Flipping to plus gains (#plus - #minus) monochromatic non-loop edges.
  return logistic(beta_ * field);
}

double Chain::exchange_acceptance(int u, int v) const {
  return logistic(beta_ * config_.swap_delta(pairing_, u, v));
}

void Chain::set_spin(int v, int s) {
  if (config_.spin(v) == s) return;
  auto& from = s > 0 ? minus_ : plus_;
  auto& to = s > 0 ? plus_ : minus_;
  const int last = from.back();
  from[slot_[v]] = last;
  slot_[last] = slot_[v];
  from.pop_back();
  slot_[v] = static_cast<int>(to.size());
  to.push_back(v);
  config_.flip(pairing_, v);
}

void Chain::glauber(bool restricted) {
  const int n = pairing_.n();
  const int v = static_cast<int>(rng_.below(static_cast<std::uint64_t>(n)));
  const int s = rng_.bernoulli(plus_probability(v)) ? 1 : -1;
  if (s == config_.spin(v)) return;
  if (restricted && s < 0 && 2 * (config_.k_plus() - 1) < n) return;
  set_spin(v, s);
}

void Chain::kawasaki() {
  const int n = pairing_.n();
  const int k = config_.k_plus();
  if (k == 0 || k == n) return;
  const int u = plus_[rng_.below(static_cast<std::uint64_t>(k))];
  const int v = minus_[rng_.below(static_cast<std::uint64_t>(n - k))];
  if (!rng_.bernoulli(exchange_acceptance(u, v))) return;
  config_.swap(pairing_, u, v);
  plus_[slot_[u]] = v;
  minus_[slot_[v]] = u;
  std::swap(slot_[u], slot_[v]);
}

void Chain::step() {
  switch (variant_) {
    case Variant::Glauber: glauber(false); break;
    case Variant::GlauberPlus: glauber(true); break;
    case Variant::Kawasaki: kawasaki(); break;
    case Variant::Hybrid:
    case Variant::HybridPlus:
      if (rng_.bernoulli(0.5)) {
        glauber(variant_ == Variant::HybridPlus);
      } else {
        kawasaki();
      }
      break;
  }
  ++steps_;
}

void Chain::sweep() { run(static_cast<std::uint64_t>(pairing_.n())); }

void Chain::run(std::uint64_t steps) {
  for (std::uint64_t i = 0; i < steps; ++i) step();
}

double ratio_statistic(const Pairing& pairing, const SpinConfig& config, double beta) {
  double sum = 0.0;
  for (int v = 0; v < config.n(); ++v) {
    if (config.spin(v) < 0) sum += std::exp(beta * config.flip_delta(pairing, v));
  }
  return sum / (config.k_plus() + 1);
}

Estimate ratio_estimator(const Pairing& pairing, double beta, int k, int num_sweeps, int burn_in, Philox& rng) {
  if (k < 0 || k > pairing.n()) throw InvalidParameter("k must lie in [0, n]");
  if (num_sweeps < 1 || burn_in < 0) throw InvalidParameter("need num_sweeps >= 1 and burn_in >= 0");
  if (k == pairing.n()) return {0.0, 0.0};
  SpinConfig start = SpinConfig::random_with_k(pairing, k, rng);
  Chain chain(pairing, std::move(start), beta, Variant::Kawasaki, rng.derive(rng()));
  for (int s = 0; s < burn_in; ++s) chain.sweep();
  std::vector<double> samples;
  samples.reserve(num_sweeps);
  for (int s = 0; s < num_sweeps; ++s) {
    chain.sweep();
    samples.push_back(ratio_statistic(chain.pairing(), chain.config(), beta));
  }
  return batch_means(samples);
}

std::vector<double> ProjectionChain::stationary() const {
  std::vector<double> pi(size(), 1.0);
  for (std::size_t i = 1; i < pi.size(); ++i) pi[i] = pi[i - 1] * up[i - 1] / down[i];
  double total = 0.0;
  for (double p : pi) total += p;
  for (double& p : pi) p /= total;
  return pi;
}

ProjectionChain projection_chain(int n, int k_lo, std::vector<double> ratios, std::vector<double> ratio_errors,
                                 ProjectionConvention convention) {
  if (k_lo < 0 || k_lo >= n) throw InvalidInput("need 0 <= k_lo < n");
  const auto need = static_cast<std::size_t>(n - k_lo);
  if (ratios.size() != need) throw InvalidInput("ratios must cover k = k_lo .. n - 1");
  for (double r : ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("ratios must be positive and finite");
  }
  if (ratio_errors.empty()) ratio_errors.assign(need, 0.0);
  if (ratio_errors.size() != need) throw InvalidInput("ratio errors must match ratios");
  ProjectionChain pc;
  pc.n = n;
  pc.k_lo = k_lo;
  pc.convention = convention;
  pc.ratios = std::move(ratios);
  pc.ratio_errors = std::move(ratio_errors);
  pc.up.assign(need, 0.0);
  pc.down.assign(need, 0.0);
  pc.hold.assign(need, 0.0);
  for (std::size_t i = 0; i < need; ++i) {
    const double r = pc.ratios[i];
    const bool top = i + 1 == need;
    if (convention == ProjectionConvention::MadrasRandall) {
      if (!top) pc.up[i] = 0.5 * r / (1.0 + r);
      if (i > 0) pc.down[i] = 0.5 / (1.0 + r);
    } else {
      if (!top) pc.up[i] = 0.5 / (1.0 + r);
      if (i > 0) pc.down[i] = 0.5 * pc.ratios[i - 1] / (1.0 + pc.ratios[i - 1]);
    }
    pc.hold[i] = 1.0 - pc.up[i] - pc.down[i];
  }
  return pc;
}

InitKind parse_init(const std::string& name) {
  if (name == "uniform") return InitKind::Uniform;
  if (name == "all_plus") return InitKind::AllPlus;
  if (name == "all_minus") return InitKind::AllMinus;
  throw InvalidParameter("unknown init '" + name + "'");
}

const char* init_name(InitKind kind) {
  switch (kind) {
    case InitKind::Uniform: return "uniform";
    case InitKind::AllPlus: return "all_plus";
    case InitKind::AllMinus: return "all_minus";
  }
  return "?";
}

std::vector<TrajectoryPoint> record_trajectory(Chain& chain, int max_sweeps) {
  if (max_sweeps < 0) throw InvalidParameter("max_sweeps must be non-negative");
  std::vector<TrajectoryPoint> out;
  out.reserve(static_cast<std::size_t>(max_sweeps) + 1);
  auto record = [&] {
    const SpinConfig& c = chain.config();
    out.push_back({chain.steps(), c.k_plus(), c.magnetization(), c.H()});
  };
  record();
  for (int s = 0; s < max_sweeps; ++s) {
    chain.sweep();
    record();
  }
  return out;
}

std::vector<TrajectoryPoint> mixing_experiment(const Pairing& pairing, double beta, InitKind init, int max_sweeps,
                                               Philox& rng, Variant variant) {
  if (max_sweeps < 0) throw InvalidParameter("max_sweeps must be non-negative");
  const int n = pairing.n();
  std::vector<std::int8_t> spins(n, 1);
  if (init == InitKind::AllMinus) std::fill(spins.begin(), spins.end(), std::int8_t{-1});
  if (init == InitKind::Uniform) {
    for (auto& s : spins) s = rng.bernoulli(0.5) ? 1 : -1;
  }
  SpinConfig config(pairing, std::move(spins));
  if (is_restricted(variant) && 2 * config.k_plus() < n) config = config.negated(pairing);
  Chain chain(pairing, std::move(config), beta, variant, rng.derive(rng()));
  return record_trajectory(chain, max_sweeps);
}

ZBReport zb_check(int d, double beta, int n, int replicas, int burn_in, int sweeps, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw InvalidParameter("zero magnetization needs an even n >= 2");
  if (replicas < 1 || sweeps < 1 || burn_in < 0) throw InvalidParameter("need replicas, sweeps >= 1");
  struct Pair {
    double fixed, anti;
  };
  const auto results = run_replicas(static_cast<std::size_t>(replicas), [&](std::size_t r) {
    Philox rng(seed, r);
    const Pairing pairing = sample_uniform_pairing(n, d, rng);
    auto energy = [&](Chain chain) {
      for (int s = 0; s < burn_in; ++s) chain.sweep();
      double total = 0.0;
      for (int s = 0; s < sweeps; ++s) {
        chain.sweep();
        total += static_cast<double>(chain.config().H());
      }
      return total / sweeps / n;
    };
    Philox fixed_rng = rng.derive(2 * r + 2 * static_cast<std::uint64_t>(replicas));
    Philox anti_rng = rng.derive(2 * r + 1 + 2 * static_cast<std::uint64_t>(replicas));
    SpinConfig balanced = SpinConfig::random_with_k(pairing, n / 2, rng);
    std::vector<std::int8_t> free_spins(n);
    for (auto& s : free_spins) s = rng.bernoulli(0.5) ? 1 : -1;
    const double fixed = energy(Chain(pairing, std::move(balanced), beta, Variant::Kawasaki, fixed_rng));
    const double anti = energy(Chain(pairing, SpinConfig(pairing, std::move(free_spins)), -beta, Variant::Glauber, anti_rng));
    return Pair{fixed, anti};
  });
  std::vector<double> fixed, anti;
  for (const auto& p : results) {
    fixed.push_back(p.fixed);
    anti.push_back(p.anti);
  }
  auto mean_se = [](const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    const double se = xs.size() > 1 ? std::sqrt(v / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size())) : 0.0;
    return Estimate{m, se};
  };
  ZBReport rep;
  rep.d = d;
  rep.beta = beta;
  rep.n = n;
  const Estimate f = mean_se(fixed), a = mean_se(anti);
  rep.fixed_energy = f.value;
  rep.fixed_error = f.std_error;
  rep.anti_energy = a.value;
  rep.anti_error = a.std_error;
  const double eb = std::exp(beta);
  rep.fixed_target = 0.5 * d * eb / (1.0 + eb);
  rep.anti_target = 0.5 * d / (1.0 + eb);
  return rep;
}

}  // namespace fixmag
