#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fixmag/graph.hpp"
#include "fixmag/rng.hpp"
#include "fixmag/tree.hpp"

namespace fixmag {

/// The chains on spin configurations of a fixed pairing.
///   Glauber      heat-bath single-site update
///   Kawasaki     heat-bath exchange of a uniform plus and a uniform minus spin
///   Hybrid       fair coin between the two
///   GlauberPlus  Glauber restricted to 2k >= n, leaving moves held
///   HybridPlus   fair coin between GlauberPlus and Kawasaki
enum class Variant { Glauber, Kawasaki, Hybrid, GlauberPlus, HybridPlus };

const char* variant_name(Variant v);
/// Throws InvalidParameter for an unknown name.
Variant parse_variant(const std::string& name);
bool is_restricted(Variant v);

/// One Markov chain: pairing, configuration, RNG stream and step counter.
/// beta may be negative (antiferromagnet).
class Chain {
 public:
  Chain(Pairing pairing, SpinConfig config, double beta, Variant variant, Philox rng);

  void step();
  /// n steps.
  void sweep();
  void run(std::uint64_t steps);

  const Pairing& pairing() const { return pairing_; }
  const SpinConfig& config() const { return config_; }
  std::uint64_t steps() const { return steps_; }
  double beta() const { return beta_; }
  Variant variant() const { return variant_; }
  Philox& rng() { return rng_; }

  /// Heat-bath probability that v becomes plus given its neighbours.
  double plus_probability(int v) const;
  /// Acceptance probability of exchanging the spins at u and v.
  double exchange_acceptance(int u, int v) const;

 private:
  void glauber(bool restricted);
  void kawasaki();
  void set_spin(int v, int s);

  Pairing pairing_;
  SpinConfig config_;
  double beta_;
  Variant variant_;
  Philox rng_;
  std::uint64_t steps_ = 0;
  std::vector<int> plus_, minus_, slot_;
};

/// (1 / (k + 1)) * sum over minus vertices v of e^{beta dH_v}, where dH_v is the
/// change of H when v turns plus. Its mean under pi_k is exactly z_{k+1} / z_k.
double ratio_statistic(const Pairing& pairing, const SpinConfig& config, double beta);

/// Time average of ratio_statistic along a Kawasaki chain at plus-count k,
/// measured once per sweep after `burn_in` sweeps; batch-means standard error.
/// k = n returns {0, 0}.
Estimate ratio_estimator(const Pairing& pairing, double beta, int k, int num_sweeps, int burn_in, Philox& rng);

/// Two readings of the projection chain on plus-counts.
enum class ProjectionConvention {
  /// A_k = Omega_k u Omega_{k+1}, Theta = 2: up = r_k / (2 (1 + r_k)), down = 1 / (2 (1 + r_k)).
  MadrasRandall,
  /// The printed display: up = 1 / (2 (1 + r_k)), down = r_{k-1} / (2 (1 + r_{k-1})).
  DisplayedRates,
};

/// Birth-death chain on k in [k_lo, n - 1] built from ratios r_k ~ z_{k+1} / z_k.
struct ProjectionChain {
  int n = 0;
  int k_lo = 0;
  ProjectionConvention convention = ProjectionConvention::MadrasRandall;
  std::vector<double> ratios;        // r_k for k = k_lo .. n - 1
  std::vector<double> ratio_errors;  // standard errors, zero when exact
  std::vector<double> up, down, hold;

  std::size_t size() const { return up.size(); }
  int state(std::size_t i) const { return k_lo + static_cast<int>(i); }
  double drift(std::size_t i) const { return up[i] - down[i]; }
  /// Stationary law from detailed balance.
  std::vector<double> stationary() const;
};

/// Throws InvalidInput unless ratios cover k = k_lo .. n - 1 with positive values.
ProjectionChain projection_chain(int n, int k_lo, std::vector<double> ratios, std::vector<double> ratio_errors = {},
                                 ProjectionConvention convention = ProjectionConvention::MadrasRandall);

enum class InitKind { Uniform, AllPlus, AllMinus };
InitKind parse_init(const std::string& name);
const char* init_name(InitKind kind);

struct TrajectoryPoint {
  std::uint64_t t = 0;  // steps
  int k_plus = 0;
  double magnetization = 0.0;
  long H = 0;
};

/// Records (t, k, m, H) now and after each of `max_sweeps` sweeps.
std::vector<TrajectoryPoint> record_trajectory(Chain& chain, int max_sweeps);

/// Runs a chain from the given initialization, recording (t, k, m, H) at t = 0
/// and after every sweep. Uniform means i.i.d. fair spins.
std::vector<TrajectoryPoint> mixing_experiment(const Pairing& pairing, double beta, InitKind init, int max_sweeps,
                                               Philox& rng, Variant variant = Variant::Glauber);

struct ZBReport {
  int d = 3;
  double beta = 0.0;
  int n = 0;
  double fixed_energy = 0.0;  // (1/n) E_fix[H] at zero magnetization
  double fixed_error = 0.0;
  double anti_energy = 0.0;   // (1/n) E_anti[H]
  double anti_error = 0.0;
  double fixed_target = 0.0;  // (d/2) e^beta / (1 + e^beta)
  double anti_target = 0.0;   // (d/2) / (1 + e^beta)
  double sum() const { return fixed_energy + anti_energy; }
};

/// Energies of the zero-magnetization ferromagnet (Kawasaki) and of the free
/// antiferromagnet at -beta (Glauber), averaged over independent graphs.
ZBReport zb_check(int d, double beta, int n, int replicas, int burn_in, int sweeps, std::uint64_t seed);

}  // namespace fixmag
