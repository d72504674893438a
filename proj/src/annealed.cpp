#include "fixmag/annealed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fixmag/error.hpp"
#include "fixmag/tree.hpp"

namespace fixmag {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double g_unchecked(int d, double beta, double eta, double rho) {
  return beta * rho * d / 2.0 + std::log(2.0) + (d - 1) / 2.0 * (xlogx(1.0 + eta) + xlogx(1.0 - eta)) -
         d / 2.0 * (xlogx(1.0 - rho) + 0.5 * (xlogx(rho + eta) + xlogx(rho - eta)) + std::log(2.0));
}

// 1 - rho_eta divided by (1 - eta), computed without cancellation near eta = 1.
double bichromatic_over_minus(double beta, double eta) {
  const double e2b = std::exp(2.0 * beta);
  const double s = std::sqrt(e2b * (1.0 - eta * eta) + eta * eta);
  return (1.0 + eta) * (e2b + eta * eta) / ((s + eta * eta) * (e2b + s));
}

double log_choose(long n, long k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_sum_exp(const std::vector<double>& xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double second_difference(int d, double beta, double eta, double step) {
  return (free_energy(d, beta, eta + step) - 2.0 * free_energy(d, beta, eta) + free_energy(d, beta, eta - step)) /
         (step * step);
}

}  // namespace

double g_functional(int d, double beta, double eta, double rho) {
  if (!(rho > std::abs(eta) && rho < 1.0)) {
    throw DomainError("rho must lie in (|eta|, 1)");
  }
  return g_unchecked(d, beta, eta, rho);
}

double g_second_derivative(int d, double eta, double rho) {
  if (!(rho > std::abs(eta) && rho < 1.0)) throw DomainError("rho must lie in (|eta|, 1)");
  return -d / (2.0 * (1.0 - rho)) - d / (4.0 * (rho + eta)) - d / (4.0 * (rho - eta));
}

double free_energy(int d, double beta, double eta) {
  if (!(std::abs(eta) <= 1.0)) throw DomainError("magnetization must lie in [-1, 1]");
  return g_unchecked(d, beta, eta, rho_eta(beta, eta));
}

double eta_star(int d, double beta) {
  if (beta <= thresholds(d).beta_c) return 0.0;
  constexpr int kGrid = 4000;
  int best = 0;
  double best_f = free_energy(d, beta, 0.0);
  for (int i = 1; i < kGrid; ++i) {
    const double f = free_energy(d, beta, static_cast<double>(i) / kGrid);
    if (f > best_f) {
      best_f = f;
      best = i;
    }
  }
  double lo = std::max(0.0, (best - 1.0) / kGrid);
  double hi = std::min(1.0 - 1e-15, (best + 1.0) / kGrid);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = free_energy(d, beta, a), fb = free_energy(d, beta, b);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = free_energy(d, beta, b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = free_energy(d, beta, a);
    }
  }
  return 0.5 * (lo + hi);
}

double rate_function(int d, double beta, double eta) {
  return free_energy(d, beta, eta) - free_energy(d, beta, eta_star(d, beta));
}

double drift_function(int d, double beta, double eta) {
  if (!(eta > -1.0 && eta < 1.0)) throw DomainError("magnetization must lie in (-1, 1)");
  const double bi = bichromatic_over_minus(beta, eta);
  const double mono = 1.0 - bi;
  return (1.0 - eta) / (1.0 + eta) * std::pow(mono * std::exp(-beta) + bi * std::exp(beta), d);
}

double drift_root(int d, double beta) {
  if (beta <= thresholds(d).beta_c) {
    throw NoInteriorRoot("F = 1 has no root in (0, 1) for beta <= beta_c");
  }
  constexpr int kGrid = 4000;
  double lo = 0.0, hi = 0.0;
  double prev = 1e-9;
  for (int i = 1; i < kGrid; ++i) {
    const double eta = static_cast<double>(i) / kGrid;
    if (drift_function(d, beta, eta) < 1.0) {
      lo = prev;
      hi = eta;
      break;
    }
    prev = eta;
  }
  if (hi == 0.0) throw NoInteriorRoot("no sign change of F - 1 located on (0, 1)");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (drift_function(d, beta, mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::optional<double> spinodal(int d, double beta) {
  if (beta <= thresholds(d).beta_c) return std::nullopt;
  constexpr int kGrid = 10000;
  constexpr double kStep = 1e-4;
  double prev_eta = 0.5 / kGrid;
  double prev = second_difference(d, beta, prev_eta, kStep);
  for (int i = 1; i < kGrid - 1; ++i) {
    const double eta = (i + 0.5) / kGrid;
    const double cur = second_difference(d, beta, eta, kStep);
    if ((cur > 0.0) != (prev > 0.0)) {
      double lo = prev_eta, hi = eta, flo = prev;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = second_difference(d, beta, mid, kStep);
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev_eta = eta;
    prev = cur;
  }
  return std::nullopt;
}

FreeEnergyCurve free_energy_curve(int d, double beta, int points) {
  if (points < 2) throw InvalidParameter("free-energy curve needs at least 2 points");
  thresholds(d);
  FreeEnergyCurve curve;
  curve.d = d;
  curve.beta = beta;
  curve.points.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double eta = static_cast<double>(2 * i - (points - 1)) / points;
    curve.points.push_back({eta, free_energy(d, beta, eta), rho_eta(beta, eta)});
  }
  curve.eta_star = eta_star(d, beta);
  curve.eta_spinodal = spinodal(d, beta);
  return curve;
}

double log_double_factorial_odd(long m) {
  if (m < 0 || m % 2 != 0) throw InvalidCount("(m - 1)!! needs an even m >= 0");
  const long j = m / 2;
  return std::lgamma(static_cast<double>(m) + 1.0) - j * std::log(2.0) - std::lgamma(static_cast<double>(j) + 1.0);
}

double log_bichromatic_count(long n_plus, long n_minus, long k) {
  if (k < 0 || n_plus - k < 0 || n_minus - k < 0 || (n_plus - k) % 2 != 0 || (n_minus - k) % 2 != 0) {
    throw InvalidCount("bichromatic count k=" + std::to_string(k) + " incompatible with clone counts (" +
                       std::to_string(n_plus) + ", " + std::to_string(n_minus) + ")");
  }
  return log_choose(n_plus, k) + log_choose(n_minus, k) + std::lgamma(static_cast<double>(k) + 1.0) +
         log_double_factorial_odd(n_plus - k) + log_double_factorial_odd(n_minus - k);
}

double log_annealed_first_moment(int n, int d, double beta, int k_plus) {
  if (n < 1 || d < 1) throw InvalidParameter("n and d must be positive");
  if ((static_cast<long>(d) * n) % 2 != 0) throw InvalidParameter("d * n must be even");
  if (k_plus < 0 || k_plus > n) throw InvalidParameter("k_plus must lie in [0, n]");
  const long n_plus = static_cast<long>(d) * k_plus;
  const long n_minus = static_cast<long>(d) * (n - k_plus);
  const long half_edges = (n_plus + n_minus) / 2;
  std::vector<double> terms;
  for (long b = n_plus % 2; b <= std::min(n_plus, n_minus); b += 2) {
    terms.push_back(beta * static_cast<double>(half_edges - b) + log_bichromatic_count(n_plus, n_minus, b));
  }
  return log_choose(n, k_plus) + log_sum_exp(terms) - log_double_factorial_odd(n_plus + n_minus);
}

double edge_count_log_surrogate(long n_plus, long n_minus, double beta, double k) {
  const double np = static_cast<double>(n_plus);
  const double nm = static_cast<double>(n_minus);
  const double total = np + nm;
  const double hp = (np - k) / 2.0;
  const double hm = (nm - k) / 2.0;
  return beta * (total / 2.0 - k) + xlogx(np) + xlogx(nm) - xlogx(k) - xlogx(hp) - xlogx(hm) +
         0.5 * std::log(2.0 * np * nm / (std::numbers::pi * k * (np - k) * (nm - k))) + (k - total / 2.0) * std::log(2.0) -
         total / 2.0;
}

EdgeCountPMF edge_count_pmf(long n_plus, long n_minus, double beta) {
  if (n_plus < 0 || n_minus < 0) throw InvalidParameter("clone counts must be non-negative");
  if ((n_plus + n_minus) % 2 != 0) throw InvalidParameter("total clone count must be even");
  EdgeCountPMF pmf;
  pmf.n_plus = n_plus;
  pmf.n_minus = n_minus;
  pmf.beta = beta;
  const long half_edges = (n_plus + n_minus) / 2;
  for (long k = n_plus % 2; k <= std::min(n_plus, n_minus); k += 2) {
    pmf.support.push_back(k);
    pmf.log_weights.push_back(beta * static_cast<double>(half_edges - k) + log_bichromatic_count(n_plus, n_minus, k));
  }
  if (pmf.support.empty()) throw InvalidParameter("bichromatic-count support is empty");
  const double lz = log_sum_exp(pmf.log_weights);
  double acc = 0.0;
  for (double lw : pmf.log_weights) {
    const double p = std::exp(lw - lz);
    pmf.probabilities.push_back(p);
    acc += p;
    pmf.cumulative.push_back(acc);
  }
  pmf.cumulative.back() = 1.0;

  const double top = static_cast<double>(std::min(n_plus, n_minus));
  bool have_surrogate = false;
  if (top >= 3.0) {
    double lo = 1e-9 * top, hi = top * (1.0 - 1e-9);
    for (int it = 0; it < 300; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (edge_count_log_surrogate(n_plus, n_minus, beta, m1) < edge_count_log_surrogate(n_plus, n_minus, beta, m2)) {
        lo = m1;
      } else {
        hi = m2;
      }
    }
    const double mu = 0.5 * (lo + hi);
    const double step = std::min(0.5, 0.25 * std::min(mu, top - mu));
    const double curv = (edge_count_log_surrogate(n_plus, n_minus, beta, mu + step) -
                         2.0 * edge_count_log_surrogate(n_plus, n_minus, beta, mu) +
                         edge_count_log_surrogate(n_plus, n_minus, beta, mu - step)) /
                        (step * step);
    if (curv < 0.0 && std::isfinite(curv)) {
      pmf.mu = mu;
      pmf.sigma2 = -1.0 / curv;
      have_surrogate = true;
    }
  }
  if (!have_surrogate) {
    pmf.mu = pmf.mean();
    pmf.sigma2 = pmf.variance();
  }
  return pmf;
}

double EdgeCountPMF::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m += probabilities[i] * static_cast<double>(support[i]);
  return m;
}

double EdgeCountPMF::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double x = static_cast<double>(support[i]) - m;
    v += probabilities[i] * x * x;
  }
  return v;
}

double EdgeCountPMF::probability_of(long k) const {
  const auto it = std::lower_bound(support.begin(), support.end(), k);
  if (it == support.end() || *it != k) return 0.0;
  return probabilities[static_cast<std::size_t>(it - support.begin())];
}

long EdgeCountPMF::sample(Philox& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), support.size() - 1);
  return support[idx];
}

}  // namespace fixmag
