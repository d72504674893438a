#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixmag/annealed.hpp"
#include "fixmag/error.hpp"
#include "fixmag/oracle.hpp"
#include "fixmag/tree.hpp"

using namespace fixmag;

namespace {

// High-precision reference values for d = 10, beta = 0.32.
constexpr double kEtaStar = 0.86875994282598194;
constexpr double kSpinodal = 0.61036593364573569;
constexpr double kF02 = 1.1560275062696646;
constexpr double kF04 = 1.3110180409587473;
constexpr double kRate0 = 1.5568759636605953 - 1.6504700731276433;

double golden_argmax(int d, double beta, double eta) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::abs(eta) + 1e-15, hi = 1.0 - 1e-15;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = g_functional(d, beta, eta, a), fb = g_functional(d, beta, eta, b);
  while (hi - lo > 1e-10) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = g_functional(d, beta, eta, b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = g_functional(d, beta, eta, a);
    }
  }
  return 0.5 * (lo + hi);
}

double log_choose(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

}  // namespace

TEST_CASE("g is maximized at rho_eta") {
  for (int d : {3, 6, 10}) {
    for (double beta : {0.05, 0.5, 1.7}) {
      for (double eta : {-0.8, -0.3, 0.0, 0.45, 0.9}) {
        CHECK(std::abs(golden_argmax(d, beta, eta) - rho_eta(beta, eta)) < 1e-8);
      }
    }
  }
  const double rho0 = std::exp(0.32) / (1.0 + std::exp(0.32));
  CHECK(g_functional(10, 0.32, 0.0, rho0) ==
        doctest::Approx(std::log(2.0) + 5.0 * std::log((1.0 + std::exp(0.32)) / 2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(g_functional(3, 0.5, 0.4, 0.3), DomainError);
  CHECK_THROWS_AS(g_functional(3, 0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("g is strictly concave in rho") {
  Philox rng(12, 0);
  for (int i = 0; i < 100; ++i) {
    const int d = 3 + static_cast<int>(rng.below(10));
    const double eta = 1.8 * rng.uniform() - 0.9;
    const double rho = std::abs(eta) + (1.0 - std::abs(eta)) * (0.05 + 0.9 * rng.uniform());
    const double second = g_second_derivative(d, eta, rho);
    CHECK(second < 0.0);
    const double h = 1e-4;
    const double numeric =
        (g_functional(d, 0.7, eta, rho + h) - 2.0 * g_functional(d, 0.7, eta, rho) + g_functional(d, 0.7, eta, rho - h)) /
        (h * h);
    CHECK(numeric == doctest::Approx(second).epsilon(1e-4));
  }
}

TEST_CASE("free energy closed form, symmetry and grid maximum") {
  for (int d = 3; d <= 12; ++d) {
    for (double beta : {0.0, 0.2, 0.9, 2.0}) {
      CHECK(std::abs(free_energy(d, beta, 0.0) - (std::log(2.0) + d / 2.0 * std::log((1.0 + std::exp(beta)) / 2.0))) <
            1e-12);
      for (double eta : {0.1, 0.5, 0.95}) CHECK(free_energy(d, beta, eta) == free_energy(d, beta, -eta));
    }
  }
  CHECK(free_energy(3, 0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  for (double eta : {-0.6, 0.0, 0.3, 0.8}) {
    double best = -1e300;
    for (int i = 1; i < 400000; ++i) {
      const double rho = std::abs(eta) + (1.0 - std::abs(eta)) * i / 400000.0;
      best = std::max(best, g_functional(4, 0.9, eta, rho));
    }
    CHECK(std::abs(best - free_energy(4, 0.9, eta)) < 1e-6);
  }
}

TEST_CASE("free energy at d = 10, beta = 0.32 has twin maxima and a local minimum at zero") {
  const int d = 10;
  const double beta = 0.32;
  std::vector<double> crit;
  constexpr int kGrid = 20000;
  double prev = 0.0;
  for (int i = 1; i < kGrid; ++i) {
    const double eta = -1.0 + 2.0 * i / kGrid;
    const double h = 1e-6;
    const double slope = free_energy(d, beta, eta + h) - free_energy(d, beta, eta - h);
    if (i > 1 && (slope > 0) != (prev > 0)) crit.push_back(eta);
    prev = slope;
  }
  REQUIRE(crit.size() == 3);
  CHECK(std::abs(crit[0] + kEtaStar) < 2e-4);
  CHECK(std::abs(crit[1]) < 2e-4);
  CHECK(std::abs(crit[2] - kEtaStar) < 2e-4);
  CHECK(std::abs(eta_star(d, beta) - kEtaStar) < 1e-6);
  CHECK(free_energy(d, beta, kEtaStar) > free_energy(d, beta, 0.0));
}

TEST_CASE("rate function") {
  CHECK(std::abs(rate_function(10, 0.32, eta_star(10, 0.32))) < 1e-12);
  CHECK(rate_function(10, 0.32, 0.0) == doctest::Approx(kRate0).epsilon(1e-9));
  CHECK(rate_function(3, 0.5, 0.0) == 0.0);
  CHECK(eta_star(3, 0.5) == 0.0);
  CHECK(rate_function(3, 0.5, 0.4) < 0.0);
}

TEST_CASE("drift function: reference values, F(0) = 1, slope and boundary") {
  CHECK(drift_function(10, 0.32, 0.2) == doctest::Approx(kF02).epsilon(1e-12));
  CHECK(drift_function(10, 0.32, 0.4) == doctest::Approx(kF04).epsilon(1e-12));
  for (int d : {3, 5, 10, 25}) {
    for (double beta : {0.05, 0.32, 1.0, 1.9}) {
      CHECK(std::abs(drift_function(d, beta, 0.0) - 1.0) < 1e-12);
      const double h = 1e-5;
      const double slope = (drift_function(d, beta, h) - drift_function(d, beta, -h)) / (2.0 * h);
      CHECK(std::abs(slope - (-2.0 + d * (1.0 - std::exp(-beta)))) < 1e-6);
    }
    const double bc = thresholds(d).beta_c;
    CHECK(std::abs(-2.0 + d * (1.0 - std::exp(-bc))) < 1e-12);
  }
  CHECK(drift_function(10, 0.32, 1.0 - 1e-6) < 1e-3);
  CHECK(drift_function(10, 0.32, 1.0 - 1e-6) > 0.0);
}

TEST_CASE("drift root equals the free-energy maximizer") {
  CHECK(std::abs(drift_root(10, 0.32) - kEtaStar) < 1e-9);
  CHECK(std::abs(drift_function(10, 0.32, drift_root(10, 0.32)) - 1.0) < 1e-10);
  CHECK_THROWS_AS(drift_root(3, 0.5), NoInteriorRoot);
}

TEST_CASE("spinodal") {
  const auto s = spinodal(10, 0.32);
  REQUIRE(s.has_value());
  CHECK(std::abs(*s - kSpinodal) < 1e-6);
  CHECK_FALSE(spinodal(3, 0.5).has_value());
  const FreeEnergyCurve curve = free_energy_curve(10, 0.32, 2001);
  REQUIRE(curve.points.size() == 2001);
  CHECK(curve.points.front().eta == doctest::Approx(-curve.points.back().eta));
  CHECK(curve.points[1000].eta == doctest::Approx(0.0));
  CHECK(std::abs(curve.eta_star - kEtaStar) < 1e-6);
  REQUIRE(curve.eta_spinodal.has_value());
  CHECK(std::abs(*curve.eta_spinodal - kSpinodal) < 1e-6);
}

TEST_CASE("bichromatic counts") {
  CHECK(std::exp(log_bichromatic_count(3, 3, 1)) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(std::exp(log_bichromatic_count(3, 3, 3)) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(std::exp(log_double_factorial_odd(6)) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(log_double_factorial_odd(0) == 0.0);
  for (long n : {2L, 6L, 10L}) {
    CHECK(log_bichromatic_count(n, 0, 0) == doctest::Approx(log_double_factorial_odd(n)).epsilon(1e-12));
  }
  for (long total = 0; total <= 20; total += 2) {
    for (long np = 0; np <= total; ++np) {
      double s = 0.0;
      for (long k = np % 2; k <= std::min(np, total - np); k += 2) s += std::exp(log_bichromatic_count(np, total - np, k));
      CHECK(s == doctest::Approx(std::exp(log_double_factorial_odd(total))).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(log_bichromatic_count(3, 3, 2), InvalidCount);
  CHECK_THROWS_AS(log_bichromatic_count(3, 3, 5), InvalidCount);
}

TEST_CASE("annealed first moment") {
  for (double beta : {0.0, 0.5, 1.5}) {
    const double expected = 2.0 * (9.0 * std::exp(2.0 * beta) + 6.0) / 15.0;
    CHECK(std::exp(log_annealed_first_moment(2, 3, beta, 1)) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(std::exp(log_annealed_first_moment(2, 3, 1.5, 1)) == doctest::Approx(24.902644307825201).epsilon(1e-12));
  for (int n : {4, 6, 10}) {
    for (int k = 0; k <= n; ++k) {
      CHECK(log_annealed_first_moment(n, 3, 0.0, k) == doctest::Approx(log_choose(n, k)).epsilon(1e-12));
    }
  }
  CHECK(std::exp(log_annealed_first_moment(4, 3, 0.8, 2)) ==
        doctest::Approx(enumerate_first_moment(4, 3, 0.8, 2)).epsilon(1e-10));
}

TEST_CASE("finite-n first moment approaches the free energy") {
  const double f = free_energy(3, 0.5, 0.0);
  double prev = 1e300;
  for (int n : {4, 8, 12}) {
    const double gap = std::abs(log_annealed_first_moment(n, 3, 0.5, n / 2) / n - f);
    CHECK(gap < prev);
    CHECK(gap < 2.0 * std::log(n) / n);
    prev = gap;
  }
}

TEST_CASE("bichromatic pmf") {
  const EdgeCountPMF hot = edge_count_pmf(3, 3, 0.0);
  CHECK(hot.probability_of(1) == doctest::Approx(9.0 / 15.0).epsilon(1e-14));
  CHECK(hot.probability_of(3) == doctest::Approx(6.0 / 15.0).epsilon(1e-14));
  CHECK(hot.probability_of(2) == 0.0);
  for (double beta : {0.3, 1.2}) {
    const double e = std::exp(2.0 * beta);
    CHECK(edge_count_pmf(3, 3, beta).probability_of(1) == doctest::Approx(9.0 * e / (9.0 * e + 6.0)).epsilon(1e-13));
  }
  for (long m : {200L, 400L, 750L}) {
    const EdgeCountPMF p = edge_count_pmf(m, m, 0.5);
    CHECK(std::abs(p.mean() - p.mu) < 2.0);
    CHECK(p.cumulative.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(p.variance() / p.sigma2 - 1.0) < 0.1);
  }
  const EdgeCountPMF p = edge_count_pmf(7, 5, 0.9);
  Philox rng(2, 0);
  std::vector<long> counts(p.support.size(), 0);
  constexpr int kN = 200000;
  for (int i = 0; i < kN; ++i) {
    const long k = p.sample(rng);
    const auto it = std::find(p.support.begin(), p.support.end(), k);
    REQUIRE(it != p.support.end());
    ++counts[static_cast<std::size_t>(it - p.support.begin())];
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double q = p.probabilities[i];
    CHECK(std::abs(counts[i] / double(kN) - q) < 4.0 * std::sqrt(q * (1.0 - q) / kN) + 1e-12);
  }
}
