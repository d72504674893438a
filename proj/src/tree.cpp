#include "fixmag/tree.hpp"

#include <cmath>
#include <string>

#include "fixmag/error.hpp"

namespace fixmag {

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logaddexp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log Phi(e^u) - u; its zeros are the fixed points in log-ratio coordinates.
double log_residual(int d, double beta, double h, double u) {
  return 2.0 * h + (d - 1) * (softplus(u + beta) - logaddexp(u, beta)) - u;
}

}  // namespace

void ModelParams::validate() const {
  if (d < 3) throw InvalidParameter("degree d must be at least 3, got " + std::to_string(d));
  if (!(beta >= 0.0)) throw InvalidParameter("inverse temperature beta must be non-negative");
  if (!std::isfinite(h)) throw InvalidParameter("field h must be finite");
}

Thresholds thresholds(int d) {
  if (d < 3) throw InvalidParameter("degree d must be at least 3, got " + std::to_string(d));
  const double s = std::sqrt(static_cast<double>(d - 1));
  return {2.0 * std::atanh(1.0 / (d - 1)), std::log((s + 1.0) / (s - 1.0))};
}

double bp_map(int d, double beta, double h, double R) {
  const double eb = std::exp(beta);
  return std::exp(2.0 * h) * std::pow((R * eb + 1.0) / (R + eb), d - 1);
}

double bp_map_derivative(int d, double beta, double h, double R) {
  const double eb = std::exp(beta);
  return bp_map(d, beta, h, R) * (d - 1) * (eb / (R * eb + 1.0) - 1.0 / (R + eb));
}

double magnetization_of_ratio(double beta, double R) {
  const double em = std::exp(-beta);
  if (R > 1.0) {
    const double inv = 1.0 / R;
    return (1.0 - inv * inv) / (1.0 + 2.0 * em * inv + inv * inv);
  }
  return (R * R - 1.0) / (R * R + 2.0 * em * R + 1.0);
}

TreeMeasure make_tree_measure(int d, double beta, double h, double R) {
  TreeMeasure m;
  m.d = d;
  m.beta = beta;
  m.R = R;
  m.h = h;
  m.eta = magnetization_of_ratio(beta, R);
  const double eb = std::exp(beta);
  m.broadcast[kPlus][kPlus] = eb * R / (eb * R + 1.0);
  m.broadcast[kPlus][kMinus] = 1.0 / (eb * R + 1.0);
  m.broadcast[kMinus][kPlus] = R / (eb + R);
  m.broadcast[kMinus][kMinus] = eb / (eb + R);
  m.rho = 0.5 * (1.0 + m.eta) * m.broadcast[kPlus][kPlus] + 0.5 * (1.0 - m.eta) * m.broadcast[kMinus][kMinus];
  const double step = 1e-6 * std::max(R, 1.0);
  const double slope = (bp_map(d, beta, h, R + step) - bp_map(d, beta, h, R - step)) / (2.0 * step);
  m.stable = std::abs(slope) < 1.0;
  return m;
}

std::vector<TreeMeasure> bp_fixed_points(const ModelParams& params) {
  params.validate();
  const int d = params.d;
  const double beta = params.beta;
  const double h = params.h;
  // Geometric grid R in [1e-12, 1e12], symmetric in log R so that u = 0 is a node.
  const double span = 12.0 * std::log(10.0);
  constexpr int kHalf = 12000;
  auto node = [&](int i) { return span * static_cast<double>(i) / kHalf; };

  std::vector<double> roots;
  double prev_u = node(-kHalf);
  double prev_f = log_residual(d, beta, h, prev_u);
  if (prev_f == 0.0) roots.push_back(prev_u);
  for (int i = -kHalf + 1; i <= kHalf; ++i) {
    const double u = node(i);
    const double f = log_residual(d, beta, h, u);
    if (f == 0.0) {
      roots.push_back(u);
    } else if (prev_f != 0.0 && (f > 0.0) != (prev_f > 0.0)) {
      double lo = prev_u, hi = u, flo = prev_f;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = log_residual(d, beta, h, mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_u = u;
    prev_f = f;
  }

  std::vector<TreeMeasure> out;
  out.reserve(roots.size());
  for (double u : roots) out.push_back(make_tree_measure(d, beta, h, std::exp(u)));
  return out;
}

TreeMeasure field_for_magnetization(int d, double beta, double eta) {
  if (!(std::abs(eta) < 1.0)) throw InvalidParameter("magnetization must lie in (-1, 1)");
  if (!(beta >= 0.0)) throw InvalidParameter("inverse temperature beta must be non-negative");
  if (d < 3) throw InvalidParameter("degree d must be at least 3, got " + std::to_string(d));
  // Positive root of (1 - eta) R^2 - 2 eta e^{-beta} R - (1 + eta) = 0, written to avoid cancellation.
  const double em = std::exp(-beta);
  const double disc = std::sqrt(eta * eta * em * em + (1.0 - eta) * (1.0 + eta));
  const double R = eta >= 0.0 ? (eta * em + disc) / (1.0 - eta) : (1.0 + eta) / (disc - eta * em);
  const double eb = std::exp(beta);
  const double h = 0.5 * (std::log(R) - (d - 1) * std::log((R * eb + 1.0) / (R + eb)));
  return make_tree_measure(d, beta, h, R);
}

double rho_eta(double beta, double eta) {
  // Equal to (e^{2b} - S) / (e^{2b} - 1) with S = sqrt(e^{2b}(1 - eta^2) + eta^2); this form has no
  // cancellation and reduces to (1 + eta^2) / 2 at beta = 0.
  const double e2b = std::exp(2.0 * beta);
  const double s = std::sqrt(e2b * (1.0 - eta * eta) + eta * eta);
  return (e2b + eta * eta) / (e2b + s);
}

double second_eigenvalue(const TreeMeasure& measure) {
  return measure.broadcast[kPlus][kPlus] + measure.broadcast[kMinus][kMinus] - 1.0;
}

double kesten_stigum_product(const TreeMeasure& measure) {
  const double lambda = second_eigenvalue(measure);
  return (measure.d - 1) * lambda * lambda;
}

std::size_t tree_level_size(int d, int level) {
  if (level == 0) return 1;
  std::size_t size = static_cast<std::size_t>(d);
  for (int l = 1; l < level; ++l) size *= static_cast<std::size_t>(d - 1);
  return size;
}

TreeSample sample_broadcast(const TreeMeasure& measure, int depth, Philox& rng) {
  if (depth < 0) throw InvalidParameter("depth must be non-negative");
  const int d = measure.d;
  TreeSample sample;
  sample.depth = depth;
  sample.levels.resize(depth + 1);
  sample.levels[0] = {static_cast<std::int8_t>(rng.bernoulli(measure.plus_probability()) ? 1 : -1)};
  const double stay_plus = measure.broadcast[kPlus][kPlus];
  const double to_plus_from_minus = measure.broadcast[kMinus][kPlus];
  for (int l = 1; l <= depth; ++l) {
    const auto& parents = sample.levels[l - 1];
    auto& level = sample.levels[l];
    level.resize(tree_level_size(d, l));
    const int fanout = (l == 1) ? d : d - 1;
    std::size_t idx = 0;
    for (std::int8_t parent : parents) {
      const double p = parent > 0 ? stay_plus : to_plus_from_minus;
      for (int c = 0; c < fanout; ++c) level[idx++] = rng.bernoulli(p) ? 1 : -1;
    }
  }
  return sample;
}

SpinLaw root_posterior(const std::vector<std::int8_t>& boundary, int depth, const TreeMeasure& measure) {
  const int d = measure.d;
  if (depth < 0) throw InvalidParameter("depth must be non-negative");
  if (boundary.size() != tree_level_size(d, depth)) throw InvalidInput("boundary size does not match tree depth");
  const double p = measure.plus_probability();
  const double q = 1.0 - p;
  if (depth == 0) return boundary[0] > 0 ? SpinLaw{1.0, 0.0} : SpinLaw{0.0, 1.0};

  // Per-node likelihoods of the observed leaves below it given its spin, normalized to max 1.
  std::vector<std::array<double, 2>> like(boundary.size());
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    like[i] = boundary[i] > 0 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
  }
  const auto& M = measure.broadcast;
  for (int l = depth - 1; l >= 0; --l) {
    const int fanout = (l == 0) ? d : d - 1;
    std::vector<std::array<double, 2>> up(tree_level_size(d, l));
    for (std::size_t i = 0; i < up.size(); ++i) {
      double lp = 1.0, lm = 1.0;
      for (int c = 0; c < fanout; ++c) {
        const auto& child = like[i * fanout + c];
        lp *= M[kPlus][kPlus] * child[0] + M[kPlus][kMinus] * child[1];
        lm *= M[kMinus][kPlus] * child[0] + M[kMinus][kMinus] * child[1];
      }
      const double scale = std::max(lp, lm);
      up[i] = {lp / scale, lm / scale};
    }
    like.swap(up);
  }
  const double a = p * like[0][0];
  const double b = q * like[0][1];
  return {a / (a + b), b / (a + b)};
}

Estimate reconstruction_tv(int d, double beta, double eta, int depth, int num_samples, Philox& rng) {
  if (depth < 1) throw InvalidParameter("depth must be at least 1");
  if (num_samples < 1) throw InvalidParameter("num_samples must be at least 1");
  const TreeMeasure measure = field_for_magnetization(d, beta, eta);
  const double p = measure.plus_probability();
  const double q = 1.0 - p;
  const double prior = p / (p + q);
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < num_samples; ++s) {
    const TreeSample t = sample_broadcast(measure, depth, rng);
    const double gap = std::abs(root_posterior(t.levels[depth], depth, measure).plus - prior);
    sum += gap;
    sum_sq += gap * gap;
  }
  const double mean = sum / num_samples;
  const double var = num_samples > 1 ? std::max(0.0, (sum_sq - num_samples * mean * mean) / (num_samples - 1)) : 0.0;
  return {mean, std::sqrt(var / num_samples)};
}

}  // namespace fixmag
