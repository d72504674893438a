#include "fixmag/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <json.hpp>

#include "fixmag/error.hpp"

namespace fixmag {

namespace {

constexpr std::size_t kMaxStates = 20000;

void pairings_rec(std::vector<int>& mate, int n, int d, const std::function<void(const Pairing&)>& fn) {
  const auto it = std::find(mate.begin(), mate.end(), -1);
  if (it == mate.end()) {
    fn(Pairing(n, d, mate));
    return;
  }
  const int a = static_cast<int>(it - mate.begin());
  for (int b = a + 1; b < static_cast<int>(mate.size()); ++b) {
    if (mate[b] != -1) continue;
    mate[a] = b;
    mate[b] = a;
    pairings_rec(mate, n, d, fn);
    mate[a] = mate[b] = -1;
  }
}

struct MultigraphBuilder {
  int n, d;
  std::vector<int> rem;
  std::vector<std::pair<int, int>> edges;
  const std::function<void(const Pairing&)>& fn;

  // Distribute the remaining degree of vertex i over partners j, j + 1, ...
  void partners(int i, int j) {
    if (rem[i] == 0) {
      vertex(i + 1);
      return;
    }
    if (j >= n) return;
    const int most = std::min(rem[i], rem[j]);
    for (int m = most; m >= 0; --m) {
      for (int e = 0; e < m; ++e) edges.emplace_back(i, j);
      rem[i] -= m;
      rem[j] -= m;
      partners(i, j + 1);
      rem[i] += m;
      rem[j] += m;
      edges.resize(edges.size() - static_cast<std::size_t>(m));
    }
  }

  void vertex(int i) {
    if (i == n) {
      fn(Pairing::from_vertex_edges(n, d, edges));
      return;
    }
    for (int loops = rem[i] / 2; loops >= 0; --loops) {
      for (int e = 0; e < loops; ++e) edges.emplace_back(i, i);
      rem[i] -= 2 * loops;
      partners(i, i + 1);
      rem[i] += 2 * loops;
      edges.resize(edges.size() - static_cast<std::size_t>(loops));
    }
  }
};

std::vector<std::uint32_t> state_space(int n, Variant variant, int k_plus) {
  std::vector<std::uint32_t> states;
  if (variant == Variant::Kawasaki) {
    for_each_config_with_k(n, k_plus, [&](const std::vector<std::int8_t>& s) { states.push_back(index_from_config(s)); });
    return states;
  }
  const std::uint32_t total = 1u << n;
  for (std::uint32_t x = 0; x < total; ++x) {
    const int minus = std::popcount(x);
    if (is_restricted(variant) && 2 * (n - minus) < n) continue;
    states.push_back(x);
  }
  return states;
}

}  // namespace

void for_each_pairing(int n, int d, const std::function<void(const Pairing&)>& fn) {
  if (n < 0 || d < 0) throw InvalidParameter("n and d must be non-negative");
  if ((static_cast<long>(n) * d) % 2 != 0) throw InvalidParameter("d * n must be even");
  if (static_cast<long>(n) * d > 16) throw TooLarge("pairing enumeration needs d * n <= 16");
  std::vector<int> mate(static_cast<std::size_t>(n) * d, -1);
  pairings_rec(mate, n, d, fn);
}

void for_each_multigraph(int n, int d, const std::function<void(const Pairing&)>& fn) {
  if (n < 1 || d < 0) throw InvalidParameter("need n >= 1 and d >= 0");
  if ((static_cast<long>(n) * d) % 2 != 0) throw InvalidParameter("d * n must be even");
  if (n > 10) throw TooLarge("multigraph enumeration needs n <= 10");
  MultigraphBuilder b{n, d, std::vector<int>(n, d), {}, fn};
  b.vertex(0);
}

void for_each_config_with_k(int n, int k, const std::function<void(const std::vector<std::int8_t>&)>& fn) {
  if (n < 0 || n > 30) throw TooLarge("configuration enumeration needs n <= 30");
  if (k < 0 || k > n) throw InvalidParameter("k must lie in [0, n]");
  std::vector<std::int8_t> spins(n);
  auto emit = [&](std::uint32_t plus_set) {
    for (int v = 0; v < n; ++v) spins[v] = (plus_set >> v) & 1u ? 1 : -1;
    fn(spins);
  };
  if (k == 0) {
    emit(0);
    return;
  }
  // Gosper's hack walks k-subsets (bit v = vertex v) in colex order.
  std::uint32_t x = (1u << k) - 1u;
  const std::uint32_t limit = 1u << n;
  while (x < limit) {
    emit(x);
    const std::uint32_t low = x & (~x + 1u);
    const std::uint32_t ripple = x + low;
    x = (((ripple ^ x) >> 2) / low) | ripple;
  }
}

std::vector<std::int8_t> config_from_index(int n, std::uint32_t index) {
  std::vector<std::int8_t> s(n);
  for (int v = 0; v < n; ++v) s[v] = (index >> (n - 1 - v)) & 1u ? -1 : 1;
  return s;
}

std::uint32_t index_from_config(const std::vector<std::int8_t>& spins) {
  const int n = static_cast<int>(spins.size());
  std::uint32_t x = 0;
  for (int v = 0; v < n; ++v) {
    if (spins[v] < 0) x |= 1u << (n - 1 - v);
  }
  return x;
}

std::vector<std::pair<int, int>> vertex_edges(const Pairing& pairing) {
  std::vector<std::pair<int, int>> out;
  for (const auto& [a, b] : pairing.edges()) out.emplace_back(pairing.vertex(a), pairing.vertex(b));
  return out;
}

long oracle_energy(const std::vector<std::pair<int, int>>& vedges, const std::vector<std::int8_t>& spins) {
  long h = 0;
  for (const auto& [u, v] : vedges) h += spins[u] == spins[v];
  return h;
}

std::vector<double> enumerate_z_table(const Pairing& pairing, double beta) {
  const int n = pairing.n();
  if (n > 24) throw TooLarge("z-table enumeration needs n <= 24");
  const auto ve = vertex_edges(pairing);
  std::vector<double> z(n + 1, 0.0);
  const std::uint32_t total = 1u << n;
  for (std::uint32_t x = 0; x < total; ++x) {
    const auto s = config_from_index(n, x);
    z[n - std::popcount(x)] += std::exp(beta * static_cast<double>(oracle_energy(ve, s)));
  }
  return z;
}

double enumerate_z(const Pairing& pairing, double beta, int k_plus) {
  const auto ve = vertex_edges(pairing);
  double z = 0.0;
  for_each_config_with_k(pairing.n(), k_plus, [&](const std::vector<std::int8_t>& s) {
    z += std::exp(beta * static_cast<double>(oracle_energy(ve, s)));
  });
  return z;
}

std::vector<double> first_moment_table(int n, int d, double beta) {
  if (static_cast<long>(n) * d > 12) throw TooLarge("first-moment enumeration needs d * n <= 12");
  std::vector<double> total(n + 1, 0.0);
  long count = 0;
  for_each_pairing(n, d, [&](const Pairing& p) {
    const auto z = enumerate_z_table(p, beta);
    for (int k = 0; k <= n; ++k) total[k] += z[k];
    ++count;
  });
  for (double& t : total) t /= static_cast<double>(count);
  return total;
}

double enumerate_first_moment(int n, int d, double beta, int k_plus) {
  if (k_plus < 0 || k_plus > n) throw InvalidParameter("k_plus must lie in [0, n]");
  return first_moment_table(n, d, beta)[k_plus];
}

DenseChain::DenseChain(Eigen::MatrixXd P, Eigen::VectorXd target, std::vector<std::uint32_t> states)
    : P_(std::move(P)), target_(std::move(target)), states_(std::move(states)) {
  if (P_.rows() != P_.cols() || P_.rows() == 0) throw InvalidInput("kernel must be square and non-empty");
  if (target_.size() == 0) target_ = stationary();
  if (target_.size() != P_.rows()) throw InvalidInput("target size does not match kernel");
  if (states_.empty()) {
    states_.resize(size());
    for (std::size_t i = 0; i < size(); ++i) states_[i] = static_cast<std::uint32_t>(i);
  }
}

Eigen::VectorXd DenseChain::stationary() const {
  const auto m = P_.rows();
  Eigen::MatrixXd A = P_.transpose() - Eigen::MatrixXd::Identity(m, m);
  A.row(m - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(m - 1) = 1.0;
  return A.fullPivLu().solve(b);
}

const std::vector<double>& DenseChain::eigenvalues() const {
  if (!eigenvalues_) {
    const Eigen::VectorXd root = target_.cwiseSqrt();
    const Eigen::VectorXd inv = root.cwiseInverse();
    Eigen::MatrixXd S = root.asDiagonal() * P_ * inv.asDiagonal();
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
    eigenvalues_ = std::move(ev);
  }
  return *eigenvalues_;
}

double DenseChain::gap() const {
  std::vector<double> ev = eigenvalues();
  if (ev.size() < 2) return 1.0;
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return 1.0 - ev[1];
}

double DenseChain::absolute_gap() const {
  if (size() < 2) return 1.0;
  // Drop the eigenvalue closest to 1; the rest sets the absolute gap.
  std::vector<double> ev = eigenvalues();
  const auto unit = std::min_element(ev.begin(), ev.end(), [](double a, double b) { return std::abs(a - 1.0) < std::abs(b - 1.0); });
  ev.erase(unit);
  double worst = 0.0;
  for (double x : ev) worst = std::max(worst, std::abs(x));
  return 1.0 - worst;
}

double DenseChain::row_sum_error() const { return (P_.rowwise().sum().array() - 1.0).abs().maxCoeff(); }

double DenseChain::stationarity_error() const {
  return (target_.transpose() * P_ - target_.transpose()).cwiseAbs().maxCoeff();
}

double DenseChain::reversibility_error() const {
  const Eigen::MatrixXd flow = target_.asDiagonal() * P_;
  return (flow - flow.transpose()).cwiseAbs().maxCoeff();
}

DenseChain DenseChain::restrict_to(const std::vector<std::size_t>& subset) const {
  const auto m = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd t(m);
  std::vector<std::uint32_t> st(subset.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      Q(i, j) = P_(static_cast<Eigen::Index>(subset[i]), static_cast<Eigen::Index>(subset[j]));
      off += Q(i, j);
    }
    Q(i, i) = 1.0 - off;
    t(i) = target_(static_cast<Eigen::Index>(subset[i]));
    st[i] = states_[subset[i]];
  }
  t /= t.sum();
  return DenseChain(std::move(Q), std::move(t), std::move(st));
}

DenseChain build_dense_chain(const Pairing& pairing, double beta, Variant variant, int k_plus) {
  const int n = pairing.n();
  if (n > 20) throw TooLarge("dense chains need n <= 20");
  if (variant == Variant::Kawasaki && (k_plus < 0 || k_plus > n)) {
    throw InvalidParameter("Kawasaki kernels need a plus count in [0, n]");
  }
  const std::vector<std::uint32_t> states = state_space(n, variant, k_plus);
  if (states.size() > kMaxStates) throw TooLarge("state space exceeds 2e4 states");
  std::vector<int> index(std::size_t{1} << n, -1);
  for (std::size_t i = 0; i < states.size(); ++i) index[states[i]] = static_cast<int>(i);

  const auto ve = vertex_edges(pairing);
  std::vector<double> energy(states.size());
  double top = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    energy[i] = static_cast<double>(oracle_energy(ve, config_from_index(n, states[i])));
    top = std::max(top, beta * energy[i]);
  }
  auto energy_of = [&](std::uint32_t x) { return static_cast<double>(oracle_energy(ve, config_from_index(n, x))); };
  // Heat-bath preference for y over x: pi(y) / (pi(x) + pi(y)).
  auto prefer = [&](double hx, double hy) { return 1.0 / (1.0 + std::exp(beta * (hx - hy))); };

  const auto m = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd glauber = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd kawasaki = Eigen::MatrixXd::Zero(m, m);
  const bool want_glauber = variant != Variant::Kawasaki;
  const bool want_kawasaki = variant == Variant::Kawasaki || variant == Variant::Hybrid || variant == Variant::HybridPlus;
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::uint32_t x = states[i];
    const double hx = energy[i];
    if (want_glauber) {
      for (int v = 0; v < n; ++v) {
        const std::uint32_t bit = 1u << (n - 1 - v);
        const std::uint32_t plus = x & ~bit, minus = x | bit;
        const double p_plus = prefer(energy_of(minus), energy_of(plus));
        for (const auto& [y, p] : {std::pair{plus, p_plus}, std::pair{minus, 1.0 - p_plus}}) {
          const int j = index[y];
          glauber(i, j >= 0 ? j : i) += p / n;
        }
      }
    }
    if (want_kawasaki) {
      const int minus_count = std::popcount(x);
      const int k = n - minus_count;
      if (k == 0 || k == n) {
        kawasaki(i, i) += 1.0;
      } else {
        const double pair_weight = 1.0 / (static_cast<double>(k) * (n - k));
        for (int u = 0; u < n; ++u) {
          const std::uint32_t bu = 1u << (n - 1 - u);
          if (x & bu) continue;  // u must be plus
          for (int v = 0; v < n; ++v) {
            const std::uint32_t bv = 1u << (n - 1 - v);
            if (!(x & bv)) continue;  // v must be minus
            const std::uint32_t y = (x | bu) & ~bv;
            const double a = prefer(hx, energy_of(y));
            kawasaki(i, index[y]) += pair_weight * a;
            kawasaki(i, i) += pair_weight * (1.0 - a);
          }
        }
      }
    }
  }
  Eigen::MatrixXd P;
  switch (variant) {
    case Variant::Glauber:
    case Variant::GlauberPlus: P = glauber; break;
    case Variant::Kawasaki: P = kawasaki; break;
    case Variant::Hybrid:
    case Variant::HybridPlus: P = 0.5 * glauber + 0.5 * kawasaki; break;
  }
  Eigen::VectorXd target(m);
  for (Eigen::Index i = 0; i < m; ++i) target(i) = std::exp(beta * energy[i] - top);
  target /= target.sum();
  return DenseChain(std::move(P), std::move(target), states);
}

DenseChain dense_projection(const ProjectionChain& chain) {
  const auto m = static_cast<Eigen::Index>(chain.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    P(i, i) = chain.hold[i];
    if (i + 1 < m) P(i, i + 1) = chain.up[i];
    if (i > 0) P(i, i - 1) = chain.down[i];
  }
  const auto pi = chain.stationary();
  Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(pi.data(), m);
  std::vector<std::uint32_t> states(chain.size());
  for (std::size_t i = 0; i < states.size(); ++i) states[i] = static_cast<std::uint32_t>(chain.state(i));
  return DenseChain(std::move(P), std::move(target), std::move(states));
}

std::vector<TVPoint> exact_tv_curve(const DenseChain& chain, const Eigen::VectorXd& init, int horizon) {
  if (init.size() != static_cast<Eigen::Index>(chain.size())) throw InvalidInput("initial law has the wrong size");
  if (horizon < 0) throw InvalidParameter("horizon must be non-negative");
  std::vector<TVPoint> out;
  Eigen::RowVectorXd law = init.transpose();
  const Eigen::RowVectorXd target = chain.target().transpose();
  for (int t = 0; t <= horizon; ++t) {
    out.push_back({t, 0.5 * (law - target).cwiseAbs().sum()});
    law = law * chain.P();
  }
  return out;
}

std::string golden_json(const Pairing& pairing, double beta) {
  nlohmann::ordered_json j;
  j["params"] = {{"n", pairing.n()}, {"d", pairing.d()}, {"beta", beta}, {"mates", pairing.mates()}};
  j["z_table"] = enumerate_z_table(pairing, beta);
  nlohmann::ordered_json gaps;
  for (Variant v : {Variant::Glauber, Variant::Hybrid, Variant::GlauberPlus, Variant::HybridPlus}) {
    gaps[variant_name(v)] = build_dense_chain(pairing, beta, v).gap();
  }
  for (int k = 1; k < pairing.n(); ++k) {
    gaps[std::string("kawasaki_k") + std::to_string(k)] = build_dense_chain(pairing, beta, Variant::Kawasaki, k).gap();
  }
  j["gaps"] = gaps;
  const DenseChain g = build_dense_chain(pairing, beta, Variant::Glauber);
  j["stationary"] = std::vector<double>(g.target().data(), g.target().data() + g.target().size());
  return j.dump(2);
}

}  // namespace fixmag
