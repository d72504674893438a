#include "fixmag/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fixmag/dynamics.hpp"
#include "fixmag/error.hpp"

namespace fixmag {

namespace {

int edge_type(int a, int b) { return (a > 0 ? 0 : 2) + (b > 0 ? 0 : 1); }

int default_burn_in(int n) { return static_cast<int>(std::ceil(50.0 * std::log(std::max(n, 2)))); }

std::string canon(const Ball& ball, const std::vector<std::int8_t>& spins, int i) {
  std::string s(1, spins[ball.vertices[i]] > 0 ? '+' : '-');
  if (ball.children[i].empty()) return s;
  std::vector<std::string> kids;
  kids.reserve(ball.children[i].size());
  for (int c : ball.children[i]) kids.push_back(canon(ball, spins, c));
  std::sort(kids.begin(), kids.end());
  s += '(';
  for (const auto& k : kids) s += k;
  s += ')';
  return s;
}

struct PatternParser {
  const std::string& text;
  const Matrix2& M;
  std::size_t pos = 0;

  // Probability of the subtree starting at `pos`, given its own spin, and that spin.
  std::pair<double, int> subtree() {
    if (pos >= text.size() || (text[pos] != '+' && text[pos] != '-')) throw InvalidInput("malformed pattern");
    const int spin = text[pos++] == '+' ? kPlus : kMinus;
    double p = 1.0;
    if (pos < text.size() && text[pos] == '(') {
      ++pos;
      std::vector<std::string> kids;
      while (pos < text.size() && text[pos] != ')') {
        const std::size_t start = pos;
        const auto [q, child_spin] = subtree();
        p *= M[spin][child_spin] * q;
        kids.push_back(text.substr(start, pos - start));
      }
      if (pos >= text.size()) throw InvalidInput("unterminated pattern");
      ++pos;
      // Distinct orderings of the children that give the same canonical form.
      std::map<std::string, int> mult;
      for (const auto& k : kids) ++mult[k];
      double log_orderings = std::lgamma(static_cast<double>(kids.size()) + 1.0);
      for (const auto& [k, c] : mult) log_orderings -= std::lgamma(static_cast<double>(c) + 1.0);
      p *= std::exp(log_orderings);
    }
    return {p, spin};
  }
};

}  // namespace

OverlapMatrix edge_overlap(const Pairing& pairing, const std::vector<std::int8_t>& sigma,
                           const std::vector<std::int8_t>& sigma_prime) {
  if (static_cast<int>(sigma.size()) != pairing.n() || static_cast<int>(sigma_prime.size()) != pairing.n()) {
    throw InvalidInput("config size does not match pairing");
  }
  OverlapMatrix R{};
  const auto edges = pairing.edges();
  if (edges.empty()) return R;
  const double unit = 1.0 / static_cast<double>(edges.size());
  for (const auto& [a, b] : edges) {
    const int u = pairing.vertex(a), v = pairing.vertex(b);
    R[edge_type(sigma[u], sigma[v])][edge_type(sigma_prime[u], sigma_prime[v])] += unit;
  }
  return R;
}

EdgeTypeProbs edge_type_probs(const TreeMeasure& m) {
  const double p = 0.5 * (1.0 + m.eta), q = 0.5 * (1.0 - m.eta);
  return {p * m.broadcast[kPlus][kPlus], p * m.broadcast[kPlus][kMinus], q * m.broadcast[kMinus][kPlus],
          q * m.broadcast[kMinus][kMinus]};
}

OverlapMatrix tree_reference_overlap(const TreeMeasure& measure) {
  const auto p = edge_type_probs(measure).as_array();
  OverlapMatrix R{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) R[i][j] = p[i] * p[j];
  }
  return R;
}

double frobenius_distance(const OverlapMatrix& a, const OverlapMatrix& b) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) s += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
  }
  return std::sqrt(s);
}

double plus_plus_vertices(const OverlapMatrix& R, int n) {
  // Each vertex plus in both has d clone ends of type (+, +); edges are oriented,
  // so the first end is plus for types ++ and +-, the second for ++ and -+.
  constexpr int w[4][4] = {{2, 1, 1, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}, {0, 0, 0, 0}};
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) s += w[i][j] * R[i][j];
  }
  return 0.5 * n * s;
}

Estimate overlap_deviation(const Pairing& pairing, double beta, int k_plus, int num_pairs, int burn_in_sweeps,
                           Philox& rng) {
  const int n = pairing.n();
  if (num_pairs < 1) throw InvalidParameter("num_pairs must be at least 1");
  if (k_plus <= 0 || k_plus >= n) throw InvalidParameter("k_plus must lie strictly between 0 and n");
  const int burn = burn_in_sweeps > 0 ? burn_in_sweeps : default_burn_in(n);
  const OverlapMatrix ref = tree_reference_overlap(field_for_magnetization(pairing.d(), beta, 2.0 * k_plus / n - 1.0));
  auto sample = [&] {
    Chain chain(pairing, SpinConfig::random_with_k(pairing, k_plus, rng), beta, Variant::Kawasaki, rng.derive(rng()));
    for (int s = 0; s < burn; ++s) chain.sweep();
    return chain.config().spins();
  };
  double sum = 0.0, sum_sq = 0.0;
  for (int p = 0; p < num_pairs; ++p) {
    const auto a = sample();
    const auto b = sample();
    const double dev = frobenius_distance(edge_overlap(pairing, a, b), ref);
    sum += dev;
    sum_sq += dev * dev;
  }
  const double mean = sum / num_pairs;
  const double var = num_pairs > 1 ? std::max(0.0, (sum_sq - num_pairs * mean * mean) / (num_pairs - 1)) : 0.0;
  return {mean, std::sqrt(var / num_pairs)};
}

std::string canonical_pattern(const Ball& ball, const std::vector<std::int8_t>& spins) { return canon(ball, spins, 0); }

double pattern_probability(const std::string& pattern, const TreeMeasure& measure) {
  PatternParser parser{pattern, measure.broadcast};
  const auto [p, spin] = parser.subtree();
  if (parser.pos != pattern.size()) throw InvalidInput("trailing characters in pattern");
  const double root = spin == kPlus ? measure.plus_probability() : 1.0 - measure.plus_probability();
  return root * p;
}

LocalLawReport local_law_tv(const Pairing& pairing, double beta, int k_plus, int radius, int num_vertices, int sweeps,
                            Philox& rng, const std::optional<SpinConfig>& initial) {
  const int n = pairing.n();
  if (radius < 0 || radius > 3) throw InvalidParameter("radius must lie in [0, 3]");
  if (sweeps < 1 || num_vertices < 1) throw InvalidParameter("need sweeps >= 1 and num_vertices >= 1");
  if (k_plus <= 0 || k_plus >= n) throw InvalidParameter("k_plus must lie strictly between 0 and n");
  if (initial && initial->k_plus() != k_plus) throw InvalidInput("initial configuration has the wrong plus count");
  const TreeMeasure measure = field_for_magnetization(pairing.d(), beta, 2.0 * k_plus / n - 1.0);

  std::vector<int> chosen(n);
  std::iota(chosen.begin(), chosen.end(), 0);
  if (num_vertices < n) {
    shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(num_vertices);
    std::sort(chosen.begin(), chosen.end());
  }
  LocalLawReport report;
  std::vector<Ball> balls;
  for (int v : chosen) {
    Ball b = neighborhood(pairing, v, radius);
    if (b.is_tree) {
      balls.push_back(std::move(b));
    } else {
      ++report.non_tree_balls;
    }
  }
  report.tree_balls = balls.size();

  SpinConfig start = initial ? *initial : SpinConfig::random_with_k(pairing, k_plus, rng);
  Chain chain(pairing, std::move(start), beta, Variant::Kawasaki, rng.derive(rng()));
  if (!initial) {
    for (int s = 0, burn = default_burn_in(n); s < burn; ++s) chain.sweep();
  }
  std::map<std::string, std::size_t> counts;
  for (int s = 0; s < sweeps; ++s) {
    if (s > 0) chain.sweep();
    for (const auto& b : balls) ++counts[canonical_pattern(b, chain.config().spins())];
  }
  report.observations = balls.size() * static_cast<std::size_t>(sweeps);
  report.distinct_patterns = counts.size();
  if (report.observations == 0) return report;
  double diff = 0.0, covered = 0.0;
  for (const auto& [pattern, c] : counts) {
    const double p = pattern_probability(pattern, measure);
    diff += std::abs(static_cast<double>(c) / static_cast<double>(report.observations) - p);
    covered += p;
  }
  report.tv = 0.5 * (diff + std::max(0.0, 1.0 - covered));
  return report;
}

}  // namespace fixmag
