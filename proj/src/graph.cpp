#include "fixmag/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "fixmag/error.hpp"

namespace fixmag {

Pairing::Pairing(int n, int d, std::vector<int> mate) : n_(n), d_(d), mate_(std::move(mate)) {
  if (n < 0 || d < 0) throw InvalidParameter("n and d must be non-negative");
  if (static_cast<long>(mate_.size()) != static_cast<long>(n) * d) {
    throw InvalidParameter("mate vector must have d * n entries");
  }
  const int m = clones();
  for (int c = 0; c < m; ++c) {
    const int t = mate_[c];
    if (t < 0 || t >= m || t == c || mate_[t] != c) {
      throw InvalidParameter("mate is not a fixed-point-free involution at clone " + std::to_string(c));
    }
  }
}

Pairing Pairing::from_vertex_edges(int n, int d, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> next(n, 0);
  std::vector<int> mate(static_cast<std::size_t>(n) * d, -1);
  auto take = [&](int v) {
    if (v < 0 || v >= n || next[v] >= d) throw InvalidParameter("edge list exceeds degree at vertex " + std::to_string(v));
    return v * d + next[v]++;
  };
  for (const auto& [u, v] : edges) {
    const int a = take(u);
    const int b = take(v);
    mate[a] = b;
    mate[b] = a;
  }
  for (int v = 0; v < n; ++v) {
    if (next[v] != d) throw InvalidParameter("vertex " + std::to_string(v) + " has degree below d");
  }
  return Pairing(n, d, std::move(mate));
}

std::vector<std::pair<int, int>> Pairing::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(mate_.size() / 2);
  for (int c = 0; c < clones(); ++c) {
    if (c < mate_[c]) out.emplace_back(c, mate_[c]);
  }
  return out;
}

Pairing sample_uniform_pairing(int n, int d, Philox& rng) {
  if (n < 0 || d < 0) throw InvalidParameter("n and d must be non-negative");
  if ((static_cast<long>(n) * d) % 2 != 0) throw InvalidParameter("d * n must be even");
  const int m = n * d;
  // `pool` holds the unmatched clones with swap-removal; `cursor` tracks the lowest one.
  std::vector<int> mate(m, -1);
  std::vector<int> pool(m);
  std::vector<int> pos(m);
  for (int c = 0; c < m; ++c) pool[c] = pos[c] = c;
  auto remove = [&](int c) {
    const int last = pool.back();
    pool[pos[c]] = last;
    pos[last] = pos[c];
    pool.pop_back();
  };
  int cursor = 0;
  while (!pool.empty()) {
    while (mate[cursor] >= 0) ++cursor;
    const int a = cursor;
    remove(a);
    const int b = pool[rng.below(pool.size())];
    remove(b);
    mate[a] = b;
    mate[b] = a;
  }
  return Pairing(n, d, std::move(mate));
}

void write_pairing(std::ostream& out, const Pairing& pairing) {
  out << pairing.n() << ' ' << pairing.d() << '\n';
  for (const auto& [a, b] : pairing.edges()) out << a << ' ' << b << '\n';
}

Pairing read_pairing(std::istream& in) {
  int n = 0, d = 0;
  if (!(in >> n >> d)) throw InvalidInput("pairing header `n d` missing");
  if (n < 0 || d < 0) throw InvalidInput("negative pairing header");
  std::vector<int> mate(static_cast<std::size_t>(n) * d, -1);
  for (std::size_t e = 0; e < mate.size() / 2; ++e) {
    int a = 0, b = 0;
    if (!(in >> a >> b)) throw InvalidInput("pairing truncated");
    if (a < 0 || b < 0 || a >= n * d || b >= n * d) throw InvalidInput("clone index out of range");
    mate[a] = b;
    mate[b] = a;
  }
  try {
    return Pairing(n, d, std::move(mate));
  } catch (const InvalidParameter& e) {
    throw InvalidInput(e.what());
  }
}

Switch Switch::inverse() const {
  if (mode == Mode::Cross) return {c1, c4, c3, c2, Mode::Cross};
  return {c1, c3, c2, c4, Mode::Parallel};
}

Pairing apply_switch(const Pairing& pairing, const Switch& sw) {
  const int m = pairing.clones();
  for (int c : {sw.c1, sw.c2, sw.c3, sw.c4}) {
    if (c < 0 || c >= m) throw InvalidSwitch("clone index out of range");
  }
  if (sw.c1 == sw.c2 || sw.c1 == sw.c3 || sw.c1 == sw.c4 || sw.c2 == sw.c3 || sw.c2 == sw.c4 || sw.c3 == sw.c4) {
    throw InvalidSwitch("switch clones must be distinct");
  }
  if (pairing.mate(sw.c1) != sw.c2 || pairing.mate(sw.c3) != sw.c4) {
    throw InvalidSwitch("switched edges are not present in the pairing");
  }
  std::vector<int> mate = pairing.mates();
  auto link = [&](int a, int b) {
    mate[a] = b;
    mate[b] = a;
  };
  if (sw.mode == Switch::Mode::Cross) {
    link(sw.c1, sw.c4);
    link(sw.c2, sw.c3);
  } else {
    link(sw.c1, sw.c3);
    link(sw.c2, sw.c4);
  }
  return Pairing(pairing.n(), pairing.d(), std::move(mate));
}

long count_mono(const Pairing& pairing, const std::vector<std::int8_t>& spins) {
  if (static_cast<int>(spins.size()) != pairing.n()) throw InvalidInput("config size does not match pairing");
  long h = 0;
  for (int c = 0; c < pairing.clones(); ++c) {
    const int t = pairing.mate(c);
    if (c < t && spins[pairing.vertex(c)] == spins[pairing.vertex(t)]) ++h;
  }
  return h;
}

int switch_delta(const Pairing& pairing, const std::vector<std::int8_t>& spins, const Switch& sw) {
  auto mono = [&](int a, int b) { return spins[pairing.vertex(a)] == spins[pairing.vertex(b)] ? 1 : 0; };
  const int before = mono(sw.c1, sw.c2) + mono(sw.c3, sw.c4);
  const int after = sw.mode == Switch::Mode::Cross ? mono(sw.c1, sw.c4) + mono(sw.c2, sw.c3)
                                                   : mono(sw.c1, sw.c3) + mono(sw.c2, sw.c4);
  return after - before;
}

SpinConfig::SpinConfig(const Pairing& pairing, std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
  for (auto s : spins_) {
    if (s != 1 && s != -1) throw InvalidInput("spins must be +1 or -1");
  }
  k_plus_ = static_cast<int>(std::count(spins_.begin(), spins_.end(), std::int8_t{1}));
  H_ = count_mono(pairing, spins_);
}

SpinConfig SpinConfig::uniform(const Pairing& pairing, int spin) {
  return SpinConfig(pairing, std::vector<std::int8_t>(pairing.n(), static_cast<std::int8_t>(spin > 0 ? 1 : -1)));
}

SpinConfig SpinConfig::random_with_k(const Pairing& pairing, int k_plus, Philox& rng) {
  const int n = pairing.n();
  if (k_plus < 0 || k_plus > n) throw InvalidParameter("k_plus must lie in [0, n]");
  std::vector<std::int8_t> spins(n, -1);
  std::fill(spins.begin(), spins.begin() + k_plus, std::int8_t{1});
  shuffle(spins.begin(), spins.end(), rng);
  return SpinConfig(pairing, std::move(spins));
}

int SpinConfig::flip_delta(const Pairing& pairing, int v) const {
  const int d = pairing.d();
  const int s = spins_[v];
  int delta = 0;
  for (int c = v * d; c < (v + 1) * d; ++c) {
    const int w = pairing.vertex(pairing.mate(c));
    if (w == v) continue;
    delta += spins_[w] == s ? -1 : 1;
  }
  return delta;
}

void SpinConfig::flip(const Pairing& pairing, int v) {
  H_ += flip_delta(pairing, v);
  k_plus_ += spins_[v] > 0 ? -1 : 1;
  spins_[v] = static_cast<std::int8_t>(-spins_[v]);
}

int SpinConfig::swap_delta(const Pairing& pairing, int u, int v) const {
  if (spins_[u] == spins_[v]) return 0;
  const int d = pairing.d();
  int between = 0;
  for (int c = u * d; c < (u + 1) * d; ++c) {
    if (pairing.vertex(pairing.mate(c)) == v) ++between;
  }
  // Edges between u and v stay bichromatic; each was counted +1 in both single flips.
  return flip_delta(pairing, u) + flip_delta(pairing, v) - 2 * between;
}

void SpinConfig::swap(const Pairing& pairing, int u, int v) {
  if (spins_[u] == spins_[v]) return;
  H_ += swap_delta(pairing, u, v);
  std::swap(spins_[u], spins_[v]);
}

void SpinConfig::rebind(const Pairing& pairing) { H_ = count_mono(pairing, spins_); }

SpinConfig SpinConfig::negated(const Pairing& pairing) const {
  std::vector<std::int8_t> s(spins_);
  for (auto& x : s) x = static_cast<std::int8_t>(-x);
  return SpinConfig(pairing, std::move(s));
}

std::size_t Ball::boundary_size() const {
  return static_cast<std::size_t>(std::count(depth.begin(), depth.end(), radius));
}

Ball neighborhood(const Pairing& pairing, int v, int r) {
  if (r < 0) throw InvalidParameter("radius must be non-negative");
  if (v < 0 || v >= pairing.n()) throw InvalidParameter("vertex out of range");
  const int d = pairing.d();
  Ball ball;
  ball.root = v;
  ball.radius = r;
  std::vector<int> index(pairing.n(), -1);
  ball.vertices.push_back(v);
  ball.depth.push_back(0);
  ball.parent.push_back(-1);
  ball.children.emplace_back();
  index[v] = 0;
  long clone_ends = 0;
  for (std::size_t i = 0; i < ball.vertices.size(); ++i) {
    if (ball.depth[i] >= r) continue;
    const int u = ball.vertices[i];
    for (int c = u * d; c < (u + 1) * d; ++c) {
      const int w = pairing.vertex(pairing.mate(c));
      if (index[w] < 0) {
        index[w] = static_cast<int>(ball.vertices.size());
        ball.vertices.push_back(w);
        ball.depth.push_back(ball.depth[i] + 1);
        ball.parent.push_back(static_cast<int>(i));
        ball.children.emplace_back();
        ball.children[i].push_back(index[w]);
      }
      // An edge between two inner vertices (or a loop) is seen from both of its clones.
      clone_ends += ball.depth[index[w]] < r ? 1 : 2;
    }
  }
  ball.edges = clone_ends / 2;
  ball.is_tree = ball.edges == static_cast<long>(ball.vertices.size()) - 1;
  return ball;
}

}  // namespace fixmag
