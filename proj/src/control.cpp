#include "plume/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace plume {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-particle pieces of log I(n) and log J(n) that do not depend on n.
struct ParticleTerms {
  double eta;
  double logw;
  double lc;    // ln c
  double t1;    // ln(c + 1/theta)
  double t2;    // ln(c/2 + 1/theta)
  double base;  // -lgamma(eta) - eta * ln(theta)
};

void build_terms(const ParticleSet& set, const std::vector<double>& c_of_particle,
                 std::vector<ParticleTerms>& terms) {
  const int n = static_cast<int>(set.particles.size());
  if (static_cast<int>(c_of_particle.size()) != n) {
    throw std::invalid_argument("need one c per particle");
  }
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) wsum += set.weights[i];
  if (!(wsum > 0.0)) throw std::invalid_argument("weights must have positive mass");
  const double log_wsum = std::log(wsum);
  terms.resize(n);
  for (int i = 0; i < n; ++i) {
    const Particle& p = set.particles[i];
    const double c = c_of_particle[i];
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    ParticleTerms& t = terms[i];
    t.eta = p.eta;
    t.logw = std::log(set.weights[i]) - log_wsum;  // reward is scale-free in the weights
    t.lc = std::log(c);
    t.t1 = std::log(c + 1.0 / p.theta);
    t.t2 = std::log(0.5 * c + 1.0 / p.theta);
    t.base = -std::lgamma(p.eta) - p.eta * std::log(p.theta);
  }
}

double reward_from_terms(const std::vector<ParticleTerms>& terms, long n) {
  const double nd = static_cast<double>(n);
  const double lg_n1 = std::lgamma(nd + 1.0);
  const int count = static_cast<int>(terms.size());
  std::vector<double> li(count), lj(count);
  double peak_i = kNegInf, peak_j = kNegInf;
  for (int i = 0; i < count; ++i) {
    const ParticleTerms& t = terms[i];
    const double log_i = nd * t.lc + std::lgamma(nd + t.eta) - lg_n1 - (nd + t.eta) * t.t1 + t.base;
    const double log_j = 0.5 * nd * t.lc - 0.5 * lg_n1 + std::lgamma(t.eta + 0.5 * nd) -
                         (t.eta + 0.5 * nd) * t.t2 + t.base;
    li[i] = t.logw + log_i;
    lj[i] = t.logw + log_j;
    peak_i = std::max(peak_i, li[i]);
    peak_j = std::max(peak_j, lj[i]);
  }
  if (!std::isfinite(peak_i) || !std::isfinite(peak_j)) return 0.0;  // vanished mixture
  double sum_i = 0.0, sum_j = 0.0;
  for (int i = 0; i < count; ++i) {
    sum_i += std::exp(li[i] - peak_i);
    sum_j += std::exp(lj[i] - peak_j);
  }
  const double lse_i = peak_i + std::log(sum_i);
  const double lse_j = peak_j + std::log(sum_j);
  return std::max(0.0, -2.0 * (lse_j - 0.5 * lse_i));
}

// c at each particle's position displaced deterministically by u.
void control_c(const ParticleSet& set, Move u, const DomainGeom& dom,
               std::vector<double>& c_out) {
  const Lattice& g = *set.grid;
  const int n = static_cast<int>(set.particles.size());
  c_out.resize(n);
  for (int i = 0; i < n; ++i) {
    const Particle& p = set.particles[i];
    int node = p.pos;
    if (u != Move::Stay) {
      const int nb = g.neighbor(node, move_dir(u));
      if (nb >= 0) node = nb;
    }
    const Coord at = g.node(node);
    c_out[i] = c_constant(at.x, at.y, {p.src_x, p.src_y, 0.0}, dom);
  }
}

}  // namespace

void VisitHistory::push(int node) {
  if (static_cast<int>(nodes_.size()) == kHistoryWindow) nodes_.erase(nodes_.begin());
  nodes_.push_back(node);
}

int VisitHistory::count(int node) const {
  return static_cast<int>(std::count(nodes_.begin(), nodes_.end(), node));
}

std::vector<Move> admissible_controls(const Lattice& grid, int node) {
  std::vector<Move> moves{Move::Stay};
  for (int m = 1; m < kMoveCount; ++m) {
    const Move u = static_cast<Move>(m);
    if (grid.neighbor(node, move_dir(u)) >= 0) moves.push_back(u);
  }
  return moves;
}

long ideal_future_count(double rate, double c) {
  if (rate < 0.0 || !(c > 0.0)) throw std::invalid_argument("rate >= 0 and c > 0 required");
  return std::llround(rate * c);
}

double reward_sample(const ParticleSet& set, const std::vector<double>& c_of_particle, long n) {
  if (n < 0) throw std::invalid_argument("count must be nonnegative");
  std::vector<ParticleTerms> terms;
  build_terms(set, c_of_particle, terms);
  return reward_from_terms(terms, n);
}

double reward_sample(const ParticleSet& set, Move u, const DomainGeom& dom, long n) {
  std::vector<double> c;
  control_c(set, u, dom, c);
  return reward_sample(set, c, n);
}

double expected_reward(const ParticleSet& set, Move u, const DomainGeom& dom, int m_samples,
                       bool sample_rate, Engine& rng) {
  if (m_samples < 1) throw std::invalid_argument("need at least one sample");
  std::vector<double> c;
  control_c(set, u, dom, c);
  std::vector<ParticleTerms> terms;
  build_terms(set, c, terms);

  std::uniform_int_distribution<int> pick(0, static_cast<int>(set.particles.size()) - 1);
  std::unordered_map<long, double> by_count;  // the reward depends on n alone
  double sum = 0.0;
  for (int j = 0; j < m_samples; ++j) {
    const int i = pick(rng);
    const Particle& p = set.particles[i];
    double rate = p.eta * p.theta;
    if (sample_rate) {
      std::gamma_distribution<double> gamma(p.eta, p.theta);
      rate = gamma(rng);
    }
    const long n = ideal_future_count(rate, c[i]);
    const auto it = by_count.find(n);
    const double d = it != by_count.end() ? it->second
                                          : by_count.emplace(n, reward_from_terms(terms, n)).first->second;
    sum += d;
  }
  return sum / m_samples;
}

ControlDecision select_control(const ParticleSet& set, const VisitHistory& history,
                               int believed_node, const DomainGeom& dom, int m_samples,
                               bool sample_rate, Engine& rng) {
  ControlDecision decision;
  decision.expected.fill(kNaN);
  const std::vector<Move> adm = admissible_controls(*set.grid, believed_node);

  if (history.triggers(believed_node)) {
    decision.heuristic = true;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(adm.size()) - 1);
    decision.chosen = adm[pick(rng)];
    return decision;
  }

  double best = kNegInf;
  for (Move u : adm) {
    const double r = expected_reward(set, u, dom, m_samples, sample_rate, rng);
    decision.expected[static_cast<int>(u)] = r;
    best = std::max(best, r);
  }
  std::vector<Move> top;
  for (Move u : adm) {
    if (decision.expected[static_cast<int>(u)] == best) top.push_back(u);
  }
  if (top.size() == 1) {
    decision.chosen = top.front();
  } else {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(top.size()) - 1);
    decision.chosen = top[pick(rng)];
  }
  return decision;
}

}  // namespace plume
