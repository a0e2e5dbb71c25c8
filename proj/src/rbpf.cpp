#include "plume/rbpf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace plume {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kJitterTries = 100;

}  // namespace

ParticleSet init_particles(LatticePtr grid, int count, int start_node, double q0, double eta0,
                           double theta0, double radius, Engine& rng) {
  if (!grid) throw std::invalid_argument("grid must be set");
  if (count < 1) throw std::invalid_argument("particle count must be >= 1");
  if (start_node < 0 || start_node >= grid->node_count()) {
    throw std::invalid_argument("start node outside the grid");
  }
  if (q0 < 0.0 || q0 > 1.0) throw std::invalid_argument("q0 must be in [0, 1]");
  if (!(eta0 > 0.0) || !(theta0 > 0.0)) throw std::invalid_argument("eta0, theta0 must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");

  ParticleSet set;
  set.grid = std::move(grid);
  set.particles.resize(count);
  set.weights.assign(count, 1.0 / count);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int links = set.grid->link_count();
  for (Particle& p : set.particles) {
    const double r = radius * std::sqrt(unit(rng));
    const double a = 2.0 * std::numbers::pi * unit(rng);
    p.pos = start_node;
    p.src_x = r * std::cos(a);
    p.src_y = r * std::sin(a);
    p.eta = eta0;
    p.theta = theta0;
    p.q.assign(links, q0);
  }
  return set;
}

int predict_searcher(const Lattice& grid, int pos, Move commanded, double p_e, Engine& rng) {
  const Move realised = sample_realised_move(commanded, p_e, geometry_moves(grid, pos), rng);
  if (realised == Move::Stay) return pos;
  const int next = grid.neighbor(pos, move_dir(realised));
  return next < 0 ? pos : next;
}

void predict_map_probs(std::vector<double>& q, double stay_prob) {
  if (stay_prob == 1.0) return;
  for (double& v : q) v = (1.0 - stay_prob) * (1.0 - v) + stay_prob * v;
}

int resolve_slot(const Lattice& grid, int node, Dir dir, Tier tier) {
  return tier == Tier::Primary ? grid.incident_link(node, dir) : grid.secondary_link(node, dir);
}

double update_link_prob(double q_pred, int z, const DetectionMatrix& m) {
  const double num = z == 1 ? m.p_d * q_pred : (1.0 - m.p_d) * q_pred;
  const double den =
      num + (z == 1 ? m.p_fa * (1.0 - q_pred) : (1.0 - m.p_fa) * (1.0 - q_pred));
  if (den <= 0.0) return q_pred;
  return num / den;
}

double obs_log_factor(double q_pred, int z, const DetectionMatrix& m) {
  const double f = z == 1 ? m.p_d * q_pred + m.p_fa * (1.0 - q_pred)
                          : (1.0 - m.p_d) * q_pred + (1.0 - m.p_fa) * (1.0 - q_pred);
  return f > 0.0 ? std::log(f) : kNegInf;
}

bool rbpf_step(ParticleSet& set, RbpfScratch& scratch, Move commanded, long count,
               const std::vector<LinkObservation>& obs, const FilterParams& params, Engine& rng) {
  const Lattice& g = *set.grid;
  const int n = static_cast<int>(set.particles.size());
  scratch.logw.resize(n);

  for (int i = 0; i < n; ++i) {
    Particle& p = set.particles[i];
    p.pos = predict_searcher(g, p.pos, commanded, params.p_e, rng);
    predict_map_probs(p.q, params.stay_prob);

    const Coord at = g.node(p.pos);
    const SourceParams hyp{p.src_x, p.src_y, 0.0};
    const double c = c_constant(at.x, at.y, hyp, params.dom);

    // weight uses the pre-update rate statistics and predicted link probs
    double lw = std::log(set.weights[i]) + log_count_likelihood_I(p.eta, p.theta, c, count);
    for (const LinkObservation& o : obs) {
      const int link = resolve_slot(g, p.pos, o.dir, o.tier);
      if (link < 0) continue;
      const DetectionMatrix& m = o.tier == Tier::Primary ? params.primary : params.secondary;
      lw += obs_log_factor(p.q[link], o.z, m);
      p.q[link] = update_link_prob(p.q[link], o.z, m);
    }
    scratch.logw[i] = lw;

    const GammaParams post = update_gamma({p.eta, p.theta}, count, c);
    p.eta = post.eta;
    p.theta = post.theta;
  }

  const double peak = *std::max_element(scratch.logw.begin(), scratch.logw.end());
  if (!std::isfinite(peak)) return false;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    set.weights[i] = std::exp(scratch.logw[i] - peak);
    total += set.weights[i];
  }
  for (double& w : set.weights) w /= total;

  bool resample = true;
  if (params.ess_frac > 0.0) {
    double sumsq = 0.0;
    for (double w : set.weights) sumsq += w * w;
    resample = 1.0 / sumsq < params.ess_frac * n;
  }
  if (resample) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    scratch.ancestors = systematic_resample(set.weights, n, unit(rng));
    scratch.buffer.resize(n);
    for (int i = 0; i < n; ++i) scratch.buffer[i] = set.particles[scratch.ancestors[i]];
    set.particles.swap(scratch.buffer);
    std::fill(set.weights.begin(), set.weights.end(), 1.0 / n);
    regularise_sources(set, params.dom.radius, params.bandwidth_floor, rng);
  }
  return true;
}

std::vector<int> systematic_resample(const std::vector<double>& weights, int count, double u0) {
  if (weights.empty() || count < 1) throw std::invalid_argument("nothing to resample");
  if (u0 < 0.0 || u0 >= 1.0) throw std::invalid_argument("offset must be in [0, 1)");
  std::vector<int> ancestors(count);
  const int last = static_cast<int>(weights.size()) - 1;
  double cum = weights[0];
  int j = 0;
  for (int i = 0; i < count; ++i) {
    const double target = (i + u0) / count;
    while (cum < target && j < last) cum += weights[++j];
    ancestors[i] = j;
  }
  return ancestors;
}

void regularise_sources(ParticleSet& set, double radius, double bandwidth_floor, Engine& rng) {
  const int n = static_cast<int>(set.particles.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += set.weights[i] * set.particles[i].src_x;
    my += set.weights[i] * set.particles[i].src_y;
  }
  double vx = 0.0, vy = 0.0;
  for (int i = 0; i < n; ++i) {
    vx += set.weights[i] * (set.particles[i].src_x - mx) * (set.particles[i].src_x - mx);
    vy += set.weights[i] * (set.particles[i].src_y - my) * (set.particles[i].src_y - my);
  }
  const double scale = std::pow(static_cast<double>(n), -1.0 / 6.0);
  const double hx = std::max(bandwidth_floor, std::sqrt(vx) * scale);
  const double hy = std::max(bandwidth_floor, std::sqrt(vy) * scale);
  const double r2 = radius * radius;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Particle& p : set.particles) {
    for (int t = 0; t < kJitterTries; ++t) {
      const double nx = p.src_x + hx * gauss(rng);
      const double ny = p.src_y + hy * gauss(rng);
      if (nx * nx + ny * ny < r2) {
        p.src_x = nx;
        p.src_y = ny;
        break;
      }
    }
  }
}

int searcher_map_node(const ParticleSet& set) {
  std::vector<double> mass(set.grid->node_count(), 0.0);
  for (std::size_t i = 0; i < set.particles.size(); ++i) {
    mass[set.particles[i].pos] += set.weights[i];
  }
  int best = 0;
  for (int v = 1; v < static_cast<int>(mass.size()); ++v) {
    if (mass[v] > mass[best]) best = v;
  }
  return best;
}

PosteriorSummary posterior_summary(const ParticleSet& set) {
  if (set.particles.empty()) throw std::invalid_argument("empty particle set");
  PosteriorSummary s;
  s.searcher_map_node = searcher_map_node(set);
  const int n = static_cast<int>(set.particles.size());
  for (int i = 0; i < n; ++i) {
    const Particle& p = set.particles[i];
    const double w = set.weights[i];
    s.source_mean_x += w * p.src_x;
    s.source_mean_y += w * p.src_y;
    s.rate_mean += w * p.eta * p.theta;
  }
  for (int i = 0; i < n; ++i) {
    const Particle& p = set.particles[i];
    const double w = set.weights[i];
    const double dx = p.src_x - s.source_mean_x;
    const double dy = p.src_y - s.source_mean_y;
    s.source_cov_xx += w * dx * dx;
    s.source_cov_xy += w * dx * dy;
    s.source_cov_yy += w * dy * dy;
  }
  s.mean_q.assign(set.grid->link_count(), 0.0);
  for (int i = 0; i < n; ++i) {
    const Particle& p = set.particles[i];
    const double w = set.weights[i];
    for (std::size_t j = 0; j < p.q.size(); ++j) s.mean_q[j] += w * p.q[j];
  }
  return s;
}

}  // namespace plume
