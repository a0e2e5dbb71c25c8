#pragma once

#include <vector>

#include "plume/analytic_field.hpp"
#include "plume/gamma_poisson.hpp"
#include "plume/lattice.hpp"
#include "plume/rng.hpp"
#include "plume/sensors.hpp"

namespace plume {

// One hypothesis: searcher node, continuous source position, Gamma sufficient
// statistics for the release rate, and per-link existence probabilities.
struct Particle {
  int pos = -1;
  double src_x = 0.0;
  double src_y = 0.0;
  double eta = 0.0;
  double theta = 0.0;
  std::vector<double> q;
};

struct ParticleSet {
  LatticePtr grid;
  std::vector<Particle> particles;
  std::vector<double> weights;  // normalised
};

// Reused buffers so stepping does not allocate.
struct RbpfScratch {
  std::vector<Particle> buffer;
  std::vector<double> logw;
  std::vector<int> ancestors;
};

struct FilterParams {
  double p_e = 0.04;
  double stay_prob = 0.999;  // assumed per-step link persistence
  DetectionMatrix primary{1.0, 0.0};
  DetectionMatrix secondary{0.8, 0.1};
  DomainGeom dom{9.0};
  double ess_frac = 0.0;  // 0: resample every step; else resample when ESS < frac * N
  double bandwidth_floor = 0.01;
};

// All particles share the known start node; source positions are uniform over
// the open disk of the given radius.
ParticleSet init_particles(LatticePtr grid, int count, int start_node, double q0, double eta0,
                           double theta0, double radius, Engine& rng);

// Motion proposal: the filter cannot consult the true map, so moves traverse
// the complete grid freely and collapse to stay only at the geometric rim.
// Control errors redistribute over the geometry moves at the particle's own
// node, mirroring the searcher's motion mixture.
int predict_searcher(const Lattice& grid, int pos, Move commanded, double p_e, Engine& rng);

// q_pred = (1 - s) * (1 - q) + s * q, elementwise in place.
void predict_map_probs(std::vector<double>& q, double stay_prob);

// Link a particle at `node` would be reading through a (dir, tier) sensor
// slot; -1 when the slot is geometrically absent there.
int resolve_slot(const Lattice& grid, int node, Dir dir, Tier tier);

// Posterior link probability given one binary reading; a degenerate
// denominator (impossible reading under a point-mass prior) keeps q_pred.
double update_link_prob(double q_pred, int z, const DetectionMatrix& m);

// log P(z | q_pred) marginalised over the link state.
double obs_log_factor(double q_pred, int z, const DetectionMatrix& m);

// One full filter update for a commanded move, observed count, and link
// readings. Returns false when every weight vanishes (filter divergence);
// the set is left unnormalised in that case and the run should abort.
bool rbpf_step(ParticleSet& set, RbpfScratch& scratch, Move commanded, long count,
               const std::vector<LinkObservation>& obs, const FilterParams& params, Engine& rng);

// Ancestor indices for the positions (i + u0) / count on the weight CDF.
std::vector<int> systematic_resample(const std::vector<double>& weights, int count, double u0);

// Gaussian jitter of source positions, per-coordinate Silverman bandwidth
// (floored), redrawn to stay strictly inside the disk.
void regularise_sources(ParticleSet& set, double radius, double bandwidth_floor, Engine& rng);

// Modal searcher node by posterior mass; ties go to the lowest node id.
int searcher_map_node(const ParticleSet& set);

struct PosteriorSummary {
  int searcher_map_node = -1;
  double source_mean_x = 0.0;
  double source_mean_y = 0.0;
  double source_cov_xx = 0.0;
  double source_cov_xy = 0.0;
  double source_cov_yy = 0.0;
  double rate_mean = 0.0;  // posterior mean of eta * theta
  std::vector<double> mean_q;
};

PosteriorSummary posterior_summary(const ParticleSet& set);

}  // namespace plume
