#pragma once

#include <array>
#include <vector>

#include "plume/analytic_field.hpp"
#include "plume/rbpf.hpp"
#include "plume/rng.hpp"
#include "plume/sensors.hpp"

namespace plume {

inline constexpr int kHistoryWindow = 10;
inline constexpr int kVisitLimit = 3;  // revisits beyond this trigger random moves

// Last few believed searcher nodes, for the anti-oscillation rule.
class VisitHistory {
 public:
  void push(int node);
  int count(int node) const;
  bool triggers(int node) const { return count(node) > kVisitLimit; }

 private:
  std::vector<int> nodes_;
};

// The five controls minus any whose deterministic displacement leaves the
// complete grid at `node`.
std::vector<Move> admissible_controls(const Lattice& grid, int node);

// Nearest-integer ideal count for a hypothesised rate and constant c; halves
// round away from zero.
long ideal_future_count(double rate, double c);

// Bhattacharyya-information reward of a hypothetical count n when the set
// evaluates c at per-particle positions c_of_particle; >= 0.
double reward_sample(const ParticleSet& set, const std::vector<double>& c_of_particle, long n);

// Same, with c derived from a control applied deterministically to every
// particle (off-grid displacements collapse to stay).
double reward_sample(const ParticleSet& set, Move u, const DomainGeom& dom, long n);

// Sample-mean reward of a control over m_samples hypothetical counts, each
// from a uniformly drawn particle. sample_rate: draw the rate from the
// particle's Gamma posterior instead of adopting its mean.
double expected_reward(const ParticleSet& set, Move u, const DomainGeom& dom, int m_samples,
                       bool sample_rate, Engine& rng);

struct ControlDecision {
  Move chosen = Move::Stay;
  bool heuristic = false;
  // expected reward per move; NaN where inadmissible or skipped
  std::array<double, kMoveCount> expected{};
};

// Argmax of expected reward over the admissible set — stay plus the
// complete-grid moves at the believed node; whether the unknown map blocks a
// move is left to the attempt. Exact ties break uniformly; a triggered visit
// heuristic picks uniformly from the same set instead.
ControlDecision select_control(const ParticleSet& set, const VisitHistory& history,
                               int believed_node, const DomainGeom& dom, int m_samples,
                               bool sample_rate, Engine& rng);

}  // namespace plume
