#include "plume/sensors.hpp"

#include <stdexcept>

namespace plume {

Dir move_dir(Move m) {
  switch (m) {
    case Move::Up: return Dir::Up;
    case Move::Right: return Dir::East;
    case Move::Down: return Dir::Down;
    case Move::Left: return Dir::West;
    case Move::Stay: break;
  }
  throw std::invalid_argument("stay has no direction");
}

Move move_of_dir(Dir d) {
  switch (d) {
    case Dir::Up: return Move::Up;
    case Dir::East: return Move::Right;
    case Dir::Down: return Move::Down;
    case Dir::West: return Move::Left;
  }
  throw std::invalid_argument("unknown direction");
}

long sample_count(const ConcentrationField& field, int node, Engine& rng) {
  const double lambda = field.values.at(node);
  if (lambda <= 0.0) return 0;
  std::poisson_distribution<long> poisson(lambda);
  return poisson(rng);
}

std::vector<LinkObservation> observe_links(const Environment& env, int node,
                                           const DetectionMatrix& primary,
                                           const DetectionMatrix& secondary, Engine& rng) {
  for (const DetectionMatrix& m : {primary, secondary}) {
    if (!(m.p_fa >= 0.0 && m.p_fa < m.p_d && m.p_d <= 1.0)) {
      throw std::invalid_argument("detection matrix needs 0 <= p_fa < p_d <= 1");
    }
  }
  const Lattice& g = *env.grid;
  std::vector<LinkObservation> obs;
  obs.reserve(8);
  const auto sense = [&](int link, Dir d, Tier tier, const DetectionMatrix& m) {
    if (link < 0) return;
    const bool present = env.passable(link);
    std::bernoulli_distribution hit(present ? m.p_d : m.p_fa);
    obs.push_back({link, d, tier, hit(rng) ? 1 : 0});
  };
  for (int d = 0; d < 4; ++d) {
    sense(g.incident_link(node, static_cast<Dir>(d)), static_cast<Dir>(d), Tier::Primary, primary);
  }
  for (int d = 0; d < 4; ++d) {
    sense(g.secondary_link(node, static_cast<Dir>(d)), static_cast<Dir>(d), Tier::Secondary,
          secondary);
  }
  return obs;
}

MoveMask geometry_moves(const Lattice& grid, int node) {
  MoveMask mask = {true, false, false, false, false};
  for (int m = 1; m < kMoveCount; ++m) {
    mask[m] = grid.neighbor(node, move_dir(static_cast<Move>(m))) >= 0;
  }
  return mask;
}

Move sample_realised_move(Move commanded, double p_e, const MoveMask& admissible, Engine& rng) {
  if (p_e < 0.0 || p_e > 1.0) throw std::invalid_argument("control error rate must be in [0, 1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) >= p_e) return commanded;
  Move pool[kMoveCount];
  int size = 0;
  for (int m = 0; m < kMoveCount; ++m) {
    if (admissible[m] && static_cast<Move>(m) != commanded) pool[size++] = static_cast<Move>(m);
  }
  if (size == 0) return commanded;
  std::uniform_int_distribution<int> pick(0, size - 1);
  return pool[pick(rng)];
}

ControlOutcome execute_control(const Environment& env, int node, Move commanded, double p_e,
                               const MoveMask& admissible, Engine& rng) {
  const Move realised = sample_realised_move(commanded, p_e, admissible, rng);
  if (realised == Move::Stay) return {node, realised};
  const Lattice& g = *env.grid;
  const Dir d = move_dir(realised);
  const int link = g.incident_link(node, d);
  if (link < 0 || !env.passable(link)) return {node, realised};
  return {g.neighbor(node, d), realised};
}

ControlOutcome execute_control(const Environment& env, int node, Move commanded, double p_e,
                               Engine& rng) {
  return execute_control(env, node, commanded, p_e, geometry_moves(*env.grid, node), rng);
}

}  // namespace plume
