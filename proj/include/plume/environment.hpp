#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plume/lattice.hpp"
#include "plume/rng.hpp"

namespace plume {

using LatticePtr = std::shared_ptr<const Lattice>;

// A concrete obstructed map over a shared lattice: per-link status,
// 1 = passable, 0 = missing.
struct Environment {
  LatticePtr grid;
  std::vector<std::uint8_t> status;
  double removal_fraction = 0.0;
  std::uint64_t seed = 0;

  bool passable(int link_id) const { return status[link_id] != 0; }
  std::vector<int> removed_link_ids() const;
};

Environment complete_environment(LatticePtr grid);
Environment environment_with_status(LatticePtr grid, std::vector<std::uint8_t> status);

// Removes round(p * L) links chosen uniformly at random, rejection-sampled
// until all nodes stay mutually reachable. Acceptance drops sharply as p
// approaches the percolation threshold 1/2, hence the large attempt budget.
// Throws std::runtime_error when no connected draw appears in max_attempts.
Environment generate_environment(LatticePtr grid, double p, std::uint64_t seed,
                                 long max_attempts = 3'000'000);

bool fully_connected(const Environment& env);

// Steps of the shortest path over surviving links; nullopt when unreachable.
std::optional<int> shortest_path_length(const Environment& env, Coord a, Coord b);

// One step of the slow map dynamics: every link flips status independently
// with probability 1 - stay_prob. Returns the number of flipped links.
int evolve_map(Environment& env, double stay_prob, Engine& rng);

// True when `node` can reach some rim node over surviving links.
bool reaches_boundary(const Environment& env, int node);

std::string environment_to_json(const Environment& env);
Environment environment_from_json(const std::string& text);

}  // namespace plume
