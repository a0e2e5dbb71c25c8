#include "plume/environment.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

#include <json.hpp>

namespace plume {

namespace {

// Breadth-first sweep over surviving links from `start`; returns the number
// of reached nodes and optionally stops as soon as a rim node is seen.
int bfs_component(const Environment& env, int start, bool stop_at_boundary,
                  std::vector<std::uint8_t>& seen) {
  const Lattice& g = *env.grid;
  seen.assign(g.node_count(), 0);
  std::vector<int> frontier{start};
  seen[start] = 1;
  int reached = 1;
  if (stop_at_boundary && g.boundary(start)) return reached;
  while (!frontier.empty()) {
    const int u = frontier.back();
    frontier.pop_back();
    for (int d = 0; d < 4; ++d) {
      const int link = g.incident_link(u, static_cast<Dir>(d));
      if (link < 0 || !env.passable(link)) continue;
      const int v = g.neighbor(u, static_cast<Dir>(d));
      if (seen[v]) continue;
      seen[v] = 1;
      ++reached;
      if (stop_at_boundary && g.boundary(v)) return reached;
      frontier.push_back(v);
    }
  }
  return stop_at_boundary ? -reached : reached;
}

}  // namespace

std::vector<int> Environment::removed_link_ids() const {
  std::vector<int> ids;
  for (int i = 0; i < static_cast<int>(status.size()); ++i) {
    if (!status[i]) ids.push_back(i);
  }
  return ids;
}

Environment complete_environment(LatticePtr grid) {
  Environment env;
  env.status.assign(grid->link_count(), 1);
  env.grid = std::move(grid);
  return env;
}

Environment environment_with_status(LatticePtr grid, std::vector<std::uint8_t> status) {
  if (static_cast<int>(status.size()) != grid->link_count()) {
    throw std::invalid_argument("status vector size does not match link count");
  }
  Environment env;
  env.grid = std::move(grid);
  env.status = std::move(status);
  return env;
}

bool fully_connected(const Environment& env) {
  std::vector<std::uint8_t> seen;
  return bfs_component(env, 0, false, seen) == env.grid->node_count();
}

Environment generate_environment(LatticePtr grid, double p, std::uint64_t seed,
                                 long max_attempts) {
  if (p < 0.0 || p >= 0.5) {
    throw std::invalid_argument("removal fraction must lie in [0, 0.5)");
  }
  const int L = grid->link_count();
  const int remove = static_cast<int>(std::llround(p * L));

  Environment env;
  env.grid = grid;
  env.removal_fraction = p;
  env.seed = seed;
  env.status.assign(L, 1);
  if (remove == 0) return env;

  Engine rng = make_engine(seed);
  std::vector<int> ids(L);
  std::vector<std::uint8_t> seen;
  for (long attempt = 0; attempt < max_attempts; ++attempt) {
    for (int i = 0; i < L; ++i) ids[i] = i;
    // partial Fisher-Yates: the first `remove` slots are a uniform subset
    for (int i = 0; i < remove; ++i) {
      std::uniform_int_distribution<int> pick(i, L - 1);
      std::swap(ids[i], ids[pick(rng)]);
    }
    env.status.assign(L, 1);
    for (int i = 0; i < remove; ++i) env.status[ids[i]] = 0;
    if (bfs_component(env, 0, false, seen) == grid->node_count()) return env;
  }
  throw std::runtime_error(
      "no connected environment found; removal fraction too close to the percolation "
      "threshold for this radius");
}

std::optional<int> shortest_path_length(const Environment& env, Coord a, Coord b) {
  const Lattice& g = *env.grid;
  const int sa = g.node_index(a);
  const int sb = g.node_index(b);
  if (sa < 0 || sb < 0) throw std::invalid_argument("node outside the domain");
  if (sa == sb) return 0;
  std::vector<int> dist(g.node_count(), -1);
  std::queue<int> queue;
  dist[sa] = 0;
  queue.push(sa);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop();
    for (int d = 0; d < 4; ++d) {
      const int link = g.incident_link(u, static_cast<Dir>(d));
      if (link < 0 || !env.passable(link)) continue;
      const int v = g.neighbor(u, static_cast<Dir>(d));
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      if (v == sb) return dist[v];
      queue.push(v);
    }
  }
  return std::nullopt;
}

int evolve_map(Environment& env, double stay_prob, Engine& rng) {
  if (stay_prob <= 0.5 || stay_prob > 1.0) {
    throw std::invalid_argument("stay probability must lie in (0.5, 1]");
  }
  if (stay_prob == 1.0) return 0;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int flips = 0;
  for (auto& s : env.status) {
    if (uni(rng) < 1.0 - stay_prob) {
      s ^= 1;
      ++flips;
    }
  }
  return flips;
}

bool reaches_boundary(const Environment& env, int node) {
  std::vector<std::uint8_t> seen;
  return bfs_component(env, node, true, seen) > 0;
}

std::string environment_to_json(const Environment& env) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["radius"] = env.grid->radius();
  j["removal_fraction"] = env.removal_fraction;
  j["seed"] = env.seed;
  j["removed_link_ids"] = env.removed_link_ids();
  return j.dump(2) + "\n";
}

Environment environment_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  auto grid = std::make_shared<Lattice>(j.at("radius").get<int>());
  Environment env;
  env.status.assign(grid->link_count(), 1);
  for (const int id : j.at("removed_link_ids")) {
    if (id < 0 || id >= grid->link_count()) {
      throw std::invalid_argument("removed link id out of range");
    }
    env.status[id] = 0;
  }
  env.grid = std::move(grid);
  env.removal_fraction = j.value("removal_fraction", 0.0);
  env.seed = j.value("seed", std::uint64_t{0});
  return env;
}

}  // namespace plume
