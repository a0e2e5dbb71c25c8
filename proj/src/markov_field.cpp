#include "plume/markov_field.hpp"

#include <sstream>
#include <stdexcept>

namespace plume {

CanonicalChain build_canonical_chain(const Environment& env) {
  const Lattice& g = *env.grid;
  const int n = g.node_count();

  // transient = interior and connected to the rim over surviving links
  std::vector<std::uint8_t> boundary_reachable(n, 0);
  std::vector<int> frontier;
  for (int i = 0; i < n; ++i) {
    if (g.boundary(i)) {
      boundary_reachable[i] = 1;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const int u = frontier.back();
    frontier.pop_back();
    for (int d = 0; d < 4; ++d) {
      const int link = g.incident_link(u, static_cast<Dir>(d));
      if (link < 0 || !env.passable(link)) continue;
      const int v = g.neighbor(u, static_cast<Dir>(d));
      if (!boundary_reachable[v]) {
        boundary_reachable[v] = 1;
        frontier.push_back(v);
      }
    }
  }

  CanonicalChain chain;
  chain.state_of_node.assign(n, -1);
  std::vector<int> transient_nodes;
  for (int i = 0; i < n; ++i) {
    if (g.interior(i) && boundary_reachable[i]) {
      transient_nodes.push_back(i);
    } else {
      chain.state_of_node[i] = chain.absorbing_count;
      chain.node_of_state.push_back(i);
      ++chain.absorbing_count;
    }
  }
  chain.transient_count = static_cast<int>(transient_nodes.size());
  for (int t = 0; t < chain.transient_count; ++t) {
    chain.state_of_node[transient_nodes[t]] = chain.absorbing_count + t;
    chain.node_of_state.push_back(transient_nodes[t]);
  }

  chain.Q = Eigen::MatrixXd::Zero(chain.transient_count, chain.transient_count);
  chain.R = Eigen::MatrixXd::Zero(chain.transient_count, chain.absorbing_count);
  for (int t = 0; t < chain.transient_count; ++t) {
    const int u = transient_nodes[t];
    int degree = 0;
    for (int d = 0; d < 4; ++d) {
      const int link = g.incident_link(u, static_cast<Dir>(d));
      if (link >= 0 && env.passable(link)) ++degree;
    }
    if (degree == 0) {
      // unreachable for boundary-connected transients; defensive only
      throw std::runtime_error("transient node with no surviving link");
    }
    const double p = 1.0 / degree;
    for (int d = 0; d < 4; ++d) {
      const int link = g.incident_link(u, static_cast<Dir>(d));
      if (link < 0 || !env.passable(link)) continue;
      const int v = g.neighbor(u, static_cast<Dir>(d));
      const int sv = chain.state_of_node[v];
      if (sv < chain.absorbing_count) {
        chain.R(t, sv) += p;
      } else {
        chain.Q(t, sv - chain.absorbing_count) += p;
      }
    }
  }
  return chain;
}

ConcentrationField mean_concentration_field(const CanonicalChain& chain, const Environment& env,
                                            Coord source, double A0) {
  if (A0 <= 0.0) throw std::invalid_argument("release rate must be positive");
  const Lattice& g = *env.grid;
  const int src = g.node_index(source);
  if (src < 0) throw std::invalid_argument("source outside the domain");
  const int state = chain.state_of_node[src];
  if (state < chain.absorbing_count) {
    throw std::invalid_argument("source must be a transient (non-absorbing) node");
  }

  const int t = chain.transient_count;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(t, t) - chain.Q;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(t);
  e(state - chain.absorbing_count) = 1.0;
  // row `source` of F = (I-Q)^-1 equals the solution of (I-Q)^T x = e_source
  const Eigen::VectorXd visits = M.transpose().partialPivLu().solve(e);

  ConcentrationField field;
  field.source = source;
  field.A0 = A0;
  field.values.assign(g.node_count(), 0.0);
  for (int i = 0; i < t; ++i) {
    field.values[chain.node_of_state[chain.absorbing_count + i]] = A0 * visits(i);
  }
  return field;
}

std::vector<double> random_walk_oracle(const Environment& env, Coord source, long walks,
                                       std::uint64_t seed) {
  if (walks < 1) throw std::invalid_argument("walk count must be >= 1");
  const Lattice& g = *env.grid;
  const int src = g.node_index(source);
  if (src < 0) throw std::invalid_argument("source outside the domain");

  Engine rng = make_engine(seed);
  std::vector<long> visits(g.node_count(), 0);
  std::vector<int> exits;
  for (long w = 0; w < walks; ++w) {
    int pos = src;
    while (!g.boundary(pos)) {
      ++visits[pos];
      exits.clear();
      for (int d = 0; d < 4; ++d) {
        const int link = g.incident_link(pos, static_cast<Dir>(d));
        if (link >= 0 && env.passable(link)) {
          exits.push_back(g.neighbor(pos, static_cast<Dir>(d)));
        }
      }
      if (exits.empty()) throw std::runtime_error("walker trapped at a linkless node");
      std::uniform_int_distribution<std::size_t> pick(0, exits.size() - 1);
      pos = exits[pick(rng)];
    }
  }
  std::vector<double> mean(g.node_count(), 0.0);
  for (int i = 0; i < g.node_count(); ++i) {
    mean[i] = static_cast<double>(visits[i]) / static_cast<double>(walks);
  }
  return mean;
}

std::string field_to_csv(const Environment& env, const ConcentrationField& field) {
  std::ostringstream out;
  out << "x,y,theta\n";
  const Lattice& g = *env.grid;
  out.precision(17);
  for (int i = 0; i < g.node_count(); ++i) {
    const Coord c = g.node(i);
    out << c.x << ',' << c.y << ',' << field.values[i] << '\n';
  }
  return out.str();
}

}  // namespace plume
