#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "plume/environment.hpp"

namespace plume {

// Random walk on an environment in canonical absorbing form. Absorbing
// states: the rim nodes, plus any interior node with no surviving path to
// the rim — that keeps I - Q invertible even for maps that evolved away from
// full connectivity (such pockets exchange no mass with the rest).
struct CanonicalChain {
  int absorbing_count = 0;
  int transient_count = 0;
  std::vector<int> state_of_node;  // node id -> state index, absorbing states first
  std::vector<int> node_of_state;  // state index -> node id
  Eigen::MatrixXd Q;               // transient -> transient
  Eigen::MatrixXd R;               // transient -> absorbing
};

CanonicalChain build_canonical_chain(const Environment& env);

struct ConcentrationField {
  Coord source;
  double A0 = 0.0;
  std::vector<double> values;  // per node; exactly 0 at absorbing states
};

// values[j] = A0 * F(source, j) with F = (I - Q)^-1, obtained from one
// linear solve of (I - Q)^T x = e_source; the inverse is never formed.
// Throws std::invalid_argument when the source is an absorbing state.
ConcentrationField mean_concentration_field(const CanonicalChain& chain, const Environment& env,
                                            Coord source, double A0);

// Empirical mean visit count per node over `walks` random walks from source,
// each run to absorption; the reference the exact solver is checked against.
std::vector<double> random_walk_oracle(const Environment& env, Coord source, long walks,
                                       std::uint64_t seed);

// CSV rows "x,y,theta" in node order.
std::string field_to_csv(const Environment& env, const ConcentrationField& field);

}  // namespace plume
