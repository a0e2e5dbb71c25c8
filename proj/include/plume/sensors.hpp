#pragma once

#include <array>
#include <vector>

#include "plume/environment.hpp"
#include "plume/markov_field.hpp"
#include "plume/rng.hpp"

namespace plume {

// Binary link detector: P(z=1 | present) = p_d, P(z=1 | absent) = p_fa.
struct DetectionMatrix {
  double p_d = 1.0;
  double p_fa = 0.0;
};

enum class Move : int { Stay = 0, Up = 1, Right = 2, Down = 3, Left = 4 };
inline constexpr int kMoveCount = 5;
inline constexpr Coord kMoveStep[kMoveCount] = {{0, 0}, {0, 1}, {1, 0}, {0, -1}, {-1, 0}};
inline constexpr const char* kMoveName[kMoveCount] = {"stay", "up", "right", "down", "left"};

// Lattice direction of a non-stay move.
Dir move_dir(Move m);

// Move that traverses the primary link in a given direction.
Move move_of_dir(Dir d);

// Admissible-control mask, indexed by Move. Admissibility comes from the
// known complete-grid geometry alone: staying is always allowed, and a move
// is allowed when the complete grid has a node in that direction — whether
// the obstacle map blocks it there is unknown until tried. Control errors
// redistribute within the same set.
using MoveMask = std::array<bool, kMoveCount>;

inline constexpr MoveMask kAllMoves = {true, true, true, true, true};

// Stay plus every move with a complete-grid neighbor at `node`.
MoveMask geometry_moves(const Lattice& grid, int node);

enum class Tier : int { Primary = 0, Secondary = 1 };

// One link reading. `link_id` is resolved at the true searcher position; the
// filter re-resolves the (dir, tier) slot at each particle's own position.
struct LinkObservation {
  int link_id = -1;
  Dir dir = Dir::East;
  Tier tier = Tier::Primary;
  int z = 0;
};

// Poisson count draw with mean field.values[node]; zero mean draws nothing.
long sample_count(const ConcentrationField& field, int node, Engine& rng);

// Noisy readings of every geometrically present primary (adjacent) and
// secondary (collinear next) link, in E,W,U,D order per tier.
std::vector<LinkObservation> observe_links(const Environment& env, int node,
                                           const DetectionMatrix& primary,
                                           const DetectionMatrix& secondary, Engine& rng);

struct ControlOutcome {
  int node = -1;
  Move realised = Move::Stay;
};

// Motion mixture shared by the physical searcher and the filter prediction:
// the commanded move with probability 1 - p_e, otherwise uniform over the
// other admissible moves (the commanded move again if none are).
Move sample_realised_move(Move commanded, double p_e, const MoveMask& admissible, Engine& rng);

// Commanded control executes with probability 1 - p_e, otherwise one of the
// other admissible moves is realised uniformly (the commanded move itself if
// nothing else is admissible). A realised move off the grid or across a
// missing link leaves the searcher in place.
ControlOutcome execute_control(const Environment& env, int node, Move commanded, double p_e,
                               const MoveMask& admissible, Engine& rng);

// Same, with the admissible set taken from the grid geometry at `node`.
ControlOutcome execute_control(const Environment& env, int node, Move commanded, double p_e,
                               Engine& rng);

}  // namespace plume
