#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <utility>
#include <vector>

namespace plume {

struct Coord {
  int x = 0;
  int y = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
  // lexicographic by (x, y); this order fixes node and link ids
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

// Observation slot directions in their fixed reporting order.
enum class Dir : int { East = 0, West = 1, Up = 2, Down = 3 };

inline constexpr std::array<Coord, 4> kDirStep{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
inline constexpr std::array<const char*, 4> kDirName{"E", "W", "U", "D"};

// Unit square lattice covering the circular search domain of radius R0:
// integer nodes strictly inside radius R0+1, unit links between neighbours.
// Nodes with all four neighbours present are interior; the rest form the
// absorbing rim. Node ids follow the (x, y) lexicographic order and link ids
// the lexicographic order of sorted endpoint pairs, so ids are reproducible
// across runs, platforms and serialisations.
class Lattice {
 public:
  explicit Lattice(int radius);

  int radius() const { return radius_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }
  int interior_count() const { return interior_count_; }

  Coord node(int id) const { return nodes_[id]; }
  const std::vector<Coord>& nodes() const { return nodes_; }
  std::pair<int, int> link(int id) const { return links_[id]; }

  // -1 when the coordinate lies outside the domain.
  int node_index(Coord c) const;

  bool interior(int node) const { return interior_[node] != 0; }
  bool boundary(int node) const { return interior_[node] == 0; }

  // Neighbouring node / incident link in a direction; -1 where the geometry
  // ends.
  int neighbor(int node, Dir d) const { return neighbor_[node][static_cast<int>(d)]; }
  int incident_link(int node, Dir d) const { return incident_link_[node][static_cast<int>(d)]; }

  // The second link continuing straight in the same direction (-1 if absent).
  int secondary_link(int node, Dir d) const {
    const int nb = neighbor(node, d);
    return nb < 0 ? -1 : incident_link(nb, d);
  }

 private:
  int radius_;
  std::vector<Coord> nodes_;
  std::vector<std::pair<int, int>> links_;
  std::vector<std::array<int, 4>> neighbor_;
  std::vector<std::array<int, 4>> incident_link_;
  std::vector<std::uint8_t> interior_;
  int interior_count_ = 0;
  int table_span_ = 0;
  std::vector<int> coord_table_;
};

}  // namespace plume
