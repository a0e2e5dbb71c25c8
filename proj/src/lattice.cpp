#include "plume/lattice.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace plume {

Lattice::Lattice(int radius) : radius_(radius) {
  if (radius < 1) throw std::invalid_argument("lattice radius must be >= 1");

  const long rad2 = static_cast<long>(radius + 1) * (radius + 1);
  for (int x = -radius; x <= radius; ++x) {
    for (int y = -radius; y <= radius; ++y) {
      if (static_cast<long>(x) * x + static_cast<long>(y) * y < rad2) {
        nodes_.push_back({x, y});
      }
    }
  }
  std::sort(nodes_.begin(), nodes_.end());

  table_span_ = 2 * radius + 1;
  coord_table_.assign(static_cast<std::size_t>(table_span_) * table_span_, -1);
  for (int i = 0; i < node_count(); ++i) {
    const Coord c = nodes_[i];
    coord_table_[static_cast<std::size_t>(c.x + radius) * table_span_ + (c.y + radius)] = i;
  }

  neighbor_.assign(nodes_.size(), {-1, -1, -1, -1});
  incident_link_.assign(nodes_.size(), {-1, -1, -1, -1});
  interior_.assign(nodes_.size(), 0);

  for (int i = 0; i < node_count(); ++i) {
    int present = 0;
    for (int d = 0; d < 4; ++d) {
      const Coord step = kDirStep[d];
      const int nb = node_index({nodes_[i].x + step.x, nodes_[i].y + step.y});
      neighbor_[i][d] = nb;
      if (nb >= 0) ++present;
    }
    if (present == 4) {
      interior_[i] = 1;
      ++interior_count_;
    }
  }

  // node ids already follow (x, y) lex order, so sorting id pairs is the
  // same as sorting coordinate pairs
  for (int i = 0; i < node_count(); ++i) {
    for (int d = 0; d < 4; ++d) {
      const int nb = neighbor_[i][d];
      if (nb > i) links_.emplace_back(i, nb);
    }
  }
  std::sort(links_.begin(), links_.end());

  for (int id = 0; id < link_count(); ++id) {
    const auto [a, b] = links_[id];
    for (int d = 0; d < 4; ++d) {
      if (neighbor_[a][d] == b) incident_link_[a][d] = id;
      if (neighbor_[b][d] == a) incident_link_[b][d] = id;
    }
  }
}

int Lattice::node_index(Coord c) const {
  if (c.x < -radius_ || c.x > radius_ || c.y < -radius_ || c.y > radius_) return -1;
  return coord_table_[static_cast<std::size_t>(c.x + radius_) * table_span_ + (c.y + radius_)];
}

}  // namespace plume
