#pragma once

#include <stdexcept>
#include <vector>

namespace bentwire {

enum class NodeRule { Staggered, EndpointInclusive };

/// Uniform partition of (a, b) into n_cells cells of width h. The staggered
/// node set is the cell midpoints; the endpoint-inclusive node set is the cell
/// boundaries a + j h, j = 0..n_cells.
struct Mesh {
  double a = -5.0;
  double b = 5.0;
  int n_cells = 0;
  double h = 0.0;

  static Mesh uniform(double a, double b, int n_cells) {
    if (!(b > a)) throw std::invalid_argument("mesh requires a < b");
    if (n_cells < 2) throw std::invalid_argument("mesh requires at least two cells");
    return Mesh{a, b, n_cells, (b - a) / n_cells};
  }

  double cell_lo(int j) const { return a + j * h; }
  double cell_hi(int j) const { return j + 1 == n_cells ? b : a + (j + 1) * h; }
  double midpoint(int j) const { return a + (j + 0.5) * h; }

  std::vector<double> nodes(NodeRule rule) const {
    std::vector<double> out;
    if (rule == NodeRule::Staggered) {
      out.resize(n_cells);
      for (int j = 0; j < n_cells; ++j) out[j] = midpoint(j);
    } else {
      out.resize(n_cells + 1);
      for (int j = 0; j <= n_cells; ++j) out[j] = cell_lo(j);
      out.back() = b;
    }
    return out;
  }

  bool operator==(const Mesh&) const = default;
};

}  // namespace bentwire
