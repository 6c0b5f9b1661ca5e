#pragma once
#include <cstddef>
#include <vector>

namespace airylab {

// Uniform time grid on [t_start, t_end] with steps+1 points.
struct GridSpec {
  double t_start = 0.0;
  double t_end = 1.0;
  int steps = 1;

  double spacing() const { return (t_end - t_start) / steps; }
  int size() const { return steps + 1; }
  double time(int j) const { return t_start + j * spacing(); }
  std::vector<double> times() const;

  // Same endpoints, spacing divided by `factor`.
  GridSpec refined(int factor) const { return GridSpec{t_start, t_end, steps * factor}; }

  void validate() const;  // throws ConfigError
  bool operator==(const GridSpec& o) const = default;
};

// One line's values on a grid, with its quadratic-variation rate and the
// drift of the underlying bridge (0 when not applicable).
struct Path {
  GridSpec grid;
  std::vector<double> values;
  double variance = 1.0;
  double slope = 0.0;

  void validate() const;  // throws ConfigError on shape/finiteness violations
};

// Endpoints and variance for one Brownian bridge.
struct BridgeSpec {
  double start_value = 0.0;
  double end_value = 0.0;
  GridSpec grid;
  double variance = 1.0;

  void validate() const;
};

// Ordered family of lines on a shared grid; index 0 is the top line.
struct LineEnsemble {
  GridSpec grid;
  std::vector<Path> lines;
  bool ordered = false;

  int line_count() const { return static_cast<int>(lines.size()); }
  double value(int line, int j) const { return lines[static_cast<size_t>(line)].values[static_cast<size_t>(j)]; }

  // True iff lines[i][j] >= lines[i+1][j] at every grid index (strict if asked).
  bool is_ordered(bool strict = false) const;
  void validate() const;
};

// Replaces the ensemble's grid with `target` after checking that all grid
// times agree within `tol`. Used where a grid is reconstructed through an
// inverse map and must compare exactly equal downstream.
void rebase_grid(LineEnsemble& ensemble, const GridSpec& target, double tol = 1e-9);

}  // namespace airylab
