#include "core/grid.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace airylab {

std::vector<double> GridSpec::times() const {
  std::vector<double> out(static_cast<size_t>(size()));
  for (int j = 0; j < size(); ++j) out[static_cast<size_t>(j)] = time(j);
  return out;
}

void GridSpec::validate() const {
  if (steps < 1) throw ConfigError("GridSpec: steps must be >= 1");
  if (!(t_end > t_start)) throw ConfigError("GridSpec: t_end must exceed t_start");
  if (!std::isfinite(t_start) || !std::isfinite(t_end))
    throw ConfigError("GridSpec: endpoints must be finite");
}

void Path::validate() const {
  grid.validate();
  if (values.size() != static_cast<size_t>(grid.size()))
    throw ConfigError("Path: values length does not match grid");
  if (!(variance > 0.0)) throw ConfigError("Path: variance must be positive");
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("Path: non-finite value");
}

void BridgeSpec::validate() const {
  grid.validate();
  if (!(variance > 0.0)) throw ConfigError("BridgeSpec: variance must be positive");
  if (!std::isfinite(start_value) || !std::isfinite(end_value))
    throw ConfigError("BridgeSpec: endpoints must be finite");
}

bool LineEnsemble::is_ordered(bool strict) const {
  for (size_t i = 0; i + 1 < lines.size(); ++i) {
    for (size_t j = 0; j < lines[i].values.size(); ++j) {
      double a = lines[i].values[j];
      double b = lines[i + 1].values[j];
      if (strict ? !(a > b) : !(a >= b)) return false;
    }
  }
  return true;
}

void rebase_grid(LineEnsemble& ensemble, const GridSpec& target, double tol) {
  target.validate();
  if (ensemble.grid.steps != target.steps)
    throw ConfigError("rebase_grid: step count mismatch");
  for (int j = 0; j < target.size(); ++j)
    if (std::fabs(ensemble.grid.time(j) - target.time(j)) >
        tol * std::max(1.0, std::fabs(target.time(j))))
      throw ConfigError("rebase_grid: grids disagree beyond tolerance");
  ensemble.grid = target;
  for (Path& p : ensemble.lines) p.grid = target;
}

void LineEnsemble::validate() const {
  grid.validate();
  for (const Path& p : lines) {
    p.validate();
    if (!(p.grid == grid)) throw ConfigError("LineEnsemble: line grid mismatch");
  }
  if (ordered && !is_ordered(false)) throw ConfigError("LineEnsemble: ordered flag violated");
}

}  // namespace airylab
