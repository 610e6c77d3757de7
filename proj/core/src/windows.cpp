#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "optomech/errors.hpp"
#include "optomech/spectral.hpp"

namespace optomech::spectral {

namespace {

double in_phase(const SystemModel& sys, double delta) { return probe_response(sys, delta).v_p; }

double golden_section_min(const SystemModel& sys, double a, double b, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = in_phase(sys, x1);
  double f2 = in_phase(sys, x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = in_phase(sys, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = in_phase(sys, x2);
    }
  }
  return 0.5 * (a + b);
}

// Crossing of v_p = level between `below` (v_p < level) and `above` (v_p >= level).
double bisect_level(const SystemModel& sys, double below, double above, double level) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (below + above);
    if (mid == below || mid == above) break;
    (in_phase(sys, mid) < level ? below : above) = mid;
  }
  return 0.5 * (below + above);
}

}  // namespace

std::vector<TransparencyWindow> find_transparency_windows(const SystemModel& system,
                                                          const SpectrumSweep& sweep,
                                                          const WindowOptions& options) {
  const auto& grid = sweep.grid;
  const std::size_t n = grid.size();
  if (n != sweep.responses.size()) {
    throw SpectralError(SpectralErrc::InvalidGrid, "sweep responses do not match the grid");
  }
  if (n < 3) return {};

  const std::size_t required = required_grid_points(system, grid.front(), grid.back(), options);
  // uniform-grid equivalent of the local spacing
  double widest_step = 0.0;
  for (std::size_t i = 1; i < n; ++i) widest_step = std::max(widest_step, grid[i] - grid[i - 1]);
  const double required_step = (grid.back() - grid.front()) / static_cast<double>(required - 1);
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                       std::max(std::abs(grid.front()), std::abs(grid.back()));
  if (widest_step > required_step + slack) {
    std::ostringstream os;
    os << "grid too coarse to resolve the narrowest transparency window; need at least "
       << required << " points";
    throw SpectralError(SpectralErrc::GridTooCoarse, os.str(), required);
  }

  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = sweep.responses[i].v_p;

  const double tol = options.center_tolerance_kappa * system.kappa();
  const auto modes = system.membranes();
  std::vector<TransparencyWindow> windows;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v[i] < v[i - 1] && v[i] <= v[i + 1])) continue;

    std::size_t left = i;
    while (left > 0 && v[left - 1] >= v[left]) --left;
    std::size_t right = i;
    while (right + 1 < n && v[right + 1] >= v[right]) ++right;
    const double local_max = std::min(v[left], v[right]);
    if (!(v[i] < options.depth_ratio * local_max)) continue;

    TransparencyWindow w;
    w.center_delta = golden_section_min(system, grid[i - 1], grid[i + 1], tol);
    w.depth = in_phase(system, w.center_delta);
    w.local_max = local_max;

    const double level = 0.5 * (w.depth + local_max);
    std::size_t k = i - 1;
    while (k > left && v[k] < level) --k;
    std::size_t m = i + 1;
    while (m < right && v[m] < level) ++m;
    const double lo = bisect_level(system, w.center_delta, grid[k], level);
    const double hi = bisect_level(system, w.center_delta, grid[m], level);
    w.fwhm_measured = hi - lo;

    std::size_t nearest = 0;
    for (std::size_t j = 1; j < modes.size(); ++j) {
      if (std::abs(modes[j].omega - w.center_delta) <
          std::abs(modes[nearest].omega - w.center_delta)) {
        nearest = j;
      }
    }
    w.membrane = nearest;
    w.fwhm_analytic = fwhm_analytic(system, nearest, /*merged=*/true);
    windows.push_back(w);
  }
  return windows;
}

}  // namespace optomech::spectral
