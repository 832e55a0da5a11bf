#ifndef HARDY_QUADRATURE_HPP
#define HARDY_QUADRATURE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hardy/fields.hpp"
#include "hardy/geometry.hpp"

namespace hardy {

struct QuadConfig {
  long total_samples = 200000;
  /// <= 0 selects 0.25 * min(pole separation, distance to the chart boundary).
  double pole_ball_radius = 0.0;
  /// Radial density inside pole balls is proportional to r^{N-1-q}; must be < N.
  /// <= 0 selects a default (2, or the exponent p inside the verify module,
  /// matching the worst d^{-p} integrand singularity).
  double importance_exponent = 0.0;
  std::uint64_t seed = 1;
  long max_resamples = 100000;
};

struct StratumReport {
  std::string region;
  double value = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

struct QuadratureEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  /// Set when the sampler had to truncate an unbounded chart and the support
  /// metadata does not exclude the truncated shell.
  bool tail_truncated = false;
  std::vector<StratumReport> strata;
};

/// Joint estimate of several integrands over shared sample points.
/// covariance is the k x k covariance matrix of the component estimators,
/// so correlated noise cancels exactly in differences and ratios.
struct MultiEstimate {
  std::vector<QuadratureEstimate> components;
  std::vector<double> covariance;
  double covar(int i, int j) const {
    const int k = static_cast<int>(components.size());
    return covariance[static_cast<std::size_t>(i) * k + static_cast<std::size_t>(j)];
  }
};

using Integrand = std::function<double(const Point&)>;

/// Stratified estimator of int_support f dv_g: geodesic-polar importance
/// sampling inside each pole ball, region-adapted proposals over the rest.
/// degenerate_point_error from the integrand triggers a resample (shared
/// budget cfg.max_resamples, then numerical_error).
QuadratureEstimate integrate(const ModelManifold& m, const Integrand& f,
                             const RegionSpec& support, const PoleSet& poles,
                             const QuadConfig& cfg);

MultiEstimate integrate_multi(const ModelManifold& m, const std::vector<Integrand>& fs,
                              const RegionSpec& support, const PoleSet& poles,
                              const QuadConfig& cfg);

/// Adaptive 1-D quadrature of int_{r0}^{r1} f(r) s_c(r)^{N-1} dr to relative
/// tolerance tol; the deterministic oracle for radially symmetric integrals.
double radial_integrate_1d(double curvature, int N, const std::function<double(double)>& f,
                           double r0, double r1, double tol);

/// Surface area of the unit sphere S^{dim-1} in R^dim.
double unit_sphere_area(int dim);

}  // namespace hardy

#endif
