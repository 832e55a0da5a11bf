#ifndef HARDY_POTENTIALS_HPP
#define HARDY_POTENTIALS_HPP

#include "hardy/geometry.hpp"

namespace hardy {

/// Exponent/constant bundle for the multipolar Hardy potential:
///   C1 = (N-p)^p / (n^p (p-1)^{p-1}),
///   C2 = (N-p)^{p-1} / (n^{p-1} (p-1)^{p-1}),
///   beta = (p-N)/(n(p-1)) < 0.
struct HardyParams {
  double p;
  int N;
  int n;
  double C1;
  double C2;
  double beta;
};

HardyParams make_params(double p, int N, int n);

/// Pointwise decomposition of the potential into its four summand groups.
/// For p = 2 the two (p-2)-weighted groups are identically zero (skipped,
/// never evaluated, so v = 0 causes no 0 * inf there).
struct PotentialTerms {
  double leading = 0.0;    // C1-weighted leading group
  double laplacian = 0.0;  // C2-weighted (d_i Lap d_i - centering)/d_i^2 group
  double cross = 0.0;      // (p-2)-weighted G-product group
  double hessian = 0.0;    // (p-2)-weighted Hessian group
  double total() const { return leading + laplacian + cross + hessian; }
};

/// Full n-pole potential; centering N-p+1 in the Laplacian group.
double multipolar_potential(const ModelManifold& m, const PoleSet& poles,
                            const HardyParams& params, const Point& x);
PotentialTerms multipolar_potential_terms(const ModelManifold& m, const PoleSet& poles,
                                          const HardyParams& params, const Point& x);

/// Constant-free leading part, sum_{i<j} |grad d_i/d_i - grad d_j/d_j|^2 |v|^{p-2}.
double leading_potential(const ModelManifold& m, const PoleSet& poles,
                         const HardyParams& params, const Point& x);

/// Two-pole simplification (centering N-1 plus the compensating cross group);
/// agrees with multipolar_potential(n = 2) pointwise.
double bipolar_potential(const ModelManifold& m, const Point& a1, const Point& a2,
                         const HardyParams& params, const Point& x);
PotentialTerms bipolar_potential_terms(const ModelManifold& m, const Point& a1,
                                       const Point& a2, const HardyParams& params,
                                       const Point& x);

/// Flat-space p = 2 oracle, computed purely from chart coordinates:
///   (N-2)^2/n^2 sum_{i<j} |a_i - a_j|^2 / (|x-a_i|^2 |x-a_j|^2).
double euclid_multipolar_p2(std::span<const Point> poles, int N, const Point& x);

/// Flat-space bipolar L^p oracle (midpoint a = (a1+a2)/2), 2 <= p < N.
double euclid_bipolar_lp(const Point& a1, const Point& a2, int N, double p,
                         const Point& x);

/// t coth t - 1 - 3t^2/(pi^2 + t^2); nonnegative for all t >= 0.
double coth_gap_bound(double t);

/// Hemisphere constant c(delta) = (7pi^2 - 3(delta+pi/2)^2) /
/// (pi^2 ((delta+pi/2)^2 - pi^2)); negative for delta < pi/2.
double hemisphere_constant(double delta);

/// Partial Mittag-Leffler sum 1/t + 2t sum_{k<=K} 1/(t^2 - pi^2 k^2);
/// decreases toward cot(t) as K grows, |error| <= 2t/(pi^2 K) for t < pi.
double cot_mittag_leffler(double t, long terms);

/// Curvature-bound replacement integrand on the hyperbolic model;
/// dominated by bipolar_potential pointwise.
double hyperbolic_lower_bound(const ModelManifold& m, const Point& a1, const Point& a2,
                              const HardyParams& params, const Point& x);

/// Hemisphere replacement integrand; dominated by bipolar_potential on the
/// open hemisphere.  delta is the pole set's north-pole eccentricity.
double sphere_lower_bound(const ModelManifold& m, const Point& a1, const Point& a2,
                          const HardyParams& params, const Point& x, double delta);

}  // namespace hardy

#endif
