#ifndef HARDY_FIELDS_HPP
#define HARDY_FIELDS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "hardy/geometry.hpp"
#include "hardy/potentials.hpp"

namespace hardy {

/// Geodesic ball/annulus region descriptors (radii are geodesic distances).
struct WholeChartRegion {};
struct BallRegion {
  Point center;
  double radius;
};
struct AnnulusRegion {
  Point center;
  double r0, r1;  // 0 < r0 < r1
};

/// A region is a finite union of the primitive parts; a WholeChart part
/// absorbs everything else.
class RegionSpec {
 public:
  using Part = std::variant<WholeChartRegion, BallRegion, AnnulusRegion>;

  static RegionSpec whole_chart();
  static RegionSpec ball(Point center, double radius);
  static RegionSpec annulus(Point center, double r0, double r1);
  static RegionSpec union_of(std::vector<RegionSpec> regions);

  bool is_whole_chart() const { return whole_; }
  const std::vector<Part>& parts() const { return parts_; }
  bool contains(const ModelManifold& m, const Point& x) const;
  /// Number of parts containing x (overlap multiplicity for union sampling).
  int multiplicity(const ModelManifold& m, const Point& x) const;

 private:
  bool whole_ = false;
  std::vector<Part> parts_;
};

/// Evaluatable scalar field with gradient access and support metadata.
struct ScalarField {
  std::function<double(const Point&)> evaluate;
  std::function<TangentVector(const Point&)> gradient;
  RegionSpec support;
  std::string smoothness_note;
};

/// prod_i d_i(x)^beta with the closed-form gradient beta * phi * sum grad d_i/d_i.
/// Accepts any number of poles >= 1.
ScalarField power_product_field(const ModelManifold& m, std::vector<Point> poles,
                                double beta);

/// The closed-form extremal of the two-pole inequality:
/// exponent (p-N)/(2(p-1)) on both distances.  Requires 2 < p < N.
ScalarField minimizer_field(const ModelManifold& m, const Point& a1, const Point& a2,
                            const HardyParams& params);

/// Annulus-supported log-weighted test function used in the sharpness sweep:
/// per pole, log(d/eps^2)/log(1/eps) d^gamma on A[eps^2, eps] and
/// 2 log(sqrt(eps)/d)/log(1/eps) d^gamma on A[eps, sqrt(eps)], gamma =
/// (p-N)/(2(p-1)); the two single-pole profiles are summed.
/// Requires the balls B_{2 sqrt(eps)}(a_i) to be disjoint.
ScalarField sharpness_field(const ModelManifold& m, const Point& a1, const Point& a2,
                            const HardyParams& params, double eps);

/// Seeded smooth compactly supported fields: each is a weighted sum of 1-4
/// radial mollifier bumps exp(-1/(1 - (d/rho)^2)) on geodesic balls placed
/// inside `placement`, kept a margin of 0.05 away from the chart boundary.
std::vector<ScalarField> bump_family(const ModelManifold& m, std::uint64_t seed,
                                     int count, const RegionSpec& placement);

struct FdGradient {
  TangentVector value;
  bool reduced_order = false;  // one-sided fallback was needed somewhere
};

/// Central-difference Riemannian gradient of an arbitrary field.
FdGradient fd_gradient(const ModelManifold& m, const ScalarField& field, const Point& x,
                       double h);
double default_fd_step(const Point& x);

}  // namespace hardy

#endif
