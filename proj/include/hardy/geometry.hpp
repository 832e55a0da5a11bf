#ifndef HARDY_GEOMETRY_HPP
#define HARDY_GEOMETRY_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace hardy {

// Tolerances shared across the geometric predicates.
inline constexpr double kPoleHitTol = 1e-9;     // d(x, a_i) below this is a pole hit
inline constexpr double kCoincidenceTol = 1e-12;
inline constexpr double kSphereUnitTol = 1e-12;
inline constexpr double kSphereTangentTol = 1e-10;

enum class ModelKind { Euclidean, Hyperbolic, SphereCap };

/// One of the three constant-curvature models.
///
/// Charts: Euclidean = R^N; Hyperbolic = Poincare ball {|x| < 1} rescaled so
/// the sectional curvature is -R^2 (conformal factor (2/R)/(1-|x|^2));
/// SphereCap = the open upper hemisphere of the unit sphere, points stored as
/// ambient unit vectors in R^{N+1} with positive last coordinate.
class ModelManifold {
 public:
  static ModelManifold euclidean(int dim);
  static ModelManifold hyperbolic(int dim, double curvature_scale);
  static ModelManifold sphere_cap(int dim);

  ModelKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Length of a chart coordinate vector (dim, or dim+1 on the sphere).
  int chart_dim() const { return kind_ == ModelKind::SphereCap ? dim_ + 1 : dim_; }
  /// R for the hyperbolic model (curvature -R^2); 1 otherwise.
  double curvature_scale() const { return scale_; }
  /// Constant sectional curvature: 0, -R^2, or +1.
  double curvature() const;

  const char* name() const;

 private:
  ModelManifold(ModelKind kind, int dim, double scale)
      : kind_(kind), dim_(dim), scale_(scale) {}
  ModelKind kind_;
  int dim_;
  double scale_;
};

struct Point {
  std::vector<double> x;
};

struct TangentVector {
  Point base;
  std::vector<double> v;  // chart components (ambient on the sphere)
};

/// Validating constructor; throws invalid_input when coords leave the chart.
Point make_point(const ModelManifold& m, std::vector<double> coords);
bool in_chart(const ModelManifold& m, const Point& x);

/// Tangent vector based at x; on the sphere the components are projected
/// onto the tangent space and checked against kSphereTangentTol.
TangentVector make_tangent(const ModelManifold& m, const Point& x,
                           std::vector<double> components);

double distance(const ModelManifold& m, const Point& x, const Point& y);

double metric_inner(const ModelManifold& m, const Point& x,
                    const TangentVector& u, const TangentVector& v);
double metric_norm(const ModelManifold& m, const Point& x, const TangentVector& u);

/// Riemannian unit gradient of d(a, .) at x (points away from a).
TangentVector grad_distance(const ModelManifold& m, const Point& a, const Point& x);

/// s_c'(r)/s_c(r): 1/r, sqrt(-c) coth(r sqrt(-c)) or sqrt(c) cot(r sqrt(c)).
/// Continuous across c = 0 (series fallback for |c| r^2 < 1e-8).
double s_ratio(double curvature, double r);

/// s_c(r) itself: r, sin(r sqrt(c))/sqrt(c), or sinh(r sqrt(-c))/sqrt(-c).
/// s_c(r)^{N-1} is the geodesic-polar area density.
double s_profile(double curvature, double r);

/// (N-1) s_c'(d)/s_c(d) with d = d(a, x); exact in constant curvature.
double laplacian_distance(const ModelManifold& m, const Point& a, const Point& x);

/// Hessian of d(a, .) as a quadratic form on X: s_c'/s_c times the squared
/// norm of X with the radial direction projected out.
double hessian_distance_form(const ModelManifold& m, const Point& a,
                             const Point& x, const TangentVector& X);
double hessian_distance_bilinear(const ModelManifold& m, const Point& a,
                                 const Point& x, const TangentVector& X,
                                 const TangentVector& Y);

/// Density of the Riemannian volume form against the chart Lebesgue measure.
/// Chart on the sphere: orthographic projection onto the first N coordinates.
double volume_weight(const ModelManifold& m, const Point& x);

/// n >= 2 distinct poles; pairwise geodesic distances precomputed.
/// On the sphere also records delta = max distance from the north pole.
class PoleSet {
 public:
  static PoleSet create(const ModelManifold& m, std::vector<Point> poles);

  int size() const { return static_cast<int>(poles_.size()); }
  const Point& pole(int i) const { return poles_[static_cast<std::size_t>(i)]; }
  const std::vector<Point>& poles() const { return poles_; }
  double pairwise_distance(int i, int j) const {
    return dist_[static_cast<std::size_t>(i) * poles_.size() + static_cast<std::size_t>(j)];
  }
  double min_separation() const { return min_sep_; }
  /// SphereCap only: max geodesic distance from the north pole (< pi/2).
  double delta() const { return delta_; }

 private:
  std::vector<Point> poles_;
  std::vector<double> dist_;
  double min_sep_ = 0.0;
  double delta_ = 0.0;
};

/// Symmetric n x n matrix of inner products g(grad d_i, grad d_j).
class GMatrix {
 public:
  GMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}
  double operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
  }
  double& at(int i, int j) {
    return a_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
  }
  int size() const { return n_; }

 private:
  int n_;
  std::vector<double> a_;
};

GMatrix g_matrix(const ModelManifold& m, const PoleSet& poles, const Point& x);

/// v = sum_i grad d_i / d_i and |v|^2 (Eikonal identity + G off-diagonals).
TangentVector v_field(const ModelManifold& m, const PoleSet& poles, const Point& x);
double v_norm_sq(const ModelManifold& m, const PoleSet& poles, const Point& x);

/// Geodesic from x with (metric-)unit initial direction u, arc length r.
/// Closed form in all three models; exact within the chart.
Point exp_map(const ModelManifold& m, const Point& x, const TangentVector& u, double r);

/// Metric-orthonormal basis of the tangent space at x.
std::vector<TangentVector> tangent_onb(const ModelManifold& m, const Point& x);

/// North pole (0, ..., 0, 1) of the sphere chart.
Point north_pole(const ModelManifold& m);

// Small dense-vector helpers used throughout the chart computations.
namespace vec {
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm(std::span<const double> a);
std::vector<double> sub(std::span<const double> a, std::span<const double> b);
}  // namespace vec

}  // namespace hardy

#endif
