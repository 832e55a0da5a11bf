#include "hardy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hardy/errors.hpp"

namespace hardy {

namespace vec {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

std::vector<double> sub(std::span<const double> a, std::span<const double> b) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

}  // namespace vec

ModelManifold ModelManifold::euclidean(int dim) {
  if (dim < 3) throw invalid_input("ModelManifold: dimension must be >= 3");
  return ModelManifold(ModelKind::Euclidean, dim, 1.0);
}

ModelManifold ModelManifold::hyperbolic(int dim, double curvature_scale) {
  if (dim < 3) throw invalid_input("ModelManifold: dimension must be >= 3");
  if (!(curvature_scale > 0.0))
    throw invalid_input("ModelManifold: hyperbolic curvature scale must be > 0");
  return ModelManifold(ModelKind::Hyperbolic, dim, curvature_scale);
}

ModelManifold ModelManifold::sphere_cap(int dim) {
  if (dim < 3) throw invalid_input("ModelManifold: dimension must be >= 3");
  return ModelManifold(ModelKind::SphereCap, dim, 1.0);
}

double ModelManifold::curvature() const {
  switch (kind_) {
    case ModelKind::Euclidean: return 0.0;
    case ModelKind::Hyperbolic: return -scale_ * scale_;
    case ModelKind::SphereCap: return 1.0;
  }
  return 0.0;
}

const char* ModelManifold::name() const {
  switch (kind_) {
    case ModelKind::Euclidean: return "euclidean";
    case ModelKind::Hyperbolic: return "hyperbolic";
    case ModelKind::SphereCap: return "sphere";
  }
  return "?";
}

bool in_chart(const ModelManifold& m, const Point& x) {
  if (static_cast<int>(x.x.size()) != m.chart_dim()) return false;
  switch (m.kind()) {
    case ModelKind::Euclidean:
      return true;
    case ModelKind::Hyperbolic:
      return vec::norm2(x.x) < 1.0;
    case ModelKind::SphereCap:
      return std::abs(vec::norm(x.x) - 1.0) <= kSphereUnitTol && x.x.back() > 0.0;
  }
  return false;
}

Point make_point(const ModelManifold& m, std::vector<double> coords) {
  Point p{std::move(coords)};
  if (static_cast<int>(p.x.size()) != m.chart_dim())
    throw invalid_input("make_point: expected " + std::to_string(m.chart_dim()) +
                        " coordinates, got " + std::to_string(p.x.size()));
  if (!in_chart(m, p)) throw invalid_input("make_point: coordinates leave the chart domain");
  return p;
}

TangentVector make_tangent(const ModelManifold& m, const Point& x,
                           std::vector<double> components) {
  if (components.size() != x.x.size())
    throw invalid_input("make_tangent: component/base dimension mismatch");
  if (m.kind() == ModelKind::SphereCap) {
    const double r = vec::dot(components, x.x);
    if (std::abs(r) > kSphereTangentTol) {
      // project off the normal component (tolerated drift only)
      for (std::size_t i = 0; i < components.size(); ++i) components[i] -= r * x.x[i];
    }
  }
  return TangentVector{x, std::move(components)};
}

namespace {

void require_chart(const ModelManifold& m, const Point& x, const char* who) {
  if (!in_chart(m, x)) throw invalid_input(std::string(who) + ": point outside chart domain");
}

double conformal_factor(const ModelManifold& m, const Point& x) {
  // (2/R) / (1 - |x|^2)
  return (2.0 / m.curvature_scale()) / (1.0 - vec::norm2(x.x));
}

}  // namespace

double distance(const ModelManifold& m, const Point& x, const Point& y) {
  require_chart(m, x, "distance");
  require_chart(m, y, "distance");
  switch (m.kind()) {
    case ModelKind::Euclidean:
      return vec::norm(vec::sub(x.x, y.x));
    case ModelKind::Hyperbolic: {
      const double s = vec::norm2(vec::sub(x.x, y.x));
      const double t = 2.0 * s / ((1.0 - vec::norm2(x.x)) * (1.0 - vec::norm2(y.x)));
      // arcosh(1 + t), written to stay accurate for small t
      return std::log1p(t + std::sqrt(t * (t + 2.0))) / m.curvature_scale();
    }
    case ModelKind::SphereCap: {
      // 2 asin(|x - y| / 2): stable near 0, and d < pi for chart points
      const double c = std::min(1.0, 0.5 * vec::norm(vec::sub(x.x, y.x)));
      return 2.0 * std::asin(c);
    }
  }
  return 0.0;
}

double metric_inner(const ModelManifold& m, const Point& x, const TangentVector& u,
                    const TangentVector& v) {
  if (u.base.x != x.x || v.base.x != x.x)
    throw invalid_input("metric_inner: tangent vectors not based at x");
  const double e = vec::dot(u.v, v.v);
  if (m.kind() == ModelKind::Hyperbolic) {
    const double rho = conformal_factor(m, x);
    return rho * rho * e;
  }
  return e;
}

double metric_norm(const ModelManifold& m, const Point& x, const TangentVector& u) {
  return std::sqrt(std::max(0.0, metric_inner(m, x, u, u)));
}

TangentVector grad_distance(const ModelManifold& m, const Point& a, const Point& x) {
  require_chart(m, a, "grad_distance");
  require_chart(m, x, "grad_distance");
  const double d = distance(m, a, x);
  if (d < kCoincidenceTol) throw singular_point_error("grad_distance: x coincides with a");
  switch (m.kind()) {
    case ModelKind::Euclidean: {
      auto g = vec::sub(x.x, a.x);
      for (auto& gi : g) gi /= d;
      return TangentVector{x, std::move(g)};
    }
    case ModelKind::Hyperbolic: {
      // Chart components of the Riemannian gradient:
      //   R (1-|x|^2) [ (x-a)(1-|x|^2) + |x-a|^2 x ] / (2 sqrt(s F)),
      // F = 1 - 2 a.x + |a|^2 |x|^2, s = |x-a|^2.  Unit by construction.
      const double X = vec::norm2(x.x);
      const double s = vec::norm2(vec::sub(x.x, a.x));
      const double F = 1.0 - 2.0 * vec::dot(a.x, x.x) + vec::norm2(a.x) * X;
      const double bx = 1.0 - X;
      const double scale = m.curvature_scale() * bx / (2.0 * std::sqrt(s * F));
      std::vector<double> g(x.x.size());
      for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = scale * ((x.x[i] - a.x[i]) * bx + s * x.x[i]);
      return TangentVector{x, std::move(g)};
    }
    case ModelKind::SphereCap: {
      // -(a - <a,x> x)/|a - <a,x> x|: unit tangent at x pointing away from a
      const double t = vec::dot(a.x, x.x);
      std::vector<double> w(x.x.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = a.x[i] - t * x.x[i];
      const double n = vec::norm(w);
      if (n < kCoincidenceTol) throw singular_point_error("grad_distance: antipodal/coincident");
      for (auto& wi : w) wi /= -n;
      return TangentVector{x, std::move(w)};
    }
  }
  throw numerical_error("grad_distance: unreachable");
}

double s_ratio(double curvature, double r) {
  if (!(r > 0.0)) throw invalid_input("s_ratio: r must be > 0");
  const double c = curvature;
  if (std::abs(c) * r * r < 1e-8) {
    // series of s_c'/s_c about c = 0
    return 1.0 / r - c * r / 3.0 - c * c * r * r * r / 45.0;
  }
  if (c > 0.0) {
    const double k = std::sqrt(c);
    if (k * r >= std::numbers::pi)
      throw invalid_input("s_ratio: r sqrt(c) must be < pi");
    return k / std::tan(k * r);
  }
  const double k = std::sqrt(-c);
  return k / std::tanh(k * r);
}

double s_profile(double curvature, double r) {
  if (r < 0.0) throw invalid_input("s_profile: r must be >= 0");
  const double c = curvature;
  if (std::abs(c) * r * r < 1e-8) return r * (1.0 - c * r * r / 6.0);
  if (c > 0.0) {
    const double k = std::sqrt(c);
    return std::sin(k * r) / k;
  }
  const double k = std::sqrt(-c);
  return std::sinh(k * r) / k;
}

double laplacian_distance(const ModelManifold& m, const Point& a, const Point& x) {
  const double d = distance(m, a, x);
  if (d < kCoincidenceTol) throw singular_point_error("laplacian_distance: x coincides with a");
  return (m.dim() - 1) * s_ratio(m.curvature(), d);
}

double hessian_distance_bilinear(const ModelManifold& m, const Point& a, const Point& x,
                                 const TangentVector& X, const TangentVector& Y) {
  const double d = distance(m, a, x);
  if (d < kCoincidenceTol) throw singular_point_error("hessian_distance: x coincides with a");
  const auto gd = grad_distance(m, a, x);
  const double gx = metric_inner(m, x, X, gd);
  const double gy = metric_inner(m, x, Y, gd);
  return s_ratio(m.curvature(), d) * (metric_inner(m, x, X, Y) - gx * gy);
}

double hessian_distance_form(const ModelManifold& m, const Point& a, const Point& x,
                             const TangentVector& X) {
  return hessian_distance_bilinear(m, a, x, X, X);
}

double volume_weight(const ModelManifold& m, const Point& x) {
  require_chart(m, x, "volume_weight");
  switch (m.kind()) {
    case ModelKind::Euclidean:
      return 1.0;
    case ModelKind::Hyperbolic: {
      const double r2 = vec::norm2(x.x);
      if (r2 >= 1.0) throw invalid_input("volume_weight: chart boundary");
      return std::pow(conformal_factor(m, x), m.dim());
    }
    case ModelKind::SphereCap: {
      // orthographic chart z = (x_1..x_N): dv = dz / x_{N+1}
      const double h = x.x.back();
      if (h <= 0.0) throw invalid_input("volume_weight: chart boundary (equator)");
      return 1.0 / h;
    }
  }
  return 1.0;
}

PoleSet PoleSet::create(const ModelManifold& m, std::vector<Point> poles) {
  if (poles.size() < 2) throw invalid_input("PoleSet: need n >= 2 poles");
  for (const auto& p : poles) require_chart(m, p, "PoleSet");
  PoleSet ps;
  const std::size_t n = poles.size();
  ps.dist_.assign(n * n, 0.0);
  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(m, poles[i], poles[j]);
      ps.dist_[i * n + j] = ps.dist_[j * n + i] = d;
      min_sep = std::min(min_sep, d);
    }
  if (!(min_sep > kPoleHitTol)) throw invalid_input("PoleSet: poles not pairwise distinct");
  ps.min_sep_ = min_sep;
  if (m.kind() == ModelKind::SphereCap) {
    const Point np = north_pole(m);
    double delta = 0.0;
    for (const auto& p : poles) delta = std::max(delta, distance(m, np, p));
    if (!(delta < std::numbers::pi / 2.0))
      throw invalid_input("PoleSet: sphere poles must satisfy delta < pi/2");
    ps.delta_ = delta;
  }
  ps.poles_ = std::move(poles);
  return ps;
}

GMatrix g_matrix(const ModelManifold& m, const PoleSet& poles, const Point& x) {
  const int n = poles.size();
  std::vector<TangentVector> grads;
  grads.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (distance(m, poles.pole(i), x) < kPoleHitTol)
      throw singular_point_error("g_matrix: x at pole " + std::to_string(i));
    grads.push_back(grad_distance(m, poles.pole(i), x));
  }
  GMatrix G(n);
  for (int i = 0; i < n; ++i) {
    G.at(i, i) = 1.0;  // Eikonal
    for (int j = i + 1; j < n; ++j) {
      double gij = metric_inner(m, x, grads[static_cast<std::size_t>(i)],
                                grads[static_cast<std::size_t>(j)]);
      gij = std::clamp(gij, -1.0, 1.0);
      G.at(i, j) = gij;
      G.at(j, i) = gij;
    }
  }
  return G;
}

TangentVector v_field(const ModelManifold& m, const PoleSet& poles, const Point& x) {
  std::vector<double> acc(x.x.size(), 0.0);
  for (int i = 0; i < poles.size(); ++i) {
    const double d = distance(m, poles.pole(i), x);
    if (d < kPoleHitTol) throw singular_point_error("v_field: x at pole");
    const auto g = grad_distance(m, poles.pole(i), x);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += g.v[k] / d;
  }
  return TangentVector{x, std::move(acc)};
}

double v_norm_sq(const ModelManifold& m, const PoleSet& poles, const Point& x) {
  const int n = poles.size();
  const GMatrix G = g_matrix(m, poles, x);
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)] = distance(m, poles.pole(i), x);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += 1.0 / (d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)]);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      s += 2.0 * G(i, j) / (d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(j)]);
  return std::max(0.0, s);
}

namespace {

// Moebius addition on the unit ball (isometry group of the Poincare model).
std::vector<double> moebius_add(std::span<const double> a, std::span<const double> b) {
  const double ab = vec::dot(a, b);
  const double a2 = vec::norm2(a);
  const double b2 = vec::norm2(b);
  const double den = 1.0 + 2.0 * ab + a2 * b2;
  std::vector<double> r(a.size());
  const double ca = (1.0 + 2.0 * ab + b2) / den;
  const double cb = (1.0 - a2) / den;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = ca * a[i] + cb * b[i];
  return r;
}

}  // namespace

Point exp_map(const ModelManifold& m, const Point& x, const TangentVector& u, double r) {
  require_chart(m, x, "exp_map");
  if (r < 0.0) throw invalid_input("exp_map: negative arc length");
  switch (m.kind()) {
    case ModelKind::Euclidean: {
      std::vector<double> y(x.x.size());
      const double n = vec::norm(u.v);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = x.x[i] + r * u.v[i] / n;
      return Point{std::move(y)};
    }
    case ModelKind::Hyperbolic: {
      // chart direction equals the (normalized) tangent components;
      // arc length r in curvature -R^2 is rR in the unit-curvature ball
      const double n = vec::norm(u.v);
      const double t = std::tanh(0.5 * r * m.curvature_scale());
      std::vector<double> step(u.v.size());
      for (std::size_t i = 0; i < step.size(); ++i) step[i] = t * u.v[i] / n;
      return Point{moebius_add(x.x, step)};
    }
    case ModelKind::SphereCap: {
      const double n = vec::norm(u.v);
      std::vector<double> y(x.x.size());
      const double c = std::cos(r), s = std::sin(r);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = c * x.x[i] + s * u.v[i] / n;
      // renormalize against drift
      const double yn = vec::norm(y);
      for (auto& yi : y) yi /= yn;
      return Point{std::move(y)};
    }
  }
  throw numerical_error("exp_map: unreachable");
}

std::vector<TangentVector> tangent_onb(const ModelManifold& m, const Point& x) {
  std::vector<TangentVector> basis;
  const int N = m.dim();
  basis.reserve(static_cast<std::size_t>(N));
  switch (m.kind()) {
    case ModelKind::Euclidean:
    case ModelKind::Hyperbolic: {
      const double s =
          m.kind() == ModelKind::Hyperbolic ? 1.0 / conformal_factor(m, x) : 1.0;
      for (int i = 0; i < N; ++i) {
        std::vector<double> e(static_cast<std::size_t>(N), 0.0);
        e[static_cast<std::size_t>(i)] = s;
        basis.push_back(TangentVector{x, std::move(e)});
      }
      return basis;
    }
    case ModelKind::SphereCap: {
      // Gram-Schmidt of the ambient axes against x
      std::vector<std::vector<double>> onb;
      for (int i = 0; i <= N && static_cast<int>(onb.size()) < N; ++i) {
        std::vector<double> e(static_cast<std::size_t>(N) + 1, 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        double r = vec::dot(e, x.x);
        for (std::size_t k = 0; k < e.size(); ++k) e[k] -= r * x.x[k];
        for (const auto& b : onb) {
          r = vec::dot(e, b);
          for (std::size_t k = 0; k < e.size(); ++k) e[k] -= r * b[k];
        }
        const double n = vec::norm(e);
        if (n < 1e-8) continue;
        for (auto& ei : e) ei /= n;
        onb.push_back(std::move(e));
      }
      for (auto& e : onb) basis.push_back(TangentVector{x, std::move(e)});
      return basis;
    }
  }
  return basis;
}

Point north_pole(const ModelManifold& m) {
  if (m.kind() != ModelKind::SphereCap)
    throw invalid_input("north_pole: sphere model only");
  std::vector<double> c(static_cast<std::size_t>(m.dim()) + 1, 0.0);
  c.back() = 1.0;
  return Point{std::move(c)};
}

}  // namespace hardy
