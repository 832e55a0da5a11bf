#include "hardy/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hardy/errors.hpp"
#include "hardy/rng.hpp"

namespace hardy {

RegionSpec RegionSpec::whole_chart() {
  RegionSpec r;
  r.whole_ = true;
  r.parts_.push_back(WholeChartRegion{});
  return r;
}

RegionSpec RegionSpec::ball(Point center, double radius) {
  if (!(radius > 0.0)) throw invalid_input("RegionSpec::ball: radius must be > 0");
  RegionSpec r;
  r.parts_.push_back(BallRegion{std::move(center), radius});
  return r;
}

RegionSpec RegionSpec::annulus(Point center, double r0, double r1) {
  if (!(0.0 < r0 && r0 < r1))
    throw invalid_input("RegionSpec::annulus: need 0 < r0 < r1");
  RegionSpec r;
  r.parts_.push_back(AnnulusRegion{std::move(center), r0, r1});
  return r;
}

RegionSpec RegionSpec::union_of(std::vector<RegionSpec> regions) {
  RegionSpec r;
  for (auto& reg : regions) {
    if (reg.whole_) return whole_chart();
    for (auto& p : reg.parts_) r.parts_.push_back(std::move(p));
  }
  if (r.parts_.empty()) throw invalid_input("RegionSpec::union_of: empty union");
  return r;
}

bool RegionSpec::contains(const ModelManifold& m, const Point& x) const {
  if (whole_) return in_chart(m, x);
  return multiplicity(m, x) > 0;
}

int RegionSpec::multiplicity(const ModelManifold& m, const Point& x) const {
  if (whole_) return in_chart(m, x) ? 1 : 0;
  int count = 0;
  for (const auto& part : parts_) {
    if (const auto* b = std::get_if<BallRegion>(&part)) {
      if (distance(m, b->center, x) < b->radius) ++count;
    } else if (const auto* a = std::get_if<AnnulusRegion>(&part)) {
      const double d = distance(m, a->center, x);
      if (d >= a->r0 && d <= a->r1) ++count;
    }
  }
  return count;
}

ScalarField power_product_field(const ModelManifold& m, std::vector<Point> poles,
                                double beta) {
  if (poles.empty()) throw invalid_input("power_product_field: need at least one pole");
  if (!(beta < 0.0)) throw invalid_input("power_product_field: beta must be < 0");
  for (const auto& a : poles)
    if (!in_chart(m, a)) throw invalid_input("power_product_field: pole outside chart");

  auto eval = [m, poles, beta](const Point& x) {
    double logphi = 0.0;
    for (const auto& a : poles) {
      const double d = distance(m, a, x);
      if (d < kPoleHitTol) throw singular_point_error("power_product_field: x at a pole");
      logphi += std::log(d);
    }
    return std::exp(beta * logphi);
  };
  auto grad = [m, poles, beta, eval](const Point& x) {
    const double phi = eval(x);
    std::vector<double> acc(x.x.size(), 0.0);
    for (const auto& a : poles) {
      const double d = distance(m, a, x);
      const auto g = grad_distance(m, a, x);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += g.v[k] / d;
    }
    for (auto& c : acc) c *= beta * phi;
    return TangentVector{x, std::move(acc)};
  };
  return ScalarField{std::move(eval), std::move(grad), RegionSpec::whole_chart(),
                     "smooth away from the poles, blows up like d^beta at each pole"};
}

ScalarField minimizer_field(const ModelManifold& m, const Point& a1, const Point& a2,
                            const HardyParams& params) {
  if (!(params.p > 2.0 && params.p < params.N))
    throw invalid_input("minimizer_field: attained case requires 2 < p < N");
  const double beta = (params.p - params.N) / (2.0 * (params.p - 1.0));
  return power_product_field(m, {a1, a2}, beta);
}

ScalarField sharpness_field(const ModelManifold& m, const Point& a1, const Point& a2,
                            const HardyParams& params, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw invalid_input("sharpness_field: need 0 < eps < 1");
  const double sep = distance(m, a1, a2);
  if (!(sep > 4.0 * std::sqrt(eps)))
    throw invalid_input(
        "sharpness_field: eps too large, the 2 sqrt(eps) balls around the poles overlap");

  const double gamma = (params.p - params.N) / (2.0 * (params.p - 1.0));
  const double L = std::log(1.0 / eps);
  const double rin = eps * eps, rmid = eps, rout = std::sqrt(eps);
  std::vector<Point> poles{a1, a2};

  // value and radial derivative of the single-pole profile
  auto profile = [=](double d) -> double {
    if (d < rin || d > rout) return 0.0;
    const double w = d <= rmid ? std::log(d / rin) / L : 2.0 * std::log(rout / d) / L;
    return w * std::pow(d, gamma);
  };
  auto profile_deriv = [=](double d) -> double {
    if (d < rin || d > rout) return 0.0;
    if (d <= rmid) {
      const double w = std::log(d / rin) / L;
      return std::pow(d, gamma - 1.0) * (1.0 / L + gamma * w);
    }
    const double w = 2.0 * std::log(rout / d) / L;
    return std::pow(d, gamma - 1.0) * (-2.0 / L + gamma * w);
  };

  auto eval = [m, poles, profile](const Point& x) {
    double s = 0.0;
    for (const auto& a : poles) s += profile(distance(m, a, x));
    return s;
  };
  auto grad = [m, poles, profile_deriv](const Point& x) {
    std::vector<double> acc(x.x.size(), 0.0);
    for (const auto& a : poles) {
      const double d = distance(m, a, x);
      const double du = profile_deriv(d);
      if (du == 0.0) continue;
      const auto g = grad_distance(m, a, x);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += du * g.v[k];
    }
    return TangentVector{x, std::move(acc)};
  };
  auto support = RegionSpec::union_of(
      {RegionSpec::annulus(a1, rin, rout), RegionSpec::annulus(a2, rin, rout)});
  return ScalarField{std::move(eval), std::move(grad), std::move(support),
                     "Lipschitz, kinks on the rings d_i = eps"};
}

namespace {

std::vector<double> random_unit_tangent(const ModelManifold& m, const Point& x, Rng& rng) {
  if (m.kind() == ModelKind::SphereCap) {
    std::vector<double> g(x.x.size());
    double n2 = 0.0;
    do {
      for (auto& gi : g) gi = rng.normal();
      const double r = vec::dot(g, x.x);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= r * x.x[i];
      n2 = vec::norm2(g);
    } while (n2 < 1e-12);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& gi : g) gi *= inv;
    return g;
  }
  return rng.unit_vector(m.dim());
}

Point chart_origin(const ModelManifold& m) {
  if (m.kind() == ModelKind::SphereCap) return north_pole(m);
  return Point{std::vector<double>(static_cast<std::size_t>(m.dim()), 0.0)};
}

constexpr double kChartMargin = 0.05;

// Largest geodesic bump radius at `center` that keeps the support a chart
// margin away from the boundary (infinite on Euclidean space).
double max_bump_radius(const ModelManifold& m, const Point& center) {
  switch (m.kind()) {
    case ModelKind::Euclidean:
      return 1e30;
    case ModelKind::Hyperbolic: {
      const double R = m.curvature_scale();
      const Point o = chart_origin(m);
      const double dmax = std::log((2.0 - kChartMargin) / kChartMargin) / R;
      return dmax - distance(m, o, center);
    }
    case ModelKind::SphereCap: {
      const Point np = north_pole(m);
      return std::numbers::pi / 2.0 - kChartMargin - distance(m, np, center);
    }
  }
  return 0.0;
}

}  // namespace

std::vector<ScalarField> bump_family(const ModelManifold& m, std::uint64_t seed,
                                     int count, const RegionSpec& placement) {
  if (count < 1) throw invalid_input("bump_family: count must be >= 1");
  Point anchor = chart_origin(m);
  double reach = 1.0;
  if (!placement.is_whole_chart()) {
    if (placement.parts().size() != 1 ||
        !std::holds_alternative<BallRegion>(placement.parts().front()))
      throw invalid_input("bump_family: placement must be WholeChart or a single ball");
    const auto& b = std::get<BallRegion>(placement.parts().front());
    anchor = b.center;
    reach = b.radius;
  }
  if (max_bump_radius(m, anchor) < 0.1 * reach)
    throw invalid_input("bump_family: placement infeasible, too close to the chart boundary");

  std::vector<ScalarField> fields;
  fields.reserve(static_cast<std::size_t>(count));
  for (int f = 0; f < count; ++f) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(f)));
    const int nb = 1 + static_cast<int>(rng.uniform01() * 4.0) % 4;
    std::vector<Point> centers;
    std::vector<double> radii, weights;
    for (int b = 0; b < nb; ++b) {
      const double t = 0.8 * reach * std::pow(rng.uniform01(), 1.0 / m.dim());
      const auto dir = random_unit_tangent(m, anchor, rng);
      Point c = exp_map(m, anchor, TangentVector{anchor, dir}, t);
      double rho = (0.15 + 0.3 * rng.uniform01()) * reach;
      rho = std::min(rho, 0.95 * max_bump_radius(m, c));
      if (!(rho > 0.0)) throw invalid_input("bump_family: placement infeasible");
      centers.push_back(std::move(c));
      radii.push_back(rho);
      weights.push_back(0.5 + 1.5 * rng.uniform01());
    }

    auto eval = [m, centers, radii, weights](const Point& x) {
      double s = 0.0;
      for (std::size_t b = 0; b < centers.size(); ++b) {
        const double u = distance(m, centers[b], x) / radii[b];
        if (u >= 1.0) continue;
        s += weights[b] * std::exp(-1.0 / (1.0 - u * u));
      }
      return s;
    };
    auto grad = [m, centers, radii, weights](const Point& x) {
      std::vector<double> acc(x.x.size(), 0.0);
      for (std::size_t b = 0; b < centers.size(); ++b) {
        const double d = distance(m, centers[b], x);
        const double u = d / radii[b];
        if (u >= 1.0 - 1e-9 || d < kCoincidenceTol) continue;
        const double q = 1.0 - u * u;
        const double db = std::exp(-1.0 / q) * (-2.0 * u / (q * q));
        const auto g = grad_distance(m, centers[b], x);
        const double c = weights[b] * db / radii[b];
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += c * g.v[k];
      }
      return TangentVector{x, std::move(acc)};
    };

    std::vector<RegionSpec> balls;
    for (std::size_t b = 0; b < centers.size(); ++b)
      balls.push_back(RegionSpec::ball(centers[b], radii[b]));
    fields.push_back(ScalarField{std::move(eval), std::move(grad),
                                 RegionSpec::union_of(std::move(balls)),
                                 "C-infinity, compactly supported"});
  }
  return fields;
}

double default_fd_step(const Point& x) { return 1e-5 * std::max(1.0, vec::norm(x.x)); }

FdGradient fd_gradient(const ModelManifold& m, const ScalarField& field, const Point& x,
                       double h) {
  if (!(h > 0.0)) throw invalid_input("fd_gradient: h must be > 0");
  if (!in_chart(m, x)) throw invalid_input("fd_gradient: x outside chart");
  FdGradient out;

  if (m.kind() == ModelKind::SphereCap) {
    // central differences along exact geodesics in an orthonormal frame
    const auto frame = tangent_onb(m, x);
    std::vector<double> acc(x.x.size(), 0.0);
    const double f0 = field.evaluate(x);
    for (const auto& e : frame) {
      TangentVector eneg{x, e.v};
      for (auto& c : eneg.v) c = -c;
      const Point xp = exp_map(m, x, e, h);
      const Point xm = exp_map(m, x, eneg, h);
      double deriv;
      if (in_chart(m, xp) && in_chart(m, xm)) {
        deriv = (field.evaluate(xp) - field.evaluate(xm)) / (2.0 * h);
      } else if (in_chart(m, xp)) {
        deriv = (field.evaluate(xp) - f0) / h;
        out.reduced_order = true;
      } else {
        deriv = (f0 - field.evaluate(xm)) / h;
        out.reduced_order = true;
      }
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += deriv * e.v[k];
    }
    out.value = TangentVector{x, std::move(acc)};
    return out;
  }

  // chart central differences, then raise the index (conformal metric)
  const int n = m.chart_dim();
  std::vector<double> cov(static_cast<std::size_t>(n), 0.0);
  const double f0 = field.evaluate(x);
  for (int i = 0; i < n; ++i) {
    Point xp = x, xm = x;
    xp.x[static_cast<std::size_t>(i)] += h;
    xm.x[static_cast<std::size_t>(i)] -= h;
    const bool okp = in_chart(m, xp), okm = in_chart(m, xm);
    double deriv;
    if (okp && okm) {
      deriv = (field.evaluate(xp) - field.evaluate(xm)) / (2.0 * h);
    } else if (okp) {
      deriv = (field.evaluate(xp) - f0) / h;
      out.reduced_order = true;
    } else if (okm) {
      deriv = (f0 - field.evaluate(xm)) / h;
      out.reduced_order = true;
    } else {
      throw invalid_input("fd_gradient: stencil entirely outside chart");
    }
    cov[static_cast<std::size_t>(i)] = deriv;
  }
  if (m.kind() == ModelKind::Hyperbolic) {
    const double rho = (2.0 / m.curvature_scale()) / (1.0 - vec::norm2(x.x));
    for (auto& c : cov) c /= rho * rho;
  }
  out.value = TangentVector{x, std::move(cov)};
  return out;
}

}  // namespace hardy
