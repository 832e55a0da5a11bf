#include "hardy/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hardy/errors.hpp"
#include "hardy/rng.hpp"

namespace hardy {

double unit_sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

namespace {

constexpr double kCenterMatchTol = 1e-12;
constexpr double kHypChartTrunc = 0.995;  // chart truncation radius, WholeChart bulk

enum class RadialLaw {
  Power,      // density ∝ r^{N-1-q} on [r0, r1]
  LogUniform, // density ∝ 1/r on [r0, r1], r0 > 0
  Lomax,      // density s0/(s0+r)^2 on (0, inf); Euclidean whole space
  ExpGrowth,  // density ∝ e^{(N-1)R r} on [0, r1]; hyperbolic truncated bulk
  Hemisphere  // uniform on the upper hemisphere (no radial parameters)
};

struct Stratum {
  std::string label;
  RadialLaw law = RadialLaw::Power;
  Point center;
  double r0 = 0.0, r1 = 0.0;
  double q = 0.0;    // Power
  double s0 = 1.0;   // Lomax scale
  bool exclude_pole_balls = false;
  bool overlap_correct = false;
  long samples = 0;
};

Point chart_centroid(const ModelManifold& m, const PoleSet& poles) {
  if (m.kind() == ModelKind::SphereCap) {
    std::vector<double> c(static_cast<std::size_t>(m.chart_dim()), 0.0);
    for (const auto& p : poles.poles())
      for (std::size_t k = 0; k < c.size(); ++k) c[k] += p.x[k];
    const double n = vec::norm(c);
    if (n < 1e-12 || c.back() <= 0.0) return north_pole(m);
    for (auto& ck : c) ck /= n;
    return Point{std::move(c)};
  }
  std::vector<double> c(static_cast<std::size_t>(m.chart_dim()), 0.0);
  for (const auto& p : poles.poles())
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += p.x[k];
  for (auto& ck : c) ck /= poles.size();
  return Point{std::move(c)};
}

double auto_pole_ball_radius(const ModelManifold& m, const PoleSet& poles) {
  double rb = 0.25 * poles.min_separation();
  if (m.kind() == ModelKind::SphereCap) {
    const Point np = north_pole(m);
    for (const auto& a : poles.poles())
      rb = std::min(rb, 0.25 * (std::numbers::pi / 2.0 - distance(m, np, a)));
  }
  return rb;
}

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

struct Draw {
  Point x;
  double weight = 0.0;  // dv / sampling density; 0 marks "outside domain"
};

Draw draw_sample(const ModelManifold& m, const Stratum& st, Rng& rng) {
  const int N = m.dim();
  const double c = m.curvature();
  const double area = unit_sphere_area(N);
  switch (st.law) {
    case RadialLaw::Power: {
      const double alpha = N - st.q;
      const double z0 = std::pow(st.r0, alpha), z1 = std::pow(st.r1, alpha);
      const double u = rng.uniform01();
      const double r = std::pow(z0 + u * (z1 - z0), 1.0 / alpha);
      const double pdf = alpha * std::pow(r, alpha - 1.0) / (z1 - z0);
      const auto dir = random_unit_tangent(m, st.center, rng);
      Point x = exp_map(m, st.center, TangentVector{st.center, dir}, r);
      const double w = std::pow(s_profile(c, r), N - 1) * area / pdf;
      return Draw{std::move(x), w};
    }
    case RadialLaw::LogUniform: {
      const double lr = std::log(st.r1 / st.r0);
      const double r = st.r0 * std::exp(rng.uniform01() * lr);
      const double pdf = 1.0 / (r * lr);
      const auto dir = random_unit_tangent(m, st.center, rng);
      Point x = exp_map(m, st.center, TangentVector{st.center, dir}, r);
      const double w = std::pow(s_profile(c, r), N - 1) * area / pdf;
      return Draw{std::move(x), w};
    }
    case RadialLaw::Lomax: {
      const double u = rng.uniform01();
      const double r = st.s0 * u / (1.0 - u);
      const double pdf = st.s0 / ((st.s0 + r) * (st.s0 + r));
      const auto dir = random_unit_tangent(m, st.center, rng);
      Point x = exp_map(m, st.center, TangentVector{st.center, dir}, r);
      const double w = std::pow(r, N - 1) * area / pdf;
      return Draw{std::move(x), w};
    }
    case RadialLaw::ExpGrowth: {
      const double lam = (N - 1) * m.curvature_scale();
      const double z = std::expm1(lam * st.r1);
      const double r = std::log1p(rng.uniform01() * z) / lam;
      const double pdf = lam * std::exp(lam * r) / z;
      const auto dir = random_unit_tangent(m, st.center, rng);
      Point x = exp_map(m, st.center, TangentVector{st.center, dir}, r);
      const double w = std::pow(s_profile(c, r), N - 1) * area / pdf;
      return Draw{std::move(x), w};
    }
    case RadialLaw::Hemisphere: {
      std::vector<double> g(static_cast<std::size_t>(N) + 1);
      double n2 = 0.0;
      do {
        for (auto& gi : g) gi = rng.normal();
        n2 = vec::norm2(g);
      } while (n2 < 1e-12);
      const double inv = 1.0 / std::sqrt(n2);
      for (auto& gi : g) gi *= inv;
      g.back() = std::abs(g.back());
      const double w = 0.5 * unit_sphere_area(N + 1);
      return Draw{Point{std::move(g)}, w};
    }
  }
  throw numerical_error("draw_sample: unreachable");
}

std::vector<Stratum> build_strata(const ModelManifold& m, const RegionSpec& support,
                                  const PoleSet& poles, const QuadConfig& cfg, double rb,
                                  bool* tail_truncated) {
  std::vector<Stratum> strata;
  const int n = poles.size();

  // (a) importance strata inside the pole balls, radially intersected with
  // the support when the support is centered on the pole itself
  for (int i = 0; i < n; ++i) {
    const Point& a = poles.pole(i);
    double r0 = 0.0, r1 = rb;
    if (!support.is_whole_chart()) {
      bool foreign_overlap = false, own = false;
      double own_r0 = 1e300, own_r1 = -1.0;
      for (const auto& part : support.parts()) {
        const Point* c = nullptr;
        double pr0 = 0.0, pr1 = 0.0;
        if (const auto* b = std::get_if<BallRegion>(&part)) {
          c = &b->center;
          pr1 = b->radius;
        } else if (const auto* an = std::get_if<AnnulusRegion>(&part)) {
          c = &an->center;
          pr0 = an->r0;
          pr1 = an->r1;
        } else {
          continue;
        }
        const double dca = distance(m, *c, a);
        if (dca < kCenterMatchTol) {
          own = true;
          own_r0 = std::min(own_r0, pr0);
          own_r1 = std::max(own_r1, pr1);
        } else if (dca < pr1 + rb && dca + rb > pr0) {
          foreign_overlap = true;
        }
      }
      if (foreign_overlap) {
        r0 = 0.0;
        r1 = rb;
      } else if (own) {
        r0 = own_r0;
        r1 = std::min(rb, own_r1);
      } else {
        continue;  // support has no mass in this pole ball
      }
      if (!(r0 < r1)) continue;
    }
    Stratum st;
    st.label = "pole_ball_" + std::to_string(i);
    st.law = RadialLaw::Power;
    st.center = a;
    st.r0 = r0;
    st.r1 = r1;
    st.q = cfg.importance_exponent;
    strata.push_back(std::move(st));
  }

  // (b) bulk over the remaining support
  if (support.is_whole_chart()) {
    Stratum st;
    st.label = "bulk_whole_chart";
    st.center = chart_centroid(m, poles);
    st.exclude_pole_balls = true;
    switch (m.kind()) {
      case ModelKind::Euclidean: {
        st.law = RadialLaw::Lomax;
        double diam = 0.0;
        for (int i = 0; i < n; ++i)
          diam = std::max(diam, distance(m, st.center, poles.pole(i)));
        st.s0 = std::max(1.0, 2.0 * diam);
        break;
      }
      case ModelKind::Hyperbolic: {
        st.law = RadialLaw::ExpGrowth;
        const double R = m.curvature_scale();
        const double shell =
            std::log((1.0 + kHypChartTrunc) / (1.0 - kHypChartTrunc)) / R;
        const Point origin{std::vector<double>(static_cast<std::size_t>(m.dim()), 0.0)};
        st.r1 = shell - distance(m, origin, st.center);
        *tail_truncated = true;  // WholeChart support cannot exclude the shell
        break;
      }
      case ModelKind::SphereCap:
        st.law = RadialLaw::Hemisphere;
        break;
    }
    strata.push_back(std::move(st));
  } else {
    int part_id = 0;
    for (const auto& part : support.parts()) {
      const Point* c = nullptr;
      double pr0 = 0.0, pr1 = 0.0;
      if (const auto* b = std::get_if<BallRegion>(&part)) {
        c = &b->center;
        pr1 = b->radius;
      } else if (const auto* an = std::get_if<AnnulusRegion>(&part)) {
        c = &an->center;
        pr0 = an->r0;
        pr1 = an->r1;
      } else {
        ++part_id;
        continue;
      }
      bool own_pole = false;
      for (int i = 0; i < n; ++i)
        if (distance(m, *c, poles.pole(i)) < kCenterMatchTol) own_pole = true;
      double r0 = pr0, r1 = pr1;
      if (own_pole) r0 = std::max(r0, rb);  // the pole stratum covers [pr0, rb]
      if (r0 < r1) {
        Stratum st;
        st.label = "bulk_part_" + std::to_string(part_id);
        st.center = *c;
        st.r0 = r0;
        st.r1 = r1;
        st.exclude_pole_balls = true;
        st.overlap_correct = true;
        if (r0 > 0.0) {
          st.law = RadialLaw::LogUniform;
        } else {
          st.law = RadialLaw::Power;
          st.q = 0.0;
        }
        strata.push_back(std::move(st));
      }
      ++part_id;
    }
  }
  return strata;
}

void allocate_samples(std::vector<Stratum>& strata, long total) {
  long n_pole = 0, n_bulk = 0;
  for (const auto& st : strata) (st.exclude_pole_balls ? n_bulk : n_pole) += 1;
  const long min_each = 16;
  long pole_total = 0, bulk_total = 0;
  if (n_pole > 0 && n_bulk > 0) {
    bulk_total = total / 2;
    pole_total = total - bulk_total;
  } else if (n_pole > 0) {
    pole_total = total;
  } else {
    bulk_total = total;
  }
  for (auto& st : strata) {
    if (st.exclude_pole_balls)
      st.samples = std::max(min_each, bulk_total / std::max<long>(1, n_bulk));
    else
      st.samples = std::max(min_each, pole_total / std::max<long>(1, n_pole));
  }
}

}  // namespace

MultiEstimate integrate_multi(const ModelManifold& m, const std::vector<Integrand>& fs,
                              const RegionSpec& fsupport, const PoleSet& poles,
                              const QuadConfig& cfg) {
  const int K = static_cast<int>(fs.size());
  if (K == 0) throw invalid_input("integrate_multi: no integrands");
  if (cfg.total_samples <= 0) throw invalid_input("integrate_multi: total_samples must be > 0");
  QuadConfig rcfg = cfg;
  if (rcfg.importance_exponent <= 0.0) rcfg.importance_exponent = 2.0;
  if (!(rcfg.importance_exponent < m.dim()))
    throw invalid_input("integrate_multi: importance_exponent must be < N");

  double rb = rcfg.pole_ball_radius;
  if (rb <= 0.0) rb = auto_pole_ball_radius(m, poles);
  if (!(rb > 0.0 && rb < 0.5 * poles.min_separation()))
    throw invalid_input("integrate_multi: pole_ball_radius outside (0, min separation / 2)");

  bool tail_truncated = false;
  auto strata = build_strata(m, fsupport, poles, rcfg, rb, &tail_truncated);
  if (strata.empty()) throw invalid_input("integrate_multi: sampler infeasible (empty strata)");
  allocate_samples(strata, cfg.total_samples);

  MultiEstimate out;
  out.components.assign(static_cast<std::size_t>(K), QuadratureEstimate{});
  out.covariance.assign(static_cast<std::size_t>(K) * K, 0.0);
  for (auto& c : out.components) {
    c.seed = cfg.seed;
    c.tail_truncated = tail_truncated;
  }

  long resamples_left = cfg.max_resamples;
  std::vector<double> y(static_cast<std::size_t>(K));
  std::vector<double> sum(static_cast<std::size_t>(K));
  std::vector<double> sumsq(static_cast<std::size_t>(K) * K);

  for (std::size_t si = 0; si < strata.size(); ++si) {
    const Stratum& st = strata[si];
    Rng rng(split_seed(cfg.seed, si));
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(sumsq.begin(), sumsq.end(), 0.0);
    const long n = st.samples;

    for (long it = 0; it < n; ++it) {
      bool accepted = false;
      while (!accepted) {
        Draw d = draw_sample(m, st, rng);
        std::fill(y.begin(), y.end(), 0.0);
        bool inside = in_chart(m, d.x);
        if (inside && st.exclude_pole_balls) {
          for (int i = 0; i < poles.size() && inside; ++i)
            if (distance(m, poles.pole(i), d.x) < rb) inside = false;
        }
        double mult = 1.0;
        if (inside) {
          if (st.overlap_correct) {
            const int mm = fsupport.multiplicity(m, d.x);
            if (mm == 0)
              inside = false;
            else
              mult = 1.0 / mm;
          } else if (!fsupport.contains(m, d.x)) {
            inside = false;
          }
        }
        if (inside) {
          try {
            for (int k = 0; k < K; ++k)
              y[static_cast<std::size_t>(k)] =
                  fs[static_cast<std::size_t>(k)](d.x) * d.weight * mult;
          } catch (const degenerate_point_error&) {
            if (--resamples_left < 0)
              throw numerical_error("integrate_multi: resample budget exhausted");
            continue;
          } catch (const singular_point_error&) {
            if (--resamples_left < 0)
              throw numerical_error("integrate_multi: resample budget exhausted");
            continue;
          }
        }
        accepted = true;
      }
      for (int k = 0; k < K; ++k) {
        sum[static_cast<std::size_t>(k)] += y[static_cast<std::size_t>(k)];
        for (int l = k; l < K; ++l)
          sumsq[static_cast<std::size_t>(k) * K + static_cast<std::size_t>(l)] +=
              y[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(l)];
      }
    }

    for (int k = 0; k < K; ++k) {
      const double mk = sum[static_cast<std::size_t>(k)] / n;
      out.components[static_cast<std::size_t>(k)].value += mk;
      out.components[static_cast<std::size_t>(k)].samples += n;
      double var_kk = 0.0;
      for (int l = k; l < K; ++l) {
        const double ml = sum[static_cast<std::size_t>(l)] / n;
        double cov = 0.0;
        if (n > 1) {
          cov = (sumsq[static_cast<std::size_t>(k) * K + static_cast<std::size_t>(l)] -
                 n * mk * ml) /
                (static_cast<double>(n - 1) * n);
        }
        out.covariance[static_cast<std::size_t>(k) * K + static_cast<std::size_t>(l)] += cov;
        if (l != k)
          out.covariance[static_cast<std::size_t>(l) * K + static_cast<std::size_t>(k)] += cov;
        if (l == k) var_kk = cov;
      }
      out.components[static_cast<std::size_t>(k)].strata.push_back(StratumReport{
          st.label, mk, std::sqrt(std::max(0.0, var_kk)), n});
    }
  }

  for (int k = 0; k < K; ++k)
    out.components[static_cast<std::size_t>(k)].std_error = std::sqrt(std::max(
        0.0, out.covariance[static_cast<std::size_t>(k) * K + static_cast<std::size_t>(k)]));
  return out;
}

QuadratureEstimate integrate(const ModelManifold& m, const Integrand& f,
                             const RegionSpec& support, const PoleSet& poles,
                             const QuadConfig& cfg) {
  auto multi = integrate_multi(m, {f}, support, poles, cfg);
  return std::move(multi.components.front());
}

namespace {

double adaptive_simpson(const std::function<double(double)>& g, double a, double fa,
                        double b, double fb, double fm, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw numerical_error("radial_integrate_1d: subdivision budget exhausted");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(g, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(g, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double radial_integrate_1d(double curvature, int N, const std::function<double(double)>& f,
                           double r0, double r1, double tol) {
  if (!(r0 >= 0.0 && r0 < r1)) throw invalid_input("radial_integrate_1d: need 0 <= r0 < r1");
  if (!(tol > 0.0)) throw invalid_input("radial_integrate_1d: tol must be > 0");
  auto g = [&](double r) {
    const double v = f(r) * std::pow(s_profile(curvature, r), N - 1);
    return std::isfinite(v) ? v : 0.0;
  };
  // coarse scale estimate for the absolute tolerance
  const int coarse = 256;
  double scale = 0.0;
  const double h = (r1 - r0) / coarse;
  for (int i = 0; i < coarse; ++i) scale += std::abs(g(r0 + (i + 0.5) * h)) * h;
  scale = std::max(scale, 1e-300);

  double total = 0.0;
  const int panels = 16;
  for (int i = 0; i < panels; ++i) {
    const double a = r0 + (r1 - r0) * i / panels;
    const double b = r0 + (r1 - r0) * (i + 1) / panels;
    const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += adaptive_simpson(g, a, fa, b, fb, fm, whole, tol * scale / panels, 52);
  }
  return total;
}

}  // namespace hardy
