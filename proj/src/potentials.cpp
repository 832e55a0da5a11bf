#include "hardy/potentials.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hardy/errors.hpp"

namespace hardy {

namespace {

constexpr double kDegenerateVTol = 1e-12;

// |v|^e from |v|^2; the degenerate-set guard lives in the callers.
double pow_v(double v2, double e) {
  if (e == 0.0) return 1.0;
  return std::pow(v2, 0.5 * e);
}

void check_degenerate(double v2, double p) {
  if (p < 4.0 && p != 2.0 && std::sqrt(v2) < kDegenerateVTol)
    throw degenerate_point_error("potential: |v| ~ 0 with p in (1,4), p != 2");
}

struct BipolarState {
  double d1, d2, G, v2;
  double sr1, sr2;  // s_c'(d_i)/s_c(d_i)
};

BipolarState bipolar_state(const ModelManifold& m, const Point& a1, const Point& a2,
                           const Point& x) {
  BipolarState st;
  st.d1 = distance(m, a1, x);
  st.d2 = distance(m, a2, x);
  if (st.d1 < kPoleHitTol || st.d2 < kPoleHitTol)
    throw singular_point_error("potential: x at a pole");
  const auto g1 = grad_distance(m, a1, x);
  const auto g2 = grad_distance(m, a2, x);
  double G = metric_inner(m, x, g1, g2);
  st.G = std::clamp(G, -1.0, 1.0);
  st.v2 = std::max(0.0, 1.0 / (st.d1 * st.d1) + 1.0 / (st.d2 * st.d2) +
                            2.0 * st.G / (st.d1 * st.d2));
  const double c = m.curvature();
  st.sr1 = s_ratio(c, st.d1);
  st.sr2 = s_ratio(c, st.d2);
  return st;
}

}  // namespace

HardyParams make_params(double p, int N, int n) {
  if (!(p > 1.0 && p < static_cast<double>(N)))
    throw invalid_input("make_params: need 1 < p < N");
  if (n < 2) throw invalid_input("make_params: need n >= 2");
  HardyParams hp;
  hp.p = p;
  hp.N = N;
  hp.n = n;
  const double q = p - 1.0;
  hp.C1 = std::pow(N - p, p) / (std::pow(n, p) * std::pow(q, q));
  hp.C2 = std::pow(N - p, q) / (std::pow(n, q) * std::pow(q, q));
  hp.beta = (p - N) / (n * q);
  return hp;
}

PotentialTerms multipolar_potential_terms(const ModelManifold& m, const PoleSet& poles,
                                          const HardyParams& params, const Point& x) {
  const int n = poles.size();
  const double p = params.p;
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d[static_cast<std::size_t>(i)] = distance(m, poles.pole(i), x);
    if (d[static_cast<std::size_t>(i)] < kPoleHitTol)
      throw singular_point_error("multipolar_potential: x at pole " + std::to_string(i));
  }
  const GMatrix G = g_matrix(m, poles, x);
  auto di = [&](int i) { return d[static_cast<std::size_t>(i)]; };

  double v2 = 0.0;
  for (int i = 0; i < n; ++i) v2 += 1.0 / (di(i) * di(i));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v2 += 2.0 * G(i, j) / (di(i) * di(j));
  v2 = std::max(0.0, v2);
  check_degenerate(v2, p);
  const double vpm2 = pow_v(v2, p - 2.0);

  PotentialTerms t;
  double lead = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      lead += 1.0 / (di(i) * di(i)) + 1.0 / (di(j) * di(j)) -
              2.0 * G(i, j) / (di(i) * di(j));
  t.leading = params.C1 * lead * vpm2;

  const double centering = params.N - p + 1.0;
  double lap = 0.0;
  const double c = m.curvature();
  for (int i = 0; i < n; ++i) {
    const double dlap = di(i) * (params.N - 1) * s_ratio(c, di(i));
    lap += (dlap - centering) / (di(i) * di(i));
  }
  t.laplacian = params.C2 * lap * vpm2;

  if (p != 2.0) {
    const double vpm4 = pow_v(v2, p - 4.0);
    double cross = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          cross += G(i, j) * G(i, k) / (di(i) * di(i) * di(j) * di(k));
    t.cross = -(p - 2.0) * params.C2 * cross * vpm4;

    // Hess^{d_i}(X, Y) = s_c'/s_c (d_i) (g(X,Y) - g(X, grad d_i) g(Y, grad d_i))
    double hess = 0.0;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const double hij = s_ratio(c, di(i)) * (G(k, j) - G(k, i) * G(i, j));
          const double hji = s_ratio(c, di(j)) * (G(k, i) - G(k, j) * G(i, j));
          hess += (hij + hji) / (di(i) * di(j) * di(k));
        }
    t.hessian = (p - 2.0) * params.C2 * hess * vpm4;
  }
  return t;
}

double multipolar_potential(const ModelManifold& m, const PoleSet& poles,
                            const HardyParams& params, const Point& x) {
  return multipolar_potential_terms(m, poles, params, x).total();
}

double leading_potential(const ModelManifold& m, const PoleSet& poles,
                         const HardyParams& params, const Point& x) {
  const int n = poles.size();
  const double p = params.p;
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d[static_cast<std::size_t>(i)] = distance(m, poles.pole(i), x);
    if (d[static_cast<std::size_t>(i)] < kPoleHitTol)
      throw singular_point_error("leading_potential: x at pole");
  }
  const GMatrix G = g_matrix(m, poles, x);
  auto di = [&](int i) { return d[static_cast<std::size_t>(i)]; };
  double v2 = 0.0;
  for (int i = 0; i < n; ++i) v2 += 1.0 / (di(i) * di(i));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v2 += 2.0 * G(i, j) / (di(i) * di(j));
  v2 = std::max(0.0, v2);
  check_degenerate(v2, p);
  double lead = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      lead += 1.0 / (di(i) * di(i)) + 1.0 / (di(j) * di(j)) -
              2.0 * G(i, j) / (di(i) * di(j));
  return lead * pow_v(v2, p - 2.0);
}

PotentialTerms bipolar_potential_terms(const ModelManifold& m, const Point& a1,
                                       const Point& a2, const HardyParams& params,
                                       const Point& x) {
  const double p = params.p;
  const auto st = bipolar_state(m, a1, a2, x);
  check_degenerate(st.v2, p);
  const double vpm2 = pow_v(st.v2, p - 2.0);
  const double d1 = st.d1, d2 = st.d2;

  PotentialTerms t;
  const double lead =
      1.0 / (d1 * d1) + 1.0 / (d2 * d2) - 2.0 * st.G / (d1 * d2);
  t.leading = params.C1 * lead * vpm2;

  const double Nm1 = params.N - 1.0;
  t.laplacian = params.C2 * Nm1 *
                ((d1 * st.sr1 - 1.0) / (d1 * d1) + (d2 * st.sr2 - 1.0) / (d2 * d2)) *
                vpm2;

  if (p != 2.0) {
    const double vpm4 = pow_v(st.v2, p - 4.0);
    const double oneMinusG2 = std::max(0.0, 1.0 - st.G * st.G);
    t.cross = 2.0 * (p - 2.0) * params.C2 * oneMinusG2 / (d1 * d1 * d2 * d2) * vpm4;
    t.hessian = (p - 2.0) * params.C2 * oneMinusG2 *
                (st.sr1 / (d1 * d2 * d2) + st.sr2 / (d1 * d1 * d2)) * vpm4;
  }
  return t;
}

double bipolar_potential(const ModelManifold& m, const Point& a1, const Point& a2,
                         const HardyParams& params, const Point& x) {
  return bipolar_potential_terms(m, a1, a2, params, x).total();
}

double euclid_multipolar_p2(std::span<const Point> poles, int N, const Point& x) {
  const int n = static_cast<int>(poles.size());
  if (n < 2) throw invalid_input("euclid_multipolar_p2: need n >= 2");
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d2[static_cast<std::size_t>(i)] =
        vec::norm2(vec::sub(x.x, poles[static_cast<std::size_t>(i)].x));
    if (d2[static_cast<std::size_t>(i)] < kPoleHitTol * kPoleHitTol)
      throw singular_point_error("euclid_multipolar_p2: x at pole");
  }
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double aij2 = vec::norm2(vec::sub(poles[static_cast<std::size_t>(i)].x,
                                              poles[static_cast<std::size_t>(j)].x));
      s += aij2 / (d2[static_cast<std::size_t>(i)] * d2[static_cast<std::size_t>(j)]);
    }
  const double cN = static_cast<double>(N - 2);
  return cN * cN / (static_cast<double>(n) * n) * s;
}

double euclid_bipolar_lp(const Point& a1, const Point& a2, int N, double p,
                         const Point& x) {
  if (!(p >= 2.0 && p < static_cast<double>(N)))
    throw invalid_input("euclid_bipolar_lp: need 2 <= p < N");
  const auto r1 = vec::sub(x.x, a1.x);
  const auto r2 = vec::sub(x.x, a2.x);
  const double s1 = vec::norm(r1), s2 = vec::norm(r2);
  if (s1 < kPoleHitTol || s2 < kPoleHitTol)
    throw singular_point_error("euclid_bipolar_lp: x at pole");
  std::vector<double> mid(x.x.size());
  for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (a1.x[i] + a2.x[i]);
  const double w = vec::norm(vec::sub(x.x, mid));
  const double ratio = (N - p) / (p - 1.0);
  const double a12sq = vec::norm2(vec::sub(a1.x, a2.x));
  const double denom = std::pow(s1, p) * std::pow(s2, p);
  double val = 0.25 * (p - 1.0) * std::pow(ratio, p) * a12sq *
               std::pow(w, p - 2.0) / denom;
  if (p != 2.0) {
    if (p < 4.0 && w < kDegenerateVTol)
      throw degenerate_point_error("euclid_bipolar_lp: x at the midpoint with p < 4");
    const double dotr = vec::dot(r1, r2);
    val += 0.5 * (p - 2.0) * std::pow(ratio, p - 1.0) * std::pow(w, p - 4.0) / denom *
           (s1 * s1 * s2 * s2 - dotr * dotr);
  }
  return val;
}

double coth_gap_bound(double t) {
  if (t < 0.0) throw invalid_input("coth_gap_bound: t must be >= 0");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double tcoth_m1;
  if (t < 1e-4) {
    const double t2 = t * t;
    tcoth_m1 = t2 / 3.0 - t2 * t2 / 45.0;
  } else {
    tcoth_m1 = t / std::tanh(t) - 1.0;
  }
  return tcoth_m1 - 3.0 * t * t / (pi2 + t * t);
}

double hemisphere_constant(double delta) {
  if (!(delta >= 0.0 && delta < std::numbers::pi / 2.0))
    throw invalid_input("hemisphere_constant: need 0 <= delta < pi/2");
  const double pi = std::numbers::pi;
  const double t = delta + pi / 2.0;
  return (7.0 * pi * pi - 3.0 * t * t) / (pi * pi * (t * t - pi * pi));
}

double cot_mittag_leffler(double t, long terms) {
  if (!(t > 0.0 && t < std::numbers::pi))
    throw invalid_input("cot_mittag_leffler: need t in (0, pi)");
  if (terms < 1) throw invalid_input("cot_mittag_leffler: need K >= 1");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double t2 = t * t;
  double sum = 0.0;
  for (long k = terms; k >= 1; --k)  // ascending magnitude
    sum += 1.0 / (t2 - pi2 * static_cast<double>(k) * static_cast<double>(k));
  return 1.0 / t + 2.0 * t * sum;
}

double hyperbolic_lower_bound(const ModelManifold& m, const Point& a1, const Point& a2,
                              const HardyParams& params, const Point& x) {
  if (m.kind() != ModelKind::Hyperbolic)
    throw invalid_input("hyperbolic_lower_bound: hyperbolic model only");
  const double p = params.p;
  const auto st = bipolar_state(m, a1, a2, x);
  check_degenerate(st.v2, p);
  const double vpm2 = pow_v(st.v2, p - 2.0);
  const double d1 = st.d1, d2 = st.d2;
  const double R2 = m.curvature_scale() * m.curvature_scale();
  const double pi2 = std::numbers::pi * std::numbers::pi;

  const double lead =
      1.0 / (d1 * d1) + 1.0 / (d2 * d2) - 2.0 * st.G / (d1 * d2);
  double val = params.C1 * lead * vpm2;
  const double rem1 = 3.0 * R2 / (pi2 + R2 * d1 * d1);
  const double rem2 = 3.0 * R2 / (pi2 + R2 * d2 * d2);
  val += (params.N - 1.0) * params.C2 * (rem1 + rem2) * vpm2;
  if (p != 2.0) {
    const double vpm4 = pow_v(st.v2, p - 4.0);
    const double oneMinusG2 = std::max(0.0, 1.0 - st.G * st.G);
    val += (p - 2.0) * params.C2 * oneMinusG2 / (d1 * d1 * d2 * d2) *
           ((2.0 + d1 * d1 * rem1) + (2.0 + d2 * d2 * rem2)) * vpm4;
  }
  return val;
}

double sphere_lower_bound(const ModelManifold& m, const Point& a1, const Point& a2,
                          const HardyParams& params, const Point& x, double delta) {
  if (m.kind() != ModelKind::SphereCap)
    throw invalid_input("sphere_lower_bound: sphere model only");
  if (!in_chart(m, x))
    throw invalid_input("sphere_lower_bound: x outside the open hemisphere");
  const double p = params.p;
  const double cd = hemisphere_constant(delta);
  const auto st = bipolar_state(m, a1, a2, x);
  check_degenerate(st.v2, p);
  const double vpm2 = pow_v(st.v2, p - 2.0);
  const double d1 = st.d1, d2 = st.d2;

  const double lead =
      1.0 / (d1 * d1) + 1.0 / (d2 * d2) - 2.0 * st.G / (d1 * d2);
  double val = params.C1 * lead * vpm2;
  val += (params.N - 1.0) * params.C2 * cd * vpm2;
  if (p != 2.0) {
    const double vpm4 = pow_v(st.v2, p - 4.0);
    const double oneMinusG2 = std::max(0.0, 1.0 - st.G * st.G);
    val += (p - 2.0) * params.C2 * (4.0 + cd * (d1 * d1 + d2 * d2)) * oneMinusG2 /
           (d1 * d1 * d2 * d2) * vpm4;
  }
  return val;
}

}  // namespace hardy
