#include "hardy/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hardy/errors.hpp"
#include "hardy/rng.hpp"

namespace hardy {

const char* potential_tag_name(PotentialTag tag) {
  switch (tag) {
    case PotentialTag::Full: return "full";
    case PotentialTag::LeadingOnly: return "leading";
    case PotentialTag::HyperbolicLower: return "ch-lower";
    case PotentialTag::SphereLower: return "sphere-lower";
  }
  return "?";
}

namespace {

QuadConfig resolve(const QuadConfig& cfg, const HardyParams& params) {
  QuadConfig r = cfg;
  if (r.importance_exponent <= 0.0) r.importance_exponent = params.p;
  return r;
}

Integrand potential_integrand(const ModelManifold& m, const PoleSet& poles,
                              const HardyParams& params, PotentialTag tag,
                              const ScalarField& u) {
  const bool bipolar = poles.size() == 2;
  if ((tag == PotentialTag::HyperbolicLower || tag == PotentialTag::SphereLower) && !bipolar)
    throw invalid_input("rayleigh: lower-bound tags require exactly two poles");
  if ((tag == PotentialTag::HyperbolicLower || tag == PotentialTag::SphereLower) &&
      params.p < 2.0)
    throw invalid_input("rayleigh: lower-bound tags require p >= 2");
  const double delta = m.kind() == ModelKind::SphereCap ? poles.delta() : 0.0;
  return [=, &m](const Point& x) {
    const double u0 = u.evaluate(x);
    if (u0 == 0.0) return 0.0;
    double pot = 0.0;
    switch (tag) {
      case PotentialTag::Full:
        pot = bipolar ? bipolar_potential(m, poles.pole(0), poles.pole(1), params, x)
                      : multipolar_potential(m, poles, params, x);
        break;
      case PotentialTag::LeadingOnly:
        pot = params.C1 * leading_potential(m, poles, params, x);
        break;
      case PotentialTag::HyperbolicLower:
        pot = hyperbolic_lower_bound(m, poles.pole(0), poles.pole(1), params, x);
        break;
      case PotentialTag::SphereLower:
        pot = sphere_lower_bound(m, poles.pole(0), poles.pole(1), params, x, delta);
        break;
    }
    return pot * std::pow(std::abs(u0), params.p);
  };
}

Integrand gradient_energy_integrand(const ModelManifold& m, const HardyParams& params,
                                    const ScalarField& u) {
  return [=, &m](const Point& x) {
    const double g = metric_norm(m, x, u.gradient(x));
    return g == 0.0 ? 0.0 : std::pow(g, params.p);
  };
}

// |v|^{p-2} G12/(d1 d2) |u|^p, the cross part of the leading denominator.
Integrand cross_term_integrand(const ModelManifold& m, const PoleSet& poles,
                               const HardyParams& params, const ScalarField& u) {
  return [=, &m](const Point& x) {
    const double u0 = u.evaluate(x);
    if (u0 == 0.0) return 0.0;
    const double d1 = distance(m, poles.pole(0), x);
    const double d2 = distance(m, poles.pole(1), x);
    if (d1 < kPoleHitTol || d2 < kPoleHitTol)
      throw singular_point_error("cross term: x at a pole");
    const auto g1 = grad_distance(m, poles.pole(0), x);
    const auto g2 = grad_distance(m, poles.pole(1), x);
    const double G = std::clamp(metric_inner(m, x, g1, g2), -1.0, 1.0);
    const double v2 =
        std::max(0.0, 1.0 / (d1 * d1) + 1.0 / (d2 * d2) + 2.0 * G / (d1 * d2));
    const double vf = params.p == 2.0 ? 1.0 : std::pow(v2, 0.5 * (params.p - 2.0));
    return vf * G / (d1 * d2) * std::pow(std::abs(u0), params.p);
  };
}

// 1/d1^2 + 1/d2^2 companion of the cross term.
Integrand diagonal_term_integrand(const ModelManifold& m, const PoleSet& poles,
                                  const HardyParams& params, const ScalarField& u) {
  return [=, &m](const Point& x) {
    const double u0 = u.evaluate(x);
    if (u0 == 0.0) return 0.0;
    const double d1 = distance(m, poles.pole(0), x);
    const double d2 = distance(m, poles.pole(1), x);
    if (d1 < kPoleHitTol || d2 < kPoleHitTol)
      throw singular_point_error("diagonal term: x at a pole");
    const auto g1 = grad_distance(m, poles.pole(0), x);
    const auto g2 = grad_distance(m, poles.pole(1), x);
    const double G = std::clamp(metric_inner(m, x, g1, g2), -1.0, 1.0);
    const double v2 =
        std::max(0.0, 1.0 / (d1 * d1) + 1.0 / (d2 * d2) + 2.0 * G / (d1 * d2));
    const double vf = params.p == 2.0 ? 1.0 : std::pow(v2, 0.5 * (params.p - 2.0));
    return vf * (1.0 / (d1 * d1) + 1.0 / (d2 * d2)) * std::pow(std::abs(u0), params.p);
  };
}

}  // namespace

RayleighReport rayleigh(const ModelManifold& m, const PoleSet& poles,
                        const HardyParams& params, const ScalarField& u, PotentialTag tag,
                        const QuadConfig& cfg) {
  const QuadConfig rcfg = resolve(cfg, params);
  std::vector<Integrand> fs;
  fs.push_back(gradient_energy_integrand(m, params, u));
  fs.push_back(potential_integrand(m, poles, params, tag, u));
  const bool with_cross = tag == PotentialTag::LeadingOnly && poles.size() == 2;
  if (with_cross) fs.push_back(cross_term_integrand(m, poles, params, u));

  auto est = integrate_multi(m, fs, u.support, poles, rcfg);
  RayleighReport rep;
  rep.numerator = est.components[0];
  rep.denominator = est.components[1];
  if (with_cross) rep.cross_term = est.components[2];
  rep.ratio = rep.denominator.value != 0.0 ? rep.numerator.value / rep.denominator.value
                                           : std::numeric_limits<double>::quiet_NaN();
  rep.margin_std_error =
      std::sqrt(std::max(0.0, est.covar(0, 0) + est.covar(1, 1) - 2.0 * est.covar(0, 1)));
  rep.tag = tag;
  rep.params = params;
  return rep;
}

std::vector<InequalityCheck> check_inequality(const ModelManifold& m, const PoleSet& poles,
                                              const HardyParams& params,
                                              const std::vector<ScalarField>& fields,
                                              PotentialTag tag, const QuadConfig& cfg) {
  std::vector<InequalityCheck> out;
  out.reserve(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    QuadConfig fcfg = cfg;
    fcfg.seed = split_seed(cfg.seed, 0xC0FFEE + i);
    const auto rep = rayleigh(m, poles, params, fields[i], tag, fcfg);
    InequalityCheck chk;
    chk.field_id = static_cast<int>(i);
    chk.numerator = rep.numerator.value;
    chk.denominator = rep.denominator.value;
    chk.margin = rep.numerator.value - rep.denominator.value;
    chk.margin_std_error = rep.margin_std_error;
    chk.pass = chk.margin >= -3.0 * chk.margin_std_error;
    out.push_back(chk);
  }
  return out;
}

EqualityReport minimizer_equality(const ModelManifold& m, const Point& a1, const Point& a2,
                                  const HardyParams& params, const QuadConfig& cfg) {
  if (m.kind() == ModelKind::SphereCap)
    throw invalid_input("minimizer_equality: Euclidean or hyperbolic model only");
  if (!(params.p > 2.0 && params.p < params.N))
    throw invalid_input("minimizer_equality: requires 2 < p < N");
  const auto poles = PoleSet::create(m, {a1, a2});
  const auto phi = minimizer_field(m, a1, a2, params);
  const QuadConfig rcfg = resolve(cfg, params);

  std::vector<Integrand> fs;
  fs.push_back(gradient_energy_integrand(m, params, phi));
  fs.push_back(potential_integrand(m, poles, params, PotentialTag::Full, phi));
  auto est = integrate_multi(m, fs, phi.support, poles, rcfg);

  EqualityReport rep;
  rep.numerator = est.components[0];
  rep.denominator = est.components[1];
  rep.tail_truncated = est.components[0].tail_truncated;
  const double J = rep.denominator.value;
  rep.gap = std::abs(rep.numerator.value - J) / std::abs(J);
  const double se_diff =
      std::sqrt(std::max(0.0, est.covar(0, 0) + est.covar(1, 1) - 2.0 * est.covar(0, 1)));
  rep.tolerance = std::max(0.02, 5.0 * se_diff / std::abs(J));
  rep.pass = rep.gap <= rep.tolerance;
  return rep;
}

SweepResult sharpness_sweep(const ModelManifold& m, const Point& a1, const Point& a2,
                            const HardyParams& params, const std::vector<double>& eps_list,
                            const QuadConfig& cfg) {
  if (m.kind() == ModelKind::SphereCap)
    throw invalid_input("sharpness_sweep: Euclidean or hyperbolic model only");
  if (!(params.p >= 2.0)) throw invalid_input("sharpness_sweep: requires 2 <= p < N");
  if (eps_list.empty()) throw invalid_input("sharpness_sweep: empty eps list");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw invalid_input("sharpness_sweep: eps list must be strictly decreasing");

  const auto poles = PoleSet::create(m, {a1, a2});
  SweepResult res;
  res.target = params.C1;

  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    const double eps = eps_list[e];
    const auto u = sharpness_field(m, a1, a2, params, eps);
    QuadConfig ecfg = resolve(cfg, params);
    ecfg.seed = split_seed(cfg.seed, 0x5EED + e);
    std::vector<Integrand> fs;
    fs.push_back(gradient_energy_integrand(m, params, u));
    fs.push_back(diagonal_term_integrand(m, poles, params, u));
    fs.push_back(cross_term_integrand(m, poles, params, u));
    auto est = integrate_multi(m, fs, u.support, poles, ecfg);

    SweepRow row;
    row.eps = eps;
    row.numerator = est.components[0].value;
    row.denominator = est.components[1].value;
    row.cross = est.components[2].value;
    row.se_numerator = est.components[0].std_error;
    row.se_denominator = est.components[1].std_error;
    row.se_cross = est.components[2].std_error;
    row.ratio = row.numerator / (row.denominator - 2.0 * row.cross);
    res.rows.push_back(row);
  }

  res.ratio_decreasing = true;
  res.cross_term_shrinking = true;
  res.denominator_growing = true;
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    if (!(res.rows[i].ratio < res.rows[i - 1].ratio)) res.ratio_decreasing = false;
    if (!(std::abs(res.rows[i].cross) < std::abs(res.rows[i - 1].cross)))
      res.cross_term_shrinking = false;
    if (!(res.rows[i].denominator > res.rows[i - 1].denominator))
      res.denominator_growing = false;
  }
  const double gap0 = res.rows.front().ratio - res.target;
  const double gap1 = res.rows.back().ratio - res.target;
  res.gap_halved = res.rows.size() < 2 || gap1 <= 0.5 * gap0;
  return res;
}

std::vector<GroupStats> positivity_audit(const ModelManifold& m, const PoleSet& poles,
                                         const HardyParams& params, long sample_count,
                                         std::uint64_t seed) {
  if (sample_count < 1) throw invalid_input("positivity_audit: sample_count must be >= 1");
  Rng rng(seed);
  const int n = poles.size();
  const Point centroid = [&] {
    std::vector<double> c(static_cast<std::size_t>(m.chart_dim()), 0.0);
    for (const auto& p : poles.poles())
      for (std::size_t k = 0; k < c.size(); ++k) c[k] += p.x[k];
    if (m.kind() == ModelKind::SphereCap) {
      const double nn = vec::norm(c);
      if (nn < 1e-12 || c.back() <= 0.0) return north_pole(m);
      for (auto& ck : c) ck /= nn;
      return Point{std::move(c)};
    }
    for (auto& ck : c) ck /= n;
    return Point{std::move(c)};
  }();
  double reach = poles.min_separation();
  for (int i = 0; i < n; ++i) reach = std::max(reach, 2.0 * distance(m, centroid, poles.pole(i)));
  if (m.kind() == ModelKind::SphereCap)
    reach = std::min(reach, std::numbers::pi / 2.0 - 0.05);

  const char* names[5] = {"leading", "laplacian", "cross", "hessian", "total"};
  double mins[5];
  long negs[5] = {0, 0, 0, 0, 0};
  std::fill(std::begin(mins), std::end(mins), std::numeric_limits<double>::infinity());

  long done = 0;
  long guard = 0;
  while (done < sample_count) {
    if (++guard > 100 * sample_count)
      throw numerical_error("positivity_audit: sampler failed to find admissible points");
    Point x = centroid;
    if (rng.uniform01() < 0.5) {
      const int i = static_cast<int>(done % n);
      const double r =
          0.5 * poles.min_separation() * std::pow(10.0, rng.uniform(-3.0, 0.0));
      const auto dir = rng.unit_vector(m.chart_dim());
      TangentVector t{poles.pole(i), dir};
      if (m.kind() == ModelKind::SphereCap) {
        std::vector<double> d = dir;
        const double rr = vec::dot(d, poles.pole(i).x);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] -= rr * poles.pole(i).x[k];
        t = TangentVector{poles.pole(i), std::move(d)};
      }
      x = exp_map(m, poles.pole(i), t, r);
    } else {
      const double r = reach * rng.uniform01();
      const auto dir = rng.unit_vector(m.chart_dim());
      TangentVector t{centroid, dir};
      if (m.kind() == ModelKind::SphereCap) {
        std::vector<double> d = dir;
        const double rr = vec::dot(d, centroid.x);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] -= rr * centroid.x[k];
        t = TangentVector{centroid, std::move(d)};
      }
      x = exp_map(m, centroid, t, r);
    }
    if (!in_chart(m, x)) continue;
    try {
      const PotentialTerms terms =
          n == 2 ? bipolar_potential_terms(m, poles.pole(0), poles.pole(1), params, x)
                 : multipolar_potential_terms(m, poles, params, x);
      const double vals[5] = {terms.leading, terms.laplacian, terms.cross, terms.hessian,
                              terms.total()};
      for (int k = 0; k < 5; ++k) {
        mins[k] = std::min(mins[k], vals[k]);
        if (vals[k] < 0.0) ++negs[k];
      }
      ++done;
    } catch (const singular_point_error&) {
    } catch (const degenerate_point_error&) {
    }
  }

  std::vector<GroupStats> out;
  for (int k = 0; k < 5; ++k)
    out.push_back(GroupStats{names[k], mins[k],
                             static_cast<double>(negs[k]) / static_cast<double>(sample_count),
                             sample_count});
  return out;
}

std::vector<ResidualReport> weak_supersolution_residual(const ModelManifold& m,
                                                        const PoleSet& poles,
                                                        const HardyParams& params,
                                                        const std::vector<ScalarField>& fields,
                                                        const QuadConfig& cfg) {
  const double p = params.p;
  const double beta = params.beta;
  std::vector<Point> pole_pts = poles.poles();
  const auto phi = power_product_field(m, pole_pts, beta);
  const bool bip = poles.size() == 2;

  std::vector<ResidualReport> out;
  for (std::size_t fi = 0; fi < fields.size(); ++fi) {
    const ScalarField& u = fields[fi];
    auto lhs = [&, p, beta](const Point& x) {
      const auto gu = u.gradient(x);
      const double phi0 = phi.evaluate(x);
      const auto v = v_field(m, poles, x);
      const double gvu = metric_inner(m, x, v, gu);
      if (gvu == 0.0) return 0.0;
      const double v2 = std::max(0.0, metric_inner(m, x, v, v));
      if (p < 4.0 && p != 2.0 && std::sqrt(v2) < 1e-12)
        throw degenerate_point_error("weak form: |v| ~ 0");
      const double vf = p == 2.0 ? 1.0 : std::pow(v2, 0.5 * (p - 2.0));
      return beta * std::pow(std::abs(beta), p - 2.0) * std::pow(phi0, p - 1.0) * vf * gvu;
    };
    auto rhs = [&, p](const Point& x) {
      const double u0 = u.evaluate(x);
      if (u0 == 0.0) return 0.0;
      const double V = bip ? bipolar_potential(m, poles.pole(0), poles.pole(1), params, x)
                           : multipolar_potential(m, poles, params, x);
      return V * std::pow(phi.evaluate(x), p - 1.0) * u0;
    };

    QuadConfig fcfg = resolve(cfg, params);
    fcfg.seed = split_seed(cfg.seed, 0xD00D + fi);
    auto est = integrate_multi(m, {lhs, rhs}, u.support, poles, fcfg);

    ResidualReport rep;
    rep.field_id = static_cast<int>(fi);
    rep.lhs = est.components[0];
    rep.rhs = est.components[1];
    const double R = rep.rhs.value;
    rep.residual = std::abs(rep.lhs.value - R) / std::abs(R);
    const double se_diff =
        std::sqrt(std::max(0.0, est.covar(0, 0) + est.covar(1, 1) - 2.0 * est.covar(0, 1)));
    rep.tolerance = std::max(0.02, 5.0 * se_diff / std::abs(R));
    rep.pass = rep.residual <= rep.tolerance;
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace hardy
