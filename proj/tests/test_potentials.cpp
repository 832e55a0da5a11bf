#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hardy/errors.hpp"
#include "hardy/potentials.hpp"
#include "test_util.hpp"

using namespace hardy;
using testutil::random_point;

namespace {

// well-separated seeded pole pair / triple per model
std::vector<Point> seeded_poles(const ModelManifold& m, int n, Rng& rng) {
  while (true) {
    std::vector<Point> poles;
    for (int i = 0; i < n; ++i) poles.push_back(random_point(m, rng, 1.2));
    bool ok = true;
    for (std::size_t i = 0; i < poles.size(); ++i)
      for (std::size_t j = i + 1; j < poles.size(); ++j)
        if (distance(m, poles[i], poles[j]) < 0.4) ok = false;
    if (ok) return poles;
  }
}

Point admissible_point(const ModelManifold& m, const std::vector<Point>& poles, Rng& rng,
                       double min_dist = 5e-3) {
  while (true) {
    const Point x = random_point(m, rng, 1.6);
    bool ok = true;
    for (const auto& a : poles)
      if (distance(m, a, x) < min_dist) ok = false;
    if (ok) return x;
  }
}

}  // namespace

TEST_CASE("make_params: constants, exponent, bipolar identity") {
  const auto hp = make_params(2.0, 4, 2);
  CHECK(hp.C1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hp.C2 == doctest::Approx(1.0).epsilon(1e-15));

  // p = 2: C1 = (N-2)^2 / n^2
  for (int N : {4, 5, 7})
    for (int n : {2, 3, 5}) {
      const auto q = make_params(2.0, N, n);
      CHECK(q.C1 == doctest::Approx((N - 2.0) * (N - 2.0) / (n * n)).epsilon(1e-14));
    }

  const auto r = make_params(3.0, 5, 2);
  CHECK(r.C1 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(r.C2 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(r.beta == doctest::Approx(-0.5).epsilon(1e-15));  // (p-N)/(n(p-1)) = -2/4

  // bipolar closed form C1(2,p) = (p-1) ((N-p)/(2(p-1)))^p
  for (double p : {2.0, 2.5, 3.0, 3.5})
    for (int N : {4, 5, 6}) {
      if (!(p < N)) continue;
      const auto hp2 = make_params(p, N, 2);
      const double alt = (p - 1.0) * std::pow((N - p) / (2.0 * (p - 1.0)), p);
      CHECK(std::abs(hp2.C1 - alt) <= 1e-14 * std::abs(alt));
    }

  CHECK_THROWS_AS(make_params(1.0, 4, 2), invalid_input);
  CHECK_THROWS_AS(make_params(4.0, 4, 2), invalid_input);
  CHECK_THROWS_AS(make_params(2.0, 4, 1), invalid_input);
}

TEST_CASE("flat p=2 reduction: multipolar potential equals the reference integrand") {
  const auto e4 = ModelManifold::euclidean(4);
  Rng rng(11);
  for (int n : {2, 3}) {
    const auto poles = seeded_poles(e4, n, rng);
    const auto ps = PoleSet::create(e4, poles);
    const auto params = make_params(2.0, 4, n);
    for (int it = 0; it < 1000; ++it) {
      const Point x = admissible_point(e4, poles, rng);
      const double lhs = multipolar_potential(e4, ps, params, x);
      const double rhs = euclid_multipolar_p2(poles, 4, x);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(rhs), 1e-30));
    }
  }
}

TEST_CASE("flat p=2 reference integrand: hand value and scaling") {
  const auto e4 = ModelManifold::euclidean(4);
  const Point a1 = make_point(e4, {-1, 0, 0, 0}), a2 = make_point(e4, {1, 0, 0, 0});
  std::vector<Point> poles{a1, a2};
  CHECK(euclid_multipolar_p2(poles, 4, make_point(e4, {0, 1, 0, 0})) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // degree -2 homogeneity
  Rng rng(12);
  for (int it = 0; it < 50; ++it) {
    const Point x = admissible_point(e4, poles, rng);
    const double lam = 0.5 + 2.0 * rng.uniform01();
    std::vector<Point> scaled;
    for (const auto& a : poles) {
      auto c = a.x;
      for (auto& ci : c) ci *= lam;
      scaled.push_back(Point{c});
    }
    auto xs = x.x;
    for (auto& ci : xs) ci *= lam;
    const double v0 = euclid_multipolar_p2(poles, 4, x);
    const double v1 = euclid_multipolar_p2(scaled, 4, Point{xs});
    CHECK(v1 == doctest::Approx(v0 / (lam * lam)).epsilon(1e-12));
  }
}

TEST_CASE("two-pole simplification agrees with the n = 2 multipolar form") {
  Rng rng(13);
  for (const auto& m : testutil::all_models(4)) {
    const auto poles = seeded_poles(m, 2, rng);
    const auto ps = PoleSet::create(m, poles);
    for (double p : {2.0, 2.5, 3.0}) {
      const auto params = make_params(p, 4, 2);
      for (int it = 0; it < 1000; ++it) {
        const Point x = admissible_point(m, poles, rng);
        double lhs, rhs;
        try {
          lhs = multipolar_potential(m, ps, params, x);
          rhs = bipolar_potential(m, poles[0], poles[1], params, x);
        } catch (const degenerate_point_error&) {
          continue;
        }
        CHECK(std::abs(lhs - rhs) <=
              1e-10 * std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
      }
    }
  }
}

TEST_CASE("flat L^p bipolar reduction and the bridge identity") {
  const auto e5 = ModelManifold::euclidean(5);
  const Point a1 = make_point(e5, {-1, 0, 0, 0, 0}), a2 = make_point(e5, {1, 0, 0, 0, 0});
  const auto ps = PoleSet::create(e5, {a1, a2});
  Rng rng(14);
  for (double p : {2.0, 2.5, 3.0, 3.5}) {
    const auto params = make_params(p, 5, 2);
    for (int it = 0; it < 1000; ++it) {
      const Point x = admissible_point(e5, {a1, a2}, rng);
      double lhs, rhs;
      try {
        lhs = bipolar_potential(e5, a1, a2, params, x);
        rhs = euclid_bipolar_lp(a1, a2, 5, p, x);
      } catch (const degenerate_point_error&) {
        continue;
      }
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max({std::abs(rhs), 1e-30}));

      // |v| d1 d2 = 2 |x - a| with a the midpoint
      const double d1 = distance(e5, a1, x), d2 = distance(e5, a2, x);
      const double vn = std::sqrt(v_norm_sq(e5, ps, x));
      std::vector<double> mid(x.x.size());
      for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (a1.x[k] + a2.x[k]);
      const double w = 2.0 * vec::norm(vec::sub(x.x, mid));
      CHECK(std::abs(vn * d1 * d2 - w) <= 1e-12 * std::max(w, 1e-30));
    }
  }
}

TEST_CASE("flat L^p reference: p = 2 collapses to the p = 2 reference") {
  const auto e4 = ModelManifold::euclidean(4);
  const Point a1 = make_point(e4, {-0.7, 0.2, 0, 0}), a2 = make_point(e4, {0.9, 0, 0.1, 0});
  Rng rng(15);
  for (int it = 0; it < 200; ++it) {
    const Point x = admissible_point(e4, {a1, a2}, rng);
    CHECK(euclid_bipolar_lp(a1, a2, 4, 2.0, x) ==
          doctest::Approx(euclid_multipolar_p2(std::vector<Point>{a1, a2}, 4, x))
              .epsilon(1e-13));
  }
}

TEST_CASE("perpendicular bisector identity") {
  const auto e5 = ModelManifold::euclidean(5);
  const Point a1 = make_point(e5, {-1, 0, 0, 0, 0}), a2 = make_point(e5, {1, 0, 0, 0, 0});
  Rng rng(16);
  for (int it = 0; it < 200; ++it) {
    Point x = random_point(e5, rng);
    x.x[0] = 0.0;  // bisector hyperplane
    const auto r1 = vec::sub(x.x, a1.x), r2 = vec::sub(x.x, a2.x);
    std::vector<double> mid(x.x.size(), 0.0);
    const double w2 = vec::norm2(vec::sub(x.x, mid));
    const double a12 = vec::norm2(vec::sub(a1.x, a2.x));
    CHECK(vec::dot(r1, r2) == doctest::Approx(w2 - a12 / 4.0).epsilon(1e-13));
  }
}

TEST_CASE("potential at a zero of v") {
  const auto e6 = ModelManifold::euclidean(6);
  const Point a1 = make_point(e6, {-1, 0, 0, 0, 0, 0}),
              a2 = make_point(e6, {1, 0, 0, 0, 0, 0});
  const Point mid = make_point(e6, {0, 0, 0, 0, 0, 0});
  const auto ps = PoleSet::create(e6, {a1, a2});

  // p > 4: the positive powers of |v| kill every group
  const auto p45 = make_params(4.5, 6, 2);
  CHECK(multipolar_potential(e6, ps, p45, mid) == doctest::Approx(0.0));
  CHECK(bipolar_potential(e6, a1, a2, p45, mid) == doctest::Approx(0.0));

  // 2 < p < 4: |v|^{p-4} diverges, the caller must resample
  const auto p25 = make_params(2.5, 6, 2);
  CHECK_THROWS_AS(bipolar_potential(e6, a1, a2, p25, mid), degenerate_point_error);
  CHECK_THROWS_AS(euclid_bipolar_lp(a1, a2, 6, 2.5, mid), degenerate_point_error);

  // p = 2 skips those groups entirely
  const auto p2 = make_params(2.0, 6, 2);
  CHECK(bipolar_potential(e6, a1, a2, p2, mid) ==
        doctest::Approx(euclid_multipolar_p2(std::vector<Point>{a1, a2}, 6, mid))
            .epsilon(1e-12));

  CHECK_THROWS_AS(bipolar_potential(e6, a1, a2, p2, a1), singular_point_error);
}

TEST_CASE("hyperbolic p=2 potential dominates its leading part") {
  const auto h4 = ModelManifold::hyperbolic(4, 1.0);
  const Point a1 = make_point(h4, {-0.3, 0, 0, 0}), a2 = make_point(h4, {0.3, 0, 0, 0});
  const auto ps = PoleSet::create(h4, {a1, a2});
  const auto params = make_params(2.0, 4, 2);
  Rng rng(17);
  for (int it = 0; it < 500; ++it) {
    const Point x = admissible_point(h4, {a1, a2}, rng);
    const double full = multipolar_potential(h4, ps, params, x);
    const double lead = params.C1 * leading_potential(h4, ps, params, x);
    CHECK(full - lead >= -1e-12 * std::abs(full));
  }
}

TEST_CASE("leading part: flat two-pole closed form and midpoint degeneracy") {
  const auto e4 = ModelManifold::euclidean(4);
  const Point a1 = make_point(e4, {-1, 0, 0, 0}), a2 = make_point(e4, {1, 0, 0, 0});
  const auto ps = PoleSet::create(e4, {a1, a2});
  const auto p2 = make_params(2.0, 4, 2);
  Rng rng(18);
  for (int it = 0; it < 300; ++it) {
    const Point x = admissible_point(e4, {a1, a2}, rng);
    const double d1 = distance(e4, a1, x), d2 = distance(e4, a2, x);
    const double expect = 4.0 / (d1 * d1 * d2 * d2);  // |a1-a2|^2/(d1^2 d2^2)
    CHECK(leading_potential(e4, ps, p2, x) == doctest::Approx(expect).epsilon(1e-11));
  }
  const auto p3 = make_params(3.0, 4, 2);
  CHECK(leading_potential(e4, ps, p3, make_point(e4, {0, 0, 0, 0})) ==
        doctest::Approx(0.0));
}

TEST_CASE("leading part blows up like d^-p near a pole") {
  Rng rng(19);
  for (const auto& m : {ModelManifold::euclidean(4), ModelManifold::hyperbolic(4, 1.0)}) {
    const auto poles = seeded_poles(m, 2, rng);
    const auto ps = PoleSet::create(m, poles);
    for (double p : {2.0, 2.5}) {
      const auto params = make_params(p, 4, 2);
      auto dir = rng.unit_vector(m.dim());
      std::vector<double> logr, logv;
      for (double r : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const Point x = exp_map(m, poles[0], TangentVector{poles[0], dir}, r);
        logr.push_back(std::log(r));
        logv.push_back(std::log(leading_potential(m, ps, params, x)));
      }
      double mr = 0, mv = 0;
      for (std::size_t k = 0; k < logr.size(); ++k) {
        mr += logr[k];
        mv += logv[k];
      }
      mr /= logr.size();
      mv /= logv.size();
      double num = 0, den = 0;
      for (std::size_t k = 0; k < logr.size(); ++k) {
        num += (logr[k] - mr) * (logv[k] - mv);
        den += (logr[k] - mr) * (logr[k] - mr);
      }
      CHECK(std::abs(num / den + p) < 0.05);
    }
  }
}

TEST_CASE("coth gap bound: values and nonnegativity on a log grid") {
  CHECK(coth_gap_bound(1e-9) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(coth_gap_bound(1.0) == doctest::Approx(0.037036280448205606).epsilon(1e-12));
  for (int i = 0; i <= 1000; ++i) {
    const double t = 1e-3 * std::pow(1e6, i / 1000.0);
    CHECK(coth_gap_bound(t) >= 0.0);
  }
}

TEST_CASE("hemisphere constant: values, boundary, pointwise bound") {
  CHECK(hemisphere_constant(0.0) ==
        doctest::Approx(-25.0 / (3.0 * std::numbers::pi * std::numbers::pi))
            .epsilon(1e-14));
  CHECK(hemisphere_constant(std::numbers::pi / 2 - 1e-9) < -1e7);
  CHECK_THROWS_AS(hemisphere_constant(std::numbers::pi / 2), invalid_input);
  CHECK_THROWS_AS(hemisphere_constant(-0.1), invalid_input);

  for (double delta : {0.1, 0.5, 1.0}) {
    const double cd = hemisphere_constant(delta);
    const double dmax = delta + std::numbers::pi / 2;
    for (int i = 0; i < 2000; ++i) {
      const double d = dmax * (i + 0.5) / 2000;
      const double lhs = d < 1e-4 ? -1.0 / 3.0 : (d / std::tan(d) - 1.0) / (d * d);
      CHECK(lhs >= cd / 2.0);
    }
  }
}

TEST_CASE("cotangent partial fractions: error bound and monotonicity") {
  CHECK(std::abs(cot_mittag_leffler(1.0, 10000) - 0.6420926159343306) < 1e-3);
  CHECK(std::abs(cot_mittag_leffler(std::numbers::pi / 2, 10000)) < 1e-4);
  for (double t : {0.3, 1.0, 2.0, 3.0}) {
    const double ct = 1.0 / std::tan(t);
    double prev = cot_mittag_leffler(t, 10);
    CHECK(prev >= ct);
    for (long K : {30L, 100L, 300L, 1000L}) {
      const double cur = cot_mittag_leffler(t, K);
      CHECK(cur < prev);  // partial sums decrease toward cot
      CHECK(cur >= ct);   // from above
      CHECK(std::abs(cur - ct) <= 2.0 * t / (std::numbers::pi * std::numbers::pi * K));
      prev = cur;
    }
  }
  CHECK_THROWS_AS(cot_mittag_leffler(3.5, 10), invalid_input);
  CHECK_THROWS_AS(cot_mittag_leffler(1.0, 0), invalid_input);
}

TEST_CASE("hyperbolic replacement potential is dominated pointwise") {
  Rng rng(20);
  for (double R : {0.5, 1.0, 2.0}) {
    const auto m = ModelManifold::hyperbolic(4, R);
    const auto poles = seeded_poles(m, 2, rng);
    for (double p : {2.0, 3.0}) {
      const auto params = make_params(p, 4, 2);
      for (int it = 0; it < 1000; ++it) {
        const Point x = admissible_point(m, poles, rng);
        const double full = bipolar_potential(m, poles[0], poles[1], params, x);
        const double lower = hyperbolic_lower_bound(m, poles[0], poles[1], params, x);
        CHECK(full - lower >= -1e-10 * std::max(1.0, std::abs(full)));
      }
    }
  }
}

TEST_CASE("hyperbolic replacement potential: p = 2 structure and flat limit") {
  Rng rng(21);
  // p = 2: value is exactly C1 Vtilde + (N-1) C2 sum_i 3R^2/(pi^2 + R^2 d_i^2)
  for (double R : {0.5, 1.0}) {
    const auto m = ModelManifold::hyperbolic(4, R);
    const auto poles = seeded_poles(m, 2, rng);
    const auto ps = PoleSet::create(m, poles);
    const auto params = make_params(2.0, 4, 2);
    for (int it = 0; it < 200; ++it) {
      const Point x = admissible_point(m, poles, rng);
      const double d1 = distance(m, poles[0], x), d2 = distance(m, poles[1], x);
      const double pi2 = std::numbers::pi * std::numbers::pi;
      const double expect =
          params.C1 * leading_potential(m, ps, params, x) +
          3.0 * params.C2 * (4 - 1) *
              (R * R / (pi2 + R * R * d1 * d1) + R * R / (pi2 + R * R * d2 * d2));
      CHECK(hyperbolic_lower_bound(m, poles[0], poles[1], params, x) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  }
  // curvature remainder terms vanish as R -> 0 at a fixed chart point
  const std::vector<double> a1c{-0.3, 0, 0, 0}, a2c{0.3, 0, 0, 0}, xc{0.1, 0.4, 0, 0};
  double prev_gap = 1e300;
  for (double R : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto m = ModelManifold::hyperbolic(4, R);
    const auto a1 = make_point(m, a1c), a2 = make_point(m, a2c), x = make_point(m, xc);
    const auto ps = PoleSet::create(m, {a1, a2});
    const auto params = make_params(2.0, 4, 2);
    const double gap = hyperbolic_lower_bound(m, a1, a2, params, x) -
                       params.C1 * leading_potential(m, ps, params, x);
    CHECK(gap >= 0.0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-9);
}

TEST_CASE("hemisphere replacement potential is dominated pointwise") {
  const auto m = ModelManifold::sphere_cap(4);
  Rng rng(22);
  for (double delta : {0.3, 0.6}) {
    // symmetric poles at geodesic distance delta from the north pole
    const Point a1 = make_point(m, {std::sin(delta), 0, 0, 0, std::cos(delta)});
    const Point a2 = make_point(m, {-std::sin(delta), 0, 0, 0, std::cos(delta)});
    const auto ps = PoleSet::create(m, {a1, a2});
    CHECK(ps.delta() == doctest::Approx(delta).epsilon(1e-12));
    for (double p : {2.0, 3.0}) {
      const auto params = make_params(p, 4, 2);
      for (int it = 0; it < 1000; ++it) {
        const Point x = admissible_point(m, {a1, a2}, rng);
        double full, lower;
        try {
          full = bipolar_potential(m, a1, a2, params, x);
          lower = sphere_lower_bound(m, a1, a2, params, x, ps.delta());
        } catch (const degenerate_point_error&) {
          continue;
        }
        CHECK(full - lower >= -1e-10 * std::max(1.0, std::abs(full)));
      }
    }
  }
}

TEST_CASE("two-pole potential groups are nonnegative on nonpositive curvature") {
  Rng rng(23);
  for (const auto& m : {ModelManifold::euclidean(5), ModelManifold::hyperbolic(5, 0.8)}) {
    const auto poles = seeded_poles(m, 2, rng);
    for (double p : {2.0, 2.5, 3.0, 4.5}) {
      const auto params = make_params(p, 5, 2);
      for (int it = 0; it < 300; ++it) {
        const Point x = admissible_point(m, poles, rng);
        PotentialTerms t;
        try {
          t = bipolar_potential_terms(m, poles[0], poles[1], params, x);
        } catch (const degenerate_point_error&) {
          continue;
        }
        CHECK(t.leading >= -1e-12);
        CHECK(t.laplacian >= -1e-12);
        CHECK(t.cross >= -1e-12);
        CHECK(t.hessian >= -1e-12);
      }
    }
  }
}
