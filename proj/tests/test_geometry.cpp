#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hardy/errors.hpp"
#include "hardy/geometry.hpp"
#include "test_util.hpp"

using namespace hardy;
using testutil::random_point;
using testutil::random_unit_tangent;

TEST_CASE("distance: closed-form examples") {
  const auto e4 = ModelManifold::euclidean(4);
  CHECK(distance(e4, make_point(e4, {0, 0, 0, 0}), make_point(e4, {3, 4, 0, 0})) ==
        doctest::Approx(5.0).epsilon(1e-14));

  const auto h3 = ModelManifold::hyperbolic(3, 1.0);
  // arcosh(5/3) = ln 3
  CHECK(distance(h3, make_point(h3, {0, 0, 0}), make_point(h3, {0.5, 0, 0})) ==
        doctest::Approx(1.0986122886681098).epsilon(1e-14));

  const auto s3 = ModelManifold::sphere_cap(3);
  const Point np = north_pole(s3);
  const Point eq = make_point(s3, {1.0, 0, 0, 1e-13});  // just inside the chart
  CHECK(distance(s3, np, eq) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-10));
}

TEST_CASE("distance: chart domain violations rejected") {
  const auto h3 = ModelManifold::hyperbolic(3, 1.0);
  CHECK_THROWS_AS(make_point(h3, {1.0, 0, 0}), invalid_input);
  const auto s3 = ModelManifold::sphere_cap(3);
  CHECK_THROWS_AS(make_point(s3, {0.5, 0, 0, 0.5}), invalid_input);   // not unit
  CHECK_THROWS_AS(make_point(s3, {1.0, 0, 0, 0.0}), invalid_input);   // equator
  CHECK_THROWS_AS(make_point(s3, {0.0, 0, 0, -1.0}), invalid_input);  // lower half
}

TEST_CASE("distance: symmetry, identity, triangle inequality") {
  for (const auto& m : testutil::all_models(4)) {
    Rng rng(101);
    for (int it = 0; it < 1000; ++it) {
      const Point a = random_point(m, rng), b = random_point(m, rng),
                  c = random_point(m, rng);
      const double dab = distance(m, a, b), dba = distance(m, b, a);
      CHECK(dab == doctest::Approx(dba).epsilon(1e-13));
      CHECK(distance(m, a, a) == 0.0);
      CHECK(distance(m, a, c) <= dab + distance(m, b, c) + 1e-12);
    }
  }
}

TEST_CASE("metric_inner: examples and positive definiteness") {
  const auto e4 = ModelManifold::euclidean(4);
  const Point o4 = make_point(e4, {0, 0, 0, 0});
  const TangentVector u{o4, {1, 0, 0, 0}};
  CHECK(metric_inner(e4, o4, u, u) == doctest::Approx(1.0));

  const auto h3 = ModelManifold::hyperbolic(3, 1.0);
  const Point o3 = make_point(h3, {0, 0, 0});
  const TangentVector v{o3, {1, 0, 0}};
  CHECK(metric_inner(h3, o3, v, v) == doctest::Approx(4.0).epsilon(1e-14));

  const Point x = make_point(h3, {0.5, 0, 0});
  const TangentVector w{x, {1, 0, 0}};
  CHECK(metric_inner(h3, x, w, w) == doctest::Approx(7.111111111111111).epsilon(1e-13));

  const Point y = make_point(h3, {0.3, 0.1, 0});
  CHECK_THROWS_AS(metric_inner(h3, y, v, v), invalid_input);  // mismatched base
}

TEST_CASE("grad_distance: Euclidean example, singular point, Eikonal property") {
  const auto e4 = ModelManifold::euclidean(4);
  const Point a = make_point(e4, {0, 0, 0, 0});
  const auto g = grad_distance(e4, a, make_point(e4, {2, 0, 0, 0}));
  CHECK(g.v[0] == doctest::Approx(1.0));
  CHECK(g.v[1] == doctest::Approx(0.0));
  CHECK_THROWS_AS(grad_distance(e4, a, a), singular_point_error);

  for (const auto& m : testutil::all_models(4)) {
    Rng rng(202);
    for (int it = 0; it < 500; ++it) {
      const Point p = random_point(m, rng);
      Point x = random_point(m, rng);
      if (distance(m, p, x) < 1e-3) continue;
      const auto gd = grad_distance(m, p, x);
      CHECK(std::abs(metric_norm(m, x, gd) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("grad_distance: central differences of the distance in the chart") {
  for (const auto& m : testutil::all_models(4)) {
    Rng rng(303);
    for (int it = 0; it < 60; ++it) {
      const Point a = random_point(m, rng);
      Point x = random_point(m, rng);
      if (distance(m, a, x) < 0.1) continue;
      const auto g = grad_distance(m, a, x);
      if (m.kind() == ModelKind::SphereCap) {
        // directional derivatives along exact geodesics
        const double h = 1e-5;
        const auto frame = tangent_onb(m, x);
        for (const auto& e : frame) {
          TangentVector en{x, e.v};
          for (auto& c : en.v) c = -c;
          const double fd = (distance(m, a, exp_map(m, x, e, h)) -
                             distance(m, a, exp_map(m, x, en, h))) /
                            (2 * h);
          CHECK(std::abs(fd - metric_inner(m, x, g, e)) < 1e-5);
        }
      } else {
        const double h = 1e-5;
        for (int i = 0; i < m.chart_dim(); ++i) {
          Point xp = x, xm = x;
          xp.x[static_cast<std::size_t>(i)] += h;
          xm.x[static_cast<std::size_t>(i)] -= h;
          const double fd = (distance(m, a, xp) - distance(m, a, xm)) / (2 * h);
          // chart covector of the Riemannian gradient: g_ij g^j = rho^2 * comp
          double comp = g.v[static_cast<std::size_t>(i)];
          if (m.kind() == ModelKind::Hyperbolic) {
            const double rho = 2.0 / (1.0 - vec::norm2(x.x));
            comp *= rho * rho;
          }
          CHECK(std::abs(fd - comp) < 1e-5);
        }
      }
    }
  }
}

TEST_CASE("grad_distance on the sphere lies in the great-circle plane") {
  const auto s3 = ModelManifold::sphere_cap(3);
  Rng rng(404);
  for (int it = 0; it < 100; ++it) {
    const Point a = random_point(s3, rng), x = random_point(s3, rng);
    if (distance(s3, a, x) < 1e-2) continue;
    const auto g = grad_distance(s3, a, x);
    CHECK(std::abs(vec::dot(g.v, x.x)) < 1e-10);  // tangency
    // g must be a combination of a and x: orthogonal complement test
    std::vector<double> w = g.v;
    const double ca = vec::dot(w, a.x) / vec::norm2(a.x);
    // remove projections onto span{a, x}
    std::vector<double> axspan1 = a.x, axspan2 = x.x;
    const double r = vec::dot(axspan2, axspan1);
    for (std::size_t k = 0; k < axspan2.size(); ++k) axspan2[k] -= r * axspan1[k];
    const double n2 = vec::norm2(axspan2);
    const double c1 = vec::dot(w, axspan1), c2 = n2 > 0 ? vec::dot(w, axspan2) / n2 : 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
      w[k] -= c1 * axspan1[k] + c2 * axspan2[k];
    (void)ca;
    CHECK(vec::norm(w) < 1e-10);
  }
}

TEST_CASE("s_ratio: examples, domain, continuity at c = 0") {
  CHECK(s_ratio(0.0, 2.0) == doctest::Approx(0.5));
  CHECK(s_ratio(-1.0, 1.0) == doctest::Approx(1.3130352854993312).epsilon(1e-14));
  CHECK(std::abs(s_ratio(1.0, std::numbers::pi / 2)) < 1e-12);
  CHECK_THROWS_AS(s_ratio(1.0, std::numbers::pi), invalid_input);
  CHECK_THROWS_AS(s_ratio(0.0, 0.0), invalid_input);

  // |s_ratio - (1/r - c r/3)| <= 10 |c|^2 r^3 whenever |c| r^2 <= 1e-2
  for (double c : {-1.0, -0.1, -1e-3, -1e-6, 1e-6, 1e-3, 0.1, 1.0}) {
    for (double r : {1e-4, 1e-3, 1e-2, 0.1}) {
      if (std::abs(c) * r * r > 1e-2) continue;
      const double s = s_ratio(c, r);
      CHECK(std::abs(s - (1.0 / r - c * r / 3.0)) <= 10.0 * c * c * r * r * r + 1e-18);
    }
  }
}

TEST_CASE("s_profile matches the generating functions") {
  CHECK(s_profile(0.0, 0.7) == doctest::Approx(0.7));
  CHECK(s_profile(-1.0, 0.7) == doctest::Approx(std::sinh(0.7)).epsilon(1e-14));
  CHECK(s_profile(1.0, 0.7) == doctest::Approx(std::sin(0.7)).epsilon(1e-14));
  CHECK(s_profile(-4.0, 0.7) == doctest::Approx(std::sinh(1.4) / 2.0).epsilon(1e-14));
}

TEST_CASE("laplacian_distance: examples") {
  const auto e4 = ModelManifold::euclidean(4);
  CHECK(laplacian_distance(e4, make_point(e4, {0, 0, 0, 0}),
                           make_point(e4, {2, 0, 0, 0})) == doctest::Approx(1.5));

  const auto h3 = ModelManifold::hyperbolic(3, 1.0);
  const Point o = make_point(h3, {0, 0, 0});
  const Point x = make_point(h3, {std::tanh(0.5), 0, 0});  // hyperbolic distance 1
  CHECK(laplacian_distance(h3, o, x) ==
        doctest::Approx(2.6260705709986624).epsilon(1e-12));

  const auto s3 = ModelManifold::sphere_cap(3);
  const Point np = north_pole(s3);
  const Point eq = make_point(s3, {0, 1.0, 0, 1e-13});
  CHECK(std::abs(laplacian_distance(s3, np, eq)) < 1e-10);
}

TEST_CASE("hessian_distance_form: radial annihilation and flat example") {
  const auto e4 = ModelManifold::euclidean(4);
  const Point a = make_point(e4, {0, 0, 0, 0});
  const Point x = make_point(e4, {2, 0, 0, 0});
  const auto gd = grad_distance(e4, a, x);
  CHECK(std::abs(hessian_distance_form(e4, a, x, gd)) < 1e-14);
  const TangentVector ortho{x, {0, 1, 0, 0}};
  CHECK(hessian_distance_form(e4, a, x, ortho) == doctest::Approx(0.5).epsilon(1e-13));

  const auto s3 = ModelManifold::sphere_cap(3);
  const Point np = north_pole(s3);
  const Point eq = make_point(s3, {1.0, 0, 0, 1e-13});
  Rng rng(7);
  const auto X = random_unit_tangent(s3, eq, rng);
  CHECK(std::abs(hessian_distance_form(s3, np, eq, X)) < 1e-10);
}

TEST_CASE("hessian form is a symmetric bilinear form (polarization)") {
  for (const auto& m : testutil::all_models(4)) {
    Rng rng(505);
    for (int it = 0; it < 50; ++it) {
      const Point a = random_point(m, rng);
      Point x = random_point(m, rng);
      if (distance(m, a, x) < 0.1) continue;
      const auto X = random_unit_tangent(m, x, rng);
      const auto Y = random_unit_tangent(m, x, rng);
      TangentVector sum{x, X.v}, diff{x, X.v};
      for (std::size_t k = 0; k < X.v.size(); ++k) {
        sum.v[k] += Y.v[k];
        diff.v[k] -= Y.v[k];
      }
      const double pol = 0.25 * (hessian_distance_form(m, a, x, sum) -
                                 hessian_distance_form(m, a, x, diff));
      CHECK(pol ==
            doctest::Approx(hessian_distance_bilinear(m, a, x, X, Y)).epsilon(1e-9));
      CHECK(hessian_distance_bilinear(m, a, x, X, Y) ==
            doctest::Approx(hessian_distance_bilinear(m, a, x, Y, X)).epsilon(1e-12));
    }
  }
}

TEST_CASE("nonpositive curvature: comparison quantities are nonnegative") {
  for (const auto& m : {ModelManifold::euclidean(4), ModelManifold::hyperbolic(4, 1.3)}) {
    Rng rng(606);
    for (int it = 0; it < 300; ++it) {
      const Point a = random_point(m, rng);
      Point x = random_point(m, rng);
      const double d = distance(m, a, x);
      if (d < 1e-3) continue;
      CHECK(d * laplacian_distance(m, a, x) - (m.dim() - 1) >= -1e-12);
      const auto X = random_unit_tangent(m, x, rng);
      CHECK(hessian_distance_form(m, a, x, X) >= -1e-12);
    }
  }
}

TEST_CASE("volume_weight: examples") {
  const auto e4 = ModelManifold::euclidean(4);
  CHECK(volume_weight(e4, make_point(e4, {7, -2, 0, 1})) == 1.0);

  const auto h3 = ModelManifold::hyperbolic(3, 1.0);
  CHECK(volume_weight(h3, make_point(h3, {0, 0, 0})) == doctest::Approx(8.0));
  CHECK(volume_weight(h3, make_point(h3, {0.5, 0, 0})) ==
        doctest::Approx(18.962962962962962).epsilon(1e-13));

  const auto s3 = ModelManifold::sphere_cap(3);
  CHECK(volume_weight(s3, make_point(s3, {0.6, 0, 0, 0.8})) == doctest::Approx(1.25));
}

TEST_CASE("PoleSet: validation and derived quantities") {
  const auto e4 = ModelManifold::euclidean(4);
  const Point a1 = make_point(e4, {-1, 0, 0, 0}), a2 = make_point(e4, {1, 0, 0, 0});
  const auto ps = PoleSet::create(e4, {a1, a2});
  CHECK(ps.pairwise_distance(0, 1) == doctest::Approx(2.0));
  CHECK(ps.min_separation() == doctest::Approx(2.0));
  CHECK_THROWS_AS(PoleSet::create(e4, {a1}), invalid_input);
  CHECK_THROWS_AS(PoleSet::create(e4, {a1, a1}), invalid_input);

  const auto s3 = ModelManifold::sphere_cap(3);
  const double t = 0.4;
  const Point b1 = make_point(s3, {std::sin(t), 0, 0, std::cos(t)});
  const Point b2 = make_point(s3, {-std::sin(t), 0, 0, std::cos(t)});
  const auto ps2 = PoleSet::create(s3, {b1, b2});
  CHECK(ps2.delta() == doctest::Approx(t).epsilon(1e-12));
}

TEST_CASE("G matrix: examples") {
  const auto e3 = ModelManifold::euclidean(3);
  const Point a1 = make_point(e3, {-1, 0, 0}), a2 = make_point(e3, {1, 0, 0});
  const auto ps = PoleSet::create(e3, {a1, a2});

  const auto Gmid = g_matrix(e3, ps, make_point(e3, {0.3, 0, 0}));
  CHECK(Gmid(0, 1) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(Gmid(0, 0) == 1.0);
  CHECK(Gmid(1, 1) == 1.0);

  const auto G = g_matrix(e3, ps, make_point(e3, {0, 1, 0}));
  CHECK(G(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(g_matrix(e3, ps, a1), singular_point_error);
}

TEST_CASE("v field: cancellation, example, dual-formula agreement") {
  const auto e3 = ModelManifold::euclidean(3);
  const Point a1 = make_point(e3, {-1, 0, 0}), a2 = make_point(e3, {1, 0, 0});
  const auto ps = PoleSet::create(e3, {a1, a2});
  const auto vmid = v_field(e3, ps, make_point(e3, {0, 0, 0}));
  CHECK(vec::norm(vmid.v) < 1e-14);
  CHECK(v_norm_sq(e3, ps, make_point(e3, {0, 1, 0})) == doctest::Approx(1.0).epsilon(1e-13));

  for (const auto& m : testutil::all_models(4)) {
    Rng rng(707);
    std::vector<Point> poles{random_point(m, rng), random_point(m, rng),
                             random_point(m, rng)};
    if (distance(m, poles[0], poles[1]) < 0.3 || distance(m, poles[0], poles[2]) < 0.3 ||
        distance(m, poles[1], poles[2]) < 0.3)
      poles.pop_back();  // keep the set well separated if the draw clusters
    const auto pset = PoleSet::create(m, poles);
    const int n = pset.size();
    for (int it = 0; it < 1000; ++it) {
      Point x = random_point(m, rng);
      bool nearpole = false;
      for (int i = 0; i < n; ++i)
        if (distance(m, pset.pole(i), x) < 1e-2) nearpole = true;
      if (nearpole) continue;
      const double route_a = v_norm_sq(m, pset, x);
      // rearranged form: -sum_{i<j} |grad d_i/d_i - grad d_j/d_j|^2 + n sum 1/d_i^2
      const auto G = g_matrix(m, pset, x);
      double lead = 0.0, inv2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double di = distance(m, pset.pole(i), x);
        inv2 += 1.0 / (di * di);
        for (int j = i + 1; j < n; ++j) {
          const double dj = distance(m, pset.pole(j), x);
          lead += 1.0 / (di * di) + 1.0 / (dj * dj) - 2.0 * G(i, j) / (di * dj);
        }
      }
      const double route_b = -lead + n * inv2;
      CHECK(route_a == doctest::Approx(route_b).epsilon(1e-12));
      // third route: assembled tangent vector
      const auto v = v_field(m, pset, x);
      CHECK(metric_inner(m, x, v, v) == doctest::Approx(route_a).epsilon(1e-10));
    }
  }
}

TEST_CASE("exp_map: arc length is exact, direction matches grad_distance") {
  for (const auto& m : testutil::all_models(4)) {
    Rng rng(808);
    for (int it = 0; it < 200; ++it) {
      const Point x = random_point(m, rng);
      const auto u = random_unit_tangent(m, x, rng);
      const double r = 0.05 + rng.uniform01();
      if (m.kind() == ModelKind::SphereCap && r > 1.2) continue;
      const Point y = exp_map(m, x, u, r);
      if (!in_chart(m, y)) continue;
      CHECK(distance(m, x, y) == doctest::Approx(r).epsilon(1e-10));
      const auto g = grad_distance(m, x, y);
      CHECK(metric_norm(m, y, g) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("tangent frames are metric-orthonormal") {
  for (const auto& m : testutil::all_models(4)) {
    Rng rng(909);
    const Point x = random_point(m, rng);
    const auto frame = tangent_onb(m, x);
    REQUIRE(static_cast<int>(frame.size()) == m.dim());
    for (std::size_t i = 0; i < frame.size(); ++i)
      for (std::size_t j = 0; j < frame.size(); ++j)
        CHECK(metric_inner(m, x, frame[i], frame[j]) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
  }
}
