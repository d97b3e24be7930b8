#include <doctest.h>

#include <cmath>

#include "bubblekit/quadrature.hpp"

using namespace bubblekit;

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const auto& g = gauss_legendre(8);
  double w_sum = 0.0, x6 = 0.0;
  for (int i = 0; i < 8; ++i) {
    w_sum += g.weights[i];
    x6 += g.weights[i] * std::pow(g.nodes[i], 6);
  }
  CHECK(w_sum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x6 == doctest::Approx(2.0 / 7.0).epsilon(1e-13));  // int x^6 on [-1,1]
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}

TEST_CASE("radial Gaussian integrals match closed forms") {
  QuadratureSpec spec;
  spec.order_or_samples = 60;
  // int exp(-|y|^2) over R^N = pi^{N/2}
  for (int N : {3, 5, 7}) {
    auto r = integrate_radial([](double x) { return std::exp(-x * x); }, N, spec);
    CHECK(r.value == doctest::Approx(std::pow(M_PI, 0.5 * N)).epsilon(1e-9));
    CHECK(r.error_estimate < 1e-6 * r.value);
  }
  CHECK(integrate_radial([](double x) { return std::exp(-x * x); }, 3, spec).value ==
        doctest::Approx(5.568327996831708).epsilon(1e-10));  // pi^{3/2}
}

TEST_CASE("radial rule reports non-finite integrands") {
  QuadratureSpec spec;
  spec.order_or_samples = 16;
  CHECK_THROWS_WITH_AS(integrate_radial([](double x) { return 1.0 / (x - x); }, 3, spec),
                       "non-finite integrand", std::runtime_error);
}

TEST_CASE("sphere rule weight totals the sphere area") {
  for (int N : {2, 3, 4, 5}) {
    double total = 0.0;
    for (const auto& p : sphere_rule(N, 8)) {
      total += p.weight;
      CHECK(norm(p.dir) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(total == doctest::Approx(sphere_area(N)).epsilon(1e-10));
  }
}

TEST_CASE("ball volume and moments") {
  const Vec c(3, 0.0);
  auto one = [](const Vec&) { return 1.0; };
  CHECK(integrate_ball(one, 3, c, 1.0, 24, 12) ==
        doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-12));
  // int x^2 over unit ball in R^3 = (1/3) int |y|^2 = 4pi/15
  auto x2 = [](const Vec& y) { return y[0] * y[0]; };
  CHECK(integrate_ball(x2, 3, c, 1.0, 24, 12) ==
        doctest::Approx(4.0 * M_PI / 15.0).epsilon(1e-12));
}

TEST_CASE("box rule and full-space rule") {
  auto f = [](const Vec& y) { return y[0] * y[0] * y[1]; };
  // int_{[0,1]x[0,2]} x^2 y = (1/3)(2) = 2/3
  CHECK(integrate_box(f, {0.0, 0.0}, {1.0, 2.0}, 10) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  auto gauss = [](const Vec& y) { return std::exp(-norm2(y)); };
  auto r = integrate_fullspace(gauss, 3, Vec(3, 0.0), 40, 14);
  CHECK(r.value == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-8));
}

TEST_CASE("surface integration: ball and box areas") {
  QuadratureSpec spec;
  spec.order_or_samples = 12;
  auto one = [](const Vec&, const Vec&) { return 1.0; };
  auto ball = surface_integrate(one, Boundary::make_ball(3, 2.0), spec);
  CHECK(ball.value == doctest::Approx(4.0 * M_PI * 4.0).epsilon(1e-12));
  auto box = surface_integrate(one, Boundary::make_box({0, 0, 0}, {1, 2, 3}), spec);
  CHECK(box.value == doctest::Approx(2.0 * (1 * 2 + 2 * 3 + 1 * 3)).epsilon(1e-12));
  // divergence theorem: int_\partial <y, nu> = N * volume
  auto flux = [](const Vec& y, const Vec& nu) { return dot(y, nu); };
  auto fb = surface_integrate(flux, Boundary::make_ball(3, 1.0), spec);
  CHECK(fb.value == doctest::Approx(3.0 * 4.0 * M_PI / 3.0).epsilon(1e-12));
}

TEST_CASE("sector face measure") {
  // face of the wedge in the (y1,y2)-plane of R^3, radius 2, tail box [0,1]
  Boundary face;
  face.kind = BoundaryKind::sector_face;
  face.dim = 3;
  face.sector_m = 8;
  face.plane_first_axis = 0;
  face.face_plus = true;
  face.radius = 2.0;
  face.box_a = {0.0};
  face.box_b = {1.0};
  QuadratureSpec spec;
  spec.order_or_samples = 8;
  auto one = [](const Vec&, const Vec&) { return 1.0; };
  auto res = surface_integrate(one, face, spec);
  CHECK(res.value == doctest::Approx(2.0 * 1.0).epsilon(1e-12));
  // points lie on theta = pi/m
  auto angle = [](const Vec& y, const Vec&) { return std::atan2(y[1], y[0]); };
  auto ares = surface_integrate(angle, face, spec);
  CHECK(ares.value / res.value == doctest::Approx(M_PI / 8).epsilon(1e-12));
}

TEST_CASE("monte carlo integrates a Gaussian and is deterministic") {
  QuadratureSpec spec;
  spec.method = QuadMethod::monte_carlo;
  spec.order_or_samples = 200000;
  spec.seed = 42;
  auto f = [](const Vec& y) { return std::exp(-norm2(y)); };
  auto r1 = integrate_mc(f, 3, spec);
  auto r2 = integrate_mc(f, 3, spec);
  CHECK(r1.value == r2.value);  // bit-identical
  CHECK(r1.error_estimate == r2.error_estimate);
  CHECK(std::abs(r1.value - std::pow(M_PI, 1.5)) < 5.0 * r1.error_estimate);
  spec.seed = 43;
  auto r3 = integrate_mc(f, 3, spec);
  CHECK(r3.value != r1.value);
  CHECK(std::abs(r3.value - std::pow(M_PI, 1.5)) < 5.0 * r3.error_estimate);
}

TEST_CASE("monte carlo with importance centers") {
  QuadratureSpec spec;
  spec.method = QuadMethod::monte_carlo;
  spec.order_or_samples = 400000;
  spec.seed = 7;
  spec.importance_centers = {Vec{3.0, 0.0, 0.0}};
  spec.importance_scale = 4.0;
  auto f = [](const Vec& y) {
    const double d2 = (y[0] - 3.0) * (y[0] - 3.0) + y[1] * y[1] + y[2] * y[2];
    return std::exp(-16.0 * d2);
  };
  auto r = integrate_mc(f, 3, spec);
  const double exact = std::pow(M_PI / 16.0, 1.5);
  CHECK(std::abs(r.value - exact) < 5.0 * r.error_estimate);
  CHECK(std::abs(r.value - exact) / exact < 1e-2);
}
