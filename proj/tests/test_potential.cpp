#include <doctest.h>

#include <cmath>

#include "bubblekit/potential.hpp"

using namespace bubblekit;

TEST_CASE("polynomial parser: exact rationals and variables") {
  // V = 1/3 r^2 + y5 - 2 in R^7
  Potential p = parse_potential("1/3 r^2 + y5 - 2", 7);
  CHECK(p.value(3.0, {1.0, 0.0, 0.0}) == doctest::Approx(3.0 - 2.0 + 1.0).epsilon(1e-15));
  CHECK(p.value(0.0, {0.5, 0.0, 0.0}) == doctest::Approx(1.0 / 3.0 * 0.0 + 0.5 - 2.0));
  // decimal coefficients parse exactly as rationals
  Potential q = parse_potential("0.5*r", 7);
  CHECK(q.value(2.0, Vec(3, 0.0)) == 1.0);
  // products, powers, parentheses, unary minus
  Potential s = parse_potential("-(r - y5)^2 + 4", 7);
  CHECK(s.value(3.0, {1.0, 0.0, 0.0}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(parse_potential("r +", 7), std::invalid_argument);
  CHECK_THROWS_AS(parse_potential("y2", 7), std::invalid_argument);  // not a tail variable
  CHECK_THROWS_AS(parse_potential("1/0", 7), std::invalid_argument);
}

TEST_CASE("builtin example: values and ambient laplacian") {
  const int N = 7;
  Potential p = builtin_example_potential(N);
  // V(r, y*) = r^2 - 4 r sum y + sum y^2 + 1; probe inside the declared
  // derivative neighborhood
  const Vec t{0.40, 0.45, 0.50};
  const double r = 0.25;
  const double sum_t = 0.40 + 0.45 + 0.50;
  const double sum_t2 = 0.40 * 0.40 + 0.45 * 0.45 + 0.50 * 0.50;
  const double expect = r * r - 4.0 * r * sum_t + sum_t2 + 1.0;
  CHECK(p.value(r, t) == doctest::Approx(expect).epsilon(1e-14));
  // Delta V = 2N - 12 (sum y) / r in ambient coordinates
  CHECK(p.laplacian_ambient(r, t) ==
        doctest::Approx(2.0 * N - 12.0 * sum_t / r).epsilon(1e-12));
  // d(Delta V)/d y_k = -12 / r for tail coordinates
  CHECK(p.laplacian_derivative(r, t, 1) == doctest::Approx(-12.0 / r).epsilon(1e-12));
  // d(Delta V)/d r = 12 (sum y) / r^2
  CHECK(p.laplacian_derivative(r, t, 0) ==
        doctest::Approx(12.0 * sum_t / (r * r)).epsilon(1e-12));
  CHECK_THROWS_AS(builtin_example_potential(5), std::invalid_argument);
}

TEST_CASE("finite-difference fallback matches analytic derivatives to 1e-7") {
  const int N = 7;
  Potential analytic = builtin_example_potential(N);
  Potential generic = analytic;
  generic.polynomial.clear();
  Potential poly_copy = builtin_example_potential(N);
  generic.generic = [poly_copy](double r, const Vec& t) { return poly_copy.value(r, t); };

  const double r = analytic.nbhd_r;
  const Vec t = analytic.nbhd_tail;
  std::vector<std::vector<int>> idxs = {
      {1, 0, 0, 0}, {0, 1, 0, 0}, {2, 0, 0, 0}, {1, 1, 0, 0}, {0, 2, 0, 0},
      {3, 0, 0, 0}, {2, 1, 0, 0}, {1, 0, 2, 0}, {0, 1, 1, 1}};
  for (const auto& idx : idxs) {
    const double a = analytic.derivative(r, t, idx);
    const double g = generic.derivative(r, t, idx);
    CHECK(std::abs(a - g) <= 1e-7 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("derivative request outside the declared neighborhood") {
  Potential p = builtin_example_potential(7);
  CHECK_THROWS_AS(p.derivative(10.0, Vec(3, 0.0), {1, 0, 0, 0}), std::domain_error);
  // order-0 evaluation has no neighborhood restriction
  CHECK_NOTHROW(p.value(10.0, Vec(3, 0.0)));
}

TEST_CASE("critical point of the builtin example") {
  const int N = 7;
  Potential p = builtin_example_potential(N);
  auto cp = find_critical_point(p, 0.2, Vec(3, 0.4));
  const double r0 = std::sqrt(1.0 / 22.0);
  CHECK(std::abs(cp.r - r0) < 1e-10);
  for (double y : cp.tail) CHECK(y == doctest::Approx(2.0 * r0).epsilon(1e-9));
  CHECK(p.value(cp.r, cp.tail) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(cp.grad_norm < 1e-12);

  auto an = analyze_critical_point(p, cp);
  REQUIRE(an.eigenvalues.size() == 4);
  CHECK(an.eigenvalues[0] < 0.0);  // saddle in the r-heavy direction
  CHECK(an.eigenvalues[1] == doctest::Approx(1.0 / 11.0).epsilon(1e-9));
  CHECK(an.eigenvalues[2] == doctest::Approx(1.0 / 11.0).epsilon(1e-9));
  CHECK(an.local_degree == -1);
}

TEST_CASE("pure radial potential: f = r^2 (2 - r) has its critical point at 4/3") {
  // dim 4 with four_dim_radial leaves no tail variables
  Potential p = parse_potential("2 - r", 4);
  p.nbhd_r = 1.3;
  p.nbhd_radius = 1.0;
  auto cp = find_critical_point(p, 1.2, {});
  CHECK(cp.r == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  auto an = analyze_critical_point(p, cp);
  REQUIRE(an.eigenvalues.size() == 1);
  CHECK(an.eigenvalues[0] == doctest::Approx(-4.0).epsilon(1e-9));  // f'' = 4 - 6r
  CHECK(an.local_degree == -1);
}

TEST_CASE("V == 1 has no admissible critical point") {
  Potential p = parse_potential("1", 7);
  CHECK_THROWS_AS(find_critical_point(p, 1.0, Vec(3, 0.0)), std::runtime_error);
}

TEST_CASE("degenerate critical point reports no degree") {
  // f = r^2 (r-1)^3 has a double root of f' at r = 1
  Potential p = parse_potential("(r - 1)^3", 4);
  p.nbhd_r = 1.0;
  p.nbhd_radius = 1.0;
  auto cp = find_critical_point(p, 1.05, {});
  CHECK(cp.r == doctest::Approx(1.0).epsilon(1e-5));
  cp.r = 1.0;  // analyze at the exact root, where f'' vanishes identically
  CHECK_THROWS_WITH_AS(analyze_critical_point(p, cp),
                       "degenerate critical point: degree undefined by sign rule",
                       std::runtime_error);
}

TEST_CASE("non-degeneracy matrix reproduces the worked example") {
  const int N = 7;
  Potential p = builtin_example_potential(N);
  auto cp = find_critical_point(p, 0.2, Vec(3, 0.4));
  const int m = 8;
  auto Mp = assemble_nondegeneracy_matrix(p, cp, NondegeneracyVariant::tilde_V, m,
                                          SectorFace::plus);
  auto Mm = assemble_nondegeneracy_matrix(p, cp, NondegeneracyVariant::tilde_V, m,
                                          SectorFace::minus);
  REQUIRE(Mp.A.rows() == N - 3);

  // second-derivative block: A_{1,l} = -4 for l >= 2, A_{i,i} = 2, zeros elsewhere
  for (int l = 1; l < N - 3; ++l) CHECK(Mp.A(0, l) == doctest::Approx(-4.0).epsilon(1e-10));
  for (int i = 1; i < N - 3; ++i)
    for (int l = 1; l < N - 3; ++l)
      CHECK(Mp.A(i, l) == doctest::Approx(i == l ? 2.0 : 0.0).epsilon(1e-10));

  // corner entry by hand: 2 + 22 * (1 - 72/116) (derived from the entry formula
  // with DeltaV = 96 - 22N, dDeltaV/dy1 = 24(N-4)/r0, column sum -22 r0)
  const double corner = 2.0 + 22.0 * (1.0 - 72.0 / 116.0);
  CHECK(Mp.A(0, 0) == doctest::Approx(corner).epsilon(1e-10));

  // independent determinant oracle: arrowhead cofactor formula
  double det_oracle = 1.0;
  double schur = Mp.A(0, 0);
  for (int i = 1; i < N - 3; ++i) {
    det_oracle *= Mp.A(i, i);
    schur -= Mp.A(0, i) * Mp.A(i, 0) / Mp.A(i, i);
  }
  det_oracle *= schur;
  CHECK(Mp.det == doctest::Approx(det_oracle).epsilon(1e-10));
  CHECK(Mp.nondegenerate);

  // both faces give the same ratio nu_1/<nu,x_1> = 1/r0, hence the same matrix
  CHECK(Mm.det == doctest::Approx(Mp.det).epsilon(1e-12));
  CHECK(Mm.nondegenerate);

  // variant/symmetry mismatch is rejected
  CHECK_THROWS_AS(assemble_nondegeneracy_matrix(p, cp, NondegeneracyVariant::tilde_V_prime,
                                                m, SectorFace::plus),
                  std::invalid_argument);
}

TEST_CASE("matrix undefined when DeltaV vanishes") {
  // V with zero ambient laplacian at the critical point of r^2 V:
  // harmonic-in-ambient choice V = 1 + (y5^2 - y6^2) keeps DeltaV = 0
  Potential p = parse_potential("1 + y5^2 - y6^2", 7);
  p.nbhd_r = 1.0;
  p.nbhd_radius = 5.0;
  CriticalPoint cp;  // synthetic point; assembly only needs the location
  cp.r = 1.0;
  cp.tail = Vec(3, 0.0);
  CHECK_THROWS_WITH_AS(assemble_nondegeneracy_matrix(p, cp, NondegeneracyVariant::tilde_V,
                                                     8, SectorFace::plus),
                       "matrix undefined: DeltaV vanishes", std::runtime_error);
}

TEST_CASE("monotonicity obstruction verdicts") {
  // V == 1: (r^2)' = 2r > 0 throughout -> obstructed
  CHECK(monotonicity_obstruction([](double) { return 1.0; }, 0.1, 3.0) ==
        ObstructionVerdict::obstructed);
  // V = 2 - r: r^2 V has an interior max at 4/3 -> derivative changes sign
  CHECK(monotonicity_obstruction([](double r) { return 2.0 - r; }, 0.1, 3.0) ==
        ObstructionVerdict::not_obstructed);
}

TEST_CASE("audit report aggregates the assumptions") {
  Potential p = builtin_example_potential(7);
  auto rep = audit_potential(p, 0.2, Vec(3, 0.4));
  CHECK(rep.assumption_V);
  CHECK(rep.assumption_tilde_V);
  CHECK(rep.V_at_cp == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rep.det_A_plus == doctest::Approx(rep.det_A_minus).epsilon(1e-12));
}
