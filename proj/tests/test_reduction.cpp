#include <doctest.h>

#include <cmath>

#include "bubblekit/reduction.hpp"

using namespace bubblekit;

namespace {

struct Setup {
  Potential pot = builtin_example_potential(7);
  ExpansionConstants C = compute_constants(7);
  double r0 = std::sqrt(1.0 / 22.0);
};

}  // namespace

TEST_CASE("reduced critical point sits at the critical point of r^2 V") {
  Setup s;
  // with mu eliminated the profile is proportional to -(t^2 V)^{(N-2)/(N-4)},
  // so (t*, y**) must coincide with the audited critical point of r^2 V
  const auto cp = find_reduced_critical_point(s.C, s.pot, 64, 0.2, Vec(3, 0.4));
  CHECK(cp.t == doctest::Approx(s.r0).epsilon(1e-7));
  for (double y : cp.tail) CHECK(y == doctest::Approx(2.0 * s.r0).epsilon(1e-6));
  CHECK(cp.grad_norm < 1e-9);
  CHECK(cp.mu_star ==
        doctest::Approx(critical_mu(s.C, s.pot.value(cp.t, cp.tail), 64, cp.t)).epsilon(1e-10));

  // stationarity of the one-variable profile g(t) at fixed y** (central diff)
  auto g = [&](double t) {
    return reduced_energy_at_critical_mu(s.C, s.pot.value(t, cp.tail), 64, t);
  };
  const double h = 1e-6;
  const double gref = std::abs(g(cp.t));
  CHECK(std::abs((g(cp.t + h) - g(cp.t - h)) / (2.0 * h)) < 1e-9 * std::max(gref / h, 1.0));
}

TEST_CASE("reduced critical point invariances") {
  Setup s;
  const auto cp = find_reduced_critical_point(s.C, s.pot, 64, 0.2, Vec(3, 0.4));
  // scaling both A2 and A3 by c > 0 does not move (t*, y**)
  ExpansionConstants scaled = s.C;
  scaled.A2 *= 3.7;
  scaled.A3 *= 3.7;
  const auto cp2 = find_reduced_critical_point(scaled, s.pot, 64, 0.2, Vec(3, 0.4));
  CHECK(cp2.t == doctest::Approx(cp.t).epsilon(1e-8));
  for (std::size_t k = 0; k < cp.tail.size(); ++k)
    CHECK(cp2.tail[k] == doctest::Approx(cp.tail[k]).epsilon(1e-8));
  // the common factor cancels in the A3/A2 ratio, so mu* is unchanged too
  CHECK(cp2.mu_star == doctest::Approx(cp.mu_star).epsilon(1e-8));
  // scaling A3 alone rescales mu* by c^{1/(N-4)}
  ExpansionConstants a3_only = s.C;
  a3_only.A3 *= 3.7;
  const auto cp3 = find_reduced_critical_point(a3_only, s.pot, 64, 0.2, Vec(3, 0.4));
  CHECK(cp3.mu_star == doctest::Approx(cp.mu_star * std::pow(3.7, 1.0 / 3.0)).epsilon(1e-6));
}

TEST_CASE("escaped search box") {
  Setup s;
  // start far from the critical point with a tiny box: Newton must leave it
  CHECK_THROWS_WITH_AS(
      find_reduced_critical_point(s.C, s.pot, 64, 0.30, Vec(3, 0.25), 0.02),
      "escaped search box", std::runtime_error);
}

TEST_CASE("scaling study hits the predicted exponent") {
  Setup s;
  std::vector<int> ns;
  for (int n = 64; n <= 4096; n *= 2) ns.push_back(n);
  const auto study = scaling_study(s.pot, s.C, ns, 0.2, Vec(3, 0.4));
  CHECK(study.predicted_exponent == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(study.fitted_exponent - 5.0 / 3.0) < 0.05);
  REQUIRE(study.rows.size() == ns.size());
  // mu* strictly increasing in n
  for (std::size_t i = 1; i < study.rows.size(); ++i)
    CHECK(study.rows[i].mu_star > study.rows[i - 1].mu_star);
  // fitted exponent improves as the lower end of the range grows
  const auto s1 = scaling_study(s.pot, s.C, {16, 32, 64, 128, 256}, 0.2, Vec(3, 0.4));
  const auto s2 = scaling_study(s.pot, s.C, {64, 128, 256, 512, 1024}, 0.2, Vec(3, 0.4));
  const auto s3 = scaling_study(s.pot, s.C, {256, 512, 1024, 2048, 4096}, 0.2, Vec(3, 0.4));
  const double e1 = std::abs(s1.fitted_exponent - 5.0 / 3.0);
  const double e2 = std::abs(s2.fitted_exponent - 5.0 / 3.0);
  const double e3 = std::abs(s3.fitted_exponent - 5.0 / 3.0);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
}

TEST_CASE("N = 8 target exponent is 3/2") {
  Potential pot = builtin_example_potential(8);
  const auto C = compute_constants(8);
  auto cp0 = find_critical_point(pot, pot.nbhd_r, pot.nbhd_tail);
  std::vector<int> ns{64, 256, 1024, 4096};
  const auto study = scaling_study(pot, C, ns, cp0.r, cp0.tail);
  CHECK(study.predicted_exponent == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(std::abs(study.fitted_exponent - 1.5) < 0.05);
}

TEST_CASE("ring start angle does not move the reduced critical point") {
  // relabeling p_j only permutes the pairwise distances, so D_n and the
  // profile are unchanged; verify D_n against its closed form directly
  const int N = 7;
  for (int n : {4, 8, 16}) {
    double closed = 0.0;
    for (int j = 2; j <= n; ++j)
      closed += std::pow(2.0 * 0.7 * std::sin((j - 1) * M_PI / n), -(N - 2.0));
    CHECK(interaction_sum(n, 0.7, N) == doctest::Approx(closed).epsilon(1e-14));
  }
}

TEST_CASE("residual decay study: strictly decreasing with slope <= -1") {
  Potential pot = builtin_example_potential(7);
  const auto study =
      residual_decay_study(pot, 8, {40.0, 80.0}, pot.nbhd_r, pot.nbhd_tail);
  REQUIRE(study.rows.size() == 2);
  CHECK(study.rows[1].norm < study.rows[0].norm);
  CHECK(study.fitted_slope <= -1.0);
}
