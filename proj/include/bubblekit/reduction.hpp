#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bubblekit/bubble.hpp"
#include "bubblekit/energy.hpp"
#include "bubblekit/geometry.hpp"
#include "bubblekit/potential.hpp"

namespace bubblekit {

// ---------------------------------------------------------------------------
// Reduced critical point in (t, ytilde*) with the scale eliminated
// ---------------------------------------------------------------------------

enum class ReducedClassification { maximum, minimum, saddle, degenerate };

inline const char* to_string(ReducedClassification c) {
  switch (c) {
    case ReducedClassification::maximum: return "max";
    case ReducedClassification::minimum: return "min";
    case ReducedClassification::saddle: return "saddle";
    case ReducedClassification::degenerate: return "degenerate";
  }
  return "?";
}

struct ReducedCriticalPoint {
  double t = 0.0;
  Vec tail;
  double mu_star = 0.0;
  double grad_norm = 0.0;
  ReducedClassification classification = ReducedClassification::saddle;
  int iterations = 0;
};

// The reduced energy with mu at its stationary value is, up to a positive
// n,N-dependent constant, -(t^2 V)^{(N-2)/(N-4)}; its critical points in
// (t, ytilde*) therefore coincide with those of t^2 V. Newton runs on a
// finite-difference gradient/Hessian of the actual profile so that the search
// exercises the same code path a general profile would.
inline ReducedCriticalPoint find_reduced_critical_point(
    const ExpansionConstants& C, const Potential& pot, int n, double t_guess,
    const Vec& tail_guess, double box_half_width = -1.0) {
  const int k = pot.tail_dim();
  const int dim = 1 + k;
  if (box_half_width <= 0.0) box_half_width = 0.5 * t_guess;

  auto raw_profile = [&](const Eigen::VectorXd& x) {
    Vec tail(k);
    for (int a = 0; a < k; ++a) tail[a] = x(1 + a);
    const double V = pot.value(x(0), tail);
    return reduced_energy_at_critical_mu(C, V, n, x(0));
  };

  Eigen::VectorXd x(dim);
  x(0) = t_guess;
  for (int a = 0; a < k; ++a) x(1 + a) = tail_guess[a];
  const Eigen::VectorXd x0 = x;

  // the profile shrinks like mu*^{-2} as n grows; normalize so the Newton
  // tolerance is scale-free
  double ref = std::abs(raw_profile(x0));
  if (!(ref > 0.0)) ref = 1.0;
  auto profile = [&](const Eigen::VectorXd& p) { return raw_profile(p) / ref; };

  const double h = 1e-5 * t_guess;
  auto fd_grad_hess = [&](const Eigen::VectorXd& p, Eigen::VectorXd& g, Eigen::MatrixXd& H) {
    g.resize(dim);
    H.resize(dim, dim);
    const double f0 = profile(p);
    std::vector<double> fp(dim), fm(dim);
    for (int a = 0; a < dim; ++a) {
      Eigen::VectorXd q = p;
      q(a) += h;
      fp[a] = profile(q);
      q(a) = p(a) - h;
      fm[a] = profile(q);
      g(a) = (fp[a] - fm[a]) / (2.0 * h);
      H(a, a) = (fp[a] - 2.0 * f0 + fm[a]) / (h * h);
    }
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b) {
        Eigen::VectorXd q = p;
        q(a) += h;
        q(b) += h;
        const double fpp = profile(q);
        q(b) = p(b) - h;
        const double fpm = profile(q);
        q(a) = p(a) - h;
        const double fmm = profile(q);
        q(b) = p(b) + h;
        const double fmp = profile(q);
        H(a, b) = H(b, a) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      }
  };

  Eigen::VectorXd g;
  Eigen::MatrixXd H;
  const double tol = 1e-9;
  for (int iter = 0; iter < 80; ++iter) {
    if ((x - x0).lpNorm<Eigen::Infinity>() > box_half_width)
      throw std::runtime_error("escaped search box");
    fd_grad_hess(x, g, H);
    if (g.norm() < tol || iter == 79) {
      if (g.norm() >= tol) throw std::runtime_error("reduced search did not converge");
      ReducedCriticalPoint out;
      out.t = x(0);
      out.tail.resize(k);
      for (int a = 0; a < k; ++a) out.tail[a] = x(1 + a);
      out.mu_star = critical_mu(C, pot.value(out.t, out.tail), n, out.t);
      out.grad_norm = g.norm();
      out.iterations = iter;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
      const double lo = es.eigenvalues().minCoeff();
      const double hi = es.eigenvalues().maxCoeff();
      const double span = es.eigenvalues().cwiseAbs().maxCoeff();
      if (es.eigenvalues().cwiseAbs().minCoeff() < 1e-10 * std::max(span, 1.0))
        out.classification = ReducedClassification::degenerate;
      else if (hi < 0.0)
        out.classification = ReducedClassification::maximum;
      else if (lo > 0.0)
        out.classification = ReducedClassification::minimum;
      else
        out.classification = ReducedClassification::saddle;
      return out;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
    if (!lu.isInvertible()) {
      // singular Hessian: report where we are, classified degenerate
      ReducedCriticalPoint out;
      out.t = x(0);
      out.tail.resize(k);
      for (int a = 0; a < k; ++a) out.tail[a] = x(1 + a);
      out.mu_star = critical_mu(C, pot.value(out.t, out.tail), n, out.t);
      out.grad_norm = g.norm();
      out.iterations = iter;
      out.classification = ReducedClassification::degenerate;
      return out;
    }
    Eigen::VectorXd step = lu.solve(-g);
    // damp: never move more than a tenth of the box in one go
    const double max_step = 0.25 * box_half_width;
    const double sn = step.lpNorm<Eigen::Infinity>();
    if (sn > max_step) step *= max_step / sn;
    x += step;
  }
  throw std::runtime_error("reduced search did not converge");
}

// ---------------------------------------------------------------------------
// Scaling study: mu*(n) against the predicted power law n^{(N-2)/(N-4)}
// ---------------------------------------------------------------------------

struct ScalingRow {
  int n = 0;
  double t_star = 0.0;
  Vec tail_star;
  double mu_star = 0.0;
  double grad_norm = 0.0;
  ReducedClassification classification = ReducedClassification::saddle;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  double fitted_exponent = 0.0;
  double predicted_exponent = 0.0;
  double fit_residual = 0.0;  // rms of log-log fit residuals
};

inline ScalingStudy scaling_study(const Potential& pot, const ExpansionConstants& C,
                                  const std::vector<int>& n_values, double t_guess,
                                  const Vec& tail_guess) {
  ScalingStudy out;
  const int N = pot.dim;
  out.predicted_exponent = (N - 2.0) / (N - 4.0);
  for (int n : n_values) {
    const auto cp = find_reduced_critical_point(C, pot, n, t_guess, tail_guess);
    ScalingRow row;
    row.n = n;
    row.t_star = cp.t;
    row.tail_star = cp.tail;
    row.mu_star = cp.mu_star;
    row.grad_norm = cp.grad_norm;
    row.classification = cp.classification;
    out.rows.push_back(std::move(row));
  }
  // least squares on log mu = a + b log n
  const std::size_t m = out.rows.size();
  if (m < 2) throw std::invalid_argument("scaling study needs at least two n values");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : out.rows) {
    const double x = std::log(static_cast<double>(r.n));
    const double y = std::log(r.mu_star);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double a = (sy - b * sx) / m;
  out.fitted_exponent = b;
  double ss = 0.0;
  for (const auto& r : out.rows) {
    const double e = std::log(r.mu_star) - (a + b * std::log(static_cast<double>(r.n)));
    ss += e * e;
  }
  out.fit_residual = std::sqrt(ss / m);
  return out;
}

// ---------------------------------------------------------------------------
// Residual decay study: ||l_n||_** against the concentration scale
// ---------------------------------------------------------------------------

struct ResidualRow {
  double mu = 0.0;
  double norm = 0.0;  // double-star weighted norm of l_n
};

struct ResidualStudy {
  std::vector<ResidualRow> rows;
  double fitted_slope = 0.0;  // d log ||l_n|| / d log mu; expected <= -1
  bool strictly_decreasing = false;
};

inline ResidualStudy residual_decay_study(const Potential& pot, int n,
                                          const std::vector<double>& mu_values,
                                          double t_ring, const Vec& tail, int m_outer = 8,
                                          double lambda_outer = 64.0) {
  ResidualStudy out;
  const int N = pot.dim;
  auto V = [&](const Vec& y) {
    double r2 = 0.0;
    for (int k = 0; k < 4; ++k) r2 += y[k] * y[k];
    Vec t(y.begin() + 4, y.end());
    return pot.value(std::sqrt(r2), t);
  };

  for (double mu : mu_values) {
    TowerConfig cfg;
    cfg.dim = N;
    cfg.m = m_outer;
    cfg.r_bar = t_ring;
    cfg.lambda = lambda_outer;
    cfg.n = n;
    cfg.t = t_ring;
    cfg.mu = mu;
    cfg.tail = tail;
    cfg.cutoff = CutoffSpec(N, t_ring, tail, 0.5 * t_ring);

    // outer-ring proxy for u_m: plain sum of the m-ring bubbles
    auto u_m = [cfg](const Vec& y) {
      double s = 0.0;
      for (const auto& c : cfg.m_centers()) s += BubbleParams(cfg.dim, c, cfg.lambda).value(y);
      return s;
    };

    WeightedNormKind kind;
    kind.variant = NormVariant::double_star;
    kind.dim = N;
    kind.centers = cfg.n_centers();
    kind.scale = mu;
    const auto cloud = structured_cloud(kind.centers, mu, N, 2.0 * cfg.cutoff.delta);
    auto ln = [&](const Vec& y) { return eval_residual_ln(cfg, u_m, V, y); };
    const auto nr = weighted_norm(ln, kind, cloud);
    out.rows.push_back({mu, nr.value});
  }

  out.strictly_decreasing = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (!(out.rows[i].norm < out.rows[i - 1].norm)) out.strictly_decreasing = false;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const std::size_t m = out.rows.size();
  for (const auto& r : out.rows) {
    const double x = std::log(r.mu);
    const double y = std::log(r.norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

}  // namespace bubblekit
