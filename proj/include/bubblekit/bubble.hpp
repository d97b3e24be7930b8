#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bubblekit/geometry.hpp"
#include "bubblekit/rng.hpp"

namespace bubblekit {

// Scalar field with analytic derivatives where available.
struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;      // may be empty
  std::function<double(const Vec&)> laplacian;  // may be empty
};

// ---------------------------------------------------------------------------
// Aubin-Talenti bubble U_{x,lambda}
// ---------------------------------------------------------------------------

struct BubbleParams {
  int dim = 7;
  Vec center;        // x in R^N
  double scale = 1;  // lambda > 0

  BubbleParams(int N, Vec x, double lambda) : dim(N), center(std::move(x)), scale(lambda) {
    if (scale <= 0.0) throw std::invalid_argument("bubble scale must be positive");
  }

  double amplitude() const {  // [N(N-2)]^{(N-2)/4}
    return std::pow(dim * (dim - 2.0), 0.25 * (dim - 2.0));
  }

  // U = c_N (lambda / (1 + lambda^2 |y-x|^2))^{(N-2)/2}
  double value(const Vec& y) const {
    const double w = 1.0 + scale * scale * dist2(y, center);
    return amplitude() * std::pow(scale / w, 0.5 * (dim - 2.0));
  }

  Vec gradient(const Vec& y) const {
    const int N = dim;
    const double w = 1.0 + scale * scale * dist2(y, center);
    const double coef = -(N - 2.0) * amplitude() * std::pow(scale, 0.5 * (N - 2.0) + 2.0) *
                        std::pow(w, -0.5 * N);
    Vec g(N);
    for (int k = 0; k < N; ++k) g[k] = coef * (y[k] - center[k]);
    return g;
  }

  // Sum of the explicit second derivatives (not -U^{2*-1}; the PDE identity is
  // a test, not a definition).
  double laplacian(const Vec& y) const {
    const int N = dim;
    const double rho2 = dist2(y, center);
    const double l2 = scale * scale;
    const double w = 1.0 + l2 * rho2;
    const double c = amplitude() * std::pow(scale, 0.5 * (N - 2.0));
    // sum_i d2U/dy_i^2 = -(N-2) c l^2 [ N w^{-N/2} - N l^2 rho^2 w^{-(N+2)/2} ]
    return -(N - 2.0) * c * l2 * N *
           (std::pow(w, -0.5 * N) - l2 * rho2 * std::pow(w, -0.5 * (N + 2.0)));
  }

  // dU/dlambda = c a lambda^{a-1} (1 - lambda^2 rho^2) w^{-a-1},  a = (N-2)/2
  double dvalue_dscale(const Vec& y) const {
    const int N = dim;
    const double a = 0.5 * (N - 2.0);
    const double rho2 = dist2(y, center);
    const double w = 1.0 + scale * scale * rho2;
    return amplitude() * a * std::pow(scale, a - 1.0) * (1.0 - scale * scale * rho2) *
           std::pow(w, -a - 1.0);
  }

  Vec dgradient_dscale(const Vec& y) const {
    const int N = dim;
    const double a = 0.5 * (N - 2.0);
    const double rho2 = dist2(y, center);
    const double l2 = scale * scale;
    const double w = 1.0 + l2 * rho2;
    const double coef = -(N - 2.0) * amplitude() * std::pow(scale, a + 1.0) *
                        std::pow(w, -a - 2.0) * ((a + 2.0) * w - (a + 1.0) * 2.0 * l2 * rho2);
    Vec g(N);
    for (int k = 0; k < N; ++k) g[k] = coef * (y[k] - center[k]);
    return g;
  }

  double dlaplacian_dscale(const Vec& y) const {
    const int N = dim;
    const double b = 0.5 * (N + 2.0);
    const double rho2 = dist2(y, center);
    const double w = 1.0 + scale * scale * rho2;
    return -N * (N - 2.0) * amplitude() * b * std::pow(scale, b - 1.0) *
           (1.0 - scale * scale * rho2) * std::pow(w, -b - 1.0);
  }

  // dU/dy_i of the *center* coordinate is -dU/dy_i of the argument.
  Vec dvalue_dcenter(const Vec& y) const {
    Vec g = gradient(y);
    for (auto& v : g) v = -v;
    return g;
  }

  ScalarField field() const {
    BubbleParams p = *this;
    return {[p](const Vec& y) { return p.value(y); },
            [p](const Vec& y) { return p.gradient(y); },
            [p](const Vec& y) { return p.laplacian(y); }};
  }

  // Field of dU/dlambda with analytic gradient and laplacian.
  ScalarField scale_derivative_field() const {
    BubbleParams p = *this;
    return {[p](const Vec& y) { return p.dvalue_dscale(y); },
            [p](const Vec& y) { return p.dgradient_dscale(y); },
            [p](const Vec& y) { return p.dlaplacian_dscale(y); }};
  }

  // Field of dU/dy_i (a translation kernel element).
  ScalarField translation_derivative_field(int i) const {
    BubbleParams p = *this;
    const int N = dim;
    return {[p, i](const Vec& y) { return p.gradient(y)[i]; },
            [p, i, N](const Vec& y) {
              // d_j d_i U
              const double rho2 = dist2(y, p.center);
              const double l2 = p.scale * p.scale;
              const double w = 1.0 + l2 * rho2;
              const double c =
                  -(N - 2.0) * p.amplitude() * std::pow(p.scale, 0.5 * (N - 2.0) + 2.0);
              Vec g(N);
              for (int j = 0; j < N; ++j) {
                double v = 0.0;
                if (j == i) v += std::pow(w, -0.5 * N);
                v -= N * l2 * (y[i] - p.center[i]) * (y[j] - p.center[j]) *
                     std::pow(w, -0.5 * (N + 2.0));
                g[j] = c * v;
              }
              return g;
            },
            [p, i, N](const Vec& y) {
              // Delta d_i U = d_i Delta U
              const double rho2 = dist2(y, p.center);
              const double l2 = p.scale * p.scale;
              const double w = 1.0 + l2 * rho2;
              return N * (N + 2.0) * (N - 2.0) * p.amplitude() *
                     std::pow(p.scale, 0.5 * (N + 2.0) + 2.0) * (y[i] - p.center[i]) *
                     std::pow(w, -0.5 * (N + 4.0));
            }};
  }
};

// ---------------------------------------------------------------------------
// Cut-off: quintic smoothstep in the (r, y*) distance, r = |(y1..y4)|
// ---------------------------------------------------------------------------

struct CutoffSpec {
  int dim = 7;
  double anchor_r = 1.0;   // r0 > 0
  Vec anchor_tail;         // y0* in R^{N-4}
  double delta = 0.1;      // inner radius; outer radius is 2*delta

  CutoffSpec() = default;
  CutoffSpec(int N, double r0, Vec y0, double d)
      : dim(N), anchor_r(r0), anchor_tail(std::move(y0)), delta(d) {
    if (delta <= 0.0) throw std::invalid_argument("cutoff delta must be positive");
  }

  // distance in the reduced (r, y*) variables
  double reduced_distance(const Vec& y) const {
    double r2 = 0.0;
    for (int k = 0; k < 4; ++k) r2 += y[k] * y[k];
    const double dr = std::sqrt(r2) - anchor_r;
    double s2 = dr * dr;
    for (int k = 4; k < dim; ++k) {
      const double d = y[k] - anchor_tail[k - 4];
      s2 += d * d;
    }
    return std::sqrt(s2);
  }

  // smoothstep profile S(d): 1 on [0, delta], 0 on [2 delta, inf), quintic between
  static double profile(double s) { return ((6.0 * s - 15.0) * s + 10.0) * s * s * s; }
  static double profile1(double s) { return ((30.0 * s - 60.0) * s + 30.0) * s * s; }
  static double profile2(double s) { return ((120.0 * s - 180.0) * s + 60.0) * s; }

  double value(const Vec& y) const {
    const double d = reduced_distance(y);
    if (d <= delta) return 1.0;
    if (d >= 2.0 * delta) return 0.0;
    // rounding in the quintic can land a hair outside [0,1]
    return std::clamp(1.0 - profile((d - delta) / delta), 0.0, 1.0);
  }

  Vec gradient(const Vec& y) const {
    const int N = dim;
    Vec g(N, 0.0);
    const double d = reduced_distance(y);
    if (d <= delta || d >= 2.0 * delta) return g;
    const double dS = -profile1((d - delta) / delta) / delta;
    double r2 = 0.0;
    for (int k = 0; k < 4; ++k) r2 += y[k] * y[k];
    const double r = std::sqrt(r2);
    const double dr = r - anchor_r;
    for (int k = 0; k < 4; ++k) g[k] = dS * (dr / d) * (y[k] / r);
    for (int k = 4; k < N; ++k) g[k] = dS * (y[k] - anchor_tail[k - 4]) / d;
    return g;
  }

  // |grad d| = 1, so Delta zeta = S''(d) + S'(d) * Delta d with
  // Delta d = (N-4)/d + 3 (r - r0) / (r d).
  double laplacian(const Vec& y) const {
    const int N = dim;
    const double d = reduced_distance(y);
    if (d <= delta || d >= 2.0 * delta) return 0.0;
    const double s = (d - delta) / delta;
    const double dS = -profile1(s) / delta;
    const double d2S = -profile2(s) / (delta * delta);
    double r2 = 0.0;
    for (int k = 0; k < 4; ++k) r2 += y[k] * y[k];
    const double r = std::sqrt(r2);
    const double lap_d = (N - 4.0) / d + 3.0 * (r - anchor_r) / (r * d);
    return d2S + dS * lap_d;
  }
};

// ---------------------------------------------------------------------------
// Polygonal ring placement
// ---------------------------------------------------------------------------

enum class RingPlane { inner_12_plane, inner_34_plane };

inline std::vector<Vec> polygon_centers(RingPlane ring, int count, double radius,
                                        const Vec& tail, int N) {
  if (count < 2) throw std::invalid_argument("polygon_centers: count >= 2 required");
  if (radius <= 0.0) throw std::invalid_argument("polygon_centers: radius > 0 required");
  std::vector<Vec> pts;
  const int i0 = ring == RingPlane::inner_12_plane ? 0 : 2;
  for (int j = 0; j < count; ++j) {
    const double a = 2.0 * M_PI * j / count;
    Vec p(N, 0.0);
    p[i0] = radius * std::cos(a);
    p[i0 + 1] = radius * std::sin(a);
    for (std::size_t k = 0; k < tail.size(); ++k) p[4 + k] = tail[k];
    pts.push_back(std::move(p));
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Two-ring glued ansatz
// ---------------------------------------------------------------------------

struct TowerConfig {
  int dim = 7;
  int m = 8;           // even, (y1,y2)-ring
  double r_bar = 1.0;  // ring radius near r0
  double lambda = 32;  // m-ring concentration
  int n = 8;           // even, (y3,y4)-ring
  double t = 1.0;      // ring radius near r0
  double mu = 32;      // n-ring concentration
  Vec tail;            // shared ytilde* in R^{N-4}
  CutoffSpec cutoff;

  std::vector<Vec> m_centers() const {
    return polygon_centers(RingPlane::inner_12_plane, m, r_bar, tail, dim);
  }
  std::vector<Vec> n_centers() const {
    return polygon_centers(RingPlane::inner_34_plane, n, t, tail, dim);
  }
};

// Sum over both rings of cut-off bubbles; gradient includes the product rule.
inline double ansatz_eval(const TowerConfig& cfg, const Vec& y, Vec* grad = nullptr) {
  const double zeta = cfg.cutoff.value(y);
  Vec zeta_grad;
  if (grad) {
    grad->assign(cfg.dim, 0.0);
    zeta_grad = cfg.cutoff.gradient(y);
  }
  double total = 0.0;
  auto add_ring = [&](const std::vector<Vec>& centers, double scale) {
    for (const auto& c : centers) {
      BubbleParams b(cfg.dim, c, scale);
      const double u = b.value(y);
      total += zeta * u;
      if (grad) {
        const Vec gu = b.gradient(y);
        for (int k = 0; k < cfg.dim; ++k) (*grad)[k] += zeta * gu[k] + zeta_grad[k] * u;
      }
    }
  };
  add_ring(cfg.m_centers(), cfg.lambda);
  add_ring(cfg.n_centers(), cfg.mu);
  return total;
}

inline ScalarField ansatz_field(const TowerConfig& cfg) {
  return {[cfg](const Vec& y) { return ansatz_eval(cfg, y); },
          [cfg](const Vec& y) {
            Vec g;
            ansatz_eval(cfg, y, &g);
            return g;
          },
          nullptr};
}

// ---------------------------------------------------------------------------
// Group symmetrization g -> g*
// ---------------------------------------------------------------------------

// Average over the m rotations A_j in the (y1,y2)-plane, then over the
// reflections B_i (only B_2 acts; the others are the identity).
inline std::function<double(const Vec&)> symmetrize(std::function<double(const Vec&)> f,
                                                    int m) {
  return [f = std::move(f), m](const Vec& y) {
    const int N = static_cast<int>(y.size());
    auto hat = [&](const Vec& z) {
      const double r = std::hypot(z[0], z[1]);
      const double th = std::atan2(z[1], z[0]);
      double s = 0.0;
      Vec w = z;
      for (int j = 1; j <= m; ++j) {
        const double a = th + 2.0 * M_PI * j / m;
        w[0] = r * std::cos(a);
        w[1] = r * std::sin(a);
        s += f(w);
      }
      return s / m;
    };
    const double g_hat = hat(y);
    Vec yb = y;
    yb[1] = -yb[1];
    const double g_hat_b2 = hat(yb);
    // (1/(N-1)) sum_{i=2}^N (ghat + ghat(B_i y))/2 with B_i = id for i != 2
    return ((N - 2.0) * g_hat + 0.5 * (g_hat + g_hat_b2)) / (N - 1.0);
  };
}

// ---------------------------------------------------------------------------
// Weighted sup norms (star / double-star)
// ---------------------------------------------------------------------------

enum class NormVariant { star, double_star };

struct WeightedNormKind {
  NormVariant variant = NormVariant::star;
  int dim = 7;
  std::vector<Vec> centers;
  double scale = 1.0;  // lambda (or mu)

  double tau() const { return (dim - 4.0) / (dim - 2.0); }
  double power_exponent() const {
    return (variant == NormVariant::star ? 0.5 * (dim - 2.0) : 0.5 * (dim + 2.0)) + tau();
  }
  double scale_exponent() const {
    return variant == NormVariant::star ? 0.5 * (dim - 2.0) : 0.5 * (dim + 2.0);
  }

  double envelope(const Vec& y) const {
    double s = 0.0;
    const double p = power_exponent();
    for (const auto& c : centers) s += std::pow(1.0 + scale * dist(y, c), -p);
    return s;
  }
};

struct WeightedNormResult {
  double value = 0.0;
  Vec argmax;
  std::size_t argmax_index = 0;
};

inline WeightedNormResult weighted_norm(const std::function<double(const Vec&)>& u,
                                        const WeightedNormKind& kind,
                                        const std::vector<Vec>& cloud) {
  if (cloud.empty()) throw std::invalid_argument("weighted_norm: empty point cloud");
  WeightedNormResult best;
  const double pref = std::pow(kind.scale, -kind.scale_exponent());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double ratio = pref * std::abs(u(cloud[i])) / kind.envelope(cloud[i]);
    if (ratio > best.value) {  // strict: ties keep the first index
      best.value = ratio;
      best.argmax = cloud[i];
      best.argmax_index = i;
    }
  }
  if (best.argmax.empty()) best.argmax = cloud.front();
  return best;
}

// Structured cloud: geometric rings of directions around each center plus
// far-field shells. This cloud is part of the norm's test contract.
inline std::vector<Vec> structured_cloud(const std::vector<Vec>& centers, double scale,
                                         int N, double outer_radius, int n_radii = 24,
                                         int n_dirs = 16) {
  std::vector<Vec> cloud;
  // deterministic direction set from a fixed stream
  std::vector<Vec> dirs;
  {
    SampleStream rng(0x5eedULL, 1);
    for (int d = 0; d < n_dirs; ++d) {
      Vec v(N);
      double s = 0.0;
      for (int k = 0; k < N; ++k) {
        v[k] = rng.gaussian();
        s += v[k] * v[k];
      }
      s = std::sqrt(s);
      for (auto& x : v) x /= s;
      dirs.push_back(std::move(v));
    }
  }
  for (const auto& c : centers) {
    cloud.push_back(c);
    const double r_min = 0.05 / scale;
    for (int i = 0; i < n_radii; ++i) {
      const double r =
          r_min * std::pow(outer_radius / r_min, static_cast<double>(i) / (n_radii - 1));
      for (const auto& d : dirs) {
        Vec y(N);
        for (int k = 0; k < N; ++k) y[k] = c[k] + r * d[k];
        cloud.push_back(std::move(y));
      }
    }
  }
  for (double R : {4.0 * outer_radius, 16.0 * outer_radius, 64.0 * outer_radius})
    for (const auto& d : dirs) cloud.push_back(R * d);
  return cloud;
}

// ---------------------------------------------------------------------------
// Glued-ansatz residual l_n
// ---------------------------------------------------------------------------

// Pointwise l_n with u_m supplied as a proxy field (ansatz-level study):
//   l_n = (u_m + sum Z_j)^{2*-1} - u_m^{2*-1} - sum zeta U_j^{2*-1}
//         - V sum Z_j + Z* Delta zeta + 2 grad zeta . grad Z*
// where Z_j = zeta U_{p_j,mu} and Z* = sum_j U_{p_j,mu}.
inline double eval_residual_ln(const TowerConfig& cfg,
                               const std::function<double(const Vec&)>& u_m_proxy,
                               const std::function<double(const Vec&)>& V,
                               const Vec& y) {
  const int N = cfg.dim;
  const double p = (N + 2.0) / (N - 2.0);  // 2*-1
  const double zeta = cfg.cutoff.value(y);
  const Vec zeta_grad = cfg.cutoff.gradient(y);
  const double zeta_lap = cfg.cutoff.laplacian(y);

  double z_sum = 0.0;        // sum_j zeta U_j
  double u_pow_sum = 0.0;    // sum_j zeta U_j^{2*-1}
  double z_star = 0.0;       // sum_j U_j
  Vec z_star_grad(N, 0.0);
  for (const auto& c : cfg.n_centers()) {
    BubbleParams b(N, c, cfg.mu);
    const double u = b.value(y);
    z_sum += zeta * u;
    u_pow_sum += zeta * std::pow(u, p);
    z_star += u;
    const Vec gu = b.gradient(y);
    for (int k = 0; k < N; ++k) z_star_grad[k] += gu[k];
  }

  const double um = u_m_proxy(y);
  if (um < 0.0 || um + z_sum < 0.0)
    throw std::domain_error("negative base for fractional power");
  const double nonlinear = std::pow(um + z_sum, p) - std::pow(um, p);
  return nonlinear - u_pow_sum - V(y) * z_sum + z_star * zeta_lap +
         2.0 * dot(zeta_grad, z_star_grad);
}

}  // namespace bubblekit
