#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bubblekit/geometry.hpp"
#include "bubblekit/rng.hpp"

namespace bubblekit {

enum class QuadMethod { radial_gauss, tensor_gauss, monte_carlo };

struct QuadratureSpec {
  QuadMethod method = QuadMethod::radial_gauss;
  long order_or_samples = 64;
  std::uint64_t seed = 0;
  std::vector<Vec> importance_centers;  // may be empty
  double importance_scale = 1.0;        // concentration scale of the centered proposals
  double broad_scale = 1.0;             // scale of the broad mixture component
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long samples_used = 0;
};

// ---------------------------------------------------------------------------
// Gauss-Legendre rules
// ---------------------------------------------------------------------------

struct GaussRule {
  std::vector<double> nodes;    // on (-1,1)
  std::vector<double> weights;
};

// Nodes by Newton iteration on P_n, seeded with the Chebyshev estimate.
inline const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw std::invalid_argument("gauss_legendre: order >= 1 required");

  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

// ---------------------------------------------------------------------------
// Radial integration over R^N for radial profiles
// ---------------------------------------------------------------------------

namespace detail {

// One pass of the compactified radial rule: r = s/(1-s) maps [0,1) -> [0,inf).
inline double radial_pass(const std::function<double(double)>& f, int N, int order) {
  const GaussRule& g = gauss_legendre(order);
  double sum = 0.0;
  for (int i = 0; i < order; ++i) {
    const double s = 0.5 * (g.nodes[i] + 1.0);
    const double w = 0.5 * g.weights[i];
    const double one_minus = 1.0 - s;
    const double r = s / one_minus;
    const double jac = 1.0 / (one_minus * one_minus);
    const double fr = f(r);
    if (!std::isfinite(fr)) throw std::runtime_error("non-finite integrand");
    sum += w * fr * std::pow(r, N - 1) * jac;
  }
  return sum;
}

}  // namespace detail

// Evaluates int_{R^N} f(|y|) dy = omega_{N-1} int_0^inf f(r) r^{N-1} dr.
// Error estimated by order doubling; the doubled-order value is returned.
inline IntegralResult integrate_radial(const std::function<double(double)>& f, int N,
                                       const QuadratureSpec& spec) {
  if (N < 3) throw std::invalid_argument("integrate_radial: N >= 3 required");
  const int order = static_cast<int>(spec.order_or_samples);
  if (order < 1) throw std::invalid_argument("integrate_radial: order >= 1 required");
  const double omega = sphere_area(N);
  const double coarse = omega * detail::radial_pass(f, N, order);
  const double fine = omega * detail::radial_pass(f, N, 2 * order);
  IntegralResult res;
  res.value = fine;
  res.error_estimate = std::abs(fine - coarse);
  res.samples_used = 3 * order;
  return res;
}

// ---------------------------------------------------------------------------
// Sphere and ball tensor rules
// ---------------------------------------------------------------------------

struct SpherePoint {
  Vec dir;      // unit vector
  double weight;
};

// Product rule on S^{N-1}: Gauss-Legendre in each polar angle (sin powers
// folded into the weight), trapezoid in the periodic azimuth.
inline std::vector<SpherePoint> sphere_rule(int N, int order) {
  if (N < 2) throw std::invalid_argument("sphere_rule: N >= 2 required");
  std::vector<SpherePoint> pts;
  if (N == 2) {
    const int n_phi = 2 * order;
    const double w = 2.0 * M_PI / n_phi;
    for (int k = 0; k < n_phi; ++k) {
      const double phi = 2.0 * M_PI * k / n_phi;
      pts.push_back({{std::cos(phi), std::sin(phi)}, w});
    }
    return pts;
  }
  // angles[0..N-3] in [0,pi], azimuth periodic
  const GaussRule& g = gauss_legendre(order);
  std::vector<double> theta(order), wt(order);
  for (int i = 0; i < order; ++i) {
    theta[i] = 0.5 * M_PI * (g.nodes[i] + 1.0);
    wt[i] = 0.5 * M_PI * g.weights[i];
  }
  const int n_polar = N - 2;
  std::vector<int> idx(n_polar, 0);
  const int n_phi = 2 * order;
  while (true) {
    double w = 1.0;
    Vec trig_s(n_polar), trig_c(n_polar);
    for (int k = 0; k < n_polar; ++k) {
      const double th = theta[idx[k]];
      trig_s[k] = std::sin(th);
      trig_c[k] = std::cos(th);
      w *= wt[idx[k]] * std::pow(trig_s[k], N - 2 - k);
    }
    for (int p = 0; p < n_phi; ++p) {
      const double phi = 2.0 * M_PI * p / n_phi;
      Vec u(N);
      double prod = 1.0;
      for (int k = 0; k < n_polar; ++k) {
        u[k] = prod * trig_c[k];
        prod *= trig_s[k];
      }
      u[N - 2] = prod * std::cos(phi);
      u[N - 1] = prod * std::sin(phi);
      pts.push_back({std::move(u), w * 2.0 * M_PI / n_phi});
    }
    int k = n_polar - 1;
    while (k >= 0 && ++idx[k] == order) idx[k--] = 0;
    if (k < 0) break;
  }
  // moment-match: the polar rule is not exact for sin^k, so rescale the
  // weights to the exact sphere area
  double total = 0.0;
  for (const auto& p : pts) total += p.weight;
  const double fix = sphere_area(N) / total;
  for (auto& p : pts) p.weight *= fix;
  return pts;
}

// Volume integral over the ball B_R(center) as radial Gauss x sphere rule.
inline double integrate_ball(const std::function<double(const Vec&)>& f, int N,
                             const Vec& center, double R, int radial_order,
                             int sphere_order) {
  const auto sphere = sphere_rule(N, sphere_order);
  const GaussRule& g = gauss_legendre(radial_order);
  double sum = 0.0;
  Vec y(N);
  for (int i = 0; i < radial_order; ++i) {
    const double r = 0.5 * R * (g.nodes[i] + 1.0);
    const double wr = 0.5 * R * g.weights[i] * std::pow(r, N - 1);
    for (const auto& sp : sphere) {
      for (int k = 0; k < N; ++k) y[k] = center[k] + r * sp.dir[k];
      const double fy = f(y);
      if (!std::isfinite(fy)) throw std::runtime_error("non-finite integrand");
      sum += wr * sp.weight * fy;
    }
  }
  return sum;
}

// Full-space integral centered at `center`: compactified radius r = s/(1-s)
// times the sphere product rule. Error estimated by doubling the radial order.
inline IntegralResult integrate_fullspace(const std::function<double(const Vec&)>& f, int N,
                                          const Vec& center, int radial_order,
                                          int sphere_order, double radial_scale = 1.0) {
  const auto sphere = sphere_rule(N, sphere_order);
  auto one_pass = [&](int q) {
    const GaussRule& g = gauss_legendre(q);
    double sum = 0.0;
    Vec y(N);
    for (int i = 0; i < q; ++i) {
      const double s = 0.5 * (g.nodes[i] + 1.0);
      const double one_minus = 1.0 - s;
      const double r = radial_scale * s / one_minus;
      const double jac = radial_scale / (one_minus * one_minus);
      const double wr = 0.5 * g.weights[i] * jac * std::pow(r, N - 1);
      for (const auto& sp : sphere) {
        for (int k = 0; k < N; ++k) y[k] = center[k] + r * sp.dir[k];
        const double fy = f(y);
        if (!std::isfinite(fy)) throw std::runtime_error("non-finite integrand");
        sum += wr * sp.weight * fy;
      }
    }
    return sum;
  };
  IntegralResult res;
  const double coarse = one_pass(radial_order);
  res.value = one_pass(2 * radial_order);
  res.error_estimate = std::abs(res.value - coarse);
  res.samples_used = 3 * radial_order * static_cast<long>(sphere.size());
  return res;
}

// Tensor Gauss over the box [a,b].
inline double integrate_box(const std::function<double(const Vec&)>& f, const Vec& a,
                            const Vec& b, int order) {
  const int N = static_cast<int>(a.size());
  const GaussRule& g = gauss_legendre(order);
  std::vector<int> idx(N, 0);
  double sum = 0.0;
  Vec y(N);
  while (true) {
    double w = 1.0;
    for (int k = 0; k < N; ++k) {
      y[k] = 0.5 * (a[k] + b[k]) + 0.5 * (b[k] - a[k]) * g.nodes[idx[k]];
      w *= 0.5 * (b[k] - a[k]) * g.weights[idx[k]];
    }
    const double fy = f(y);
    if (!std::isfinite(fy)) throw std::runtime_error("non-finite integrand");
    sum += w * fy;
    int k = N - 1;
    while (k >= 0 && ++idx[k] == order) idx[k--] = 0;
    if (k < 0) break;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Boundary descriptors and surface integration
// ---------------------------------------------------------------------------

enum class BoundaryKind { ball, box, sector_face };

struct Boundary {
  BoundaryKind kind = BoundaryKind::ball;
  int dim = 3;
  Vec center;        // ball
  double radius = 1.0;
  Vec box_a, box_b;  // box
  // sector_face: face theta = +/- pi/m of the sector in the chosen plane;
  // the face is truncated to plane radius [0, radius] and the remaining
  // coordinates to the box [box_a, box_b] (dim-2 entries).
  int sector_m = 8;
  int plane_first_axis = 0;  // 0 for the (y1,y2)-plane, 2 for (y3,y4)
  bool face_plus = true;

  static Boundary make_ball(int N, double R, Vec c = {}) {
    Boundary b;
    b.kind = BoundaryKind::ball;
    b.dim = N;
    b.radius = R;
    b.center = c.empty() ? Vec(N, 0.0) : std::move(c);
    return b;
  }
  static Boundary make_box(Vec a, Vec bb) {
    Boundary b;
    b.kind = BoundaryKind::box;
    b.dim = static_cast<int>(a.size());
    b.box_a = std::move(a);
    b.box_b = std::move(bb);
    return b;
  }
};

// f receives the boundary point and the outward unit normal.
inline IntegralResult surface_integrate(
    const std::function<double(const Vec&, const Vec&)>& f, const Boundary& bd,
    const QuadratureSpec& spec) {
  const int order = static_cast<int>(spec.order_or_samples);
  const int N = bd.dim;
  auto one_pass = [&](int q) -> double {
    double sum = 0.0;
    switch (bd.kind) {
      case BoundaryKind::ball: {
        const auto sphere = sphere_rule(N, q);
        const double scale = std::pow(bd.radius, N - 1);
        Vec y(N);
        for (const auto& sp : sphere) {
          for (int k = 0; k < N; ++k) y[k] = bd.center[k] + bd.radius * sp.dir[k];
          const double fy = f(y, sp.dir);
          if (!std::isfinite(fy)) throw std::runtime_error("non-finite integrand");
          sum += scale * sp.weight * fy;
        }
        return sum;
      }
      case BoundaryKind::box: {
        for (int axis = 0; axis < N; ++axis) {
          for (int side = 0; side < 2; ++side) {
            Vec normal(N, 0.0);
            normal[axis] = side ? 1.0 : -1.0;
            Vec a, b;
            std::vector<int> free_axes;
            for (int k = 0; k < N; ++k) {
              if (k == axis) continue;
              free_axes.push_back(k);
              a.push_back(bd.box_a[k]);
              b.push_back(bd.box_b[k]);
            }
            const double fixed = side ? bd.box_b[axis] : bd.box_a[axis];
            auto face_f = [&](const Vec& t) {
              Vec y(N);
              y[axis] = fixed;
              for (std::size_t k = 0; k < free_axes.size(); ++k) y[free_axes[k]] = t[k];
              return f(y, normal);
            };
            if (free_axes.empty())
              sum += face_f(Vec{});
            else
              sum += integrate_box(face_f, a, b, q);
          }
        }
        return sum;
      }
      case BoundaryKind::sector_face: {
        const int i0 = bd.plane_first_axis;
        const double alpha = (bd.face_plus ? 1.0 : -1.0) * M_PI / bd.sector_m;
        Vec normal(N, 0.0);
        // outward normal of the wedge |theta| <= pi/m on the face theta = alpha
        normal[i0] = -std::sin(std::abs(alpha));
        normal[i0 + 1] = (bd.face_plus ? 1.0 : -1.0) * std::cos(std::abs(alpha));
        const GaussRule& g = gauss_legendre(q);
        // plane radius s in [0, radius], remaining dim-2 coords in [box_a, box_b]
        std::vector<int> tail_axes;
        for (int k = 0; k < N; ++k)
          if (k != i0 && k != i0 + 1) tail_axes.push_back(k);
        auto slice = [&](double s) {
          auto tail_f = [&](const Vec& t) {
            Vec y(N, 0.0);
            y[i0] = s * std::cos(alpha);
            y[i0 + 1] = s * std::sin(alpha);
            for (std::size_t k = 0; k < tail_axes.size(); ++k) y[tail_axes[k]] = t[k];
            return f(y, normal);
          };
          if (tail_axes.empty()) return tail_f(Vec{});
          return integrate_box(tail_f, bd.box_a, bd.box_b, q);
        };
        for (int i = 0; i < q; ++i) {
          const double s = 0.5 * bd.radius * (g.nodes[i] + 1.0);
          sum += 0.5 * bd.radius * g.weights[i] * slice(s);
        }
        return sum;
      }
    }
    throw std::runtime_error("unsupported boundary kind");
  };
  const double coarse = one_pass(order);
  const double fine = one_pass(2 * order);
  IntegralResult res;
  res.value = fine;
  res.error_estimate = std::abs(fine - coarse);
  res.samples_used = 3 * order;
  return res;
}

// ---------------------------------------------------------------------------
// Monte Carlo with mixture importance sampling
// ---------------------------------------------------------------------------

namespace detail {

// Radial-power proposal centered at p with concentration `scale`:
//   q(y) = scale^N * (N/omega_{N-1}) * (1 + scale^2 |y-p|^2)^{-(N+2)/2},
// which integrates to one.
struct MixtureComponent {
  Vec center;
  double scale;
  double weight;
};

inline double component_density(const MixtureComponent& c, const Vec& y, int N,
                                double norm_const) {
  const double d2 = dist2(y, c.center);
  const double base = 1.0 + c.scale * c.scale * d2;
  return std::pow(c.scale, N) * norm_const * std::pow(base, -0.5 * (N + 2));
}

}  // namespace detail

// Deterministic importance-sampled Monte Carlo. Samples are a pure function of
// (seed, sample index); the radius draw of each component is stratified over
// the component's sample block, which makes centered integrands converge far
// faster than 1/sqrt(n) while the standard-error report stays conservative.
inline IntegralResult integrate_mc(const std::function<double(const Vec&)>& f, int N,
                                   const QuadratureSpec& spec) {
  const long n = spec.order_or_samples;
  if (n < 1) throw std::invalid_argument("integrate_mc: samples >= 1 required");

  std::vector<detail::MixtureComponent> comps;
  if (spec.importance_centers.empty()) {
    comps.push_back({Vec(N, 0.0), spec.broad_scale, 1.0});
  } else {
    const double w_broad = 0.2;
    Vec centroid(N, 0.0);
    for (const auto& c : spec.importance_centers)
      for (int k = 0; k < N; ++k) centroid[k] += c[k] / spec.importance_centers.size();
    comps.push_back({std::move(centroid), spec.broad_scale, w_broad});
    const double w_each = (1.0 - w_broad) / spec.importance_centers.size();
    for (const auto& c : spec.importance_centers)
      comps.push_back({c, spec.importance_scale, w_each});
  }

  // deterministic allocation of samples to components
  std::vector<long> block_start(comps.size() + 1, 0);
  {
    long assigned = 0;
    for (std::size_t k = 0; k + 1 < comps.size(); ++k) {
      const long nk = static_cast<long>(comps[k].weight * n);
      block_start[k + 1] = block_start[k] + nk;
      assigned += nk;
    }
    block_start[comps.size()] = n;
    // effective weights must match the allocation exactly for unbiasedness
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const long nk = block_start[k + 1] - block_start[k];
      comps[k].weight = static_cast<double>(nk) / n;
    }
  }

  const double norm_const = N / sphere_area(N);
  double mean = 0.0, m2 = 0.0;
  long count = 0;
  std::size_t comp_idx = 0;
  for (long i = 0; i < n; ++i) {
    while (comp_idx + 1 < comps.size() && i >= block_start[comp_idx + 1]) ++comp_idx;
    const auto& c = comps[comp_idx];
    const long nk = block_start[comp_idx + 1] - block_start[comp_idx];
    const long j = i - block_start[comp_idx];
    SampleStream rng(spec.seed, static_cast<std::uint64_t>(i));
    // stratified radius: CDF of the radial law is u^{N/2} with u = r^2/(1+r^2)
    const double v = (static_cast<double>(j) + rng.uniform()) / static_cast<double>(nk);
    const double u = std::pow(v, 2.0 / N);
    const double r = std::sqrt(u / std::max(1.0 - u, 1e-300)) / c.scale;
    Vec dir(N);
    double dn = 0.0;
    for (int k = 0; k < N; ++k) {
      dir[k] = rng.gaussian();
      dn += dir[k] * dir[k];
    }
    dn = std::sqrt(dn);
    Vec y(N);
    for (int k = 0; k < N; ++k) y[k] = c.center[k] + r * dir[k] / dn;

    double q = 0.0;
    for (const auto& cc : comps)
      if (cc.weight > 0.0) q += cc.weight * detail::component_density(cc, y, N, norm_const);
    if (!(q > 0.0) || !std::isfinite(q))
      throw std::runtime_error("sampler support mismatch");
    const double fy = f(y);
    if (!std::isfinite(fy)) throw std::runtime_error("non-finite integrand");
    const double est = fy / q;
    ++count;
    const double delta = est - mean;
    mean += delta / count;
    m2 += delta * (est - mean);
  }

  IntegralResult res;
  res.value = mean;
  res.error_estimate = count > 1 ? std::sqrt(m2 / (count - 1.0) / count) : 0.0;
  res.samples_used = count;
  return res;
}

}  // namespace bubblekit
