#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bubblekit/geometry.hpp"

namespace bubblekit {

// ---------------------------------------------------------------------------
// Exact rational / polynomial machinery for config-defined potentials
// ---------------------------------------------------------------------------

struct Rational {
  long long num = 0, den = 1;

  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(std::abs(num), den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  static Rational make(long long n, long long d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r{n, d};
    r.reduce();
    return r;
  }
  double to_double() const { return static_cast<double>(num) / den; }
};

// Monomial in (r, t_1..t_k): coefficient * r^e0 * t_1^e1 * ...
struct Monomial {
  double coef = 0.0;
  std::vector<int> exps;
};

using Polynomial = std::vector<Monomial>;

namespace poly {

inline Polynomial constant(double c, int nvars) {
  if (c == 0.0) return {};
  return {Monomial{c, std::vector<int>(nvars + 1, 0)}};
}

inline Polynomial variable(int var, int nvars) {
  Monomial m{1.0, std::vector<int>(nvars + 1, 0)};
  m.exps[var] = 1;
  return {m};
}

inline void compact(Polynomial& p) {
  Polynomial out;
  for (auto& m : p) {
    if (m.coef == 0.0) continue;
    bool merged = false;
    for (auto& o : out)
      if (o.exps == m.exps) {
        o.coef += m.coef;
        merged = true;
        break;
      }
    if (!merged) out.push_back(m);
  }
  p = std::move(out);
}

inline Polynomial add(Polynomial a, const Polynomial& b) {
  a.insert(a.end(), b.begin(), b.end());
  compact(a);
  return a;
}

inline Polynomial negate(Polynomial a) {
  for (auto& m : a) m.coef = -m.coef;
  return a;
}

inline Polynomial mul(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& ma : a)
    for (const auto& mb : b) {
      Monomial m;
      m.coef = ma.coef * mb.coef;
      m.exps.resize(ma.exps.size());
      for (std::size_t k = 0; k < m.exps.size(); ++k) m.exps[k] = ma.exps[k] + mb.exps[k];
      out.push_back(std::move(m));
    }
  compact(out);
  return out;
}

inline Polynomial pow(Polynomial a, int e, int nvars) {
  Polynomial out = constant(1.0, nvars);
  for (int i = 0; i < e; ++i) out = mul(out, a);
  return out;
}

inline double eval(const Polynomial& p, double r, const Vec& tail) {
  double s = 0.0;
  for (const auto& m : p) {
    double t = m.coef * std::pow(r, m.exps[0]);
    for (std::size_t k = 1; k < m.exps.size(); ++k) t *= std::pow(tail[k - 1], m.exps[k]);
    s += t;
  }
  return s;
}

// Partial derivative with respect to variable `var` (0 = r, k = t_k).
inline Polynomial diff(const Polynomial& p, int var) {
  Polynomial out;
  for (const auto& m : p) {
    if (m.exps[var] == 0) continue;
    Monomial d = m;
    d.coef *= d.exps[var];
    d.exps[var] -= 1;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace poly

// Recursive-descent parser for polynomial expressions with rational
// coefficients in r and the tail variables y<first_tail>..y<N>.
class PolynomialParser {
 public:
  PolynomialParser(std::string src, int first_tail_index, int dim)
      : src_(std::move(src)),
        first_tail_(first_tail_index),
        nvars_(std::max(1, dim - first_tail_index + 2)) {}

  Polynomial parse() {
    pos_ = 0;
    // allow a leading "V =" prefix
    skip_ws();
    if (pos_ + 1 < src_.size() && (src_[pos_] == 'V' || src_[pos_] == 'v')) {
      std::size_t save = pos_;
      ++pos_;
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == '=')
        ++pos_;
      else
        pos_ = save;
    }
    Polynomial p = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      throw std::invalid_argument("potential parse error at position " +
                                  std::to_string(pos_) + ": trailing input");
    return p;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool consume(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial parse_expr() {
    Polynomial acc = parse_term();
    for (;;) {
      if (consume('+'))
        acc = poly::add(acc, parse_term());
      else if (consume('-'))
        acc = poly::add(acc, poly::negate(parse_term()));
      else
        return acc;
    }
  }

  Polynomial parse_term() {
    Polynomial acc = parse_factor();
    for (;;) {
      skip_ws();
      if (consume('*')) {
        acc = poly::mul(acc, parse_factor());
      } else if (pos_ < src_.size() &&
                 (src_[pos_] == '(' || std::isalpha(static_cast<unsigned char>(src_[pos_])))) {
        acc = poly::mul(acc, parse_factor());  // implicit multiplication
      } else {
        return acc;
      }
    }
  }

  Polynomial parse_factor() {
    Polynomial base = parse_atom();
    skip_ws();
    if (consume('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) throw std::invalid_argument("potential parse error: exponent expected");
      base = poly::pow(base, std::stoi(src_.substr(start, pos_ - start)), nvars_ - 1);
    }
    return base;
  }

  Polynomial parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw std::invalid_argument("potential parse error: unexpected end");
    if (consume('(')) {
      Polynomial p = parse_expr();
      if (!consume(')')) throw std::invalid_argument("potential parse error: ')' expected");
      return p;
    }
    if (src_[pos_] == '-') {
      ++pos_;
      return poly::negate(parse_factor());
    }
    const char c = src_[pos_];
    if (c == 'r') {
      ++pos_;
      return poly::variable(0, nvars_ - 1);
    }
    if (c == 'y') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) throw std::invalid_argument("potential parse error: variable index expected");
      const int idx = std::stoi(src_.substr(start, pos_ - start));
      const int var = idx - first_tail_ + 1;
      if (var < 1 || var > nvars_ - 1)
        throw std::invalid_argument("potential parse error: variable y" + std::to_string(idx) +
                                    " out of range");
      return poly::variable(var, nvars_ - 1);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    throw std::invalid_argument(std::string("potential parse error: unexpected '") + c + "'");
  }

  Polynomial parse_number() {
    long long num = 0;
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      num = num * 10 + (src_[pos_] - '0');
      ++pos_;
    }
    long long den = 1;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        num = num * 10 + (src_[pos_] - '0');
        den *= 10;
        ++pos_;
      }
    } else if (pos_ < src_.size() && src_[pos_] == '/') {
      ++pos_;
      std::size_t dstart = pos_;
      long long d = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        d = d * 10 + (src_[pos_] - '0');
        ++pos_;
      }
      if (dstart == pos_) throw std::invalid_argument("potential parse error: denominator expected");
      den = d;
    }
    if (start == pos_) throw std::invalid_argument("potential parse error: number expected");
    return poly::constant(Rational::make(num, den).to_double(), nvars_ - 1);
  }

  std::string src_;
  int first_tail_;
  int nvars_;  // 1 + tail count
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Potential
// ---------------------------------------------------------------------------

enum class PotentialSymmetry { four_dim_radial, two_dim_radial };

// V(r, y*) with r the radial variable of the first 4 (or 2) coordinates and
// y* the remaining tail. Derivatives are analytic for polynomial potentials
// and Richardson-extrapolated central differences otherwise.
struct Potential {
  int dim = 7;
  PotentialSymmetry symmetry = PotentialSymmetry::four_dim_radial;
  Polynomial polynomial;  // empty when generic
  std::function<double(double, const Vec&)> generic;  // fallback evaluator

  // declared neighborhood B_rho(center) in (r, y*) coordinates
  double nbhd_r = 1.0;
  Vec nbhd_tail;
  double nbhd_radius = 1.0;

  int radial_dim() const { return symmetry == PotentialSymmetry::four_dim_radial ? 4 : 2; }
  int tail_dim() const { return dim - radial_dim(); }
  int first_tail_index() const { return radial_dim() + 1; }

  bool in_neighborhood(double r, const Vec& tail) const {
    double d2 = (r - nbhd_r) * (r - nbhd_r);
    for (int k = 0; k < tail_dim(); ++k) {
      const double d = tail[k] - nbhd_tail[k];
      d2 += d * d;
    }
    return std::sqrt(d2) <= nbhd_radius * (1.0 + 1e-12);
  }

  double value(double r, const Vec& tail) const {
    if (!polynomial.empty()) return poly::eval(polynomial, r, tail);
    if (generic) return generic(r, tail);
    return 0.0;
  }

  // Partial derivative; multi-index over (r, t_1..t_k), total order <= 3.
  double derivative(double r, const Vec& tail, const std::vector<int>& idx) const {
    int order = 0;
    for (int e : idx) order += e;
    if (order > 0 && !in_neighborhood(r, tail))
      throw std::domain_error("derivative requested outside declared neighborhood");
    if (order > 3) throw std::invalid_argument("derivatives available to order 3 only");
    if (!polynomial.empty()) {
      Polynomial p = polynomial;
      for (std::size_t v = 0; v < idx.size(); ++v)
        for (int e = 0; e < idx[v]; ++e) p = poly::diff(p, static_cast<int>(v));
      return poly::eval(p, r, tail);
    }
    if (order == 0) return value(r, tail);
    // step grows with the order: roundoff in a k-fold central difference
    // scales like eps / h^k
    const double h = nbhd_radius * (order == 1 ? 1e-4 : order == 2 ? 1e-3 : 1e-2);
    return fd_derivative(r, tail, idx, h);
  }

  double laplacian_ambient(double r, const Vec& tail) const {
    std::vector<int> idx(1 + tail_dim(), 0);
    idx[0] = 2;
    double lap = derivative(r, tail, idx);
    idx[0] = 1;
    lap += (radial_dim() - 1.0) / r * derivative(r, tail, idx);
    idx[0] = 0;
    for (int k = 0; k < tail_dim(); ++k) {
      idx[1 + k] = 2;
      lap += derivative(r, tail, idx);
      idx[1 + k] = 0;
    }
    return lap;
  }

  // d(Delta V)/d(variable): var = 0 for r (equivalently y_1 at the first ring
  // center), var = 1+k for tail coordinate t_k.
  double laplacian_derivative(double r, const Vec& tail, int var) const {
    const int k = tail_dim();
    std::vector<int> idx(1 + k, 0);
    double out = 0.0;
    if (var == 0) {
      idx[0] = 3;
      out += derivative(r, tail, idx);
      idx[0] = 2;
      const double vrr = derivative(r, tail, idx);
      idx[0] = 1;
      const double vr = derivative(r, tail, idx);
      out += (radial_dim() - 1.0) * (vrr / r - vr / (r * r));
      idx[0] = 1;
      for (int j = 0; j < k; ++j) {
        idx[1 + j] = 2;
        out += derivative(r, tail, idx);
        idx[1 + j] = 0;
      }
    } else {
      idx[0] = 2;
      idx[var] = 1;
      out += derivative(r, tail, idx);
      idx[0] = 1;
      out += (radial_dim() - 1.0) / r * derivative(r, tail, idx);
      idx[0] = 0;
      for (int j = 0; j < k; ++j) {
        idx[1 + j] += 2;
        out += derivative(r, tail, idx);
        idx[1 + j] -= 2;
      }
    }
    return out;
  }

 private:
  double fd_derivative(double r, const Vec& tail, std::vector<int> idx, double h) const {
    auto coarse = fd_recursive(r, tail, idx, h);
    auto fine = fd_recursive(r, tail, idx, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;  // Richardson, O(h^4)
  }
  double fd_recursive(double r, Vec tail, std::vector<int> idx, double h) const {
    int var = -1;
    for (std::size_t v = 0; v < idx.size(); ++v)
      if (idx[v] > 0) {
        var = static_cast<int>(v);
        break;
      }
    if (var < 0) return value(r, tail);
    idx[var] -= 1;
    auto shift = [&](double s) {
      double rr = r;
      Vec tt = tail;
      if (var == 0)
        rr += s;
      else
        tt[var - 1] += s;
      return fd_recursive(rr, tt, idx, h);
    };
    return (shift(h) - shift(-h)) / (2.0 * h);
  }
};

// Builtin worked example: V = r^2 - 4 r (sum y_j) + (sum y_j^2) + 1 near the
// critical point r0 = sqrt(1/(8N-34)), y_{0,j} = 2 r0.
inline Potential builtin_example_potential(int N) {
  if (N < 7) throw std::invalid_argument("builtin example requires N >= 7");
  Potential p;
  p.dim = N;
  p.symmetry = PotentialSymmetry::four_dim_radial;
  const int k = N - 4;
  Polynomial sum_y, sum_y2;
  for (int j = 0; j < k; ++j) {
    sum_y = poly::add(sum_y, poly::variable(1 + j, k));
    sum_y2 = poly::add(sum_y2, poly::mul(poly::variable(1 + j, k), poly::variable(1 + j, k)));
  }
  const Polynomial r = poly::variable(0, k);
  Polynomial v = poly::mul(r, r);
  v = poly::add(v, poly::mul(poly::constant(-4.0, k), poly::mul(r, sum_y)));
  v = poly::add(v, sum_y2);
  v = poly::add(v, poly::constant(1.0, k));
  p.polynomial = std::move(v);
  const double r0 = std::sqrt(1.0 / (8.0 * N - 34.0));
  p.nbhd_r = r0;
  p.nbhd_tail.assign(k, 2.0 * r0);
  p.nbhd_radius = 0.4;
  return p;
}

inline Potential parse_potential(const std::string& expr, int N,
                                 PotentialSymmetry sym = PotentialSymmetry::four_dim_radial) {
  Potential p;
  p.dim = N;
  p.symmetry = sym;
  p.polynomial = PolynomialParser(expr, p.first_tail_index(), N).parse();
  p.nbhd_tail.assign(p.tail_dim(), 0.0);
  return p;
}

// ---------------------------------------------------------------------------
// Critical point search and audit
// ---------------------------------------------------------------------------

struct CriticalPoint {
  double r = 0.0;
  Vec tail;
  double grad_norm = 0.0;
  int iterations = 0;
};

namespace detail {

// gradient and Hessian of f = r^2 V in the reduced (r, t) variables
inline void reduced_f_derivatives(const Potential& p, double r, const Vec& t,
                                  Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
  const int k = p.tail_dim();
  std::vector<int> idx(1 + k, 0);
  auto D = [&](std::initializer_list<std::pair<int, int>> entries) {
    std::fill(idx.begin(), idx.end(), 0);
    for (auto [v, e] : entries) idx[v] = e;
    return p.derivative(r, t, idx);
  };
  const double V = p.value(r, t);
  const double Vr = D({{0, 1}});
  if (grad) {
    grad->resize(1 + k);
    (*grad)(0) = 2.0 * r * V + r * r * Vr;
    for (int a = 0; a < k; ++a) (*grad)(1 + a) = r * r * D({{1 + a, 1}});
  }
  if (hess) {
    hess->resize(1 + k, 1 + k);
    (*hess)(0, 0) = 2.0 * V + 4.0 * r * Vr + r * r * D({{0, 2}});
    for (int a = 0; a < k; ++a) {
      const double Vta = D({{1 + a, 1}});
      const double Vrta = D({{0, 1}, {1 + a, 1}});
      (*hess)(0, 1 + a) = (*hess)(1 + a, 0) = 2.0 * r * Vta + r * r * Vrta;
      for (int b = a; b < k; ++b) {
        const double Vtt = D({{1 + a, 1}, {1 + b, b == a ? 1 : 1}});
        (*hess)(1 + a, 1 + b) = (*hess)(1 + b, 1 + a) = r * r * Vtt;
      }
      (*hess)(1 + a, 1 + a) = r * r * D({{1 + a, 2}});
    }
  }
}

inline bool poly_uses_tail(const Polynomial& p) {
  for (const auto& m : p)
    for (std::size_t v = 1; v < m.exps.size(); ++v)
      if (m.exps[v] > 0) return true;
  return false;
}

}  // namespace detail

// Damped Newton on grad(r^2 V); |grad| < 1e-12 within 50 steps or failure.
inline CriticalPoint find_critical_point(const Potential& p, double r_guess,
                                         const Vec& tail_guess) {
  const int k = p.tail_dim();
  const bool radial_only = !p.polynomial.empty() && !detail::poly_uses_tail(p.polynomial);
  double r = r_guess;
  Vec t = tail_guess;
  t.resize(k, 0.0);
  Eigen::VectorXd g;
  Eigen::MatrixXd H;
  const double tol = 1e-12;
  for (int iter = 0; iter < 50; ++iter) {
    detail::reduced_f_derivatives(p, r, t, &g, &H);
    double gn = radial_only ? std::abs(g(0)) : g.norm();
    if (gn < tol) {
      if (r <= 0.0)
        throw std::runtime_error("critical point violates r0 > 0");
      CriticalPoint cp;
      cp.r = r;
      cp.tail = t;
      cp.grad_norm = gn;
      cp.iterations = iter;
      return cp;
    }
    Eigen::VectorXd step;
    if (radial_only) {
      step = Eigen::VectorXd::Zero(1 + k);
      if (H(0, 0) == 0.0) throw std::runtime_error("no critical point found");
      step(0) = -g(0) / H(0, 0);
    } else {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
      if (!lu.isInvertible()) throw std::runtime_error("no critical point found");
      step = lu.solve(-g);
    }
    // backtracking: halve until |grad f| decreases
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      const double r_new = r + alpha * step(0);
      Vec t_new = t;
      for (int a = 0; a < k; ++a) t_new[a] += alpha * step(1 + a);
      Eigen::VectorXd g_new;
      try {
        detail::reduced_f_derivatives(p, r_new, t_new, &g_new, nullptr);
      } catch (const std::domain_error&) {
        alpha *= 0.5;
        continue;
      }
      const double gn_new = radial_only ? std::abs(g_new(0)) : g_new.norm();
      if (gn_new < gn || gn_new < tol) {
        r = r_new;
        t = std::move(t_new);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) throw std::runtime_error("no critical point found");
  }
  throw std::runtime_error("no critical point found");
}

struct CriticalPointAnalysis {
  Vec eigenvalues;  // of the Hessian of f = r^2 V, ascending
  int local_degree = 0;
};

inline CriticalPointAnalysis analyze_critical_point(const Potential& p,
                                                    const CriticalPoint& cp) {
  Eigen::MatrixXd H;
  detail::reduced_f_derivatives(p, cp.r, cp.tail, nullptr, &H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  CriticalPointAnalysis out;
  int negatives = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (std::abs(lam) < 1e-8)
      throw std::runtime_error("degenerate critical point: degree undefined by sign rule");
    if (lam < 0.0) ++negatives;
    out.eigenvalues.push_back(lam);
  }
  out.local_degree = (negatives % 2 == 0) ? 1 : -1;
  return out;
}

// ---------------------------------------------------------------------------
// Non-degeneracy matrix A_{i,l}
// ---------------------------------------------------------------------------

enum class NondegeneracyVariant { tilde_V, tilde_V_prime };
enum class SectorFace { plus, minus };

struct NondegeneracyMatrix {
  Eigen::MatrixXd A;
  double det = 0.0;
  double threshold = 0.0;
  bool nondegenerate = false;
};

// Entry-by-entry assembly of the non-degeneracy matrix: row i couples the second
// derivatives of V with the correction (d(DeltaV)/dy_row / (2 DeltaV) +
// nu_row / <nu, x1>), where x1 is the first ring center at radius r0 and nu
// the outward normal of the chosen flat face theta = +/- pi/m of the sector.
inline NondegeneracyMatrix assemble_nondegeneracy_matrix(const Potential& p,
                                                         const CriticalPoint& cp,
                                                         NondegeneracyVariant variant,
                                                         int m, SectorFace face) {
  const int k = p.tail_dim();
  if (variant == NondegeneracyVariant::tilde_V && p.symmetry != PotentialSymmetry::four_dim_radial)
    throw std::invalid_argument("tilde_V variant requires a four_dim_radial potential");
  if (variant == NondegeneracyVariant::tilde_V_prime &&
      p.symmetry != PotentialSymmetry::two_dim_radial)
    throw std::invalid_argument("tilde_V_prime variant requires a two_dim_radial potential");
  const int size = 1 + k;  // (N-3) or (N-1)

  const double r0 = cp.r;
  const Vec& t0 = cp.tail;
  const double lapV = p.laplacian_ambient(r0, t0);
  if (lapV == 0.0) throw std::runtime_error("matrix undefined: DeltaV vanishes");

  // face theta = +/- pi/m in the ring plane; nu = (-sin, +/-cos, 0, ..)
  const double sin_face = std::sin(M_PI / m);
  const double nu1 = -sin_face;
  const double nu_dot_x1 = r0 * nu1;  // <nu, x1> with x1 = (r0, 0, ...)
  (void)face;                         // both faces give the same nu1 and <nu,x1>
  if (nu_dot_x1 == 0.0) throw std::runtime_error("normal orthogonal to center");

  std::vector<int> idx(1 + k, 0);
  auto D = [&](int v1, int v2) {
    std::fill(idx.begin(), idx.end(), 0);
    idx[v1] += 1;
    idx[v2] += 1;
    return p.derivative(r0, t0, idx);
  };

  // correction prefactor per row: dDeltaV/dy_row/(2 DeltaV) + nu_row/<nu,x1>
  auto row_prefactor = [&](int i) {
    if (i == 0) return p.laplacian_derivative(r0, t0, 0) / (2.0 * lapV) + nu1 / nu_dot_x1;
    return p.laplacian_derivative(r0, t0, i) / (2.0 * lapV);  // nu vanishes off the plane
  };
  // column contraction: r d2V/dr dcol + sum_j y_j d2V/dy_j dcol  (col 0 = r)
  auto column_sum = [&](int l) {
    double s = r0 * D(0, l == 0 ? 0 : l);
    for (int j = 0; j < k; ++j) s += t0[j] * D(1 + j, l == 0 ? 0 : l);
    return s;
  };

  NondegeneracyMatrix out;
  out.A.resize(size, size);
  const double col_r = column_sum(0);
  for (int i = 0; i < size; ++i) {
    const double pref = row_prefactor(i);
    for (int l = 0; l < size; ++l) {
      double entry;
      if (i == 0) {
        entry = D(l == 0 ? 0 : l, 0) - pref * column_sum(l);
        if (l == 0) entry = D(0, 0) - pref * col_r;
      } else if (l == 0) {
        entry = std::cos(2.0 * M_PI * i / m) * (D(0, i) - pref * col_r);
      } else {
        entry = D(i, l) - pref * column_sum(l);
      }
      out.A(i, l) = entry;
    }
  }
  out.det = out.A.partialPivLu().determinant();
  const double max_norm = out.A.cwiseAbs().maxCoeff();
  out.threshold = 1e-8 * std::pow(max_norm, size);
  out.nondegenerate = std::abs(out.det) > out.threshold;
  return out;
}

// ---------------------------------------------------------------------------
// Global monotonicity obstruction for radial potentials
// ---------------------------------------------------------------------------

enum class ObstructionVerdict { obstructed, not_obstructed };

// Samples d(r^2 V)/dr on a grid; single-signed derivative means the global
// Pohozaev identity rules out solutions.
inline ObstructionVerdict monotonicity_obstruction(
    const std::function<double(double)>& radial_V, double r_min, double r_max,
    int grid_points = 512, double tol = 1e-12) {
  bool seen_pos = false, seen_neg = false;
  const double h = 1e-6 * (r_max - r_min);
  for (int i = 0; i < grid_points; ++i) {
    const double r = r_min + (r_max - r_min) * (i + 0.5) / grid_points;
    auto f = [&](double x) { return x * x * radial_V(x); };
    const double d = (f(r + h) - f(r - h)) / (2.0 * h);
    if (d > tol) seen_pos = true;
    if (d < -tol) seen_neg = true;
    if (seen_pos && seen_neg) return ObstructionVerdict::not_obstructed;
  }
  return ObstructionVerdict::obstructed;
}

// ---------------------------------------------------------------------------
// Audit report
// ---------------------------------------------------------------------------

struct AuditReport {
  CriticalPoint critical_point;
  double V_at_cp = 0.0;
  Vec hessian_eigenvalues;
  int local_degree = 0;
  bool degree_defined = false;
  double det_A_plus = 0.0;
  double det_A_minus = 0.0;
  double det_threshold = 0.0;
  bool assumption_V = false;
  bool assumption_tilde_V = false;
};

inline AuditReport audit_potential(const Potential& p, double r_guess, const Vec& tail_guess,
                                   int m = 8) {
  AuditReport rep;
  rep.critical_point = find_critical_point(p, r_guess, tail_guess);
  rep.V_at_cp = p.value(rep.critical_point.r, rep.critical_point.tail);
  try {
    const auto an = analyze_critical_point(p, rep.critical_point);
    rep.hessian_eigenvalues = an.eigenvalues;
    rep.local_degree = an.local_degree;
    rep.degree_defined = true;
  } catch (const std::runtime_error&) {
    rep.degree_defined = false;
  }
  rep.assumption_V = rep.critical_point.r > 0.0 && rep.V_at_cp > 0.0 && rep.degree_defined &&
                     rep.local_degree != 0;
  const auto variant = p.symmetry == PotentialSymmetry::four_dim_radial
                           ? NondegeneracyVariant::tilde_V
                           : NondegeneracyVariant::tilde_V_prime;
  const auto mp = assemble_nondegeneracy_matrix(p, rep.critical_point, variant, m, SectorFace::plus);
  const auto mm =
      assemble_nondegeneracy_matrix(p, rep.critical_point, variant, m, SectorFace::minus);
  rep.det_A_plus = mp.det;
  rep.det_A_minus = mm.det;
  rep.det_threshold = mp.threshold;
  rep.assumption_tilde_V = mp.nondegenerate && mm.nondegenerate;
  return rep;
}

}  // namespace bubblekit
