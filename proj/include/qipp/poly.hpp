// Dense polynomial algebra in one and two variables, local frames for
// patch-conditioned representations, and Jacobi polynomials in coefficient
// form. All higher-level basis and weight constructions are built on top of
// the exact arithmetic provided here (products, affine substitution).

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cassert>
#include <vector>

namespace qipp {

/// Number of monomials of total degree <= deg in dim variables (dim = 1, 2).
inline int poly_space_dim(int dim, int deg)
{
  if (deg < 0) return 0;
  return dim == 1 ? deg + 1 : (deg + 1) * (deg + 2) / 2;
}

//------------------------------------------------------------------------
// Univariate polynomials, coefficients c[k] for t^k
//------------------------------------------------------------------------

class Poly1 {
public:
  Poly1() : coef_(1, 0.0) {}
  explicit Poly1(std::vector<double> coef) : coef_(std::move(coef))
  {
    if (coef_.empty()) coef_.assign(1, 0.0);
  }
  static Poly1 constant(double c) { return Poly1({c}); }
  static Poly1 t() { return Poly1({0.0, 1.0}); }

  int degree() const { return static_cast<int>(coef_.size()) - 1; }
  double operator[](int k) const
  {
    return k < static_cast<int>(coef_.size()) ? coef_[k] : 0.0;
  }

  double eval(double t) const
  {
    double v = 0.0;
    for (int k = degree(); k >= 0; --k) v = v * t + coef_[k];
    return v;
  }

  Poly1 operator+(const Poly1& o) const
  {
    std::vector<double> c(std::max(coef_.size(), o.coef_.size()), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k)
      c[k] = (*this)[static_cast<int>(k)] + o[static_cast<int>(k)];
    return Poly1(std::move(c));
  }
  Poly1 operator-(const Poly1& o) const { return *this + o * (-1.0); }
  Poly1 operator*(double s) const
  {
    std::vector<double> c = coef_;
    for (double& x : c) x *= s;
    return Poly1(std::move(c));
  }
  Poly1 operator*(const Poly1& o) const
  {
    std::vector<double> c(coef_.size() + o.coef_.size() - 1, 0.0);
    for (std::size_t i = 0; i < coef_.size(); ++i)
      for (std::size_t j = 0; j < o.coef_.size(); ++j) c[i + j] += coef_[i] * o.coef_[j];
    return Poly1(std::move(c));
  }

private:
  std::vector<double> coef_;
};

/// Jacobi polynomial P_k^{(alpha,beta)} as a coefficient vector in t,
/// built with the standard three-term recurrence.
inline Poly1 jacobi_poly1(int k, double alpha, double beta)
{
  assert(k >= 0 && alpha > -1.0 && beta > -1.0);
  Poly1 pm2 = Poly1::constant(1.0);
  if (k == 0) return pm2;
  Poly1 pm1 =
      Poly1::constant(alpha + 1.0) + (Poly1::t() - Poly1::constant(1.0)) * ((alpha + beta + 2.0) / 2.0);
  if (k == 1) return pm1;
  for (int m = 2; m <= k; ++m) {
    const double a = 2.0 * m * (m + alpha + beta) * (2.0 * m + alpha + beta - 2.0);
    const double b = (2.0 * m + alpha + beta - 1.0) * (alpha * alpha - beta * beta);
    const double c =
        (2.0 * m + alpha + beta - 1.0) * (2.0 * m + alpha + beta) * (2.0 * m + alpha + beta - 2.0);
    const double d = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * (2.0 * m + alpha + beta);
    Poly1 p = (Poly1::t() * c + Poly1::constant(b)) * pm1 - pm2 * d;
    p = p * (1.0 / a);
    pm2 = pm1;
    pm1 = p;
  }
  return pm1;
}

//------------------------------------------------------------------------
// Bivariate polynomials, graded storage: index(a,b) = s(s+1)/2 + b, s=a+b
//------------------------------------------------------------------------

class Poly2 {
public:
  Poly2() : deg_(0), coef_(1, 0.0) {}
  explicit Poly2(int deg) : deg_(deg), coef_(poly_space_dim(2, deg), 0.0) { assert(deg >= 0); }

  static int index(int a, int b)
  {
    const int s = a + b;
    return s * (s + 1) / 2 + b;
  }
  static Poly2 constant(double c)
  {
    Poly2 p(0);
    p.coef_[0] = c;
    return p;
  }
  static Poly2 x()
  {
    Poly2 p(1);
    p.set(1, 0, 1.0);
    return p;
  }
  static Poly2 y()
  {
    Poly2 p(1);
    p.set(0, 1, 1.0);
    return p;
  }

  int degree() const { return deg_; }
  int size() const { return static_cast<int>(coef_.size()); }
  double coef(int a, int b) const
  {
    return a + b <= deg_ ? coef_[index(a, b)] : 0.0;
  }
  void set(int a, int b, double v)
  {
    assert(a >= 0 && b >= 0 && a + b <= deg_);
    coef_[index(a, b)] = v;
  }
  void add_to(int a, int b, double v)
  {
    assert(a + b <= deg_);
    coef_[index(a, b)] += v;
  }

  /// Flat coefficient vector in graded order (constant first).
  const std::vector<double>& coefficients() const { return coef_; }
  Eigen::Map<const Eigen::VectorXd> coef_vector() const
  {
    return {coef_.data(), static_cast<Eigen::Index>(coef_.size())};
  }

  double eval(double u, double v) const
  {
    // Horner in total degree: sum_s (sum_b c_{s-b,b} u^{s-b} v^b)
    double pu[32], pv[32];
    pu[0] = pv[0] = 1.0;
    for (int k = 1; k <= deg_; ++k) {
      pu[k] = pu[k - 1] * u;
      pv[k] = pv[k - 1] * v;
    }
    double r = 0.0;
    int idx = 0;
    for (int s = 0; s <= deg_; ++s)
      for (int b = 0; b <= s; ++b, ++idx) r += coef_[idx] * pu[s - b] * pv[b];
    return r;
  }

  Poly2 operator+(const Poly2& o) const
  {
    Poly2 r(std::max(deg_, o.deg_));
    for (int a = 0; a <= r.deg_; ++a)
      for (int b = 0; a + b <= r.deg_; ++b) r.set(a, b, coef(a, b) + o.coef(a, b));
    return r;
  }
  Poly2 operator-(const Poly2& o) const { return *this + o * (-1.0); }
  Poly2 operator*(double s) const
  {
    Poly2 r = *this;
    for (double& c : r.coef_) c *= s;
    return r;
  }
  Poly2 operator*(const Poly2& o) const
  {
    Poly2 r(deg_ + o.deg_);
    for (int a = 0; a <= deg_; ++a)
      for (int b = 0; a + b <= deg_; ++b) {
        const double cab = coef(a, b);
        if (cab == 0.0) continue;
        for (int c = 0; c <= o.deg_; ++c)
          for (int d = 0; c + d <= o.deg_; ++d) r.add_to(a + c, b + d, cab * o.coef(c, d));
      }
    return r;
  }

  Poly2 dx() const
  {
    Poly2 r(std::max(deg_ - 1, 0));
    for (int a = 1; a <= deg_; ++a)
      for (int b = 0; a + b <= deg_; ++b) r.add_to(a - 1, b, a * coef(a, b));
    return r;
  }
  Poly2 dy() const
  {
    Poly2 r(std::max(deg_ - 1, 0));
    for (int a = 0; a <= deg_; ++a)
      for (int b = 1; a + b <= deg_; ++b) r.add_to(a, b - 1, b * coef(a, b));
    return r;
  }

  /// Substitute u = lu(x,y), v = lv(x,y) for affine lu, lv (degree <= 1).
  Poly2 compose_affine(const Poly2& lu, const Poly2& lv) const
  {
    assert(lu.degree() <= 1 && lv.degree() <= 1);
    std::vector<Poly2> pu(deg_ + 1), pv(deg_ + 1);
    pu[0] = Poly2::constant(1.0);
    pv[0] = Poly2::constant(1.0);
    for (int k = 1; k <= deg_; ++k) {
      pu[k] = pu[k - 1] * lu;
      pv[k] = pv[k - 1] * lv;
    }
    Poly2 r(deg_);
    for (int a = 0; a <= deg_; ++a)
      for (int b = 0; a + b <= deg_; ++b) {
        const double cab = coef(a, b);
        if (cab == 0.0) continue;
        r = r + pu[a] * pv[b] * cab;
      }
    return r;
  }

  /// Truncate trailing zero blocks so degree() reflects actual content.
  Poly2 trimmed(double tol = 0.0) const
  {
    int d = deg_;
    auto block_zero = [&](int s) {
      for (int b = 0; b <= s; ++b)
        if (std::abs(coef(s - b, b)) > tol) return false;
      return true;
    };
    while (d > 0 && block_zero(d)) --d;
    Poly2 r(d);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) r.set(a, b, coef(a, b));
    return r;
  }

private:
  int deg_;
  std::vector<double> coef_;
};

/// Substitute a univariate polynomial with an affine bivariate argument.
inline Poly2 compose(const Poly1& k, const Poly2& arg)
{
  assert(arg.degree() <= 1);
  Poly2 r = Poly2::constant(k[0]);
  Poly2 pw = Poly2::constant(1.0);
  for (int j = 1; j <= k.degree(); ++j) {
    pw = pw * arg;
    r = r + pw * k[j];
  }
  return r;
}

//------------------------------------------------------------------------
// Local frames: coordinates u = (x - c) / len (per component)
//------------------------------------------------------------------------

struct Frame {
  Eigen::Vector2d center{0.0, 0.0};
  double len = 1.0;

  Eigen::Vector2d to_local(const Eigen::Vector2d& x) const { return (x - center) / len; }
  Eigen::Vector2d to_global(const Eigen::Vector2d& u) const { return center + len * u; }
};

/// Polynomial on a (patch) domain expressed in a conditioned local frame.
/// For d = 1 the y-variable is unused and all data lives on the x-axis.
struct LocalPoly {
  Poly2 poly;
  Frame frame;

  double eval(const Eigen::Vector2d& x) const
  {
    const Eigen::Vector2d u = frame.to_local(x);
    return poly.eval(u[0], u[1]);
  }

  /// Re-express the same polynomial function in another frame. Exact up to
  /// rounding; this is the extension operator between nested domains.
  LocalPoly in_frame(const Frame& g) const
  {
    const double s = g.len / frame.len;
    const Eigen::Vector2d t = (g.center - frame.center) / frame.len;
    Poly2 lu = Poly2::x() * s + Poly2::constant(t[0]);
    Poly2 lv = Poly2::y() * s + Poly2::constant(t[1]);
    return {poly.compose_affine(lu, lv), g};
  }
};

/// Monomial exponent list for P^deg in dim variables, graded order matching
/// Poly2 storage (dim = 2) or plain powers (dim = 1).
inline std::vector<std::array<int, 2>> monomial_exponents(int dim, int deg)
{
  std::vector<std::array<int, 2>> e;
  if (dim == 1) {
    for (int a = 0; a <= deg; ++a) e.push_back({a, 0});
  } else {
    for (int s = 0; s <= deg; ++s)
      for (int b = 0; b <= s; ++b) e.push_back({s - b, b});
  }
  return e;
}

}  // namespace qipp
