#ifndef SUSYOPAL_RATIONAL_HPP
#define SUSYOPAL_RATIONAL_HPP

#include <gmpxx.h>
#include <compare>
#include <string>

namespace susyopal {

using Q = mpq_class;

// Element of Q(i), i^2 = -1. All coefficient arithmetic in the engine is
// exact; there is no floating point anywhere.
struct GaussQ {
  Q re{0};
  Q im{0};

  GaussQ() = default;
  GaussQ(long n) : re(n) {}
  GaussQ(long num, long den) : re(num, den) { re.canonicalize(); }
  GaussQ(Q r) : re(std::move(r)) {}
  GaussQ(Q r, Q i) : re(std::move(r)), im(std::move(i)) {}

  static GaussQ unit_i() { return GaussQ(Q(0), Q(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussQ operator-() const { return GaussQ(-re, -im); }
  GaussQ &operator+=(const GaussQ &o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussQ &operator-=(const GaussQ &o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussQ &operator*=(const GaussQ &o) {
    Q r = re * o.re - im * o.im;
    Q i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  friend GaussQ operator+(GaussQ a, const GaussQ &b) { return a += b; }
  friend GaussQ operator-(GaussQ a, const GaussQ &b) { return a -= b; }
  friend GaussQ operator*(GaussQ a, const GaussQ &b) { return a *= b; }

  GaussQ inverse() const {
    Q n = re * re + im * im;  // nonzero for nonzero argument
    return GaussQ(re / n, -im / n);
  }
  friend GaussQ operator/(GaussQ a, const GaussQ &b) { return a * b.inverse(); }

  friend bool operator==(const GaussQ &a, const GaussQ &b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussQ &a, const GaussQ &b) { return !(a == b); }
  // deterministic total order (for canonical term output only)
  friend bool operator<(const GaussQ &a, const GaussQ &b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  }
};

std::string to_string(const GaussQ &q);

}  // namespace susyopal

#endif
