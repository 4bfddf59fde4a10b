// Concrete rank-2 model of the anchor calculus used as an independent oracle:
// the standard algebroid over a 2-manifold with frame V1 = d/dx, V2 = x d/dy
// acting on Laurent polynomials in x, polynomials in y.  Upper anchors vanish,
// c^2_{12} = 1/x, everything else zero.
#ifndef SUSYOPAL_TESTS_POLY_MODEL_HPP
#define SUSYOPAL_TESTS_POLY_MODEL_HPP

#include <map>
#include <stdexcept>

#include "susyopal/coeff.hpp"

namespace susyopal::testmodel {

struct LP {  // sum q * x^a y^b, a may be negative
  std::map<std::pair<int, int>, Q> t;

  static LP mono(int a, int b, Q q = Q(1)) {
    LP p;
    if (q != 0) p.t[{a, b}] = q;
    return p;
  }
  bool zero() const { return t.empty(); }
  void add(int a, int b, const Q &q) {
    if (q == 0) return;
    auto [it, fresh] = t.emplace(std::make_pair(a, b), q);
    if (!fresh) {
      it->second += q;
      if (it->second == 0) t.erase(it);
    }
  }
  LP operator+(const LP &o) const {
    LP r = *this;
    for (auto &[k, q] : o.t) r.add(k.first, k.second, q);
    return r;
  }
  LP operator*(const LP &o) const {
    LP r;
    for (auto &[k, q] : t)
      for (auto &[l, p] : o.t)
        r.add(k.first + l.first, k.second + l.second, q * p);
    return r;
  }
  LP scale(const Q &q) const {
    LP r;
    for (auto &[k, c] : t)
      if (q != 0) r.t[k] = c * q;
    return r;
  }
  friend bool operator==(const LP &a, const LP &b) { return a.t == b.t; }

  LP d_dx() const {
    LP r;
    for (auto &[k, q] : t) r.add(k.first - 1, k.second, q * k.first);
    return r;
  }
  LP x_d_dy() const {
    LP r;
    for (auto &[k, q] : t) r.add(k.first + 1, k.second - 1, q * k.second);
    return r;
  }
};

struct Model {
  // base values for symbols; scalars are plain rationals
  std::map<std::string, Q> scalars{{"k", Q(5, 7)}, {"c", Q(3)}, {"N", Q(2)}};

  LP anchor(AnchorDir d, const LP &v) const {
    if (d.var == Variance::Upper) return LP();
    return d.index == 1 ? v.d_dx() : v.x_d_dy();
  }

  LP base_value(const DerivedFunction &f) const {
    if (f.sym->name == "g") return LP::mono(3, 2) + LP::mono(-1, 1);
    if (f.sym->name == "c") {
      // c^k_{ij}: nonzero only for (2,1,2) = 1/x (antisym-normalized)
      if (f.indices == std::vector<int>{2, 1, 2}) return LP::mono(-1, 0);
      return LP();
    }
    if (f.sym->name == "cu") return LP();
    throw std::runtime_error("model: unknown symbol " + f.sym->name);
  }

  LP value(const DerivedFunction &f) const {
    LP v = base_value(f);
    for (AnchorDir d : f.word) v = anchor(d, v);
    return v;
  }

  LP value(const CoeffPoly &p) const {
    LP out;
    for (auto &[m, c] : p.terms) {
      if (!c.is_real())
        throw std::runtime_error("model: complex coefficient");
      LP term = LP::mono(0, 0, c.re);
      for (auto &[f, e] : m.factors) {
        LP base = f.is_scalar() ? LP::mono(0, 0, scalars.at(f.scalar()))
                                : value(f.fn());
        for (int r = 0; r < e; ++r) term = term * base;
      }
      out = out + term;
    }
    return out;
  }
};

inline FrameGeometry model_geometry() {
  FrameGeometry g;
  g.rank = 2;
  auto cl = std::make_shared<FunctionSymbol>(
      "c", std::vector<Variance>{Variance::Upper, Variance::Lower, Variance::Lower},
      2);
  cl->antisym = std::make_pair(1, 2);
  auto cu = std::make_shared<FunctionSymbol>(
      "cu", std::vector<Variance>{Variance::Upper, Variance::Upper, Variance::Lower},
      2);
  cu->antisym = std::make_pair(0, 1);
  g.c_low = cl;
  g.c_up = cu;
  return g;
}

inline FunctionSymbolPtr generic_symbol() {
  return std::make_shared<FunctionSymbol>("g", std::vector<Variance>{}, 2);
}

}  // namespace susyopal::testmodel

#endif
