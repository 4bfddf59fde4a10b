#ifndef SUSYOPAL_EXPR_HPP
#define SUSYOPAL_EXPR_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "susyopal/coeff.hpp"

namespace susyopal {

enum class Parity : int { Even = 0, Odd = 1 };

inline Parity operator+(Parity a, Parity b) {
  return Parity((int(a) + int(b)) & 1);
}
inline int sign_of(Parity a, Parity b) {
  return (int(a) & int(b)) ? -1 : 1;
}

// ---------------------------------------------------------------------------
// Atoms and normally ordered words.
//
// An atom is T^m S^eps applied to a generator or to a coefficient function
// (the latter only transiently: canonical forms rewrite decorated function
// states through the anchor geometry, see calculus).  Words are read as the
// right-nested product a1(a2(a3(...))).
// ---------------------------------------------------------------------------

struct Atom {
  int gen = -1;                          // generator index, or -1
  std::optional<DerivedFunction> fn;     // set iff gen < 0
  int tpow = 0;                          // m >= 0
  int spow = 0;                          // eps in {0,1}

  bool is_gen() const { return gen >= 0; }
  int prefix_weight() const { return tpow + spow; }

  friend bool operator==(const Atom &a, const Atom &b) {
    return a.gen == b.gen && a.fn == b.fn && a.tpow == b.tpow &&
           a.spow == b.spow;
  }
  friend bool operator<(const Atom &a, const Atom &b);  // = atom_less
};

// Engine-canonical atom order: decorated coefficient functions first, then
// generators sorted by prefix weight, then T-power, then declared order.
// This is the order the appendix-style displays follow (bare letters before
// S- and T-decorated ones).
bool atom_less(const Atom &a, const Atom &b);

using NOWord = std::vector<Atom>;

inline Atom gen_atom(int g, int m = 0, int e = 0) {
  Atom a;
  a.gen = g;
  a.tpow = m;
  a.spow = e;
  return a;
}

// ---------------------------------------------------------------------------
// FieldExpr: finite sums coefficient * word.  A term (c, w) denotes the state
// i(c) left-multiplied onto the right-nested word w.
// ---------------------------------------------------------------------------

struct FieldExpr {
  std::map<NOWord, CoeffPoly> terms;

  static FieldExpr zero() { return {}; }
  static FieldExpr vacuum(GaussQ c = GaussQ(1));
  static FieldExpr coeff(CoeffPoly c);
  static FieldExpr atom(Atom a, CoeffPoly c = CoeffPoly::one());

  bool is_zero() const { return terms.empty(); }
  void add_term(const NOWord &w, const CoeffPoly &c);

  FieldExpr operator-() const;
  FieldExpr &operator+=(const FieldExpr &o);
  FieldExpr &operator-=(const FieldExpr &o);
  friend FieldExpr operator+(FieldExpr a, const FieldExpr &b) { return a += b; }
  friend FieldExpr operator-(FieldExpr a, const FieldExpr &b) { return a -= b; }
  friend FieldExpr operator*(const CoeffPoly &c, const FieldExpr &x);
  friend FieldExpr operator*(const GaussQ &c, const FieldExpr &x);

  friend bool operator==(const FieldExpr &, const FieldExpr &) = default;
  friend bool operator<(const FieldExpr &a, const FieldExpr &b) {
    return a.terms < b.terms;
  }
};

// ---------------------------------------------------------------------------
// LambdaPoly: polynomials in the formal parameters of up to two copies of the
// parameter algebra: Lambda = (lambda, chi) and Gamma = (gamma, eta).
// Monomial order is lambda^j chi^J gamma^k eta^K with the state coefficient
// written to the right.  chi, eta are odd (chi^2 = -lambda, eta^2 = -gamma,
// chi eta = -eta chi); lambda, gamma are even and central.
// ---------------------------------------------------------------------------

struct ParamMono {
  int j = 0, J = 0, k = 0, K = 0;
  friend bool operator==(const ParamMono &, const ParamMono &) = default;
  friend bool operator<(const ParamMono &a, const ParamMono &b) {
    if (a.j != b.j) return a.j < b.j;
    if (a.J != b.J) return a.J < b.J;
    if (a.k != b.k) return a.k < b.k;
    return a.K < b.K;
  }
};

struct LambdaPoly {
  std::map<ParamMono, FieldExpr> terms;

  static LambdaPoly zero() { return {}; }
  static LambdaPoly of(const FieldExpr &x) {
    LambdaPoly p;
    if (!x.is_zero()) p.terms.emplace(ParamMono{}, x);
    return p;
  }

  bool is_zero() const { return terms.empty(); }
  bool pure_lambda() const {
    for (auto &[m, x] : terms)
      if (m.k || m.K) return false;
    return true;
  }
  bool pure_gamma() const {
    for (auto &[m, x] : terms)
      if (m.j || m.J) return false;
    return true;
  }

  void add(const ParamMono &m, const FieldExpr &x);
  const FieldExpr *coeff(const ParamMono &m) const {
    auto it = terms.find(m);
    return it == terms.end() ? nullptr : &it->second;
  }

  LambdaPoly operator-() const;
  LambdaPoly &operator+=(const LambdaPoly &o);
  LambdaPoly &operator-=(const LambdaPoly &o);
  friend LambdaPoly operator+(LambdaPoly a, const LambdaPoly &b) { return a += b; }
  friend LambdaPoly operator-(LambdaPoly a, const LambdaPoly &b) { return a -= b; }
  friend LambdaPoly operator*(const GaussQ &c, const LambdaPoly &p);
  friend LambdaPoly operator*(const CoeffPoly &c, const LambdaPoly &p);
  friend bool operator==(const LambdaPoly &, const LambdaPoly &) = default;

  // relabel the Lambda copy into the Gamma copy (valid on single-copy input)
  LambdaPoly to_gamma() const;
  LambdaPoly to_lambda() const;
};

// plain left multiplications in the parameter algebra
LambdaPoly mul_lambda(const LambdaPoly &p, int power = 1);
LambdaPoly mul_gamma(const LambdaPoly &p, int power = 1);
LambdaPoly mul_chi(const LambdaPoly &p);   // chi * p, chi^2 = -lambda
LambdaPoly mul_eta(const LambdaPoly &p);   // eta * p, eta^2 = -gamma
// the twisted multiplication appearing in right sesquilinearity: inserts chi
// without the chi^2 = -lambda sign (chi . (lambda^j chi x) = +lambda^{j+1} x)
LambdaPoly mul_chi_star(const LambdaPoly &p);
LambdaPoly mul_eta_star(const LambdaPoly &p);

// multiply a monomial prefix onto p, plain algebra (used when re-merging
// pulled-out parameter monomials)
LambdaPoly mul_prefix(const ParamMono &pre, const LambdaPoly &p);

// parity of a word / expression (presentation-dependent: generator parities)
struct ParityTable {
  std::vector<Parity> gen_parity;
  Parity atom_parity(const Atom &a) const;
  Parity word_parity(const NOWord &w) const;
  // parity of a homogeneous expression; nullopt for mixed or zero
  std::optional<Parity> expr_parity(const FieldExpr &x) const;
};

std::string to_string(const NOWord &w, const std::vector<std::string> &gen_names);

}  // namespace susyopal

#endif
