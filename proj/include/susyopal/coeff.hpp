#ifndef SUSYOPAL_COEFF_HPP
#define SUSYOPAL_COEFF_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "susyopal/rational.hpp"

namespace susyopal {

// ---------------------------------------------------------------------------
// Anchor directions.  A frame {e_i} u {e^i} induces derivations pi(e_i),
// pi(e^i) of the function ring; derivative decorations on structure functions
// are words in these directions.
// ---------------------------------------------------------------------------

enum class Variance { Lower, Upper };

struct AnchorDir {
  Variance var = Variance::Lower;
  int index = 1;  // 1..rank

  friend bool operator==(const AnchorDir &, const AnchorDir &) = default;
  friend bool operator<(const AnchorDir &a, const AnchorDir &b) {
    if (a.var != b.var) return a.var < b.var;
    return a.index < b.index;
  }
};

inline AnchorDir lower(int i) { return {Variance::Lower, i}; }
inline AnchorDir upper(int i) { return {Variance::Upper, i}; }

// ---------------------------------------------------------------------------
// Function symbols and their decorated instances.
// ---------------------------------------------------------------------------

struct CoeffPoly;

// A family of named coefficient functions with index slots.  An instance is
// the symbol plus one concrete index per slot.  Declared antisymmetries are
// normalized away at construction time.
struct FunctionSymbol {
  std::string name;
  std::vector<Variance> slots;
  // slot pair (a,b) with f(...,ia,...,ib,...) = -f(...,ib,...,ia,...)
  std::optional<std::pair<int, int>> antisym;
  int rank = 0;
  // all anchor derivatives vanish (abstract structure constants)
  bool constant = false;
  // if set, this symbol denotes the reciprocal of the given polynomial; its
  // derivatives are rewritten via  d(1/p) = -(1/p)^2 dp
  std::shared_ptr<const CoeffPoly> inverse_of;

  FunctionSymbol(std::string n, std::vector<Variance> s, int r)
      : name(std::move(n)), slots(std::move(s)), rank(r) {}
};

using FunctionSymbolPtr = std::shared_ptr<const FunctionSymbol>;

struct DerivedFunction {
  FunctionSymbolPtr sym;
  std::vector<int> indices;        // one per slot
  std::vector<AnchorDir> word;     // derivative word, application order
  // T-decoration as a ring marker; used when decorated function letters are
  // flattened into coefficients for relation reduction
  int tpow = 0;

  friend bool operator==(const DerivedFunction &a, const DerivedFunction &b) {
    return a.sym->name == b.sym->name && a.indices == b.indices &&
           a.word == b.word && a.tpow == b.tpow;
  }
  friend bool operator<(const DerivedFunction &a, const DerivedFunction &b) {
    if (a.sym->name != b.sym->name) return a.sym->name < b.sym->name;
    if (a.indices != b.indices) return a.indices < b.indices;
    if (a.word != b.word) return a.word < b.word;
    return a.tpow < b.tpow;
  }
};

// A monomial factor: either a scalar symbol (by name) or a decorated function.
struct Factor {
  std::variant<std::string, DerivedFunction> v;

  bool is_scalar() const { return v.index() == 0; }
  const std::string &scalar() const { return std::get<0>(v); }
  const DerivedFunction &fn() const { return std::get<1>(v); }

  friend bool operator==(const Factor &a, const Factor &b) { return a.v == b.v; }
  friend bool operator<(const Factor &a, const Factor &b) {
    if (a.v.index() != b.v.index()) return a.v.index() < b.v.index();
    if (a.is_scalar()) return a.scalar() < b.scalar();
    return a.fn() < b.fn();
  }
};

// Sorted factor -> exponent list.
struct Monomial {
  std::vector<std::pair<Factor, int>> factors;

  bool is_one() const { return factors.empty(); }
  int degree() const;
  int function_degree() const;
  int scalar_degree() const;

  friend bool operator==(const Monomial &, const Monomial &) = default;
  friend bool operator<(const Monomial &a, const Monomial &b) {
    return a.factors < b.factors;
  }
};

Monomial mono_mul(const Monomial &a, const Monomial &b);
// quotient a/b if b divides a
std::optional<Monomial> mono_div(const Monomial &a, const Monomial &b);

// ---------------------------------------------------------------------------
// Frame geometry: what the coefficient ring needs to know about the frame in
// order to commute anchor derivatives.  [pi(a), pi(b)] = pi([E_a, E_b]) and
// the bracket expands in the frame with the structure functions.
// ---------------------------------------------------------------------------

struct FrameGeometry {
  int rank = 0;
  FunctionSymbolPtr c_low;  // c^i_{jk}: slots (upper, lower, lower), antisym in the lower pair
  FunctionSymbolPtr c_up;   // c^{ij}_k: slots (upper, upper, lower), antisym in the upper pair
  bool regular = false;     // all structure functions vanish identically

  bool enabled() const { return rank > 0; }

  // expansion of the Courant bracket [E_a, E_b] over the frame, as a list of
  // (coefficient, direction) pairs
  std::vector<std::pair<CoeffPoly, AnchorDir>> frame_bracket(AnchorDir a,
                                                             AnchorDir b) const;
  // instance helpers; return the +-normalized instance as a poly (0 if the
  // antisymmetric indices coincide or the frame is regular)
  CoeffPoly inst_low(int i, int j, int k) const;  // c^i_{jk}
  CoeffPoly inst_up(int i, int j, int k) const;   // c^{ij}_k
};

// ---------------------------------------------------------------------------
// CoeffPoly: exact-rational polynomials in scalar symbols and decorated
// structure functions.  The commutative coefficient ring of the engine.
// ---------------------------------------------------------------------------

struct CoeffPoly {
  std::map<Monomial, GaussQ> terms;

  CoeffPoly() = default;
  explicit CoeffPoly(GaussQ c) {
    if (!c.is_zero()) terms.emplace(Monomial{}, std::move(c));
  }
  static CoeffPoly zero() { return CoeffPoly(); }
  static CoeffPoly one() { return CoeffPoly(GaussQ(1)); }
  static CoeffPoly scalar(const std::string &name);
  static CoeffPoly func(DerivedFunction f);

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const {
    return terms.empty() || (terms.size() == 1 && terms.begin()->first.is_one());
  }
  GaussQ constant_part() const {
    auto it = terms.find(Monomial{});
    return it == terms.end() ? GaussQ(0) : it->second;
  }

  void add_term(const Monomial &m, const GaussQ &c);

  CoeffPoly operator-() const;
  CoeffPoly &operator+=(const CoeffPoly &o);
  CoeffPoly &operator-=(const CoeffPoly &o);
  friend CoeffPoly operator+(CoeffPoly a, const CoeffPoly &b) { return a += b; }
  friend CoeffPoly operator-(CoeffPoly a, const CoeffPoly &b) { return a -= b; }
  friend CoeffPoly operator*(const CoeffPoly &a, const CoeffPoly &b);
  friend CoeffPoly operator*(const GaussQ &c, CoeffPoly p);

  friend bool operator==(const CoeffPoly &, const CoeffPoly &) = default;
  friend bool operator<(const CoeffPoly &a, const CoeffPoly &b) {
    return a.terms < b.terms;
  }
};

// Ring-level rewrite rules: pairs of scalar symbols with a*b = 1 (used for
// opaque inverses like kappa and 1/kappa).  Monomials cancel matched pairs.
struct CoeffRules {
  std::vector<std::pair<std::string, std::string>> reciprocal_scalars;
};

// Normalize a polynomial against the reciprocal rules.
CoeffPoly apply_rules(const CoeffPoly &p, const CoeffRules &rules);

// Leibniz derivative along one anchor direction.  Scalar symbols die; function
// words are extended and re-sorted, the reorder corrections coming from the
// frame bracket.
CoeffPoly anchor_derive(const CoeffPoly &p, AnchorDir dir,
                        const FrameGeometry &geom);

// Sort every derivative word into engine-canonical order (by (variance,
// index)), inserting the frame-bracket corrections.  Values are preserved.
CoeffPoly reorder_derivatives(const CoeffPoly &p, const FrameGeometry &geom);

// Build a decorated instance in normal form (word sorted).
CoeffPoly derived_instance(const DerivedFunction &f, const FrameGeometry &geom);

// Derivative of a single decorated instance along dir; handles declared
// constants and reciprocal symbols.
CoeffPoly derive_instance_dir(const DerivedFunction &f, AnchorDir dir,
                              const FrameGeometry &geom);

// Formal T-derivation of the coefficient ring: Leibniz over function factors,
// bumping their T-marker; scalar symbols die.
CoeffPoly t_lift(const CoeffPoly &p);

// ---------------------------------------------------------------------------
// Relation sets and span-membership reduction.
// ---------------------------------------------------------------------------

struct RelationSet {
  std::vector<CoeffPoly> generators;       // identically-zero elements
  std::vector<std::string> labels;         // parallel to generators
  int prolongation_order = 1;
  int multiplier_degree = 1;

  bool empty() const { return generators.empty(); }
  void add(CoeffPoly g, std::string label);
  // adjoin anchor derivatives of every generator up to prolongation_order
  void prolong(const FrameGeometry &geom);
};

struct ReduceResult {
  CoeffPoly normal_form;
  bool reduced = false;                 // true iff normal form is exactly zero
  std::vector<std::string> used;        // labels of generators that acted
};

// Decide membership of p in the span, over Q(i) and scalar monomials, of
// {m * r}: r a (prolonged) generator, m a monomial of bounded function degree
// drawn from divisors of p's support.  Exact linear algebra.
ReduceResult reduce(const CoeffPoly &p, const RelationSet &rel,
                    const FrameGeometry &geom);

std::string to_string(const AnchorDir &d);
std::string to_string(const DerivedFunction &f);
std::string to_string(const Monomial &m);
std::string to_string(const CoeffPoly &p);

}  // namespace susyopal

#endif
