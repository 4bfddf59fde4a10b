#ifndef SUSYOPAL_CALCULUS_HPP
#define SUSYOPAL_CALCULUS_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "susyopal/expr.hpp"

namespace susyopal {

struct Generator {
  std::string name;
  Parity parity = Parity::Odd;
};

// One algebra: generators with parities, the generator-pair bracket table,
// optional anchor geometry (frames), ring rewrite rules and relations.
struct AlgebraPresentation {
  std::string name;
  std::vector<Generator> gens;
  ParityTable parities;
  std::map<std::pair<int, int>, LambdaPoly> table;  // [g_i L g_j], Lambda copy
  FrameGeometry geom;
  bool anchored = false;  // frame algebra: [e_L f] = pi(e) f, S i(f) = j(D f)
  CoeffRules rules;
  RelationSet relations;
  std::vector<std::string> scalars;

  int find_gen(const std::string &n) const;
  // frame conventions: gens[0..N) = e^1..e^N, gens[N..2N) = e_1..e_N
  int upper_gen(int i) const { return i - 1; }
  int lower_gen(int i) const { return geom.rank + i - 1; }
  AnchorDir gen_dir(int g) const {
    return g < geom.rank ? upper(g + 1) : lower(g - geom.rank + 1);
  }
  bool is_frame() const { return anchored && geom.enabled(); }
};

class BracketContext {
 public:
  explicit BracketContext(const AlgebraPresentation &p) : pres(p) {}
  const AlgebraPresentation &pres;

  CoeffPoly cmul(const CoeffPoly &a, const CoeffPoly &b) const {
    return apply_rules(a * b, pres.rules);
  }
  Parity atom_parity(const Atom &a) const { return pres.parities.atom_parity(a); }

  int depth = 0;
  long bracket_calls = 0;
  // memos for unit brackets; results are bit-identical to recomputation
  std::map<std::pair<Atom, Atom>, LambdaPoly> pair_memo;
  std::map<std::pair<std::vector<Atom>, std::vector<Atom>>, LambdaPoly> units_memo;
};

// --- core operations -------------------------------------------------------

// The Lambda bracket, by structural recursion: table base case, quasi-Leibniz
// (non-commutative Wick formula) on right products, double skew-symmetry on
// left products, sesquilinearity for T/S prefixes, anchor action on functions.
LambdaPoly bracket(const FieldExpr &a, const FieldExpr &b, BracketContext &ctx);

// Normally ordered product of the states denoted by a and b (words read as
// written, right-nested); result canonical.
FieldExpr nop(const FieldExpr &a, const FieldExpr &b, BracketContext &ctx);

// Rewrite into the canonical basis: right-nested, atom-ordered words with
// function coefficients extracted; equal to the input as a state.
FieldExpr canonicalize(const FieldExpr &x, BracketContext &ctx);

// T and S as even/odd derivations of the normally ordered product.  On frame
// algebras S rewrites decorated function states through the anchor geometry.
FieldExpr apply_T(const FieldExpr &x, BracketContext &ctx);
FieldExpr apply_S(const FieldExpr &x, BracketContext &ctx);

// integral_0^Lambda p dGamma  (p polynomial in both copies; eta-coefficient
// via the left derivative, then gamma-antiderivative evaluated at lambda)
LambdaPoly integrate_gamma(const LambdaPoly &p);

// integral_{-nabla}^0 p dLambda for quasi-commutativity (p in the Lambda copy)
FieldExpr integrate_minus_nabla(const LambdaPoly &p, BracketContext &ctx);

// operator-valued substitution gamma -> -lambda-T, eta -> -chi-S (input in
// the Gamma copy)
LambdaPoly subst_minus_nabla(const LambdaPoly &p, BracketContext &ctx);

// skew image: given q = [a_L b] (Lambda copy), return [b_L a]
LambdaPoly skew(const LambdaPoly &q, Parity pa, Parity pb, BracketContext &ctx);

// [a_L [b_G c]] + (-1)^p(a) [[a_L b]_{L+G} c]
//               - (-1)^{(p(a)+1)(p(b)+1)} [b_G [a_L c]]; zero iff Jacobi holds
LambdaPoly jacobiator(const FieldExpr &a, const FieldExpr &b,
                      const FieldExpr &c, BracketContext &ctx);

// j! * coefficient of lambda^j chi^J in bracket(a, b)
FieldExpr mode_action(const FieldExpr &a, int j, int J, const FieldExpr &b,
                      BracketContext &ctx);

// expand [q_{L+G} c] given q = [a_L b] in the Lambda copy (Jacobi middle term)
LambdaPoly bracket_shifted(const LambdaPoly &q, const FieldExpr &c,
                           BracketContext &ctx);
// [a_L P] and [P_G c] for parameter-valued arguments (Gamma-copy values)
LambdaPoly bracket_second_poly(const FieldExpr &a, const LambdaPoly &p_gamma,
                               BracketContext &ctx);
LambdaPoly bracket_first_poly(const LambdaPoly &p_lambda, const FieldExpr &c,
                              BracketContext &ctx);
// [b_G (lambda^j chi^J y)]: Lambda-copy coefficients pulled through a
// Gamma-copy bracket
LambdaPoly bracket_gamma_second_poly(const FieldExpr &b,
                                     const LambdaPoly &p_lambda,
                                     BracketContext &ctx);

// rewrite every T-decorated coefficient-function letter one level through
// T = S o S (a quotient identity); used as a reduction fallback
FieldExpr expand_t_letters(const FieldExpr &x, BracketContext &ctx);

// derive the missing table entries via skew and check stored ones; throws on
// inconsistency
void complete_table_by_skew(AlgebraPresentation &pres);

// convenience: the generator state
FieldExpr gen_state(const AlgebraPresentation &pres, int g);
FieldExpr gen_state(const AlgebraPresentation &pres, const std::string &name);

std::string to_string(const FieldExpr &x, const AlgebraPresentation &pres);
std::string to_string(const LambdaPoly &p, const AlgebraPresentation &pres);

}  // namespace susyopal

#endif
