#ifndef SUSYOPAL_ALGEBRAS_HPP
#define SUSYOPAL_ALGEBRAS_HPP

#include <memory>
#include <string>
#include <vector>

#include "susyopal/calculus.hpp"

namespace susyopal {

// --- finite-dimensional Lie algebra input ----------------------------------

struct LieAlgebraData {
  int dim = 0;
  std::vector<std::string> names;
  // [x_i, x_j] = sum_k f[i][j][k] x_k   (0-based)
  std::vector<std::vector<std::vector<GaussQ>>> f;
  std::vector<std::vector<GaussQ>> form;  // (x_i, x_j)

  void check() const;  // antisymmetry, Jacobi, invariance and symmetry of form
  std::vector<std::vector<GaussQ>> form_inverse() const;
};

LieAlgebraData sl2_data();          // e, h, f with (e,f)=1, (h,h)=2, hvee = 2
LieAlgebraData abelian_data(int n);

// --- built-in presentations -------------------------------------------------

// Neveu-Schwarz: odd H, [H_L H] = (2T + chi S + 3 lambda)H + (c/3) chi lambda^2
AlgebraPresentation ns(const std::string &central = "c");

// N=2: adds even J with [H_L J] = (2T + 2 lambda + chi S)J and
// [J_L J] = -(H + (c/3) lambda chi)
AlgebraPresentation n2(const std::string &central = "c");

// n2 without the (H,H) entry; used to re-derive [H_L H] from the two
// hypothesis brackets alone
AlgebraPresentation n2_partial(const std::string &central = "c");

// super currents: odd superfields over g, [a_L b] = [a,b] + chi kappa (a,b)
AlgebraPresentation super_affine(const LieAlgebraData &g);

// the superconformal vector of the super current algebra (Kac-Todorov form)
FieldExpr kt_field(const AlgebraPresentation &pres, const LieAlgebraData &g,
                   BracketContext &ctx);

// --- Manin doubles -----------------------------------------------------------

struct BialgebraData {
  int dim = 0;
  // h structure constants: [e_i, e_j] = sum c_low[i][j][k] e_k  (0-based)
  std::vector<std::vector<std::vector<GaussQ>>> c_low;
  // h* structure constants: [e^i, e^j] = sum c_up[i][j][k] e^k
  std::vector<std::vector<std::vector<GaussQ>>> c_up;
};

BialgebraData bialgebra_dim2();  // [e_1,e_2] = e_2, dual abelian

// concrete double presentation on e_1..e_n, e^1..e^n with chi kappa pairing
AlgebraPresentation manin_double(const BialgebraData &b);
// abstract-constants double (structure constants as opaque symbols)
AlgebraPresentation manin_double_abstract(int dim);

// v_h = w - w* where [e^i, e_i] = w + w*
FieldExpr manin_v(const AlgebraPresentation &pres, const BialgebraData &b);
FieldExpr manin_v_abstract(const AlgebraPresentation &pres);
// (v_h, v_h) for concrete data
GaussQ manin_v_norm(const BialgebraData &b);

// the double's distinguished fields (section 2.5 normalization, prefactor
// 1/kappa resp. 1/kappa^2)
FieldExpr double_J(const AlgebraPresentation &pres, BracketContext &ctx);
FieldExpr double_H(const AlgebraPresentation &pres, const FieldExpr &v,
                   BracketContext &ctx);

// --- Courant algebroid frames ------------------------------------------------

struct FrameOptions {
  bool regular = false;
  bool unimodular = false;
  bool nice_volume = false;
  int reduction_degree = 1;
  int prolongation = 1;
};

AlgebraPresentation courant_frame(int rank, FrameOptions opt = {});

// sections as frame-component vectors (index order = generator order)
using Section = std::vector<CoeffPoly>;

Section section_of_gen(const AlgebraPresentation &pres, int g);
Section courant_bracket(const AlgebraPresentation &pres, const Section &A,
                        const Section &B);
CoeffPoly section_pairing(const AlgebraPresentation &pres, const Section &A,
                          const Section &B);
Section section_D(const AlgebraPresentation &pres, const CoeffPoly &f);
CoeffPoly section_anchor(const AlgebraPresentation &pres, const Section &A,
                         const CoeffPoly &f);

// Jacobi-anomaly relations: components of Jac(A,B,C) - D(Nij(A,B,C)) over
// all frame triples
RelationSet derive_relations(const AlgebraPresentation &frame);
// unimodularity: the divergence identities applied to frame brackets
RelationSet divergence_relations(const AlgebraPresentation &frame);
// nice volume: all frame divergences vanish
RelationSet nice_volume_relations(const AlgebraPresentation &frame);
// consequences of pi o D = 0 for the listed coefficient functions: the
// bilinear isotropy sum_r (f_{,r} g^{,r} + f^{,r} g_{,r}) = 0 and, with the
// unimodular divergences, the second-order form
// sum_r (f_{,r}^{,r} + f^{,r}_{,r}) = sum_{r,i} (c^i_{ri} f^{,r} + c^{ri}_i f_{,r})
RelationSet isotropy_relations(const AlgebraPresentation &frame,
                               const std::vector<DerivedFunction> &fns);

// Residual reduction at the state level: T-decorated function letters are
// flattened into coefficient markers and every word coefficient is reduced
// modulo the relation set extended by its formal T-Leibniz lifts.
struct FieldReduceResult {
  FieldExpr normal_form;
  bool reduced = false;
  std::vector<std::string> used;
};
FieldReduceResult reduce_field(const FieldExpr &x, const RelationSet &rel,
                               const AlgebraPresentation &pres);
FieldReduceResult reduce_lambda(const LambdaPoly &x, const RelationSet &rel,
                                const AlgebraPresentation &pres);

// J = (i/2) e^m e_m
FieldExpr build_J(const AlgebraPresentation &frame, BracketContext &ctx);
// H = (1/4)[e^i(e^j[e_i,e_j]) + e_i(e_j[e^i,e^j])] - (i/2) T Jop[e^i,e_i]
//     + (1/2)(e_j Se^j + e^j Se_j)
FieldExpr build_H(const AlgebraPresentation &frame, BracketContext &ctx);
// the same field assembled in the orthonormal frame (1/12 cubic form)
FieldExpr orthonormal_H(const AlgebraPresentation &frame, BracketContext &ctx);

// frame change by an invertible matrix of declared function symbols; returns
// the transformation defect of J and the expected value
struct FrameChange {
  AlgebraPresentation pres;     // frame with rho symbols declared
  FieldExpr defect;             // J' - J
  FieldExpr expected;           // i det(rho) T(det(rho)^{-1})
  RelationSet const_det;        // relations declaring det(rho) constant
  CoeffPoly det;                // det(rho) as a polynomial in the rho entries
  CoeffPoly detinv;             // the declared reciprocal symbol
};
FrameChange change_frame(int rank, FrameOptions opt = {});

}  // namespace susyopal

#endif
