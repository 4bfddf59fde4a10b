#include "susyopal/verify.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace susyopal {

namespace {

GaussQ I() { return GaussQ::unit_i(); }

// (2T + chi S + 3 lambda) X + (c3) lambda^2 chi
LambdaPoly ns_form(const FieldExpr &X, const CoeffPoly &c3, BracketContext &ctx) {
  LambdaPoly p;
  p.add(ParamMono{0, 0, 0, 0}, GaussQ(2) * apply_T(X, ctx));
  p.add(ParamMono{0, 1, 0, 0}, apply_S(X, ctx));
  p.add(ParamMono{1, 0, 0, 0}, GaussQ(3) * X);
  p.add(ParamMono{2, 1, 0, 0}, FieldExpr::coeff(c3));
  return p;
}

// (2T + 2 lambda + chi S) X
LambdaPoly weight_one(const FieldExpr &X, BracketContext &ctx) {
  LambdaPoly p;
  p.add(ParamMono{0, 0, 0, 0}, GaussQ(2) * apply_T(X, ctx));
  p.add(ParamMono{1, 0, 0, 0}, GaussQ(2) * X);
  p.add(ParamMono{0, 1, 0, 0}, apply_S(X, ctx));
  return p;
}

// (2T + lambda + chi S) X
LambdaPoly primary_half(const FieldExpr &X, BracketContext &ctx) {
  LambdaPoly p;
  p.add(ParamMono{0, 0, 0, 0}, GaussQ(2) * apply_T(X, ctx));
  p.add(ParamMono{1, 0, 0, 0}, X);
  p.add(ParamMono{0, 1, 0, 0}, apply_S(X, ctx));
  return p;
}

FrameOptions frame_options(const CheckConfig &cfg) {
  FrameOptions opt;
  opt.regular = cfg.assume == "regular";
  opt.unimodular = cfg.assume == "unimodular" || cfg.assume == "nice-volume";
  opt.nice_volume = cfg.assume == "nice-volume";
  opt.reduction_degree = cfg.reduction_degree;
  opt.prolongation = cfg.prolongation;
  return opt;
}

FunctionSymbolPtr generic_fsym(int rank) {
  return std::make_shared<FunctionSymbol>("f", std::vector<Variance>{}, rank);
}

// frame with a generic coefficient function and the pi o D relations for it
AlgebraPresentation checked_frame(const CheckConfig &cfg, FrameOptions opt,
                                  DerivedFunction *generic_out = nullptr) {
  AlgebraPresentation P = courant_frame(cfg.rank, opt);
  DerivedFunction f{generic_fsym(cfg.rank), {}, {}};
  if (!opt.regular) {
    RelationSet iso = isotropy_relations(P, {f});
    for (size_t k = 0; k < iso.generators.size(); ++k)
      P.relations.add(iso.generators[k], iso.labels[k]);
    P.relations.prolong(P.geom);
  }
  if (generic_out) *generic_out = f;
  return P;
}

struct Pending {
  CheckReport rep;
  std::vector<std::pair<std::string, LambdaPoly>> exact;     // must be empty
  std::vector<std::pair<std::string, LambdaPoly>> reducible; // must reduce to 0
};

void settle(Pending &p, const AlgebraPresentation &P) {
  p.rep.pass = true;
  std::set<std::string> used;
  std::ostringstream res;
  for (auto &[what, poly] : p.exact) {
    if (!poly.is_zero()) {
      p.rep.pass = false;
      res << what << ": " << to_string(poly, P) << "\n";
    }
  }
  for (auto &[what, poly] : p.reducible) {
    FieldReduceResult rr = reduce_lambda(poly, P.relations, P);
    used.insert(rr.used.begin(), rr.used.end());
    if (!rr.reduced) {
      p.rep.pass = false;
      res << what << " (mod relations): " << to_string(rr.normal_form, P) << "\n";
    }
  }
  p.rep.relations_used.assign(used.begin(), used.end());
  if (!p.rep.pass) p.rep.residual = res.str();
}

// --- individual checks -------------------------------------------------

CheckReport check_ns_self(const CheckConfig &cfg) {
  Pending p;
  AlgebraPresentation P = ns();
  BracketContext ctx(P);
  FieldExpr H = gen_state(P, "H");
  CoeffPoly c3 = GaussQ(1, 3) * CoeffPoly::scalar("c");
  p.exact.push_back({"[H_L H] - ns_form", bracket(H, H, ctx) - ns_form(H, c3, ctx)});
  // central charge zero variant has no central term
  AlgebraPresentation P0 = ns("czero");
  BracketContext ctx0(P0);
  LambdaPoly hh0 = bracket(gen_state(P0, "H"), gen_state(P0, "H"), ctx0);
  bool no_c = true;
  for (auto &[m, x] : hh0.terms)
    if (m.j == 2 && m.J == 1)
      for (auto &[w, c] : x.terms)
        if (w.empty() && c.is_constant() && !c.constant_part().is_zero()) no_c = false;
  p.rep.notes.push_back("central term carries the scalar symbol only (vanishes at c = 0)");
  if (!no_c) {
    p.exact.push_back({"numeric central term at c = 0", hh0});
  }
  settle(p, P);
  return p.rep;
}

CheckReport check_n2_table(const CheckConfig &cfg) {
  Pending p;
  AlgebraPresentation P = n2();
  BracketContext ctx(P);
  FieldExpr H = gen_state(P, "H"), J = gen_state(P, "J");
  CoeffPoly c3 = GaussQ(1, 3) * CoeffPoly::scalar("c");
  p.exact.push_back({"[H_L H]", bracket(H, H, ctx) - ns_form(H, c3, ctx)});
  p.exact.push_back({"[H_L J]", bracket(H, J, ctx) - weight_one(J, ctx)});
  LambdaPoly jj;
  jj.add(ParamMono{0, 0, 0, 0}, GaussQ(-1) * H);
  jj.add(ParamMono{1, 1, 0, 0}, FieldExpr::coeff(GaussQ(-1) * c3));
  p.exact.push_back({"[J_L J]", bracket(J, J, ctx) - jj});
  // skew consistency over all ordered pairs
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      LambdaPoly q = bracket(gen_state(P, a), gen_state(P, b), ctx);
      LambdaPoly s = skew(q, P.gens[a].parity, P.gens[b].parity, ctx);
      p.exact.push_back({"skew(" + P.gens[a].name + "," + P.gens[b].name + ")",
                         bracket(gen_state(P, b), gen_state(P, a), ctx) - s});
    }
  settle(p, P);
  return p.rep;
}

CheckReport check_n2_jacobi(const CheckConfig &cfg) {
  Pending p;
  AlgebraPresentation P = n2();
  BracketContext ctx(P);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        p.exact.push_back(
            {"jacobiator(" + P.gens[a].name + "," + P.gens[b].name + "," +
                 P.gens[c].name + ")",
             jacobiator(gen_state(P, a), gen_state(P, b), gen_state(P, c), ctx)});
  settle(p, P);
  return p.rep;
}

// chi-part of a Lambda-polynomial = the ordinary lambda-bracket of the
// component dictionary
LambdaPoly chi_part(const LambdaPoly &p) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms)
    if (m.J == 1) out.add(ParamMono{m.j, 1, 0, 0}, x);
  return out;
}

LambdaPoly chi_poly(std::vector<std::pair<int, FieldExpr>> coeffs) {
  LambdaPoly out;
  for (auto &[j, x] : coeffs) out.add(ParamMono{j, 1, 0, 0}, x);
  return out;
}

CheckReport check_components(const CheckConfig &cfg) {
  Pending p;
  // NS dictionary: H = G + 2 theta L, so G = H and L = (1/2) SH
  AlgebraPresentation P = ns();
  BracketContext ctx(P);
  FieldExpr G = gen_state(P, "H");
  FieldExpr L = GaussQ(1, 2) * apply_S(G, ctx);
  CoeffPoly c = CoeffPoly::scalar("c");
  // [L_l L] = (T + 2 lambda) L + (c/12) lambda^3
  p.exact.push_back(
      {"[L_l L]", chi_part(bracket(L, L, ctx)) -
                      chi_poly({{0, apply_T(L, ctx)},
                                {1, GaussQ(2) * L},
                                {3, FieldExpr::coeff(GaussQ(1, 12) * c)}})});
  // [L_l G] = (T + 3/2 lambda) G
  p.exact.push_back({"[L_l G]", chi_part(bracket(L, G, ctx)) -
                                     chi_poly({{0, apply_T(G, ctx)},
                                               {1, GaussQ(3, 2) * G}})});
  // [G_l G] = 2L + (c/3) lambda^2
  p.exact.push_back(
      {"[G_l G]", chi_part(bracket(G, G, ctx)) -
                      chi_poly({{0, GaussQ(2) * L},
                                {2, FieldExpr::coeff(GaussQ(1, 3) * c)}})});
  p.rep.notes.push_back("dictionary: G = H, L = (1/2) SH (theta component of the superfield)");

  // N=2 dictionary: J = -i J^c - i theta (G^- - G^+), H = (G^+ + G^-) + 2 theta L
  AlgebraPresentation Q = n2();
  BracketContext qx(Q);
  FieldExpr Hs = gen_state(Q, "H"), Js = gen_state(Q, "J");
  FieldExpr Jc = I() * Js;
  FieldExpr Gp = GaussQ(1, 2) * (Hs - I() * apply_S(Js, qx));
  FieldExpr Gm = GaussQ(1, 2) * (Hs + I() * apply_S(Js, qx));
  FieldExpr Lc = GaussQ(1, 2) * apply_S(Hs, qx);
  // [J_l J] = (c/3) lambda
  p.exact.push_back({"[Jc_l Jc]",
                     chi_part(bracket(Jc, Jc, qx)) -
                         chi_poly({{1, FieldExpr::coeff(GaussQ(1, 3) * c)}})});
  // [J_l G^pm] = pm G^pm
  p.exact.push_back({"[Jc_l G+]", chi_part(bracket(Jc, Gp, qx)) - chi_poly({{0, Gp}})});
  p.exact.push_back({"[Jc_l G-]",
                     chi_part(bracket(Jc, Gm, qx)) - chi_poly({{0, GaussQ(-1) * Gm}})});
  // [G+_l G-] = L + (1/2) T J + lambda J + (c/6) lambda^2
  p.exact.push_back(
      {"[G+_l G-]",
       chi_part(bracket(Gp, Gm, qx)) -
           chi_poly({{0, Lc + GaussQ(1, 2) * apply_T(Jc, qx)},
                     {1, Jc},
                     {2, FieldExpr::coeff(GaussQ(1, 6) * c)}})});
  p.exact.push_back({"[G+_l G+]", chi_part(bracket(Gp, Gp, qx))});
  p.exact.push_back({"[G-_l G-]", chi_part(bracket(Gm, Gm, qx))});
  // [L_l J] = (T + lambda) J
  p.exact.push_back({"[L_l Jc]", chi_part(bracket(Lc, Jc, qx)) -
                                      chi_poly({{0, apply_T(Jc, qx)}, {1, Jc}})});
  p.rep.notes.push_back(
      "dictionary: Jc = i J, G+- = (1/2)(H -+ i SJ), L = (1/2) SH; component "
      "bracket = chi part of the Lambda bracket");
  settle(p, Q);
  return p.rep;
}

CheckReport check_kt_sl2(const CheckConfig &cfg) {
  Pending p;
  LieAlgebraData g = sl2_data();
  AlgebraPresentation P = super_affine(g);
  BracketContext ctx(P);
  FieldExpr H0 = kt_field(P, g, ctx);
  // c0 = 3k/(k+2) + 3/2 = 9/2 - 6/kappa with kappa = k + 2
  CoeffPoly c3 = CoeffPoly(GaussQ(3, 2)) - GaussQ(2) * CoeffPoly::scalar("kappainv");
  p.exact.push_back({"[H0_L H0] - ns(c0)", bracket(H0, H0, ctx) - ns_form(H0, c3, ctx)});
  for (auto &n : {"e", "h", "f"}) {
    FieldExpr a = gen_state(P, n);
    p.exact.push_back({std::string("[H0_L ") + n + "] primary 1/2",
                       bracket(H0, a, ctx) - primary_half(a, ctx)});
  }
  p.rep.notes.push_back(
      "kappa = k + hvee (hvee = 2 for sl2); c0 = 9/2 - 6/kappa = 3k/(k+2) + 3/2");
  settle(p, P);
  return p.rep;
}

CheckReport check_kt_deformed(const CheckConfig &cfg) {
  Pending p;
  LieAlgebraData g = sl2_data();
  AlgebraPresentation P = super_affine(g);
  BracketContext ctx(P);
  FieldExpr H0 = kt_field(P, g, ctx);
  FieldExpr v = gen_state(P, "h");
  FieldExpr H = H0 + apply_T(v, ctx);
  // c = c0 - 3 kappa (v,v), (h,h) = 2
  CoeffPoly c3 = CoeffPoly(GaussQ(3, 2)) - GaussQ(2) * CoeffPoly::scalar("kappainv") -
                 GaussQ(2) * CoeffPoly::scalar("kappa");
  p.exact.push_back({"[H_L H] - ns(c0 - 6 kappa)",
                     bracket(H, H, ctx) - ns_form(H, c3, ctx)});
  p.rep.notes.push_back("H = H0 + Tv with v = h; (v,v) = 2; c = c0 - 6 kappa");
  settle(p, P);
  return p.rep;
}

CheckReport check_doubles_1(const CheckConfig &cfg) {
  Pending p;
  // at dim 2 every pair of brackets satisfies Jacobi identically and the
  // residuals vanish on the nose; dim 3 exercises the derived relations
  int n = 3;
  AlgebraPresentation P = manin_double_abstract(n);
  RelationSet rel = derive_relations(P);
  rel.multiplier_degree = cfg.reduction_degree;
  rel.prolongation_order = cfg.prolongation;
  P.relations = rel;
  BracketContext ctx(P);
  FieldExpr J = double_J(P, ctx);
  FieldExpr v = manin_v_abstract(P);
  FieldExpr H = double_H(P, v, ctx);
  LambdaPoly jj = bracket(J, J, ctx);
  jj.add(ParamMono{0, 0, 0, 0}, H);
  jj.add(ParamMono{1, 1, 0, 0}, FieldExpr::vacuum(GaussQ(n)));  // c/3 = dim h
  p.reducible.push_back({"[J_L J] + H + (c/3) lambda chi", jj});
  p.reducible.push_back({"[H_L J] - (2T + 2 lambda + chi S)J",
                         bracket(H, J, ctx) - weight_one(J, ctx)});
  settle(p, P);
  if (p.rep.pass && p.rep.relations_used.empty()) {
    p.rep.pass = false;
    p.rep.residual = "expected a nonempty relation-reduction log";
  }
  p.rep.notes.push_back("structure constants abstract at dim 3; residuals "
                        "reduced by the double's Jacobi relations (dim 2 "
                        "cancels identically, Jacobi being vacuous there)");
  return p.rep;
}

CheckReport check_doubles_2(const CheckConfig &cfg) {
  Pending p;
  BialgebraData b = bialgebra_dim2();
  AlgebraPresentation P = manin_double(b);
  BracketContext ctx(P);
  FieldExpr J = double_J(P, ctx);
  FieldExpr v = manin_v(P, b);
  FieldExpr H = double_H(P, v, ctx);
  LambdaPoly jj = bracket(J, J, ctx);
  jj.add(ParamMono{0, 0, 0, 0}, H);
  jj.add(ParamMono{1, 1, 0, 0}, FieldExpr::vacuum(GaussQ(b.dim)));
  p.exact.push_back({"[J_L J] + H + (c/3) lambda chi", jj});
  p.exact.push_back({"[H_L J] - (2T + 2 lambda + chi S)J",
                     bracket(H, J, ctx) - weight_one(J, ctx)});
  CoeffPoly c3 = CoeffPoly(GaussQ(b.dim));
  p.exact.push_back({"[H_L H] - ns(3 dim h)", bracket(H, H, ctx) - ns_form(H, c3, ctx)});
  GaussQ vv = manin_v_norm(b);
  std::ostringstream note;
  note << "concrete bialgebra [e1,e2]=e2, dual abelian; v = e^1, (v,v) = "
       << to_string(vv) << " (hvee undefined for this solvable instance)";
  p.rep.notes.push_back(note.str());
  settle(p, P);
  return p.rep;
}

CheckReport check_lemma_technical(const CheckConfig &cfg) {
  Pending p;
  AlgebraPresentation P = n2_partial();
  BracketContext ctx(P);
  FieldExpr H = gen_state(P, "H"), J = gen_state(P, "J");
  // From the two hypothesis brackets alone:
  // [H_L H] = -([[H_L J]_{L+G} J] + [J_G [H_L J]])
  LambdaPoly hj = bracket(H, J, ctx);
  LambdaPoly mid = bracket_shifted(hj, J, ctx);
  LambdaPoly last = bracket_gamma_second_poly(J, hj, ctx);
  LambdaPoly derived = -(mid + last);
  for (auto &[m, x] : derived.terms)
    if (m.k || m.K) {
      p.exact.push_back({"Gamma dependence of the derived bracket", derived});
      break;
    }
  CoeffPoly c3 = GaussQ(1, 3) * CoeffPoly::scalar("c");
  p.exact.push_back({"derived [H_L H] - ns_form", derived - ns_form(H, c3, ctx)});
  p.rep.notes.push_back(
      "derivation uses only [J_L J] = -(H + (c/3) lambda chi) and "
      "[H_L J] = (2T + 2 lambda + chi S)J via the Jacobi identity");
  settle(p, P);
  return p.rep;
}

CheckReport check_lemma_section1(const CheckConfig &cfg) {
  Pending p;
  p.rep.residual.clear();
  std::set<std::string> used;
  // rank 1 on the general frame, rank 2 on the regular one: the
  // transformation defect of J only involves quasi-associativity and the
  // pairing, so the structure functions are spectators
  struct Run { int rank; bool regular; };
  std::vector<Run> runs{{1, false}};
  if (cfg.rank >= 2) runs.push_back({2, true});
  for (auto run : runs) {
    CheckConfig c = cfg;
    c.rank = run.rank;
    FrameOptions opt = frame_options(c);
    opt.regular = run.regular;
    FrameChange fc = change_frame(run.rank, opt);
    std::string tag = "rank " + std::to_string(run.rank) +
                      (run.regular ? " (regular)" : "");
    RelationSet detrel;
    detrel.multiplier_degree = 2;
    detrel.prolongation_order = 1;
    detrel.add(fc.det * fc.detinv - CoeffPoly::one(), "det*detinv-1");
    detrel.prolong(fc.pres.geom);
    FieldReduceResult rr = reduce_field(fc.defect - fc.expected, detrel, fc.pres);
    if (!rr.reduced)
      p.rep.residual += tag + " defect - i det T(detinv): " +
                        to_string(rr.normal_form, fc.pres) + "\n";
    used.insert(rr.used.begin(), rr.used.end());
    RelationSet cd = fc.const_det;
    for (size_t i = 0; i < detrel.generators.size(); ++i)
      cd.add(detrel.generators[i], detrel.labels[i]);
    FieldReduceResult rz = reduce_field(fc.defect, cd, fc.pres);
    if (!rz.reduced)
      p.rep.residual += tag + " defect under constant det: " +
                        to_string(rz.normal_form, fc.pres) + "\n";
    used.insert(rz.used.begin(), rz.used.end());
  }
  p.rep.pass = p.rep.residual.empty();
  if (p.rep.pass) p.rep.residual = "0";
  p.rep.relations_used.assign(used.begin(), used.end());
  p.rep.notes.push_back(
      "rho entries are declared coefficient functions, detinv the declared "
      "reciprocal of det rho; the cofactor identity for d(det) holds by "
      "Leibniz expansion");
  return p.rep;
}

CheckReport check_lemma_h_def(const CheckConfig &cfg) {
  Pending p;
  AlgebraPresentation P = checked_frame(cfg, frame_options(cfg));
  BracketContext ctx(P);
  FieldExpr J = build_J(P, ctx);
  FieldExpr H = build_H(P, ctx);
  LambdaPoly res = bracket(J, J, ctx);
  res.add(ParamMono{0, 0, 0, 0}, H);
  res.add(ParamMono{1, 1, 0, 0}, FieldExpr::vacuum(GaussQ(cfg.rank)));
  p.reducible.push_back({"[J_L J] + H + N lambda chi", res});
  settle(p, P);
  return p.rep;
}

CheckReport check_thm_main(const CheckConfig &cfg) {
  Pending p;
  CheckConfig c = cfg;
  if (c.assume.empty()) c.assume = "unimodular";
  DerivedFunction fgen;
  AlgebraPresentation P = checked_frame(c, frame_options(c), &fgen);
  BracketContext ctx(P);
  FieldExpr J = build_J(P, ctx);
  FieldExpr H = build_H(P, ctx);
  int N = c.rank;
  // part 1: [H_L f] = (2T + chi S) f on the generic function
  FieldExpr f = FieldExpr::coeff(CoeffPoly::func(fgen));
  LambdaPoly want1;
  want1.add(ParamMono{0, 0, 0, 0}, GaussQ(2) * apply_S(apply_S(f, ctx), ctx));
  want1.add(ParamMono{0, 1, 0, 0}, apply_S(f, ctx));
  p.reducible.push_back({"[H_L f] - (2T + chi S)f", bracket(H, f, ctx) - want1});
  // part 2: [H_L e_k] = (2T + lambda + chi S)e_k - lambda chi c^i_{ki}, dual form
  for (int k = 1; k <= N; ++k) {
    FieldExpr ek = FieldExpr::atom(gen_atom(P.lower_gen(k)));
    LambdaPoly want = primary_half(ek, ctx);
    CoeffPoly div;
    for (int i = 1; i <= N; ++i) div += P.geom.inst_low(i, k, i);
    want.add(ParamMono{1, 1, 0, 0}, GaussQ(-1) * FieldExpr::coeff(div));
    p.reducible.push_back({"[H_L e_" + std::to_string(k) + "]",
                           bracket(H, ek, ctx) - want});
    FieldExpr eu = FieldExpr::atom(gen_atom(P.upper_gen(k)));
    LambdaPoly wu = primary_half(eu, ctx);
    CoeffPoly divu;
    for (int i = 1; i <= N; ++i) divu += P.geom.inst_up(k, i, i);
    wu.add(ParamMono{1, 1, 0, 0}, GaussQ(-1) * FieldExpr::coeff(divu));
    p.reducible.push_back({"[H_L e^" + std::to_string(k) + "]",
                           bracket(H, eu, ctx) - wu});
  }
  // [H_L J] = (2T + 2 lambda + chi S) J
  p.reducible.push_back({"[H_L J]", bracket(H, J, ctx) - weight_one(J, ctx)});
  // golden intermediate: [e_k_L H] at k = 1
  {
    int k = 1;
    CoeffPoly csum;
    for (int i = 1; i <= N; ++i) csum += P.geom.inst_low(i, k, i);
    FieldExpr cst = FieldExpr::coeff(csum);
    FieldExpr ek = FieldExpr::atom(gen_atom(P.lower_gen(k)));
    LambdaPoly want;
    want.add(ParamMono{0, 0, 0, 0}, apply_T(apply_S(cst, ctx), ctx));
    want.add(ParamMono{0, 1, 0, 0},
             FieldExpr::atom(gen_atom(P.lower_gen(k), 0, 1)) + apply_T(cst, ctx));
    want.add(ParamMono{1, 0, 0, 0}, ek + apply_S(cst, ctx));
    want.add(ParamMono{1, 1, 0, 0}, cst.is_zero() ? FieldExpr() : FieldExpr::coeff(csum));
    p.reducible.push_back({"golden [e_1_L H]", bracket(ek, H, ctx) - want});
  }
  // part 3 at rank 1 directly: [H_L H] = ns(3N)
  if (N == 1) {
    CoeffPoly c3 = CoeffPoly(GaussQ(N));
    p.reducible.push_back({"[H_L H] - ns(3N)", bracket(H, H, ctx) - ns_form(H, c3, ctx)});
  }
  p.rep.notes.push_back(
      "part 3 (c = 3N) follows from [J_L J] = -(H + N lambda chi), "
      "[H_L J] = (2T + 2 lambda + chi S)J and the lemma_technical chain; "
      "verified directly at rank 1");
  p.rep.notes.push_back("TS c and S c decorations are transcribed through "
                        "S i(f) = j(D f); T-decorated letters kept atomic");
  settle(p, P);
  return p.rep;
}

CheckReport check_examples_cx_sp(const CheckConfig &cfg) {
  Pending p;
  CheckConfig c = cfg;
  c.assume = "regular";
  AlgebraPresentation P = checked_frame(c, frame_options(c));
  BracketContext ctx(P);
  int N = c.rank;
  FieldExpr J = build_J(P, ctx), H = build_H(P, ctx);
  FieldExpr wantJ, wantH;
  for (int m = 1; m <= N; ++m) {
    NOWord w{gen_atom(P.upper_gen(m)), gen_atom(P.lower_gen(m))};
    wantJ.add_term(w, CoeffPoly(GaussQ(1, 2) * I()));
    wantH += GaussQ(1, 2) *
             (nop(FieldExpr::atom(gen_atom(P.lower_gen(m))),
                  FieldExpr::atom(gen_atom(P.upper_gen(m), 0, 1)), ctx) +
              nop(FieldExpr::atom(gen_atom(P.upper_gen(m))),
                  FieldExpr::atom(gen_atom(P.lower_gen(m), 0, 1)), ctx));
  }
  p.exact.push_back({"J (regular frame)", LambdaPoly::of(J - canonicalize(wantJ, ctx))});
  p.exact.push_back({"H (regular frame)", LambdaPoly::of(H - wantH)});
  LambdaPoly res = bracket(J, J, ctx);
  res.add(ParamMono{0, 0, 0, 0}, H);
  res.add(ParamMono{1, 1, 0, 0}, FieldExpr::vacuum(GaussQ(N)));
  p.exact.push_back({"[J_L J] + H + N lambda chi", res});
  for (int k = 1; k <= N; ++k) {
    FieldExpr ek = FieldExpr::atom(gen_atom(P.lower_gen(k)));
    p.exact.push_back({"primary e_" + std::to_string(k),
                       bracket(H, ek, ctx) - primary_half(ek, ctx)});
  }
  p.rep.notes.push_back(
      "complex dictionary (Ex. holomorphic frame): e_a = d/dz^a, e_abar = dzbar^a, "
      "e^a = 2dz^a, e^abar = 2 d/dzbar^a; then J = i dz d/dz - i dzbar d/dzbar and "
      "H = (1/2) sum (e_j Se^j + e^j Se_j) with T z^a = (1/2) S e^a");
  p.rep.notes.push_back(
      "symplectic dictionary (Darboux frame): e = {d/dx - i dy, dx - i d/dy}, "
      "dual frame as displayed; same regular-frame J, H");
  settle(p, P);
  return p.rep;
}

CheckReport check_ortho_H(const CheckConfig &cfg) {
  Pending p;
  CheckConfig c = cfg;
  c.assume = "nice-volume";
  AlgebraPresentation P = checked_frame(c, frame_options(c));
  BracketContext ctx(P);
  FieldExpr H = build_H(P, ctx);
  FieldExpr OH = orthonormal_H(P, ctx);
  p.reducible.push_back({"build_H - orthonormal_H", LambdaPoly::of(H - OH)});
  p.rep.notes.push_back(
      "orthonormal frame a^i = (e^i + e_i)/sqrt2, a^{i+N} = (e^i - e_i)/sqrt(-2); "
      "H = (1/2) sum a^i S a^i + (1/12) sum [a^i,a^j](a^i a^j); all prefactors "
      "combine to exact Gaussian rationals");
  settle(p, P);
  return p.rep;
}

CheckReport check_twist_weights(const CheckConfig &cfg) {
  Pending p;
  CheckConfig c = cfg;
  if (c.assume.empty()) c.assume = "unimodular";
  DerivedFunction fgen;
  AlgebraPresentation P = checked_frame(c, frame_options(c), &fgen);
  BracketContext ctx(P);
  TwistOperators tw{P, ctx, build_H(P, ctx), build_J(P, ctx)};
  FieldExpr f = FieldExpr::coeff(CoeffPoly::func(fgen));
  for (int k = 1; k <= c.rank; ++k) {
    FieldExpr el = FieldExpr::atom(gen_atom(P.lower_gen(k)));
    FieldExpr eu = FieldExpr::atom(gen_atom(P.upper_gen(k)));
    p.reducible.push_back({"J0 e_k = -e_k", LambdaPoly::of(tw.J0(el) + el)});
    p.reducible.push_back({"J0 e^k = +e^k", LambdaPoly::of(tw.J0(eu) - eu)});
    p.reducible.push_back({"L0 e_k = e_k", LambdaPoly::of(tw.L0(el) - el)});
    p.reducible.push_back({"L0 e^k = 0", LambdaPoly::of(tw.L0(eu))});
  }
  p.reducible.push_back({"J0 f = 0", LambdaPoly::of(tw.J0(f))});
  p.reducible.push_back({"L0 f = 0", LambdaPoly::of(tw.L0(f))});
  p.rep.notes.push_back(
      "pinned modes: J0 = -i J_(0|1); L0 = (1/2)(H_(1|0) + i J_(0|1)) = "
      "(1/2)(H_(1|0) - J0); the i-factor in L0 is fixed by requiring integer "
      "twisted weights (1 on L, 0 on L* and functions) together with twist_dL "
      "and twist_g0q0");
  settle(p, P);
  return p.rep;
}

CheckReport check_twist_dL(const CheckConfig &cfg) {
  Pending p;
  CheckConfig c = cfg;
  if (c.assume.empty()) c.assume = "unimodular";
  DerivedFunction fgen;
  AlgebraPresentation P = checked_frame(c, frame_options(c), &fgen);
  BracketContext ctx(P);
  TwistOperators tw{P, ctx, build_H(P, ctx), build_J(P, ctx)};
  int N = c.rank;
  // Q0 f = (1/2) d_L f with d_L f = f_{,i} e^i
  FieldExpr f = FieldExpr::coeff(CoeffPoly::func(fgen));
  FieldExpr dlf;
  for (int r = 1; r <= N; ++r)
    dlf += derive_instance_dir(fgen, lower(r), P.geom) *
           FieldExpr::atom(gen_atom(P.upper_gen(r)));
  p.reducible.push_back({"Q0 f - (1/2) d_L f",
                         LambdaPoly::of(tw.Q0(f) - GaussQ(1, 2) * dlf)});
  // Q0 e^k = (1/2) (wedge image of d_L e^k) = -(1/4) c^k_{ij} e^i e^j
  for (int k = 1; k <= N; ++k) {
    FieldExpr eu = FieldExpr::atom(gen_atom(P.upper_gen(k)));
    FieldExpr img;
    for (int i = 1; i <= N; ++i)
      for (int j = 1; j <= N; ++j) {
        CoeffPoly cc = P.geom.inst_low(k, i, j);
        if (cc.is_zero()) continue;
        NOWord w{gen_atom(P.upper_gen(i)), gen_atom(P.upper_gen(j))};
        FieldExpr t;
        t.add_term(w, cc);
        img += t;
      }
    img = canonicalize(img, ctx);
    p.reducible.push_back(
        {"Q0 e^" + std::to_string(k) + " - (1/2)(wedge image of d_L e^k)",
         LambdaPoly::of(tw.Q0(eu) - GaussQ(-1, 4) * img)});
  }
  p.rep.notes.push_back(
      "wedge-word identification e^i ^ e^j <-> e^i e^j; the single proportionality "
      "constant Q0 = (1/2) d_L is fixed by the function case and reused verbatim "
      "for sections (d_L e^k = -(1/2) c^k_{ij} e^i e^j as a word)");
  settle(p, P);
  return p.rep;
}

CheckReport check_twist_g0q0(const CheckConfig &cfg) {
  Pending p;
  for (std::string assume : {std::string("unimodular"), std::string("nice-volume")}) {
    for (int rank = 1; rank <= cfg.rank; ++rank) {
      CheckConfig c = cfg;
      c.rank = rank;
      c.assume = assume;
      DerivedFunction fgen;
      AlgebraPresentation P = checked_frame(c, frame_options(c), &fgen);
      BracketContext ctx(P);
      TwistOperators tw{P, ctx, build_H(P, ctx), build_J(P, ctx)};
      std::vector<std::pair<std::string, FieldExpr>> basis;
      for (int k = 1; k <= rank; ++k) {
        basis.push_back({"e_" + std::to_string(k),
                         FieldExpr::atom(gen_atom(P.lower_gen(k)))});
        basis.push_back({"e^" + std::to_string(k),
                         FieldExpr::atom(gen_atom(P.upper_gen(k)))});
      }
      basis.push_back({"f", FieldExpr::coeff(CoeffPoly::func(fgen))});
      std::string tag = "(" + assume + ", rank " + std::to_string(rank) + ") ";
      for (auto &[nm, x] : basis) {
        FieldExpr anti = tw.G0(tw.Q0(x)) + tw.Q0(tw.G0(x));
        FieldReduceResult rr =
            reduce_field(anti - tw.L0(x), P.relations, P);
        if (!rr.reduced) {
          p.rep.pass = false;
          p.rep.residual += tag + "[G0,Q0] - L0 on " + nm + ": " +
                            to_string(rr.normal_form, P) + "\n";
        }
        FieldReduceResult q2 = reduce_field(tw.Q0(tw.Q0(x)), P.relations, P);
        FieldReduceResult g2 = reduce_field(tw.G0(tw.G0(x)), P.relations, P);
        if (!q2.reduced || !g2.reduced) {
          p.rep.pass = false;
          p.rep.residual += tag + "Q0^2 or G0^2 on " + nm + " nonzero\n";
        }
        for (auto &u : rr.used) p.rep.relations_used.push_back(u);
      }
    }
  }
  if (p.rep.residual.empty()) p.rep.pass = true;
  std::set<std::string> uniq(p.rep.relations_used.begin(), p.rep.relations_used.end());
  p.rep.relations_used.assign(uniq.begin(), uniq.end());
  p.rep.notes.push_back(
      "pinned modes: Q0 = (1/2)(H_(0|1) + i J_(0|0)), "
      "G0 = (1/2)(H_(1|1) - i J_(1|0)), L0 = (1/2)(H_(1|0) - J0); "
      "the homotopy uses the twisted-weight-one mode of the second "
      "supercurrent, the unique choice for which [G0,Q0] = L0 holds "
      "together with twist_weights and twist_dL");
  p.rep.notes.push_back(
      "operator identities checked extensionally on all generators and one "
      "generic function; zero modes are derivations of all products, which "
      "extends the identity to the whole algebra");
  return p.rep;
}

CheckReport check_brst_field(const CheckConfig &cfg) {
  Pending p;
  p.rep.optional_tier = true;
  CheckConfig c = cfg;
  if (c.assume.empty()) c.assume = "unimodular";
  AlgebraPresentation P = checked_frame(c, frame_options(c));
  BracketContext ctx(P);
  TwistOperators tw{P, ctx, build_H(P, ctx), build_J(P, ctx)};
  int N = c.rank;
  // J_i = S e_i + (1/4) c^{jk}_i e_j e_k;  Q = e^i J_i + (1/4) e^i (e^j [e_i, e_j])
  FieldExpr Q;
  for (int i = 1; i <= N; ++i) {
    FieldExpr Ji = FieldExpr::atom(gen_atom(P.lower_gen(i), 0, 1));
    for (int j = 1; j <= N; ++j)
      for (int k = 1; k <= N; ++k) {
        CoeffPoly cc = P.geom.inst_up(j, k, i);
        if (cc.is_zero()) continue;
        NOWord w{gen_atom(P.lower_gen(j)), gen_atom(P.lower_gen(k))};
        FieldExpr t;
        t.add_term(w, GaussQ(1, 4) * cc);
        Ji += t;
      }
    Q += nop(FieldExpr::atom(gen_atom(P.upper_gen(i))), Ji, ctx);
    Section br = courant_bracket(P, section_of_gen(P, P.lower_gen(i)),
                                 section_of_gen(P, P.lower_gen(i)));
    for (int j = 1; j <= N; ++j) {
      Section bij = courant_bracket(P, section_of_gen(P, P.lower_gen(i)),
                                    section_of_gen(P, P.lower_gen(j)));
      FieldExpr inner;
      for (size_t m = 0; m < bij.size(); ++m)
        if (!bij[m].is_zero())
          inner += bij[m] * FieldExpr::atom(gen_atom(int(m)));
      if (!inner.is_zero())
        Q += GaussQ(1, 4) *
             nop(FieldExpr::atom(gen_atom(P.upper_gen(i))),
                 nop(FieldExpr::atom(gen_atom(P.lower_gen(j))), inner, ctx), ctx);
    }
    (void)br;
  }
  Q = canonicalize(Q, ctx);
  // the residue of the component field is the (0|1) mode; it reproduces
  // Q0 up to the overall factor -2 fixed by the rank-1 case
  for (int k = 1; k <= N; ++k) {
    for (int low = 0; low < 2; ++low) {
      int g = low ? P.lower_gen(k) : P.upper_gen(k);
      FieldExpr x = FieldExpr::atom(gen_atom(g));
      FieldExpr via_field = mode_action(Q, 0, 1, x, ctx);
      FieldExpr via_modes = GaussQ(-2) * tw.Q0(x);
      p.reducible.push_back(
          {"(Q)_{(0|1)} vs -2 Q0 on " + P.gens[g].name,
           LambdaPoly::of(via_field - via_modes)});
    }
  }
  p.rep.notes.push_back(
      "optional tier: the residue of the displayed field acts as -2 Q0 on the "
      "generators; the remark fixes no normalization, the factor is pinned by "
      "the rank-1 case");
  settle(p, P);
  return p.rep;
}

// --- registry ----------------------------------------------------------

struct Entry {
  CheckFn fn;
  bool optional = false;
};

const std::map<std::string, Entry> &registry() {
  static const std::map<std::string, Entry> reg = {
      {"ns_self", {check_ns_self}},
      {"n2_table", {check_n2_table}},
      {"n2_jacobi", {check_n2_jacobi}},
      {"components", {check_components}},
      {"kt_sl2", {check_kt_sl2}},
      {"kt_deformed", {check_kt_deformed}},
      {"doubles_1", {check_doubles_1}},
      {"doubles_2", {check_doubles_2}},
      {"lemma_technical", {check_lemma_technical}},
      {"lemma_section1", {check_lemma_section1}},
      {"lemma_h_def", {check_lemma_h_def}},
      {"thm_main", {check_thm_main}},
      {"examples_cx_sp", {check_examples_cx_sp}},
      {"ortho_H", {check_ortho_H}},
      {"twist_weights", {check_twist_weights}},
      {"twist_dL", {check_twist_dL}},
      {"twist_g0q0", {check_twist_g0q0}},
      {"brst_field", {check_brst_field, true}},
  };
  return reg;
}

}  // namespace

namespace {
FieldExpr poly_mode(const LambdaPoly &p, int j, int J) {
  const FieldExpr *x = p.coeff(ParamMono{j, J, 0, 0});
  if (!x) return {};
  GaussQ fact(1);
  for (int r = 2; r <= j; ++r) fact *= GaussQ(r);
  return fact * (*x);
}
}  // namespace

FieldExpr TwistOperators::L0(const FieldExpr &x) {
  LambdaPoly bh = bracket(H, x, ctx), bj = bracket(J, x, ctx);
  return GaussQ(1, 2) * (poly_mode(bh, 1, 0) + I() * poly_mode(bj, 0, 1));
}
FieldExpr TwistOperators::J0(const FieldExpr &x) {
  return GaussQ(-1) * (I() * mode_action(J, 0, 1, x, ctx));
}
FieldExpr TwistOperators::Q0(const FieldExpr &x) {
  LambdaPoly bh = bracket(H, x, ctx), bj = bracket(J, x, ctx);
  return GaussQ(1, 2) * (poly_mode(bh, 0, 1) + I() * poly_mode(bj, 0, 0));
}
FieldExpr TwistOperators::G0(const FieldExpr &x) {
  // the homotopy operator is the twisted-weight-one mode of the other
  // supercurrent: G0 = (1/2)(H_(1|1) - i J_(1|0)); with the naive (0|.)
  // modes the anticommutator with Q0 is the translation T, not L0
  LambdaPoly bh = bracket(H, x, ctx), bj = bracket(J, x, ctx);
  return GaussQ(1, 2) * (poly_mode(bh, 1, 1) - I() * poly_mode(bj, 1, 0));
}

const std::vector<std::string> &check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (auto &[k, v] : registry()) n.push_back(k);
    return n;
  }();
  return names;
}

bool check_is_optional(const std::string &name) {
  auto it = registry().find(name);
  return it != registry().end() && it->second.optional;
}

CheckReport run_check(const std::string &name, const CheckConfig &cfg) {
  auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("unknown check: " + name);
  CheckReport rep;
  auto t0 = std::chrono::steady_clock::now();
  try {
    rep = it->second.fn(cfg);
  } catch (const std::exception &e) {
    rep.pass = false;
    rep.error = e.what();
    rep.residual = "";
  }
  rep.name = name;
  rep.config = cfg;
  rep.optional_tier = it->second.optional;
  rep.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
               .count();
  return rep;
}

std::vector<CheckReport> run_all(const CheckConfig &cfg) {
  std::vector<std::string> names;
  for (auto &n : check_names())
    if (cfg.include_optional || !check_is_optional(n)) names.push_back(n);
  std::vector<CheckReport> out(names.size());
  unsigned threads = std::thread::hardware_concurrency();
  if (const char *env = std::getenv("SUSYOPAL_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) threads = unsigned(v);
  }
  threads = std::max(1u, std::min<unsigned>(threads, unsigned(names.size())));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= names.size()) break;
      out[i] = run_check(names[i], cfg);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto &t : pool) t.join();
  return out;  // already in name order
}

}  // namespace susyopal
