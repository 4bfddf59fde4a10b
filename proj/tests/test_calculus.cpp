#include <doctest.h>

#include <random>

#include "susyopal/algebras.hpp"
#include "susyopal/calculus.hpp"

using namespace susyopal;

namespace {

LambdaPoly ns_hh(const std::string &c = "c") {
  LambdaPoly hh;
  hh.add(ParamMono{0, 0, 0, 0}, GaussQ(2) * FieldExpr::atom(gen_atom(0, 1, 0)));
  hh.add(ParamMono{0, 1, 0, 0}, FieldExpr::atom(gen_atom(0, 0, 1)));
  hh.add(ParamMono{1, 0, 0, 0}, GaussQ(3) * FieldExpr::atom(gen_atom(0)));
  hh.add(ParamMono{2, 1, 0, 0},
         FieldExpr::coeff(GaussQ(1, 3) * CoeffPoly::scalar(c)));
  return hh;
}

FieldExpr rand_expr(const AlgebraPresentation &P, std::mt19937 &rng,
                    int max_len = 3, bool homogeneous = false) {
  std::uniform_int_distribution<int> len(1, max_len), g(0, int(P.gens.size()) - 1),
      pre(0, 3), num(-3, 3);
  FieldExpr x;
  ParityTable const &pt = P.parities;
  std::optional<Parity> want;
  for (int t = 0; t < 2; ++t) {
    NOWord w;
    int L = len(rng);
    for (int r = 0; r < L; ++r) {
      int p = pre(rng);
      w.push_back(gen_atom(g(rng), p == 2 ? 1 : 0, p == 1 ? 1 : 0));
    }
    if (homogeneous) {
      Parity pw = pt.word_parity(w);
      if (!want) want = pw;
      if (*want != pw) continue;
    }
    int q = num(rng);
    if (q == 0) q = 1;
    x.add_term(w, CoeffPoly(GaussQ(q)));
  }
  return x;
}

}  // namespace

TEST_CASE("ns: table round trip and vacuum axioms") {
  AlgebraPresentation P = ns();
  BracketContext ctx(P);
  FieldExpr H = gen_state(P, "H");
  CHECK(bracket(H, H, ctx) == ns_hh());
  CHECK(bracket(FieldExpr::vacuum(), H, ctx).is_zero());
  CHECK(bracket(H, FieldExpr::vacuum(), ctx).is_zero());
  // nop unit
  CHECK(nop(FieldExpr::vacuum(), H, ctx) == H);
  CHECK(nop(H, FieldExpr::vacuum(), ctx) == H);
}

TEST_CASE("sesquilinearity as computed") {
  AlgebraPresentation P = ns();
  BracketContext ctx(P);
  FieldExpr H = gen_state(P, "H");
  CHECK(bracket(apply_T(H, ctx), H, ctx) == GaussQ(-1) * mul_lambda(bracket(H, H, ctx)));
  CHECK(bracket(apply_S(H, ctx), H, ctx) == mul_chi(bracket(H, H, ctx)));
  std::mt19937 rng(5);
  AlgebraPresentation Q2 = n2();
  BracketContext c2(Q2);
  for (int it = 0; it < 25; ++it) {
    FieldExpr a = rand_expr(Q2, rng, 2, true), b = rand_expr(Q2, rng, 2, true);
    if (a.is_zero() || b.is_zero()) continue;
    CHECK(bracket(apply_T(a, c2), b, c2) ==
          GaussQ(-1) * mul_lambda(bracket(a, b, c2)));
  }
}

TEST_CASE("skew is an involution") {
  AlgebraPresentation P = n2();
  BracketContext ctx(P);
  FieldExpr H = gen_state(P, "H"), J = gen_state(P, "J");
  auto check_inv = [&](const FieldExpr &a, const FieldExpr &b, Parity pa, Parity pb) {
    LambdaPoly q = bracket(a, b, ctx);
    CHECK(skew(skew(q, pa, pb, ctx), pb, pa, ctx) == q);
    CHECK(bracket(b, a, ctx) == skew(q, pa, pb, ctx));
  };
  check_inv(H, H, Parity::Odd, Parity::Odd);
  check_inv(H, J, Parity::Odd, Parity::Even);
  check_inv(J, J, Parity::Even, Parity::Even);
  std::mt19937 rng(17);
  ParityTable const &pt = P.parities;
  int done = 0;
  for (int it = 0; it < 200 && done < 100; ++it) {
    FieldExpr a = rand_expr(P, rng, 2, true), b = rand_expr(P, rng, 2, true);
    auto pa = pt.expr_parity(a), pb = pt.expr_parity(b);
    if (!pa || !pb) continue;
    LambdaPoly q = bracket(a, b, ctx);
    CHECK(skew(skew(q, *pa, *pb, ctx), *pb, *pa, ctx) == q);
    ++done;
  }
  CHECK(done == 100);
}

TEST_CASE("NS Jacobi identity (H,H,H)") {
  AlgebraPresentation P = ns();
  BracketContext ctx(P);
  FieldExpr H = gen_state(P, "H");
  CHECK(jacobiator(H, H, H, ctx).is_zero());
}

TEST_CASE("n2 Jacobi identity on all generator triples") {
  AlgebraPresentation P = n2();
  BracketContext ctx(P);
  std::vector<FieldExpr> gens{gen_state(P, "H"), gen_state(P, "J")};
  for (auto &a : gens)
    for (auto &b : gens)
      for (auto &c : gens) CHECK(jacobiator(a, b, c, ctx).is_zero());
}

TEST_CASE("odd square reduces: H H = (1/2) T S H") {
  AlgebraPresentation P = ns();
  BracketContext ctx(P);
  FieldExpr hh;
  hh.add_term({gen_atom(0), gen_atom(0)}, CoeffPoly::one());
  FieldExpr expect = GaussQ(1, 2) * FieldExpr::atom(gen_atom(0, 1, 1));
  CHECK(canonicalize(hh, ctx) == expect);
}

TEST_CASE("S o S = T, and S, T are derivations of nop") {
  AlgebraPresentation P = n2();
  BracketContext ctx(P);
  std::mt19937 rng(29);
  for (int it = 0; it < 100; ++it) {
    FieldExpr x = rand_expr(P, rng, 3);
    CHECK(apply_S(apply_S(x, ctx), ctx) == apply_T(x, ctx));
  }
  ParityTable const &pt = P.parities;
  int done = 0;
  for (int it = 0; it < 120 && done < 40; ++it) {
    FieldExpr a = rand_expr(P, rng, 2, true), b = rand_expr(P, rng, 2, true);
    auto pa = pt.expr_parity(a);
    if (!pa || a.is_zero() || b.is_zero()) continue;
    CHECK(apply_T(nop(a, b, ctx), ctx) ==
          nop(apply_T(a, ctx), b, ctx) + nop(a, apply_T(b, ctx), ctx));
    FieldExpr lhs = apply_S(nop(a, b, ctx), ctx);
    FieldExpr rhs = nop(apply_S(a, ctx), b, ctx);
    FieldExpr sb = nop(a, apply_S(b, ctx), ctx);
    rhs += (*pa == Parity::Odd) ? -sb : sb;
    CHECK(lhs == rhs);
    ++done;
  }
  CHECK(done == 40);
}

TEST_CASE("integration conventions") {
  // int_0^L eta c dG = lambda c
  LambdaPoly p;
  p.add(ParamMono{0, 0, 0, 1}, FieldExpr::coeff(CoeffPoly::scalar("c")));
  LambdaPoly want;
  want.add(ParamMono{1, 0, 0, 0}, FieldExpr::coeff(CoeffPoly::scalar("c")));
  CHECK(integrate_gamma(p) == want);
  CHECK(integrate_gamma(LambdaPoly()).is_zero());
  // the (-chi eta kappa^2 dim) style term: chi gamma^0 eta -> +lambda chi
  LambdaPoly q;
  q.add(ParamMono{0, 1, 0, 1}, FieldExpr::vacuum(GaussQ(-1)));
  LambdaPoly wq;
  wq.add(ParamMono{1, 1, 0, 0}, FieldExpr::vacuum(GaussQ(1)));
  CHECK(integrate_gamma(q) == wq);
}

TEST_CASE("super_affine(sl2): base brackets and Jacobi") {
  LieAlgebraData g = sl2_data();
  AlgebraPresentation P = super_affine(g);
  BracketContext ctx(P);
  FieldExpr e = gen_state(P, "e"), h = gen_state(P, "h"), f = gen_state(P, "f");
  // [e_L f] = h + chi kappa (e,f) = h + chi kappa
  LambdaPoly ef = bracket(e, f, ctx);
  LambdaPoly want;
  want.add(ParamMono{}, gen_state(P, "h"));
  want.add(ParamMono{0, 1, 0, 0}, FieldExpr::coeff(CoeffPoly::scalar("kappa")));
  CHECK(ef == want);
  for (auto &a : {e, h, f})
    for (auto &b : {e, h, f})
      for (auto &c : {e, h, f}) CHECK(jacobiator(a, b, c, ctx).is_zero());
}

TEST_CASE("courant_frame(1): pairing bracket and anchor action") {
  AlgebraPresentation P = courant_frame(1);
  BracketContext ctx(P);
  FieldExpr eu = gen_state(P, "e^1"), el = gen_state(P, "e_1");
  LambdaPoly b = bracket(el, eu, ctx);
  LambdaPoly want;
  want.add(ParamMono{0, 1, 0, 0}, FieldExpr::vacuum(GaussQ(2)));
  CHECK(b == want);
  // [e_1 L f] = f_{,1}
  auto gsym = std::make_shared<FunctionSymbol>("f", std::vector<Variance>{}, 1);
  DerivedFunction f{gsym, {}, {}};
  LambdaPoly bf = bracket(el, FieldExpr::coeff(CoeffPoly::func(f)), ctx);
  DerivedFunction fl{gsym, {}, {lower(1)}};
  CHECK(bf == LambdaPoly::of(FieldExpr::coeff(CoeffPoly::func(fl))));
  // quasi-commutativity with constant pairing: e_1 e^1 = - e^1 e_1
  FieldExpr w;
  w.add_term({gen_atom(1), gen_atom(0)}, CoeffPoly::one());
  FieldExpr expect;
  expect.add_term({gen_atom(0), gen_atom(1)}, CoeffPoly(GaussQ(-1)));
  CHECK(canonicalize(w, ctx) == expect);
}

TEST_CASE("courant_frame(2): the e_j-into-J bracket reproduces its display") {
  AlgebraPresentation P = courant_frame(2);
  BracketContext ctx(P);
  const FrameGeometry &G = P.geom;
  int j = 1;
  FieldExpr ej = gen_state(P, "e_1");
  FieldExpr J = build_J(P, ctx);
  LambdaPoly got = bracket(ej, J, ctx);

  GaussQ I = GaussQ::unit_i();
  // chi term: i e_j
  CHECK(*got.coeff(ParamMono{0, 1, 0, 0}) == I * ej);
  // lambda term: i c^i_{ij}
  CoeffPoly csum;
  for (int i = 1; i <= 2; ++i) csum += G.inst_low(i, i, j);
  CHECK(*got.coeff(ParamMono{1, 0, 0, 0}) == I * FieldExpr::coeff(csum));
  // constant term: (i/2) c^{ik}_j (e_k e_i) + i T c^i_{ij}
  FieldExpr words;
  for (int i = 1; i <= 2; ++i)
    for (int k = 1; k <= 2; ++k) {
      CoeffPoly c = G.inst_up(i, k, j);
      if (c.is_zero()) continue;
      FieldExpr w;
      w.add_term({gen_atom(P.lower_gen(k)), gen_atom(P.lower_gen(i))},
                 CoeffPoly::one());
      words += c * w;
    }
  FieldExpr expect = (GaussQ(1, 2) * I) * canonicalize(words, ctx) +
                     I * apply_T(FieldExpr::coeff(csum), ctx);
  CHECK(*got.coeff(ParamMono{0, 0, 0, 0}) == expect);
  // and no other monomials
  CHECK(got.terms.size() == 3);
}

TEST_CASE("courant_frame(2): skew image matches the J-into-e_j display") {
  AlgebraPresentation P = courant_frame(2);
  BracketContext ctx(P);
  const FrameGeometry &G = P.geom;
  int j = 1;
  FieldExpr ej = gen_state(P, "e_1");
  FieldExpr J = build_J(P, ctx);
  LambdaPoly got = bracket(J, ej, ctx);
  GaussQ I = GaussQ::unit_i();
  // [J_L e_j] = (i/2) c^{ik}_j (e_k e_i) - i (chi + S) e_j - i lambda c^i_{ij}
  CHECK(*got.coeff(ParamMono{0, 1, 0, 0}) == GaussQ(-1) * (I * ej));
  CoeffPoly csum;
  for (int i = 1; i <= 2; ++i) csum += G.inst_low(i, i, j);
  CHECK(*got.coeff(ParamMono{1, 0, 0, 0}) ==
        GaussQ(-1) * (I * FieldExpr::coeff(csum)));
  FieldExpr words;
  for (int i = 1; i <= 2; ++i)
    for (int k = 1; k <= 2; ++k) {
      CoeffPoly c = G.inst_up(i, k, j);
      if (c.is_zero()) continue;
      FieldExpr w;
      w.add_term({gen_atom(P.lower_gen(k)), gen_atom(P.lower_gen(i))},
                 CoeffPoly::one());
      words += c * w;
    }
  FieldExpr expect = (GaussQ(1, 2) * I) * canonicalize(words, ctx) -
                     I * FieldExpr::atom(gen_atom(P.lower_gen(j), 0, 1));
  CHECK(*got.coeff(ParamMono{0, 0, 0, 0}) == expect);
}

TEST_CASE("Wick/skew consistency on random instances") {
  AlgebraPresentation P = courant_frame(1);
  BracketContext ctx(P);
  ParityTable const &pt = P.parities;
  std::mt19937 rng(41);
  int done = 0;
  for (int it = 0; it < 400 && done < 100; ++it) {
    FieldExpr a = rand_expr(P, rng, 1, true);
    FieldExpr b = rand_expr(P, rng, 2, true);
    auto pa = pt.expr_parity(a), pb = pt.expr_parity(b);
    if (!pa || !pb) continue;
    LambdaPoly direct = bracket(a, b, ctx);
    LambdaPoly via = skew(bracket(b, a, ctx), *pb, *pa, ctx);
    CHECK(direct == via);
    ++done;
  }
  CHECK(done == 100);
}

TEST_CASE("canonicalize is idempotent and parity preserving") {
  AlgebraPresentation P = courant_frame(2);
  BracketContext ctx(P);
  std::mt19937 rng(59);
  for (int it = 0; it < 50; ++it) {
    FieldExpr x = rand_expr(P, rng, 3);
    FieldExpr c1 = canonicalize(x, ctx);
    CHECK(canonicalize(c1, ctx) == c1);
  }
}
