#include <doctest.h>

#include "susyopal/expr.hpp"

using namespace susyopal;

TEST_CASE("parameter algebra: squares and anticommutation") {
  LambdaPoly one = LambdaPoly::of(FieldExpr::vacuum());
  // chi * chi = -lambda
  LambdaPoly chichi = mul_chi(mul_chi(one));
  LambdaPoly minus_lambda = GaussQ(-1) * mul_lambda(one);
  CHECK(chichi == minus_lambda);
  // eta * eta = -gamma
  CHECK(mul_eta(mul_eta(one)) == GaussQ(-1) * mul_gamma(one));
  // chi and eta anticommute
  CHECK(mul_chi(mul_eta(one)) == GaussQ(-1) * mul_eta(mul_chi(one)));
}

TEST_CASE("chi-star twist differs from plain chi exactly on chi-terms") {
  LambdaPoly p;
  p.add(ParamMono{2, 1, 0, 0}, FieldExpr::vacuum());
  LambdaPoly plain = mul_chi(p);
  LambdaPoly star = mul_chi_star(p);
  CHECK(plain == GaussQ(-1) * star);
  LambdaPoly q;
  q.add(ParamMono{2, 0, 0, 0}, FieldExpr::vacuum());
  CHECK(mul_chi(q) == mul_chi_star(q));
}

TEST_CASE("multiplying by chi twice equals multiplying by -lambda") {
  LambdaPoly p;
  p.add(ParamMono{1, 0, 0, 0}, FieldExpr::vacuum(GaussQ(3)));
  p.add(ParamMono{0, 1, 2, 1}, FieldExpr::vacuum(GaussQ(1, 2)));
  CHECK(mul_chi(mul_chi(p)) == GaussQ(-1) * mul_lambda(p));
}

TEST_CASE("prefix multiplication is associative with single steps") {
  LambdaPoly p;
  p.add(ParamMono{0, 1, 1, 1}, FieldExpr::vacuum());
  ParamMono pre{1, 1, 0, 0};
  LambdaPoly viaPrefix = mul_prefix(pre, p);
  LambdaPoly manual = mul_lambda(mul_chi(p));
  CHECK(viaPrefix == manual);
}

TEST_CASE("parity bookkeeping") {
  ParityTable pt;
  pt.gen_parity = {Parity::Odd, Parity::Even};
  CHECK(pt.atom_parity(gen_atom(0)) == Parity::Odd);
  CHECK(pt.atom_parity(gen_atom(0, 0, 1)) == Parity::Even);  // S flips
  CHECK(pt.atom_parity(gen_atom(0, 3, 0)) == Parity::Odd);   // T preserves
  CHECK(pt.word_parity({gen_atom(0), gen_atom(0)}) == Parity::Even);
  FieldExpr x = FieldExpr::atom(gen_atom(0)) + FieldExpr::atom(gen_atom(1, 0, 1));
  CHECK(pt.expr_parity(x) == Parity::Odd);
  FieldExpr mixed = FieldExpr::atom(gen_atom(0)) + FieldExpr::atom(gen_atom(1));
  CHECK(!pt.expr_parity(mixed).has_value());
}

TEST_CASE("atom order: bare letters first, then decorated") {
  Atom e1 = gen_atom(0), Se1 = gen_atom(0, 0, 1), Te1 = gen_atom(0, 1, 0);
  Atom e2 = gen_atom(1);
  CHECK(atom_less(e1, e2));
  CHECK(atom_less(e2, Se1));
  CHECK(atom_less(Se1, Te1));
  CHECK(!atom_less(e1, e1));
}
