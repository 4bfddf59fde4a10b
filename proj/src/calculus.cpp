#include "susyopal/calculus.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace susyopal {

namespace {

constexpr int kMaxDepth = 6000;

struct DepthGuard {
  BracketContext &ctx;
  explicit DepthGuard(BracketContext &c) : ctx(c) {
    if (++ctx.depth > kMaxDepth)
      throw std::runtime_error("calculus: recursion depth exceeded");
  }
  ~DepthGuard() { --ctx.depth; }
};

// A unit is an atom; bare coefficient functions travel as prefix-free
// function atoms inside this recursion only.
using Units = std::vector<Atom>;

LambdaPoly bracket_units(const Units &A, const Units &B, BracketContext &ctx);
LambdaPoly bracket_units_vs_expr(const Units &A, const FieldExpr &B,
                                 BracketContext &ctx);
LambdaPoly bracket_expr_expr(const FieldExpr &a, const FieldExpr &b,
                             BracketContext &ctx);
FieldExpr nop_units(const Units &A, const FieldExpr &B_canon,
                    BracketContext &ctx);
FieldExpr insert_unit(const Atom &u, const FieldExpr &X, BracketContext &ctx);

Parity units_parity(const Units &u, const BracketContext &ctx) {
  Parity p = Parity::Even;
  for (auto &a : u) p = p + ctx.atom_parity(a);
  return p;
}

struct TermUnits {
  GaussQ c;
  Monomial scal;
  Units units;
};

TermUnits decompose(const Monomial &m, const GaussQ &c, const NOWord &w) {
  TermUnits t;
  t.c = c;
  for (auto &[f, e] : m.factors) {
    if (f.is_scalar()) {
      t.scal.factors.emplace_back(f, e);
    } else {
      Atom a;
      a.gen = -1;
      a.fn = f.fn();
      for (int r = 0; r < e; ++r) t.units.push_back(a);
    }
  }
  for (auto &a : w) t.units.push_back(a);
  return t;
}

FieldExpr units_expr(const Units &u) {
  CoeffPoly c = CoeffPoly::one();
  NOWord w;
  for (auto &a : u) {
    if (!a.is_gen() && a.prefix_weight() == 0) {
      c = c * CoeffPoly::func(*a.fn);
    } else {
      w.push_back(a);
    }
  }
  FieldExpr x;
  x.add_term(w, c);
  return x;
}

FieldExpr scaled(const FieldExpr &x, const GaussQ &q, const Monomial &scal) {
  if (q.is_zero()) return {};
  CoeffPoly s;
  s.terms.emplace(scal, q);
  return s * x;
}

LambdaPoly scaled(const LambdaPoly &p, const GaussQ &q, const Monomial &scal) {
  if (q.is_zero()) return {};
  LambdaPoly out;
  CoeffPoly s;
  s.terms.emplace(scal, q);
  for (auto &[m, x] : p.terms) out.add(m, s * x);
  return out;
}

FieldExpr rules_pass(const FieldExpr &x, const CoeffRules &rules) {
  if (rules.reciprocal_scalars.empty()) return x;
  FieldExpr out;
  for (auto &[w, c] : x.terms) out.add_term(w, apply_rules(c, rules));
  return out;
}

LambdaPoly rules_pass(const LambdaPoly &p, const CoeffRules &rules) {
  if (rules.reciprocal_scalars.empty()) return p;
  LambdaPoly out;
  for (auto &[m, x] : p.terms) out.add(m, rules_pass(x, rules));
  return out;
}

LambdaPoly T_statewise(const LambdaPoly &p, BracketContext &ctx) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms) out.add(m, apply_T(x, ctx));
  return out;
}

// S crossing the parameter monomial costs one sign per odd parameter
LambdaPoly S_statewise(const LambdaPoly &p, BracketContext &ctx) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms) {
    int sgn = ((m.J + m.K) & 1) ? -1 : 1;
    out.add(m, GaussQ(sgn) * apply_S(x, ctx));
  }
  return out;
}

FieldExpr qc_integral_units(const Units &A, const Units &B,
                            BracketContext &ctx) {
  return integrate_minus_nabla(bracket_units(A, B, ctx), ctx);
}

// S(i(f)) = j(D f) = (1/2)(f_{,r} e^r + f^{,r} e_r) on frame algebras
FieldExpr s_of_function(const DerivedFunction &f, BracketContext &ctx) {
  const AlgebraPresentation &P = ctx.pres;
  if (!P.anchored || f.sym->constant) return {};
  FieldExpr out;
  for (int r = 1; r <= P.geom.rank; ++r) {
    CoeffPoly low = derive_instance_dir(f, lower(r), P.geom);
    if (!low.is_zero())
      out += GaussQ(1, 2) * (low * FieldExpr::atom(gen_atom(P.upper_gen(r))));
    CoeffPoly up = derive_instance_dir(f, upper(r), P.geom);
    if (!up.is_zero())
      out += GaussQ(1, 2) * (up * FieldExpr::atom(gen_atom(P.lower_gen(r))));
  }
  return out;
}


// --- canonical insertion ---------------------------------------------------

FieldExpr insert_into_term(const Atom &u, const Monomial &m, const GaussQ &q,
                           const NOWord &w, BracketContext &ctx);

FieldExpr insert_into_word(const Atom &u, const GaussQ &q, const Monomial &scal,
                           const NOWord &w, BracketContext &ctx) {
  DepthGuard guard(ctx);
  if (w.empty()) {
    FieldExpr out;
    CoeffPoly c;
    c.terms.emplace(scal, q);
    out.add_term(NOWord{u}, c);
    return out;
  }
  const Atom &a1 = w.front();
  bool equal = (u == a1);
  if ((!equal && atom_less(u, a1)) ||
      (equal && ctx.atom_parity(u) == Parity::Even)) {
    FieldExpr out;
    NOWord nw;
    nw.reserve(w.size() + 1);
    nw.push_back(u);
    nw.insert(nw.end(), w.begin(), w.end());
    CoeffPoly c;
    c.terms.emplace(scal, q);
    out.add_term(nw, c);
    return out;
  }
  NOWord tail(w.begin() + 1, w.end());
  FieldExpr tail_expr;
  {
    CoeffPoly c;
    c.terms.emplace(scal, q);
    tail_expr.add_term(tail, c);
  }
  if (equal) {
    // odd square: u(u x) = (uu) x, uu = (1/2) int_{-nabla}^0 [u_L u] dL
    FieldExpr sq = GaussQ(1, 2) * qc_integral_units({u}, {u}, ctx);
    if (sq.is_zero()) return {};
    return nop(sq, tail_expr, ctx);
  }
  // u > a1: u(a1 x) = (-1)^{p(u)p(a1)} a1(u x) + K x
  int sgn = sign_of(ctx.atom_parity(u), ctx.atom_parity(a1));
  FieldExpr inner = insert_into_word(u, q, scal, tail, ctx);
  FieldExpr out = GaussQ(sgn) * insert_unit(a1, inner, ctx);
  FieldExpr K = qc_integral_units({u}, {a1}, ctx);
  if (!K.is_zero()) out += nop(K, tail_expr, ctx);
  return out;
}

FieldExpr insert_into_term(const Atom &u, const Monomial &m, const GaussQ &q,
                           const NOWord &w, BracketContext &ctx) {
  // bare function units multiply straight into the coefficient
  if (!u.is_gen() && u.prefix_weight() == 0) {
    Monomial mm = m;
    Factor f{*u.fn};
    auto it = std::lower_bound(
        mm.factors.begin(), mm.factors.end(), f,
        [](const std::pair<Factor, int> &p, const Factor &g) {
          return p.first < g;
        });
    if (it != mm.factors.end() && it->first == f) {
      it->second += 1;
    } else {
      mm.factors.insert(it, {f, 1});
    }
    FieldExpr out;
    CoeffPoly c;
    c.terms.emplace(mm, q);
    out.add_term(w, c);
    return out;
  }
  // T annihilates constant coefficient functions
  if (!u.is_gen() && u.tpow >= 1 && u.fn->sym->constant) return {};
  // S-decorated function states rewrite through the anchor geometry:
  // T^m S f -> T^m j(D f).  Pure T-decorated function letters stay atomic.
  if (!u.is_gen() && u.spow == 1) {
    FieldExpr state = s_of_function(*u.fn, ctx);
    for (int t = 0; t < u.tpow; ++t) state = apply_T(state, ctx);
    if (state.is_zero()) return {};
    FieldExpr rest;
    CoeffPoly c;
    c.terms.emplace(m, q);
    rest.add_term(w, c);
    return nop(state, rest, ctx);
  }
  // generator atom or T-decorated function letter: move past the
  // coefficient functions first
  for (size_t pos = 0; pos < m.factors.size(); ++pos) {
    if (m.factors[pos].first.is_scalar()) continue;
    const DerivedFunction &f = m.factors[pos].first.fn();
    Monomial rest = m;
    if (rest.factors[pos].second > 1) {
      rest.factors[pos].second -= 1;
    } else {
      rest.factors.erase(rest.factors.begin() + pos);
    }
    // u (i(f) Y) = i(f)(u Y) + K' Y
    Atom fu;
    fu.gen = -1;
    fu.fn = f;
    FieldExpr sub = insert_into_term(u, rest, q, w, ctx);
    FieldExpr out = CoeffPoly::func(f) * sub;
    FieldExpr K = qc_integral_units({u}, {fu}, ctx);
    if (!K.is_zero()) {
      FieldExpr rest_expr;
      CoeffPoly c;
      c.terms.emplace(rest, q);
      rest_expr.add_term(w, c);
      out += nop(K, rest_expr, ctx);
    }
    return out;
  }
  return insert_into_word(u, q, m, w, ctx);
}

FieldExpr insert_unit(const Atom &u, const FieldExpr &X, BracketContext &ctx) {
  FieldExpr out;
  for (auto &[w, c] : X.terms)
    for (auto &[m, q] : c.terms) out += insert_into_term(u, m, q, w, ctx);
  return out;
}

// --- nop ---------------------------------------------------------------

FieldExpr nop_units(const Units &A, const FieldExpr &B_canon,
                    BracketContext &ctx) {
  DepthGuard guard(ctx);
  if (B_canon.is_zero()) return {};
  if (A.empty()) return B_canon;
  Atom u = A.front();
  Units R(A.begin() + 1, A.end());
  FieldExpr X = nop_units(R, B_canon, ctx);
  FieldExpr res = insert_unit(u, X, ctx);
  if (R.empty()) return res;
  // quasi-associativity:
  // (u R) B = u (R B) + sum_j u_{(-j-2|1)} (R_{(j|1)} B)
  //         + (-1)^{p(u)p(R)} sum_j R_{(-j-2|1)} (u_{(j|1)} B)
  LambdaPoly PR = bracket_units_vs_expr(R, B_canon, ctx);
  for (auto &[mo, x] : PR.terms) {
    if (mo.J != 1 || mo.k || mo.K) continue;
    Atom bumped = u;
    bumped.tpow += mo.j + 1;
    res += GaussQ(1, mo.j + 1) * insert_unit(bumped, x, ctx);
  }
  LambdaPoly PU = bracket_units_vs_expr({u}, B_canon, ctx);
  int sgn = sign_of(ctx.atom_parity(u), units_parity(R, ctx));
  for (auto &[mo, x] : PU.terms) {
    if (mo.J != 1 || mo.k || mo.K) continue;
    FieldExpr TR = units_expr(R);
    for (int t = 0; t <= mo.j; ++t) TR = apply_T(TR, ctx);
    res += (GaussQ(sgn) * GaussQ(1, mo.j + 1)) * nop(TR, x, ctx);
  }
  return res;
}

LambdaPoly bracket_units_vs_expr(const Units &A, const FieldExpr &B,
                                 BracketContext &ctx) {
  LambdaPoly out;
  for (auto &[w, c] : B.terms)
    for (auto &[m, q] : c.terms) {
      TermUnits tb = decompose(m, q, w);
      out += scaled(bracket_units(A, tb.units, ctx), tb.c, tb.scal);
    }
  return out;
}

// --- bracket -----------------------------------------------------------

LambdaPoly base_pair_bracket(int gi, int gj, BracketContext &ctx) {
  auto it = ctx.pres.table.find({gi, gj});
  if (it == ctx.pres.table.end())
    throw std::runtime_error("bracket: undeclared generator pair (" +
                             ctx.pres.gens[gi].name + ", " +
                             ctx.pres.gens[gj].name + ") in algebra " +
                             ctx.pres.name);
  return it->second;
}

LambdaPoly bracket_unit_unit_impl(const Atom &u, const Atom &v,
                                  BracketContext &ctx);

LambdaPoly bracket_unit_unit(const Atom &u, const Atom &v, BracketContext &ctx) {
  auto key = std::make_pair(u, v);
  auto it = ctx.pair_memo.find(key);
  if (it != ctx.pair_memo.end()) return it->second;
  LambdaPoly r = bracket_unit_unit_impl(u, v, ctx);
  ctx.pair_memo.emplace(std::move(key), r);
  return r;
}

LambdaPoly bracket_unit_unit_impl(const Atom &u, const Atom &v,
                                  BracketContext &ctx) {
  DepthGuard guard(ctx);
  ++ctx.bracket_calls;
  // left prefix: [Ta_L b] = -lambda [a_L b], [Sa_L b] = chi [a_L b]
  if (u.prefix_weight() > 0) {
    Atom u0 = u;
    u0.tpow = 0;
    u0.spow = 0;
    LambdaPoly base = bracket_unit_unit(u0, v, ctx);
    if (u.spow) base = mul_chi(base);
    if (u.tpow) {
      base = mul_lambda(base, u.tpow);
      if (u.tpow & 1) base = -base;
    }
    return base;
  }
  // right prefix, outermost last:
  // [a_L Tb] = (lambda + T)[a_L b], [a_L Sb] = -(-1)^{p(a)}(S + chi*)[a_L b]
  if (v.prefix_weight() > 0) {
    Atom v0 = v;
    v0.tpow = 0;
    v0.spow = 0;
    Parity pa = ctx.atom_parity(u);
    LambdaPoly base = bracket_unit_unit(u, v0, ctx);
    if (v.spow) {
      LambdaPoly t = S_statewise(base, ctx) + mul_chi_star(base);
      base = (pa == Parity::Even) ? -t : t;
    }
    for (int n = 0; n < v.tpow; ++n)
      base = mul_lambda(base) + T_statewise(base, ctx);
    return base;
  }
  // both bare
  if (u.is_gen() && v.is_gen()) return base_pair_bracket(u.gen, v.gen, ctx);
  if (u.is_gen() != v.is_gen()) {
    // [X_L f] = i(pi(X) f), and [f_L X] has the same Gamma-free value by skew
    if (!ctx.pres.anchored) return {};
    int g = u.is_gen() ? u.gen : v.gen;
    const DerivedFunction &f = u.is_gen() ? *v.fn : *u.fn;
    CoeffPoly d = derive_instance_dir(f, ctx.pres.gen_dir(g), ctx.pres.geom);
    if (d.is_zero()) return {};
    return LambdaPoly::of(FieldExpr::coeff(d));
  }
  return {};  // two coefficient functions commute
}

LambdaPoly bracket_units_impl(const Units &A, const Units &B,
                              BracketContext &ctx);

LambdaPoly bracket_units(const Units &A, const Units &B, BracketContext &ctx) {
  if (A.empty() || B.empty()) return {};
  if (A.size() == 1 && B.size() == 1)
    return bracket_unit_unit(A.front(), B.front(), ctx);
  auto key = std::make_pair(A, B);
  auto it = ctx.units_memo.find(key);
  if (it != ctx.units_memo.end()) return it->second;
  LambdaPoly r = bracket_units_impl(A, B, ctx);
  ctx.units_memo.emplace(std::move(key), r);
  return r;
}

LambdaPoly bracket_units_impl(const Units &A, const Units &B,
                              BracketContext &ctx) {
  DepthGuard guard(ctx);
  if (A.empty() || B.empty()) return {};
  if (B.size() >= 2) {
    // non-commutative Wick formula on the right product
    Atom v = B.front();
    Units rest(B.begin() + 1, B.end());
    LambdaPoly P = bracket_units(A, {v}, ctx);
    LambdaPoly Q = bracket_units(A, rest, ctx);
    Parity pa = units_parity(A, ctx);
    Parity pv = ctx.atom_parity(v);
    FieldExpr rest_expr = units_expr(rest);
    LambdaPoly out;
    for (auto &[mo, x] : P.terms) out.add(mo, nop(x, rest_expr, ctx));
    int gsgn = (((int(pa) + 1) * int(pv)) & 1) ? -1 : 1;
    FieldExpr v_expr = units_expr({v});
    for (auto &[mo, x] : Q.terms) {
      int ksgn = ((int(pv) * ((mo.J + mo.K) & 1)) & 1) ? -1 : 1;
      out.add(mo, GaussQ(gsgn * ksgn) * nop(v_expr, x, ctx));
    }
    for (auto &[mo, x] : P.terms) {
      assert(mo.k == 0 && mo.K == 0);
      LambdaPoly R = bracket_expr_expr(x, rest_expr, ctx).to_gamma();
      if (R.is_zero()) continue;
      int psgn = mo.J ? -1 : 1;
      LambdaPoly shifted = mul_prefix(ParamMono{mo.j, mo.J, 0, 0}, R);
      out += GaussQ(psgn) * integrate_gamma(shifted);
    }
    return out;
  }
  if (A.size() >= 2) {
    // left product via double skew-symmetry
    LambdaPoly r = bracket_units(B, A, ctx);
    Parity pa = units_parity(A, ctx);
    Parity pb = units_parity(B, ctx);
    return skew(r, pb, pa, ctx);
  }
  return bracket_unit_unit(A.front(), B.front(), ctx);
}

LambdaPoly bracket_expr_expr(const FieldExpr &a, const FieldExpr &b,
                             BracketContext &ctx) {
  LambdaPoly out;
  for (auto &[wa, ca] : a.terms)
    for (auto &[ma, qa] : ca.terms) {
      TermUnits ta = decompose(ma, qa, wa);
      for (auto &[wb, cb] : b.terms)
        for (auto &[mb, qb] : cb.terms) {
          TermUnits tb = decompose(mb, qb, wb);
          LambdaPoly r = bracket_units(ta.units, tb.units, ctx);
          out += scaled(r, ta.c * tb.c, mono_mul(ta.scal, tb.scal));
        }
    }
  return out;
}

}  // namespace

// --- public API ----------------------------------------------------------

LambdaPoly bracket(const FieldExpr &a, const FieldExpr &b, BracketContext &ctx) {
  return rules_pass(bracket_expr_expr(a, b, ctx), ctx.pres.rules);
}

FieldExpr nop(const FieldExpr &a, const FieldExpr &b, BracketContext &ctx) {
  FieldExpr bc = canonicalize(b, ctx);
  FieldExpr out;
  for (auto &[wa, ca] : a.terms)
    for (auto &[ma, qa] : ca.terms) {
      TermUnits ta = decompose(ma, qa, wa);
      out += nop_units(ta.units, scaled(bc, ta.c, ta.scal), ctx);
    }
  return rules_pass(out, ctx.pres.rules);
}

FieldExpr canonicalize(const FieldExpr &x, BracketContext &ctx) {
  FieldExpr out;
  for (auto &[w, c] : x.terms)
    for (auto &[m, q] : c.terms) {
      TermUnits t = decompose(m, q, w);
      FieldExpr acc;
      {
        CoeffPoly s;
        s.terms.emplace(t.scal, t.c);
        acc.add_term(NOWord{}, s);
      }
      for (auto it = t.units.rbegin(); it != t.units.rend(); ++it)
        acc = insert_unit(*it, acc, ctx);
      out += acc;
    }
  return rules_pass(out, ctx.pres.rules);
}

FieldExpr apply_T(const FieldExpr &x, BracketContext &ctx) {
  FieldExpr out;
  for (auto &[w, c] : x.terms) {
    for (auto &[m, q] : c.terms) {
      for (size_t pos = 0; pos < m.factors.size(); ++pos) {
        if (m.factors[pos].first.is_scalar()) continue;
        const DerivedFunction &f = m.factors[pos].first.fn();
        int e = m.factors[pos].second;
        Monomial rest = m;
        if (rest.factors[pos].second > 1)
          rest.factors[pos].second -= 1;
        else
          rest.factors.erase(rest.factors.begin() + pos);
        if (f.sym->constant) continue;
        Atom tf;
        tf.gen = -1;
        tf.fn = f;
        tf.tpow = 1;
        FieldExpr rest_expr;
        CoeffPoly cc;
        cc.terms.emplace(rest, q * GaussQ(e));
        rest_expr.add_term(w, cc);
        out += nop(FieldExpr::atom(tf), rest_expr, ctx);
      }
    }
    for (size_t i = 0; i < w.size(); ++i) {
      NOWord nw = w;
      nw[i].tpow += 1;
      FieldExpr term;
      term.add_term(nw, c);
      out += canonicalize(term, ctx);
    }
  }
  return out;
}

FieldExpr apply_S(const FieldExpr &x, BracketContext &ctx) {
  FieldExpr out;
  for (auto &[w, c] : x.terms) {
    for (auto &[m, q] : c.terms) {
      for (size_t pos = 0; pos < m.factors.size(); ++pos) {
        if (m.factors[pos].first.is_scalar()) continue;
        const DerivedFunction &f = m.factors[pos].first.fn();
        int e = m.factors[pos].second;
        Monomial rest = m;
        if (rest.factors[pos].second > 1)
          rest.factors[pos].second -= 1;
        else
          rest.factors.erase(rest.factors.begin() + pos);
        FieldExpr sf = s_of_function(f, ctx);
        if (sf.is_zero()) continue;
        FieldExpr rest_expr;
        CoeffPoly cc;
        cc.terms.emplace(rest, q * GaussQ(e));
        rest_expr.add_term(w, cc);
        out += nop(sf, rest_expr, ctx);
      }
    }
    Parity passed = Parity::Even;
    for (size_t i = 0; i < w.size(); ++i) {
      NOWord nw = w;
      if (nw[i].spow) {
        nw[i].spow = 0;
        nw[i].tpow += 1;  // S S = T
      } else {
        nw[i].spow = 1;
      }
      int sgn = (passed == Parity::Odd) ? -1 : 1;
      FieldExpr term;
      term.add_term(nw, GaussQ(sgn) * c);
      out += canonicalize(term, ctx);
      passed = passed + ctx.pres.parities.atom_parity(w[i]);
    }
  }
  return out;
}

LambdaPoly integrate_gamma(const LambdaPoly &p) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms) {
    if (m.K != 1) continue;
    int sgn = m.J ? -1 : 1;
    out.add(ParamMono{m.j + m.k + 1, m.J, 0, 0},
            (GaussQ(sgn) * GaussQ(1, m.k + 1)) * x);
  }
  return out;
}

FieldExpr integrate_minus_nabla(const LambdaPoly &p, BracketContext &ctx) {
  FieldExpr out;
  for (auto &[m, x] : p.terms) {
    if (m.J != 1) continue;
    assert(m.k == 0 && m.K == 0);
    FieldExpr t = x;
    for (int r = 0; r <= m.j; ++r) t = apply_T(t, ctx);
    int sgn = (m.j & 1) ? -1 : 1;
    out += (GaussQ(sgn) * GaussQ(1, m.j + 1)) * t;
  }
  return out;
}

LambdaPoly subst_minus_nabla(const LambdaPoly &p, BracketContext &ctx) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms) {
    assert(m.j == 0 && m.J == 0);
    LambdaPoly base = LambdaPoly::of(x);
    if (m.K) base = -(mul_chi(base) + S_statewise(base, ctx));
    for (int r = 0; r < m.k; ++r)
      base = -(mul_lambda(base) + T_statewise(base, ctx));
    out += base;
  }
  return out;
}

LambdaPoly skew(const LambdaPoly &q, Parity pa, Parity pb, BracketContext &ctx) {
  LambdaPoly s = subst_minus_nabla(q.to_gamma(), ctx);
  return sign_of(pa, pb) < 0 ? -s : s;
}

FieldExpr mode_action(const FieldExpr &a, int j, int J, const FieldExpr &b,
                      BracketContext &ctx) {
  LambdaPoly p = bracket(a, b, ctx);
  const FieldExpr *x = p.coeff(ParamMono{j, J, 0, 0});
  if (!x) return {};
  GaussQ fact(1);
  for (int r = 2; r <= j; ++r) fact *= GaussQ(r);
  return fact * (*x);
}

LambdaPoly bracket_second_poly(const FieldExpr &a, const LambdaPoly &p_gamma,
                               BracketContext &ctx) {
  auto pa = ctx.pres.parities.expr_parity(a);
  if (!pa) throw std::runtime_error("bracket: mixed parity input");
  LambdaPoly out;
  for (auto &[m, y] : p_gamma.terms) {
    assert(m.j == 0 && m.J == 0);
    LambdaPoly r = bracket(a, y, ctx);
    int sgn = ((m.K * (int(*pa) + 1)) & 1) ? -1 : 1;
    out += GaussQ(sgn) * mul_prefix(m, r);
  }
  return out;
}

LambdaPoly bracket_first_poly(const LambdaPoly &p_lambda, const FieldExpr &c,
                              BracketContext &ctx) {
  LambdaPoly out;
  for (auto &[m, x] : p_lambda.terms) {
    assert(m.k == 0 && m.K == 0);
    LambdaPoly r = bracket(x, c, ctx).to_gamma();
    int sgn = m.J ? -1 : 1;
    out += GaussQ(sgn) * mul_prefix(ParamMono{m.j, m.J, 0, 0}, r);
  }
  return out;
}

LambdaPoly bracket_gamma_second_poly(const FieldExpr &b,
                                     const LambdaPoly &p_lambda,
                                     BracketContext &ctx) {
  auto pb = ctx.pres.parities.expr_parity(b);
  if (!pb) throw std::runtime_error("bracket: mixed parity input");
  LambdaPoly out;
  for (auto &[m, y] : p_lambda.terms) {
    assert(m.k == 0 && m.K == 0);
    LambdaPoly r = bracket(b, y, ctx).to_gamma();
    int sgn = ((m.J * (int(*pb) + 1)) & 1) ? -1 : 1;
    out += GaussQ(sgn) * mul_prefix(ParamMono{m.j, m.J, 0, 0}, r);
  }
  return out;
}

LambdaPoly bracket_shifted(const LambdaPoly &q, const FieldExpr &c,
                           BracketContext &ctx) {
  LambdaPoly out;
  for (auto &[m, x] : q.terms) {
    assert(m.k == 0 && m.K == 0);
    LambdaPoly r = bracket(x, c, ctx);
    int psgn = m.J ? -1 : 1;
    for (auto &[rm, y] : r.terms) {
      assert(rm.k == 0 && rm.K == 0);
      // substitute xi -> Lambda + Gamma: (lambda+gamma)^j (chi+eta)^J
      for (int s = 0; s <= rm.j; ++s) {
        GaussQ binom(1);
        for (int t = 1; t <= s; ++t)
          binom *= GaussQ(rm.j - s + t) * GaussQ(1, t);
        std::vector<std::pair<ParamMono, GaussQ>> pieces;
        if (rm.J) {
          pieces.push_back({ParamMono{s, 1, rm.j - s, 0}, binom});
          pieces.push_back({ParamMono{s, 0, rm.j - s, 1}, binom});
        } else {
          pieces.push_back({ParamMono{s, 0, rm.j - s, 0}, binom});
        }
        for (auto &[pm, bc] : pieces) {
          LambdaPoly piece;
          piece.add(pm, bc * y);
          out += GaussQ(psgn) * mul_prefix(ParamMono{m.j, m.J, 0, 0}, piece);
        }
      }
    }
  }
  return out;
}

LambdaPoly jacobiator(const FieldExpr &a, const FieldExpr &b,
                      const FieldExpr &c, BracketContext &ctx) {
  const ParityTable &pt = ctx.pres.parities;
  auto pa = pt.expr_parity(a), pb = pt.expr_parity(b);
  if (!pa || !pb) throw std::runtime_error("jacobiator: mixed parity input");
  LambdaPoly lhs = bracket_second_poly(a, bracket(b, c, ctx).to_gamma(), ctx);
  LambdaPoly mid = bracket_shifted(bracket(a, b, ctx), c, ctx);
  LambdaPoly last = bracket_gamma_second_poly(b, bracket(a, c, ctx), ctx);
  int s_mid = (*pa == Parity::Odd) ? -1 : 1;
  int s_last = (((int(*pa) + 1) * (int(*pb) + 1)) & 1) ? -1 : 1;
  LambdaPoly out = lhs;
  out += GaussQ(s_mid) * mid;
  out -= GaussQ(s_last) * last;
  return rules_pass(out, ctx.pres.rules);
}

FieldExpr expand_t_letters(const FieldExpr &x, BracketContext &ctx) {
  FieldExpr out;
  for (auto &[w, c] : x.terms) {
    size_t pos = w.size();
    for (size_t i = 0; i < w.size(); ++i) {
      if (!w[i].is_gen() && w[i].spow == 0 && w[i].tpow >= 1) {
        pos = i;
        break;
      }
    }
    if (pos == w.size()) {
      out.add_term(w, c);
      continue;
    }
    // T^m i(f) = T^{m-1} S S i(f), expanded once through the geometry
    FieldExpr state = apply_S(s_of_function(*w[pos].fn, ctx), ctx);
    for (int t = 1; t < w[pos].tpow; ++t) state = apply_T(state, ctx);
    NOWord tail(w.begin() + pos + 1, w.end());
    FieldExpr acc;
    if (state.is_zero()) continue;
    {
      FieldExpr tail_expr;
      tail_expr.add_term(tail, CoeffPoly::one());
      acc = nop(state, tail_expr, ctx);
    }
    // splice the prefix letters and the coefficient back on
    for (size_t i = pos; i-- > 0;) {
      FieldExpr next;
      for (auto &[aw, ac] : acc.terms)
        for (auto &[am, aq] : ac.terms) next += insert_into_term(w[i], am, aq, aw, ctx);
      acc = next;
    }
    out += c * acc;
  }
  return out;
}

void complete_table_by_skew(AlgebraPresentation &pres) {
  BracketContext ctx(pres);
  std::map<std::pair<int, int>, LambdaPoly> full = pres.table;
  for (auto &[key, val] : pres.table) {
    auto [i, j] = key;
    LambdaPoly flipped = rules_pass(
        skew(val, pres.gens[i].parity, pres.gens[j].parity, ctx), pres.rules);
    auto it = full.find({j, i});
    if (it == full.end()) {
      full.emplace(std::make_pair(j, i), flipped);
    } else if (!(rules_pass(it->second, pres.rules) == flipped)) {
      throw std::runtime_error("presentation " + pres.name +
                               ": bracket table not skew-consistent for (" +
                               pres.gens[i].name + ", " + pres.gens[j].name +
                               ")");
    }
  }
  pres.table = std::move(full);
}

int AlgebraPresentation::find_gen(const std::string &n) const {
  for (size_t i = 0; i < gens.size(); ++i)
    if (gens[i].name == n) return int(i);
  return -1;
}

FieldExpr gen_state(const AlgebraPresentation &pres, int g) {
  (void)pres;
  return FieldExpr::atom(gen_atom(g));
}

FieldExpr gen_state(const AlgebraPresentation &pres, const std::string &name) {
  int g = pres.find_gen(name);
  if (g < 0) throw std::runtime_error("unknown generator " + name);
  return gen_state(pres, g);
}

std::string to_string(const FieldExpr &x, const AlgebraPresentation &pres) {
  if (x.is_zero()) return "0";
  std::vector<std::string> names;
  for (auto &g : pres.gens) names.push_back(g.name);
  std::ostringstream os;
  bool first = true;
  for (auto &[w, c] : x.terms) {
    if (!first) os << "  +  ";
    first = false;
    os << "(" << to_string(c) << ") " << to_string(w, names);
  }
  return os.str();
}

std::string to_string(const LambdaPoly &p, const AlgebraPresentation &pres) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto &[m, x] : p.terms) {
    if (!first) os << "\n + ";
    first = false;
    os << "L^(" << m.j << "|" << m.J << ")";
    if (m.k || m.K) os << " G^(" << m.k << "|" << m.K << ")";
    os << " . [" << to_string(x, pres) << "]";
  }
  return os.str();
}

}  // namespace susyopal
