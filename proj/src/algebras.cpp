#include "susyopal/algebras.hpp"

#include <cassert>
#include <set>
#include <stdexcept>

namespace susyopal {

namespace {

GaussQ half() { return GaussQ(1, 2); }
GaussQ I() { return GaussQ::unit_i(); }

void validate_parities(const AlgebraPresentation &P) {
  for (auto &[key, val] : P.table) {
    auto [i, j] = key;
    int want = (int(P.gens[i].parity) + int(P.gens[j].parity) + 1) & 1;
    for (auto &[m, x] : val.terms) {
      int pw = (want + m.J + m.K) & 1;
      for (auto &[w, c] : x.terms) {
        if (int(P.parities.word_parity(w)) != pw)
          throw std::runtime_error("presentation " + P.name +
                                   ": parity violation in bracket table (" +
                                   P.gens[i].name + ", " + P.gens[j].name + ")");
      }
    }
  }
}

void finish(AlgebraPresentation &P) {
  P.parities.gen_parity.clear();
  for (auto &g : P.gens) P.parities.gen_parity.push_back(g.parity);
  validate_parities(P);
  complete_table_by_skew(P);
  validate_parities(P);
}

LambdaPoly central_chi_lambda2(const std::string &c) {
  // (c/3) chi lambda^2
  LambdaPoly p;
  p.add(ParamMono{2, 1, 0, 0},
        FieldExpr::coeff(GaussQ(1, 3) * CoeffPoly::scalar(c)));
  return p;
}

}  // namespace

// --- Lie algebra data --------------------------------------------------------

void LieAlgebraData::check() const {
  auto br = [&](int i, int j, int k) { return f[i][j][k]; };
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      if (form[i][j] != form[j][i])
        throw std::runtime_error("LieAlgebraData: form not symmetric");
      for (int k = 0; k < dim; ++k)
        if (br(i, j, k) != -br(j, i, k))
          throw std::runtime_error("LieAlgebraData: constants not antisymmetric");
    }
  // Jacobi: [[i,j],k] + [[j,k],i] + [[k,i],j] = 0
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int m = 0; m < dim; ++m) {
          GaussQ s(0);
          for (int l = 0; l < dim; ++l)
            s += br(i, j, l) * br(l, k, m) + br(j, k, l) * br(l, i, m) +
                 br(k, i, l) * br(l, j, m);
          if (!s.is_zero())
            throw std::runtime_error("LieAlgebraData: Jacobi fails");
        }
  // invariance ([i,j],k) = (i,[j,k])
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) {
        GaussQ lhs(0), rhs(0);
        for (int l = 0; l < dim; ++l) {
          lhs += br(i, j, l) * form[l][k];
          rhs += br(j, k, l) * form[i][l];
        }
        if (!(lhs == rhs))
          throw std::runtime_error("LieAlgebraData: form not invariant");
      }
}

std::vector<std::vector<GaussQ>> LieAlgebraData::form_inverse() const {
  int n = dim;
  std::vector<std::vector<GaussQ>> a = form, inv(n, std::vector<GaussQ>(n));
  for (int i = 0; i < n; ++i) inv[i][i] = GaussQ(1);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!a[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::runtime_error("LieAlgebraData: singular form");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    GaussQ d = a[col][col].inverse();
    for (int c = 0; c < n; ++c) {
      a[col][c] *= d;
      inv[col][c] *= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      GaussQ m = a[r][col];
      for (int c = 0; c < n; ++c) {
        a[r][c] -= m * a[col][c];
        inv[r][c] -= m * inv[col][c];
      }
    }
  }
  return inv;
}

LieAlgebraData sl2_data() {
  LieAlgebraData g;
  g.dim = 3;
  g.names = {"e", "h", "f"};
  g.f.assign(3, std::vector<std::vector<GaussQ>>(3, std::vector<GaussQ>(3)));
  // [h,e] = 2e, [h,f] = -2f, [e,f] = h
  g.f[1][0][0] = GaussQ(2);
  g.f[0][1][0] = GaussQ(-2);
  g.f[1][2][2] = GaussQ(-2);
  g.f[2][1][2] = GaussQ(2);
  g.f[0][2][1] = GaussQ(1);
  g.f[2][0][1] = GaussQ(-1);
  g.form.assign(3, std::vector<GaussQ>(3));
  g.form[0][2] = g.form[2][0] = GaussQ(1);  // (e,f) = 1
  g.form[1][1] = GaussQ(2);                 // (h,h) = 2
  g.check();
  return g;
}

LieAlgebraData abelian_data(int n) {
  LieAlgebraData g;
  g.dim = n;
  for (int i = 0; i < n; ++i) g.names.push_back("x" + std::to_string(i + 1));
  g.f.assign(n, std::vector<std::vector<GaussQ>>(n, std::vector<GaussQ>(n)));
  g.form.assign(n, std::vector<GaussQ>(n));
  for (int i = 0; i < n; ++i) g.form[i][i] = GaussQ(1);
  return g;
}

// --- ns / n2 -----------------------------------------------------------------

AlgebraPresentation ns(const std::string &central) {
  AlgebraPresentation P;
  P.name = "ns";
  P.gens = {{"H", Parity::Odd}};
  P.scalars = {central};
  LambdaPoly hh;
  hh.add(ParamMono{0, 0, 0, 0}, GaussQ(2) * FieldExpr::atom(gen_atom(0, 1, 0)));
  hh.add(ParamMono{0, 1, 0, 0}, FieldExpr::atom(gen_atom(0, 0, 1)));
  hh.add(ParamMono{1, 0, 0, 0}, GaussQ(3) * FieldExpr::atom(gen_atom(0)));
  hh += central_chi_lambda2(central);
  P.table[{0, 0}] = hh;
  finish(P);
  return P;
}

namespace {

AlgebraPresentation n2_base(const std::string &central, bool with_hh) {
  AlgebraPresentation P;
  P.name = with_hh ? "n2" : "n2_partial";
  P.gens = {{"H", Parity::Odd}, {"J", Parity::Even}};
  P.scalars = {central};
  if (with_hh) {
    LambdaPoly hh;
    hh.add(ParamMono{0, 0, 0, 0}, GaussQ(2) * FieldExpr::atom(gen_atom(0, 1, 0)));
    hh.add(ParamMono{0, 1, 0, 0}, FieldExpr::atom(gen_atom(0, 0, 1)));
    hh.add(ParamMono{1, 0, 0, 0}, GaussQ(3) * FieldExpr::atom(gen_atom(0)));
    hh += central_chi_lambda2(central);
    P.table[{0, 0}] = hh;
  }
  LambdaPoly hj;  // (2T + 2 lambda + chi S) J
  hj.add(ParamMono{0, 0, 0, 0}, GaussQ(2) * FieldExpr::atom(gen_atom(1, 1, 0)));
  hj.add(ParamMono{1, 0, 0, 0}, GaussQ(2) * FieldExpr::atom(gen_atom(1)));
  hj.add(ParamMono{0, 1, 0, 0}, FieldExpr::atom(gen_atom(1, 0, 1)));
  P.table[{0, 1}] = hj;
  LambdaPoly jj;  // -(H + (c/3) lambda chi)
  jj.add(ParamMono{0, 0, 0, 0}, GaussQ(-1) * FieldExpr::atom(gen_atom(0)));
  jj.add(ParamMono{1, 1, 0, 0},
         FieldExpr::coeff(GaussQ(-1, 3) * CoeffPoly::scalar(central)));
  P.table[{1, 1}] = jj;
  finish(P);
  return P;
}

}  // namespace

AlgebraPresentation n2(const std::string &central) { return n2_base(central, true); }
AlgebraPresentation n2_partial(const std::string &central) {
  return n2_base(central, false);
}

// --- super currents ----------------------------------------------------------

AlgebraPresentation super_affine(const LieAlgebraData &g) {
  g.check();
  AlgebraPresentation P;
  P.name = "super_affine";
  for (auto &n : g.names) P.gens.push_back({n, Parity::Odd});
  P.scalars = {"kappa", "kappainv"};
  P.rules.reciprocal_scalars.push_back({"kappa", "kappainv"});
  CoeffPoly kappa = CoeffPoly::scalar("kappa");
  for (int i = 0; i < g.dim; ++i)
    for (int j = 0; j < g.dim; ++j) {
      LambdaPoly br;
      FieldExpr lie;
      for (int k = 0; k < g.dim; ++k)
        if (!g.f[i][j][k].is_zero())
          lie += g.f[i][j][k] * FieldExpr::atom(gen_atom(k));
      br.add(ParamMono{0, 0, 0, 0}, lie);
      if (!g.form[i][j].is_zero())
        br.add(ParamMono{0, 1, 0, 0},
               FieldExpr::coeff(g.form[i][j] * kappa));
      if (!br.is_zero()) P.table[{i, j}] = br;
      else P.table[{i, j}] = LambdaPoly::zero();
    }
  finish(P);
  return P;
}

FieldExpr kt_field(const AlgebraPresentation &pres, const LieAlgebraData &g,
                   BracketContext &ctx) {
  auto binv = g.form_inverse();
  CoeffPoly kinv = CoeffPoly::scalar("kappainv");
  auto dual_state = [&](int i) {
    FieldExpr x;
    for (int j = 0; j < g.dim; ++j)
      if (!binv[i][j].is_zero()) x += binv[i][j] * FieldExpr::atom(gen_atom(j));
    return x;
  };
  FieldExpr quad;
  for (int i = 0; i < g.dim; ++i)
    quad += nop(apply_S(dual_state(i), ctx), FieldExpr::atom(gen_atom(i)), ctx);
  FieldExpr cubic;
  for (int i = 0; i < g.dim; ++i)
    for (int j = 0; j < g.dim; ++j) {
      FieldExpr lie;
      for (int k = 0; k < g.dim; ++k)
        if (!g.f[i][j][k].is_zero())
          lie += g.f[i][j][k] * FieldExpr::atom(gen_atom(k));
      if (lie.is_zero()) continue;
      // a^i (a^j [a_i, a_j])
      cubic += nop(dual_state(i), nop(dual_state(j), lie, ctx), ctx);
    }
  FieldExpr h0 = kinv * (quad + (GaussQ(1, 3) * (kinv * cubic)));
  return canonicalize(h0, ctx);
}

// --- Manin doubles -----------------------------------------------------------

BialgebraData bialgebra_dim2() {
  BialgebraData b;
  b.dim = 2;
  b.c_low.assign(2, std::vector<std::vector<GaussQ>>(2, std::vector<GaussQ>(2)));
  b.c_up.assign(2, std::vector<std::vector<GaussQ>>(2, std::vector<GaussQ>(2)));
  b.c_low[0][1][1] = GaussQ(1);   // [e_1, e_2] = e_2
  b.c_low[1][0][1] = GaussQ(-1);
  return b;
}

AlgebraPresentation manin_double(const BialgebraData &b) {
  int n = b.dim;
  AlgebraPresentation P;
  P.name = "manin_double";
  for (int i = 1; i <= n; ++i) P.gens.push_back({"e^" + std::to_string(i), Parity::Odd});
  for (int i = 1; i <= n; ++i) P.gens.push_back({"e_" + std::to_string(i), Parity::Odd});
  P.scalars = {"kappa", "kappainv"};
  P.rules.reciprocal_scalars.push_back({"kappa", "kappainv"});
  CoeffPoly kappa = CoeffPoly::scalar("kappa");
  auto lower = [&](int i) { return n + i; };  // 0-based gen index of e_{i+1}
  auto uppg = [&](int i) { return i; };

  // [e_i, e_j] = c^k_{ij} e_k
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      LambdaPoly br;
      FieldExpr lie;
      for (int k = 0; k < n; ++k)
        if (!b.c_low[i][j][k].is_zero())
          lie += b.c_low[i][j][k] * FieldExpr::atom(gen_atom(lower(k)));
      br.add(ParamMono{}, lie);
      P.table[{lower(i), lower(j)}] = br;
    }
  // [e^i, e^j] = c^{ij}_k e^k
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      LambdaPoly br;
      FieldExpr lie;
      for (int k = 0; k < n; ++k)
        if (!b.c_up[i][j][k].is_zero())
          lie += b.c_up[i][j][k] * FieldExpr::atom(gen_atom(uppg(k)));
      br.add(ParamMono{}, lie);
      P.table[{uppg(i), uppg(j)}] = br;
    }
  // [e_i, e^j] = c^{jk}_i e_k - c^j_{ik} e^k  (+ chi kappa delta)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      FieldExpr lie;
      for (int k = 0; k < n; ++k) {
        if (!b.c_up[j][k][i].is_zero())
          lie += b.c_up[j][k][i] * FieldExpr::atom(gen_atom(lower(k)));
        if (!b.c_low[i][k][j].is_zero())
          lie -= b.c_low[i][k][j] * FieldExpr::atom(gen_atom(uppg(k)));
      }
      LambdaPoly br;
      br.add(ParamMono{}, lie);
      if (i == j) br.add(ParamMono{0, 1, 0, 0}, FieldExpr::coeff(kappa));
      P.table[{lower(i), uppg(j)}] = br;
      LambdaPoly rb;
      rb.add(ParamMono{}, -lie);
      if (i == j) rb.add(ParamMono{0, 1, 0, 0}, FieldExpr::coeff(kappa));
      P.table[{uppg(j), lower(i)}] = rb;
    }
  finish(P);
  return P;
}

namespace {

// shared constant structure-function symbols for abstract presentations
FunctionSymbolPtr make_c_low(int rank, bool constant) {
  auto s = std::make_shared<FunctionSymbol>(
      "c", std::vector<Variance>{Variance::Upper, Variance::Lower, Variance::Lower},
      rank);
  s->antisym = std::make_pair(1, 2);
  s->constant = constant;
  return s;
}

FunctionSymbolPtr make_c_up(int rank, bool constant) {
  auto s = std::make_shared<FunctionSymbol>(
      "cu", std::vector<Variance>{Variance::Upper, Variance::Upper, Variance::Lower},
      rank);
  s->antisym = std::make_pair(0, 1);
  s->constant = constant;
  return s;
}

}  // namespace

AlgebraPresentation manin_double_abstract(int dim) {
  int n = dim;
  AlgebraPresentation P;
  P.name = "manin_double_abstract";
  for (int i = 1; i <= n; ++i) P.gens.push_back({"e^" + std::to_string(i), Parity::Odd});
  for (int i = 1; i <= n; ++i) P.gens.push_back({"e_" + std::to_string(i), Parity::Odd});
  P.scalars = {"kappa", "kappainv"};
  P.rules.reciprocal_scalars.push_back({"kappa", "kappainv"});
  P.geom.rank = n;
  P.geom.c_low = make_c_low(n, true);
  P.geom.c_up = make_c_up(n, true);
  P.anchored = false;
  CoeffPoly kappa = CoeffPoly::scalar("kappa");
  auto lowg = [&](int i) { return n + i - 1; };  // e_i, 1-based i
  auto uppg = [&](int i) { return i - 1; };      // e^i

  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      {  // [e_i, e_j] = c^k_{ij} e_k
        LambdaPoly br;
        FieldExpr lie;
        for (int k = 1; k <= n; ++k)
          lie += P.geom.inst_low(k, i, j) * FieldExpr::atom(gen_atom(lowg(k)));
        br.add(ParamMono{}, lie);
        P.table[{lowg(i), lowg(j)}] = br;
      }
      {  // [e^i, e^j] = c^{ij}_k e^k
        LambdaPoly br;
        FieldExpr lie;
        for (int k = 1; k <= n; ++k)
          lie += P.geom.inst_up(i, j, k) * FieldExpr::atom(gen_atom(uppg(k)));
        br.add(ParamMono{}, lie);
        P.table[{uppg(i), uppg(j)}] = br;
      }
      {  // [e_i, e^j] = c^{jk}_i e_k - c^j_{ik} e^k + chi kappa delta
        FieldExpr lie;
        for (int k = 1; k <= n; ++k) {
          lie += P.geom.inst_up(j, k, i) * FieldExpr::atom(gen_atom(lowg(k)));
          lie -= P.geom.inst_low(j, i, k) * FieldExpr::atom(gen_atom(uppg(k)));
        }
        LambdaPoly br;
        br.add(ParamMono{}, lie);
        if (i == j) br.add(ParamMono{0, 1, 0, 0}, FieldExpr::coeff(kappa));
        P.table[{lowg(i), uppg(j)}] = br;
        LambdaPoly rb;
        rb.add(ParamMono{}, -lie);
        if (i == j) rb.add(ParamMono{0, 1, 0, 0}, FieldExpr::coeff(kappa));
        P.table[{uppg(j), lowg(i)}] = rb;
      }
    }
  finish(P);
  return P;
}

FieldExpr manin_v(const AlgebraPresentation &pres, const BialgebraData &b) {
  // [e^i, e_i] = w + w*, v = w - w*
  int n = b.dim;
  FieldExpr v;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      // [e^i, e_i] = -[e_i, e^i] = -(c^{ik}_i e_k - c^i_{ik} e^k)
      GaussQ wk = -b.c_up[i][k][i];
      GaussQ wsk = b.c_low[i][k][i];
      // v = w - w*
      v += wk * FieldExpr::atom(gen_atom(n + k));
      v -= wsk * FieldExpr::atom(gen_atom(k));
    }
  (void)pres;
  return v;
}

FieldExpr manin_v_abstract(const AlgebraPresentation &pres) {
  int n = pres.geom.rank;
  FieldExpr v;
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= n; ++k) {
      v += -pres.geom.inst_up(i, k, i) * FieldExpr::atom(gen_atom(n + k - 1));
      v -= pres.geom.inst_low(i, i, k) * FieldExpr::atom(gen_atom(k - 1));
    }
  return v;
}

GaussQ manin_v_norm(const BialgebraData &b) {
  // components of v in the double basis, then the kappa-free pairing
  int n = b.dim;
  std::vector<GaussQ> v_low(n), v_up(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      v_low[k] += -b.c_up[i][k][i];
      v_up[k] -= b.c_low[i][k][i];
    }
  GaussQ out(0);
  for (int k = 0; k < n; ++k) out += GaussQ(2) * v_low[k] * v_up[k];
  // (e_i, e^j) = delta; (v,v) = 2 sum v_low v_up
  return out;
}

FieldExpr double_J(const AlgebraPresentation &pres, BracketContext &ctx) {
  int n = int(pres.gens.size()) / 2;
  FieldExpr j;
  for (int m = 0; m < n; ++m) {
    NOWord w{gen_atom(m), gen_atom(n + m)};
    j.add_term(w, CoeffPoly::one());
  }
  return canonicalize((I() * CoeffPoly::scalar("kappainv")) * j, ctx);
}

FieldExpr double_H(const AlgebraPresentation &pres, const FieldExpr &v,
                   BracketContext &ctx) {
  int n = int(pres.gens.size()) / 2;
  CoeffPoly kinv = CoeffPoly::scalar("kappainv");
  auto lie_bracket = [&](int gi, int gj) {
    const LambdaPoly &br = pres.table.at({gi, gj});
    const FieldExpr *x = br.coeff(ParamMono{});
    return x ? *x : FieldExpr();
  };
  FieldExpr cubic;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // e^i (e^j [e_i, e_j])
      FieldExpr inner = lie_bracket(n + i, n + j);
      if (!inner.is_zero())
        cubic += nop(FieldExpr::atom(gen_atom(i)),
                     nop(FieldExpr::atom(gen_atom(j)), inner, ctx), ctx);
      // e_i (e_j [e^i, e^j])
      FieldExpr inner2 = lie_bracket(i, j);
      if (!inner2.is_zero())
        cubic += nop(FieldExpr::atom(gen_atom(n + i)),
                     nop(FieldExpr::atom(gen_atom(n + j)), inner2, ctx), ctx);
    }
  FieldExpr quad;
  for (int j = 0; j < n; ++j) {
    quad += nop(FieldExpr::atom(gen_atom(n + j)),
                FieldExpr::atom(gen_atom(j, 0, 1)), ctx);
    quad += nop(FieldExpr::atom(gen_atom(j)),
                FieldExpr::atom(gen_atom(n + j, 0, 1)), ctx);
  }
  FieldExpr h = (kinv * kinv) * cubic + kinv * quad + kinv * apply_T(v, ctx);
  return canonicalize(h, ctx);
}

// --- Courant frames ------------------------------------------------------

AlgebraPresentation courant_frame(int rank, FrameOptions opt) {
  AlgebraPresentation P;
  P.name = "courant_frame";
  for (int i = 1; i <= rank; ++i)
    P.gens.push_back({"e^" + std::to_string(i), Parity::Odd});
  for (int i = 1; i <= rank; ++i)
    P.gens.push_back({"e_" + std::to_string(i), Parity::Odd});
  P.geom.rank = rank;
  P.geom.c_low = make_c_low(rank, false);
  P.geom.c_up = make_c_up(rank, false);
  P.geom.regular = opt.regular;
  P.anchored = true;
  auto lowg = [&](int i) { return rank + i - 1; };
  auto uppg = [&](int i) { return i - 1; };

  for (int i = 1; i <= rank; ++i)
    for (int j = 1; j <= rank; ++j) {
      {  // [e_i, e_j] = c^k_{ij} e_k
        LambdaPoly br;
        FieldExpr lie;
        for (int k = 1; k <= rank; ++k)
          lie += P.geom.inst_low(k, i, j) * FieldExpr::atom(gen_atom(lowg(k)));
        br.add(ParamMono{}, lie);
        P.table[{lowg(i), lowg(j)}] = br;
      }
      {  // [e^i, e^j] = c^{ij}_k e^k
        LambdaPoly br;
        FieldExpr lie;
        for (int k = 1; k <= rank; ++k)
          lie += P.geom.inst_up(i, j, k) * FieldExpr::atom(gen_atom(uppg(k)));
        br.add(ParamMono{}, lie);
        P.table[{uppg(i), uppg(j)}] = br;
      }
      {  // [e_j, e^i] = c^{ik}_j e_k - c^i_{jk} e^k + 2 chi delta^i_j
        FieldExpr lie;
        for (int k = 1; k <= rank; ++k) {
          lie += P.geom.inst_up(i, k, j) * FieldExpr::atom(gen_atom(lowg(k)));
          lie -= P.geom.inst_low(i, j, k) * FieldExpr::atom(gen_atom(uppg(k)));
        }
        LambdaPoly br;
        br.add(ParamMono{}, lie);
        if (i == j) br.add(ParamMono{0, 1, 0, 0}, FieldExpr::vacuum(GaussQ(2)));
        P.table[{lowg(j), uppg(i)}] = br;
        LambdaPoly rb;
        rb.add(ParamMono{}, -lie);
        if (i == j) rb.add(ParamMono{0, 1, 0, 0}, FieldExpr::vacuum(GaussQ(2)));
        P.table[{uppg(i), lowg(j)}] = rb;
      }
    }
  finish(P);

  P.relations.multiplier_degree = opt.reduction_degree;
  P.relations.prolongation_order = opt.prolongation;
  if (!opt.regular) {
    RelationSet jac = derive_relations(P);
    for (size_t k = 0; k < jac.generators.size(); ++k)
      P.relations.add(jac.generators[k], jac.labels[k]);
    if (opt.unimodular || opt.nice_volume) {
      RelationSet div = divergence_relations(P);
      for (size_t k = 0; k < div.generators.size(); ++k)
        P.relations.add(div.generators[k], div.labels[k]);
    }
    if (opt.nice_volume) {
      RelationSet nv = nice_volume_relations(P);
      for (size_t k = 0; k < nv.generators.size(); ++k)
        P.relations.add(nv.generators[k], nv.labels[k]);
    }
    P.relations.prolong(P.geom);
  }
  return P;
}

Section section_of_gen(const AlgebraPresentation &pres, int g) {
  Section s(pres.gens.size());
  s[g] = CoeffPoly::one();
  return s;
}

CoeffPoly section_pairing(const AlgebraPresentation &pres, const Section &A,
                          const Section &B) {
  int n = pres.geom.rank;
  CoeffPoly out;
  for (int i = 0; i < n; ++i) {
    out += A[i] * B[n + i];  // <e^{i+1}, e_{i+1}> = 1
    out += A[n + i] * B[i];
  }
  return out;
}

Section section_D(const AlgebraPresentation &pres, const CoeffPoly &f) {
  int n = pres.geom.rank;
  Section s(pres.gens.size());
  if (!pres.anchored) return s;
  for (int r = 1; r <= n; ++r) {
    // D f = (1/2)(f_{,r} e^r + f^{,r} e_r)
    s[r - 1] = GaussQ(1, 2) * anchor_derive(f, lower(r), pres.geom);
    s[n + r - 1] = GaussQ(1, 2) * anchor_derive(f, upper(r), pres.geom);
  }
  return s;
}

CoeffPoly section_anchor(const AlgebraPresentation &pres, const Section &A,
                         const CoeffPoly &f) {
  CoeffPoly out;
  for (size_t m = 0; m < A.size(); ++m) {
    if (A[m].is_zero()) continue;
    out += A[m] * anchor_derive(f, pres.gen_dir(int(m)), pres.geom);
  }
  return out;
}

Section courant_bracket(const AlgebraPresentation &pres, const Section &A,
                        const Section &B) {
  int N = int(pres.gens.size());
  Section out(N);
  for (int m = 0; m < N; ++m) {
    if (A[m].is_zero()) continue;
    for (int n = 0; n < N; ++n) {
      if (B[n].is_zero()) continue;
      const CoeffPoly &a = A[m];
      const CoeffPoly &b = B[n];
      // [aE, bF] = ab [E,F] + a (pi(E) b) F - b (pi(F) a) E
      //            + <E,F> (b Da - a Db)
      CoeffPoly ab = a * b;
      for (auto &[coef, dir] : pres.geom.frame_bracket(pres.gen_dir(m),
                                                       pres.gen_dir(n))) {
        int tgt = dir.var == Variance::Upper ? pres.upper_gen(dir.index)
                                             : pres.lower_gen(dir.index);
        out[tgt] += ab * coef;
      }
      CoeffPoly pieb = anchor_derive(b, pres.gen_dir(m), pres.geom);
      out[n] += a * pieb;
      CoeffPoly pifa = anchor_derive(a, pres.gen_dir(n), pres.geom);
      out[m] -= b * pifa;
      // pairing of frame elements
      Section em = section_of_gen(pres, m), en = section_of_gen(pres, n);
      CoeffPoly pe = section_pairing(pres, em, en);
      if (!pe.is_zero()) {
        Section da = section_D(pres, a), db = section_D(pres, b);
        for (int t = 0; t < N; ++t) {
          out[t] += pe * (b * da[t]);
          out[t] -= pe * (a * db[t]);
        }
      }
    }
  }
  return out;
}

RelationSet derive_relations(const AlgebraPresentation &frame) {
  RelationSet rel;
  int N = int(frame.gens.size());
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b)
      for (int c = b; c < N; ++c) {
        Section A = section_of_gen(frame, a);
        Section B = section_of_gen(frame, b);
        Section C = section_of_gen(frame, c);
        Section jac(N);
        auto addbr = [&](const Section &X, const Section &Y, const Section &Z) {
          Section t = courant_bracket(frame, courant_bracket(frame, X, Y), Z);
          for (int m = 0; m < N; ++m) jac[m] += t[m];
        };
        addbr(A, B, C);
        addbr(B, C, A);
        addbr(C, A, B);
        // Nij = (1/3)(<[A,B],C> + <[B,C],A> + <[C,A],B>)
        CoeffPoly nij;
        nij += section_pairing(frame, courant_bracket(frame, A, B), C);
        nij += section_pairing(frame, courant_bracket(frame, B, C), A);
        nij += section_pairing(frame, courant_bracket(frame, C, A), B);
        nij = GaussQ(1, 3) * nij;
        Section dn = section_D(frame, nij);
        for (int m = 0; m < N; ++m) {
          CoeffPoly g = jac[m] - dn[m];
          if (!g.is_zero())
            rel.add(g, "jac(" + frame.gens[a].name + "," + frame.gens[b].name +
                           "," + frame.gens[c].name + ")." +
                           frame.gens[m].name);
        }
      }
  return rel;
}

RelationSet divergence_relations(const AlgebraPresentation &frame) {
  RelationSet rel;
  const FrameGeometry &G = frame.geom;
  int n = G.rank;
  auto dl = [&](const CoeffPoly &p, int i) {
    return anchor_derive(p, lower(i), G);
  };
  auto du = [&](const CoeffPoly &p, int i) {
    return anchor_derive(p, upper(i), G);
  };
  for (int k = 1; k <= n; ++k)
    for (int j = 1; j <= n; ++j) {
      {  // div[e_k, e_j]: c^i_{kj,i} - c^i_{kj} c^l_{il} + c^i_{ji,k} - c^i_{ki,j}
        CoeffPoly g;
        for (int i = 1; i <= n; ++i) {
          g += dl(G.inst_low(i, k, j), i);
          for (int l = 1; l <= n; ++l)
            g -= G.inst_low(i, k, j) * G.inst_low(l, i, l);
          g += dl(G.inst_low(i, j, i), k);
          g -= dl(G.inst_low(i, k, i), j);
        }
        if (!g.is_zero())
          rel.add(g, "div_ll(" + std::to_string(k) + "," + std::to_string(j) + ")");
      }
      {  // div[e^k, e^j]: dual family
        CoeffPoly g;
        for (int i = 1; i <= n; ++i) {
          g += du(G.inst_up(k, j, i), i);
          for (int l = 1; l <= n; ++l)
            g -= G.inst_up(k, j, i) * G.inst_up(i, l, l);
          g += du(G.inst_up(j, i, i), k);
          g -= du(G.inst_up(k, i, i), j);
        }
        if (!g.is_zero())
          rel.add(g, "div_uu(" + std::to_string(k) + "," + std::to_string(j) + ")");
      }
      {  // div[e_k, e^j]: c^{ji}_{k,i} - c^{ji}_k c^l_{il} - c^{j,i}_{ki}
         //               + c^j_{ki} c^{il}_l + c^{ji}_{i,k} - c^{i,j}_{ki}
        CoeffPoly g;
        for (int i = 1; i <= n; ++i) {
          g += dl(G.inst_up(j, i, k), i);
          for (int l = 1; l <= n; ++l) {
            g -= G.inst_up(j, i, k) * G.inst_low(l, i, l);
            g += G.inst_low(j, k, i) * G.inst_up(i, l, l);
          }
          g -= du(G.inst_low(j, k, i), i);
          g += dl(G.inst_up(j, i, i), k);
          g -= du(G.inst_low(i, k, i), j);
        }
        if (!g.is_zero())
          rel.add(g, "div_lu(" + std::to_string(k) + "," + std::to_string(j) + ")");
      }
    }
  return rel;
}

RelationSet nice_volume_relations(const AlgebraPresentation &frame) {
  RelationSet rel;
  const FrameGeometry &G = frame.geom;
  int n = G.rank;
  for (int k = 1; k <= n; ++k) {
    CoeffPoly gl, gu;
    for (int i = 1; i <= n; ++i) {
      gl += G.inst_low(i, k, i);  // div e_k = -c^i_{ki} = 0
      gu += G.inst_up(k, i, i);   // div e^k = -c^{ki}_i = 0
    }
    if (!gl.is_zero()) rel.add(gl, "nice_low(" + std::to_string(k) + ")");
    if (!gu.is_zero()) rel.add(gu, "nice_up(" + std::to_string(k) + ")");
  }
  return rel;
}

RelationSet isotropy_relations(const AlgebraPresentation &frame,
                               const std::vector<DerivedFunction> &fns) {
  RelationSet rel;
  const FrameGeometry &G = frame.geom;
  int n = G.rank;
  auto d = [&](const DerivedFunction &f, AnchorDir dir) {
    return derive_instance_dir(f, dir, G);
  };
  // decorated instances up to one extra derivative
  std::vector<DerivedFunction> all = fns;
  for (auto &f : fns)
    for (int v = 0; v < 2; ++v)
      for (int r = 1; r <= n; ++r) {
        DerivedFunction g = f;
        g.word.push_back(v ? upper(r) : lower(r));
        all.push_back(g);
      }
  for (size_t a = 0; a < all.size(); ++a) {
    {  // laplace form
      CoeffPoly g;
      for (int r = 1; r <= n; ++r) {
        g += anchor_derive(d(all[a], lower(r)), upper(r), G);
        g += anchor_derive(d(all[a], upper(r)), lower(r), G);
        for (int i = 1; i <= n; ++i) {
          g -= G.inst_low(i, r, i) * d(all[a], upper(r));
          g -= G.inst_up(r, i, i) * d(all[a], lower(r));
        }
      }
      if (!g.is_zero())
        rel.add(g, "laplace(" + to_string(all[a]) + ")");
    }
    for (size_t b = a; b < all.size(); ++b) {  // bilinear isotropy
      CoeffPoly g;
      for (int r = 1; r <= n; ++r) {
        g += d(all[a], lower(r)) * d(all[b], upper(r));
        g += d(all[a], upper(r)) * d(all[b], lower(r));
      }
      if (!g.is_zero())
        rel.add(g, "isotropy(" + to_string(all[a]) + "," + to_string(all[b]) + ")");
    }
  }
  return rel;
}

FieldExpr build_J(const AlgebraPresentation &frame, BracketContext &ctx) {
  int n = frame.geom.rank;
  FieldExpr j;
  for (int m = 0; m < n; ++m) {
    NOWord w{gen_atom(m), gen_atom(n + m)};
    j.add_term(w, CoeffPoly(half() * I()));
  }
  return canonicalize(j, ctx);
}

namespace {

FieldExpr section_state(const AlgebraPresentation &pres, const Section &s) {
  FieldExpr x;
  for (size_t m = 0; m < s.size(); ++m)
    if (!s[m].is_zero()) x += s[m] * FieldExpr::atom(gen_atom(int(m)));
  return x;
}

}  // namespace

FieldExpr build_H(const AlgebraPresentation &frame, BracketContext &ctx) {
  int n = frame.geom.rank;
  FieldExpr cubic;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      Section br_ll = courant_bracket(frame, section_of_gen(frame, n + i - 1),
                                      section_of_gen(frame, n + j - 1));
      FieldExpr inner = section_state(frame, br_ll);
      if (!inner.is_zero())
        cubic += nop(FieldExpr::atom(gen_atom(i - 1)),
                     nop(FieldExpr::atom(gen_atom(j - 1)), inner, ctx), ctx);
      Section br_uu = courant_bracket(frame, section_of_gen(frame, i - 1),
                                      section_of_gen(frame, j - 1));
      FieldExpr inner2 = section_state(frame, br_uu);
      if (!inner2.is_zero())
        cubic += nop(FieldExpr::atom(gen_atom(n + i - 1)),
                     nop(FieldExpr::atom(gen_atom(n + j - 1)), inner2, ctx), ctx);
    }
  // - (i/2) T Jop [e^i, e_i]
  Section mix(frame.gens.size());
  for (int i = 1; i <= n; ++i) {
    Section t = courant_bracket(frame, section_of_gen(frame, i - 1),
                                section_of_gen(frame, n + i - 1));
    for (size_t m = 0; m < mix.size(); ++m) mix[m] += t[m];
  }
  // Jop: e_k -> i e_k, e^k -> -i e^k
  for (int m = 0; m < int(mix.size()); ++m)
    mix[m] = (m < n ? -I() : I()) * mix[m];
  FieldExpr jterm = (GaussQ(-1, 2) * I()) * apply_T(section_state(frame, mix), ctx);
  FieldExpr quad;
  for (int j = 1; j <= n; ++j) {
    quad += nop(FieldExpr::atom(gen_atom(n + j - 1)),
                FieldExpr::atom(gen_atom(j - 1, 0, 1)), ctx);
    quad += nop(FieldExpr::atom(gen_atom(j - 1)),
                FieldExpr::atom(gen_atom(n + j - 1, 0, 1)), ctx);
  }
  FieldExpr h = GaussQ(1, 4) * cubic + jterm + half() * quad;
  return canonicalize(h, ctx);
}

FieldExpr orthonormal_H(const AlgebraPresentation &frame, BracketContext &ctx) {
  int n = frame.geom.rank;
  int N2 = 2 * n;
  // a^alpha with norm squares: (e^i + e_i)/sqrt2, (e^i - e_i)/sqrt(-2)
  std::vector<Section> b(N2, Section(frame.gens.size()));
  std::vector<GaussQ> nsq(N2);
  for (int i = 1; i <= n; ++i) {
    b[i - 1][i - 1] = CoeffPoly::one();
    b[i - 1][n + i - 1] = CoeffPoly::one();
    nsq[i - 1] = GaussQ(1, 2);
    b[n + i - 1][i - 1] = CoeffPoly::one();
    b[n + i - 1][n + i - 1] = GaussQ(-1) * CoeffPoly::one();
    nsq[n + i - 1] = GaussQ(-1, 2);
  }
  FieldExpr quad;
  for (int al = 0; al < N2; ++al) {
    FieldExpr st = section_state(frame, b[al]);
    quad += nsq[al] * nop(st, apply_S(st, ctx), ctx);
  }
  FieldExpr cubic;
  for (int al = 0; al < N2; ++al)
    for (int be = 0; be < N2; ++be) {
      Section br = courant_bracket(frame, b[al], b[be]);
      FieldExpr brs = section_state(frame, br);
      if (brs.is_zero()) continue;
      FieldExpr word = nop(section_state(frame, b[al]),
                           section_state(frame, b[be]), ctx);
      cubic += (nsq[al] * nsq[be]) * nop(brs, word, ctx);
    }
  FieldExpr h = half() * quad + GaussQ(1, 12) * cubic;
  return canonicalize(h, ctx);
}

namespace {

// move T-decorated function letters from the word into coefficient markers
std::pair<NOWord, CoeffPoly> flatten_term(const NOWord &w, const CoeffPoly &c) {
  NOWord nw;
  CoeffPoly marker = CoeffPoly::one();
  for (auto &a : w) {
    if (!a.is_gen() && a.spow == 0 && a.tpow >= 1) {
      DerivedFunction f = *a.fn;
      f.tpow = a.tpow;
      marker = marker * CoeffPoly::func(f);
    } else {
      nw.push_back(a);
    }
  }
  return {nw, marker * c};
}

int max_t_degree(const CoeffPoly &p) {
  int mx = 0;
  for (auto &[m, c] : p.terms) {
    int d = 0;
    for (auto &[f, e] : m.factors)
      if (!f.is_scalar()) d += f.fn().tpow * e;
    mx = std::max(mx, d);
  }
  return mx;
}

RelationSet lift_relations(const RelationSet &rel, int order) {
  RelationSet out = rel;
  std::vector<CoeffPoly> cur = rel.generators;
  std::vector<std::string> cl = rel.labels;
  for (int k = 1; k <= order; ++k) {
    std::vector<CoeffPoly> nxt;
    std::vector<std::string> nl;
    for (size_t i = 0; i < cur.size(); ++i) {
      CoeffPoly t = t_lift(cur[i]);
      if (!t.is_zero()) {
        nxt.push_back(t);
        nl.push_back("T(" + cl[i] + ")");
      }
    }
    for (size_t i = 0; i < nxt.size(); ++i) out.add(nxt[i], nl[i]);
    cur = std::move(nxt);
    cl = std::move(nl);
  }
  return out;
}

}  // namespace

namespace {

FieldReduceResult reduce_field_once(const FieldExpr &x, const RelationSet &rel,
                                    const FrameGeometry &geom) {
  FieldReduceResult out;
  FieldExpr flat;
  int maxt = 0;
  for (auto &[w, c] : x.terms) {
    auto [nw, nc] = flatten_term(w, c);
    flat.add_term(nw, nc);
    maxt = std::max(maxt, max_t_degree(nc));
  }
  RelationSet lifted = lift_relations(rel, maxt);
  std::set<std::string> used;
  out.reduced = true;
  for (auto &[w, c] : flat.terms) {
    ReduceResult rr = reduce(c, lifted, geom);
    if (!rr.reduced) {
      out.reduced = false;
      out.normal_form.add_term(w, rr.normal_form);
    }
    used.insert(rr.used.begin(), rr.used.end());
  }
  out.used.assign(used.begin(), used.end());
  return out;
}

bool has_t_letters(const FieldExpr &x) {
  for (auto &[w, c] : x.terms) {
    for (auto &a : w)
      if (!a.is_gen() && a.tpow >= 1) return true;
    for (auto &[m, q] : c.terms)
      for (auto &[f, e] : m.factors)
        if (!f.is_scalar() && f.fn().tpow >= 1) return true;
  }
  return false;
}

}  // namespace

FieldReduceResult reduce_field(const FieldExpr &x, const RelationSet &rel,
                               const AlgebraPresentation &pres) {
  // flatten the T-decorated letters, then augment the relations with the
  // markers of functions whose differential already lies in the ideal
  // (T i(g) = S j(D g) = 0 whenever D g does): sound and terminating
  FieldExpr flat;
  int maxt = 0;
  for (auto &[w, c] : x.terms) {
    auto [nw, nc] = flatten_term(w, c);
    flat.add_term(nw, nc);
    maxt = std::max(maxt, max_t_degree(nc));
  }
  RelationSet lifted = lift_relations(rel, maxt);
  if (maxt > 0 && pres.anchored) {
    std::set<DerivedFunction> bases;
    for (auto &[w, c] : flat.terms)
      for (auto &[m, q] : c.terms)
        for (auto &[f, e] : m.factors)
          if (!f.is_scalar() && f.fn().tpow >= 1) {
            DerivedFunction g = f.fn();
            int tp = g.tpow;
            g.tpow = 0;
            bases.insert(g);
            (void)tp;
          }
    for (auto &g : bases) {
      bool null_diff = true;
      for (int v = 0; v < 2 && null_diff; ++v)
        for (int r = 1; r <= pres.geom.rank && null_diff; ++r) {
          AnchorDir d = v ? upper(r) : lower(r);
          CoeffPoly dg = derive_instance_dir(g, d, pres.geom);
          if (!reduce(dg, rel, pres.geom).reduced) null_diff = false;
        }
      if (null_diff) {
        for (int k = 1; k <= maxt; ++k) {
          DerivedFunction tg = g;
          tg.tpow = k;
          lifted.add(CoeffPoly::func(tg), "T-null(" + to_string(g) + ")");
        }
      }
    }
  }
  FieldReduceResult out;
  std::set<std::string> used;
  out.reduced = true;
  for (auto &[w, c] : flat.terms) {
    ReduceResult rr = reduce(c, lifted, pres.geom);
    if (!rr.reduced) {
      out.reduced = false;
      out.normal_form.add_term(w, rr.normal_form);
    }
    used.insert(rr.used.begin(), rr.used.end());
  }
  out.used.assign(used.begin(), used.end());
  return out;
}

FieldReduceResult reduce_lambda(const LambdaPoly &x, const RelationSet &rel,
                                const AlgebraPresentation &pres) {
  FieldReduceResult out;
  out.reduced = true;
  std::set<std::string> used;
  for (auto &[m, v] : x.terms) {
    FieldReduceResult fr = reduce_field(v, rel, pres);
    if (!fr.reduced) {
      out.reduced = false;
      out.normal_form += fr.normal_form;
    }
    used.insert(fr.used.begin(), fr.used.end());
  }
  out.used.assign(used.begin(), used.end());
  return out;
}

FrameChange change_frame(int rank, FrameOptions opt) {
  FrameChange fc;
  fc.pres = courant_frame(rank, opt);
  AlgebraPresentation &P = fc.pres;
  BracketContext ctx(P);

  auto rho_sym = std::make_shared<FunctionSymbol>(
      "rho", std::vector<Variance>{Variance::Lower, Variance::Upper}, rank);
  auto rho = [&](int i, int j) {
    return CoeffPoly::func(DerivedFunction{rho_sym, {i, j}, {}});
  };
  CoeffPoly det;
  if (rank == 1) {
    det = rho(1, 1);
  } else if (rank == 2) {
    det = rho(1, 1) * rho(2, 2) - rho(1, 2) * rho(2, 1);
  } else {
    throw std::runtime_error("change_frame: rank must be 1 or 2");
  }
  auto detinv_sym = std::make_shared<FunctionSymbol>(
      "detinv", std::vector<Variance>{}, rank);
  detinv_sym->inverse_of = std::make_shared<CoeffPoly>(det);
  CoeffPoly detinv = CoeffPoly::func(DerivedFunction{detinv_sym, {}, {}});

  // star[i][j] = cofactor(i,j) * detinv, so that sum_i star[i][j] rho[i][k]
  // = delta_{jk}
  std::vector<std::vector<CoeffPoly>> star(rank + 1,
                                           std::vector<CoeffPoly>(rank + 1));
  if (rank == 1) {
    star[1][1] = detinv;
  } else {
    star[1][1] = rho(2, 2) * detinv;
    star[1][2] = -(rho(2, 1) * detinv);
    star[2][1] = -(rho(1, 2) * detinv);
    star[2][2] = rho(1, 1) * detinv;
  }

  FieldExpr jprime;
  for (int i = 1; i <= rank; ++i)
    for (int j = 1; j <= rank; ++j) {
      if (star[i][j].is_zero()) continue;
      FieldExpr left = star[i][j] * FieldExpr::atom(gen_atom(P.upper_gen(j)));
      FieldExpr right;
      for (int k = 1; k <= rank; ++k)
        right += rho(i, k) * FieldExpr::atom(gen_atom(P.lower_gen(k)));
      jprime += (half() * I()) * nop(left, right, ctx);
    }
  FieldExpr j0 = build_J(P, ctx);
  fc.defect = canonicalize(jprime - j0, ctx);
  fc.expected = canonicalize(
      I() * nop(FieldExpr::coeff(det),
                apply_T(FieldExpr::coeff(detinv), ctx), ctx),
      ctx);

  fc.det = det;
  fc.detinv = detinv;
  fc.const_det.multiplier_degree = 2;
  fc.const_det.prolongation_order = 1;
  for (int v = 0; v < 2; ++v)
    for (int r = 1; r <= rank; ++r) {
      AnchorDir d = v ? upper(r) : lower(r);
      CoeffPoly g = anchor_derive(det, d, P.geom);
      if (!g.is_zero()) fc.const_det.add(g, "const_det:" + to_string(d));
    }
  fc.const_det.prolong(P.geom);
  return fc;
}

}  // namespace susyopal
