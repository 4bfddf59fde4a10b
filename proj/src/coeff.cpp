#include "susyopal/coeff.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>
#include <stdexcept>

namespace susyopal {

std::string to_string(const GaussQ &q) {
  std::ostringstream os;
  if (q.im == 0) {
    os << q.re;
  } else if (q.re == 0) {
    os << q.im << "*i";
  } else {
    os << "(" << q.re << (q.im > 0 ? "+" : "-")
       << (q.im > 0 ? q.im : Q(-q.im)) << "*i)";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Monomials
// ---------------------------------------------------------------------------

int Monomial::degree() const {
  int d = 0;
  for (auto &[f, e] : factors) d += e;
  return d;
}

int Monomial::function_degree() const {
  int d = 0;
  for (auto &[f, e] : factors)
    if (!f.is_scalar()) d += e;
  return d;
}

int Monomial::scalar_degree() const {
  int d = 0;
  for (auto &[f, e] : factors)
    if (f.is_scalar()) d += e;
  return d;
}

Monomial mono_mul(const Monomial &a, const Monomial &b) {
  Monomial out;
  auto ia = a.factors.begin(), ib = b.factors.begin();
  while (ia != a.factors.end() || ib != b.factors.end()) {
    if (ib == b.factors.end() || (ia != a.factors.end() && ia->first < ib->first)) {
      out.factors.push_back(*ia++);
    } else if (ia == a.factors.end() || ib->first < ia->first) {
      out.factors.push_back(*ib++);
    } else {
      out.factors.emplace_back(ia->first, ia->second + ib->second);
      ++ia, ++ib;
    }
  }
  return out;
}

std::optional<Monomial> mono_div(const Monomial &a, const Monomial &b) {
  Monomial out;
  auto ia = a.factors.begin();
  for (auto &[f, e] : b.factors) {
    while (ia != a.factors.end() && ia->first < f) out.factors.push_back(*ia++);
    if (ia == a.factors.end() || !(ia->first == f) || ia->second < e)
      return std::nullopt;
    if (ia->second > e) out.factors.emplace_back(f, ia->second - e);
    ++ia;
  }
  while (ia != a.factors.end()) out.factors.push_back(*ia++);
  return out;
}

// ---------------------------------------------------------------------------
// CoeffPoly arithmetic
// ---------------------------------------------------------------------------

CoeffPoly CoeffPoly::scalar(const std::string &name) {
  CoeffPoly p;
  Monomial m;
  m.factors.push_back({Factor{name}, 1});
  p.terms.emplace(std::move(m), GaussQ(1));
  return p;
}

CoeffPoly CoeffPoly::func(DerivedFunction f) {
  CoeffPoly p;
  Monomial m;
  m.factors.push_back({Factor{std::move(f)}, 1});
  p.terms.emplace(std::move(m), GaussQ(1));
  return p;
}

void CoeffPoly::add_term(const Monomial &m, const GaussQ &c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms.erase(it);
  }
}

CoeffPoly CoeffPoly::operator-() const {
  CoeffPoly out;
  for (auto &[m, c] : terms) out.terms.emplace(m, -c);
  return out;
}

CoeffPoly &CoeffPoly::operator+=(const CoeffPoly &o) {
  for (auto &[m, c] : o.terms) add_term(m, c);
  return *this;
}

CoeffPoly &CoeffPoly::operator-=(const CoeffPoly &o) {
  for (auto &[m, c] : o.terms) add_term(m, -c);
  return *this;
}

CoeffPoly operator*(const CoeffPoly &a, const CoeffPoly &b) {
  CoeffPoly out;
  for (auto &[ma, ca] : a.terms)
    for (auto &[mb, cb] : b.terms) out.add_term(mono_mul(ma, mb), ca * cb);
  return out;
}

CoeffPoly operator*(const GaussQ &c, CoeffPoly p) {
  if (c.is_zero()) return CoeffPoly();
  CoeffPoly out;
  for (auto &[m, k] : p.terms) out.terms.emplace(m, c * k);
  return out;
}

CoeffPoly apply_rules(const CoeffPoly &p, const CoeffRules &rules) {
  if (rules.reciprocal_scalars.empty()) return p;
  CoeffPoly out;
  for (auto &[m, c] : p.terms) {
    Monomial mm = m;
    for (auto &[a, b] : rules.reciprocal_scalars) {
      int ea = 0, eb = 0;
      for (auto &[f, e] : mm.factors) {
        if (f.is_scalar() && f.scalar() == a) ea = e;
        if (f.is_scalar() && f.scalar() == b) eb = e;
      }
      int cancel = std::min(ea, eb);
      if (cancel > 0) {
        std::vector<std::pair<Factor, int>> nf;
        for (auto &[f, e] : mm.factors) {
          int keep = e;
          if (f.is_scalar() && (f.scalar() == a || f.scalar() == b))
            keep = e - cancel;
          if (keep > 0) nf.emplace_back(f, keep);
        }
        mm.factors = std::move(nf);
      }
    }
    out.add_term(mm, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frame geometry
// ---------------------------------------------------------------------------

namespace {

// antisymmetry normalization: returns (sign, sorted indices) or 0
int normalize_antisym(const FunctionSymbol &sym, std::vector<int> &idx) {
  if (!sym.antisym) return 1;
  auto [a, b] = *sym.antisym;
  if (idx[a] == idx[b]) return 0;
  if (idx[a] > idx[b]) {
    std::swap(idx[a], idx[b]);
    return -1;
  }
  return 1;
}

}  // namespace

CoeffPoly FrameGeometry::inst_low(int i, int j, int k) const {
  if (regular) return CoeffPoly();
  std::vector<int> idx{i, j, k};
  int s = normalize_antisym(*c_low, idx);
  if (s == 0) return CoeffPoly();
  return GaussQ(s) * CoeffPoly::func(DerivedFunction{c_low, idx, {}});
}

CoeffPoly FrameGeometry::inst_up(int i, int j, int k) const {
  if (regular) return CoeffPoly();
  std::vector<int> idx{i, j, k};
  int s = normalize_antisym(*c_up, idx);
  if (s == 0) return CoeffPoly();
  return GaussQ(s) * CoeffPoly::func(DerivedFunction{c_up, idx, {}});
}

std::vector<std::pair<CoeffPoly, AnchorDir>> FrameGeometry::frame_bracket(
    AnchorDir a, AnchorDir b) const {
  std::vector<std::pair<CoeffPoly, AnchorDir>> out;
  if (regular) return out;
  auto push = [&](CoeffPoly c, AnchorDir d) {
    if (!c.is_zero()) out.emplace_back(std::move(c), d);
  };
  if (a.var == Variance::Lower && b.var == Variance::Lower) {
    // [e_i, e_j] = c^k_{ij} e_k
    for (int k = 1; k <= rank; ++k) push(inst_low(k, a.index, b.index), lower(k));
  } else if (a.var == Variance::Upper && b.var == Variance::Upper) {
    // [e^i, e^j] = c^{ij}_k e^k
    for (int k = 1; k <= rank; ++k) push(inst_up(a.index, b.index, k), upper(k));
  } else if (a.var == Variance::Lower) {
    // [e_j, e^i] = c^{ik}_j e_k - c^i_{jk} e^k
    int j = a.index, i = b.index;
    for (int k = 1; k <= rank; ++k) {
      push(inst_up(i, k, j), lower(k));
      push(-inst_low(i, j, k), upper(k));
    }
  } else {
    // [e^i, e_j] = -[e_j, e^i]
    int i = a.index, j = b.index;
    for (int k = 1; k <= rank; ++k) {
      push(-inst_up(i, k, j), lower(k));
      push(inst_low(i, j, k), upper(k));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derivative-word normalization and the anchor derivative
// ---------------------------------------------------------------------------

namespace {

CoeffPoly normalize_word(const DerivedFunction &f, const FrameGeometry &geom);

CoeffPoly derive_instance(const DerivedFunction &f, AnchorDir dir,
                          const FrameGeometry &geom) {
  if (f.sym->constant) return CoeffPoly();
  if (f.sym->inverse_of) {
    // d(1/p) = -(1/p)^2 dp
    assert(f.word.empty());
    CoeffPoly sq = CoeffPoly::func(f) * CoeffPoly::func(f);
    return -(sq * anchor_derive(*f.sym->inverse_of, dir, geom));
  }
  DerivedFunction g = f;
  g.word.push_back(dir);
  return normalize_word(g, geom);
}

CoeffPoly normalize_word(const DerivedFunction &f, const FrameGeometry &geom) {
  for (size_t p = 0; p + 1 < f.word.size(); ++p) {
    if (f.word[p + 1] < f.word[p]) {
      AnchorDir a = f.word[p], b = f.word[p + 1];
      DerivedFunction swapped = f;
      std::swap(swapped.word[p], swapped.word[p + 1]);
      CoeffPoly res = normalize_word(swapped, geom);
      // original - swapped = pi(outer) o pi([E_b, E_a]) o pi(inner)
      std::vector<AnchorDir> inner(f.word.begin(), f.word.begin() + p);
      std::vector<AnchorDir> outer(f.word.begin() + p + 2, f.word.end());
      for (auto &[coef, dir] : geom.frame_bracket(b, a)) {
        DerivedFunction g{f.sym, f.indices, inner};
        g.word.push_back(dir);
        CoeffPoly h = coef * normalize_word(g, geom);
        for (AnchorDir d : outer) h = anchor_derive(h, d, geom);
        res += h;
      }
      return res;
    }
  }
  return CoeffPoly::func(f);
}

}  // namespace

CoeffPoly derived_instance(const DerivedFunction &f, const FrameGeometry &geom) {
  return normalize_word(f, geom);
}

CoeffPoly derive_instance_dir(const DerivedFunction &f, AnchorDir dir,
                              const FrameGeometry &geom) {
  return derive_instance(f, dir, geom);
}

CoeffPoly t_lift(const CoeffPoly &p) {
  CoeffPoly out;
  for (auto &[m, c] : p.terms) {
    for (size_t pos = 0; pos < m.factors.size(); ++pos) {
      if (m.factors[pos].first.is_scalar()) continue;
      DerivedFunction tf = m.factors[pos].first.fn();
      tf.tpow += 1;
      int e = m.factors[pos].second;
      Monomial rest = m;
      if (rest.factors[pos].second > 1)
        rest.factors[pos].second -= 1;
      else
        rest.factors.erase(rest.factors.begin() + pos);
      CoeffPoly term;
      term.terms.emplace(rest, c * GaussQ(e));
      out += term * CoeffPoly::func(tf);
    }
  }
  return out;
}

CoeffPoly anchor_derive(const CoeffPoly &p, AnchorDir dir,
                        const FrameGeometry &geom) {
  CoeffPoly out;
  for (auto &[m, c] : p.terms) {
    for (size_t pos = 0; pos < m.factors.size(); ++pos) {
      auto &[fac, exp] = m.factors[pos];
      if (fac.is_scalar()) continue;
      CoeffPoly df = derive_instance(fac.fn(), dir, geom);
      if (df.is_zero()) continue;
      Monomial rest;
      for (size_t q = 0; q < m.factors.size(); ++q) {
        if (q == pos) {
          if (exp > 1) rest.factors.emplace_back(fac, exp - 1);
        } else {
          rest.factors.push_back(m.factors[q]);
        }
      }
      CoeffPoly restp;
      restp.terms.emplace(rest, c * GaussQ(exp));
      out += restp * df;
    }
  }
  return out;
}

CoeffPoly reorder_derivatives(const CoeffPoly &p, const FrameGeometry &geom) {
  CoeffPoly out;
  for (auto &[m, c] : p.terms) {
    CoeffPoly prod(c);
    for (auto &[fac, exp] : m.factors) {
      CoeffPoly base = fac.is_scalar() ? CoeffPoly::scalar(fac.scalar())
                                       : normalize_word(fac.fn(), geom);
      for (int e = 0; e < exp; ++e) prod = prod * base;
    }
    out += prod;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relation reduction
// ---------------------------------------------------------------------------

void RelationSet::add(CoeffPoly g, std::string label) {
  if (g.is_zero()) return;
  generators.push_back(std::move(g));
  labels.push_back(std::move(label));
}

void RelationSet::prolong(const FrameGeometry &geom) {
  if (!geom.enabled()) return;
  size_t base = generators.size();
  std::vector<CoeffPoly> frontier = generators;
  std::vector<std::string> fl = labels;
  for (int ord = 1; ord <= prolongation_order; ++ord) {
    std::vector<CoeffPoly> next;
    std::vector<std::string> nl;
    for (size_t gi = 0; gi < frontier.size(); ++gi) {
      for (int v = 0; v < 2; ++v) {
        for (int i = 1; i <= geom.rank; ++i) {
          AnchorDir d = v == 0 ? lower(i) : upper(i);
          CoeffPoly dg = anchor_derive(frontier[gi], d, geom);
          if (!dg.is_zero()) {
            next.push_back(dg);
            nl.push_back(fl[gi] + "," + to_string(d));
          }
        }
      }
    }
    for (size_t k = 0; k < next.size(); ++k) {
      generators.push_back(next[k]);
      labels.push_back(nl[k]);
    }
    frontier = std::move(next);
    fl = std::move(nl);
  }
  (void)base;
}

namespace {

struct EchelonRow {
  CoeffPoly poly;                 // normalized: leading coefficient 1
  Monomial lead;                  // largest monomial
  std::set<std::string> sources;  // generator labels feeding this row
};

Monomial leading(const CoeffPoly &p) { return p.terms.rbegin()->first; }

// subtract multiples of basis rows; returns remainder and records used rows
CoeffPoly row_reduce(CoeffPoly p, const std::map<Monomial, EchelonRow> &basis,
                     std::set<std::string> *used) {
  bool progress = true;
  while (progress && !p.is_zero()) {
    progress = false;
    // scan from the largest monomial down
    for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) {
      auto bit = basis.find(it->first);
      if (bit != basis.end()) {
        GaussQ c = it->second;
        CoeffPoly sub;
        for (auto &[m, k] : bit->second.poly.terms) sub.add_term(m, c * k);
        p -= sub;
        if (used)
          used->insert(bit->second.sources.begin(), bit->second.sources.end());
        progress = true;
        break;
      }
    }
  }
  return p;
}

}  // namespace

ReduceResult reduce(const CoeffPoly &p, const RelationSet &rel,
                    const FrameGeometry &geom) {
  (void)geom;
  ReduceResult rr;
  if (p.is_zero()) {
    rr.reduced = true;
    return rr;
  }
  if (rel.empty()) {
    rr.normal_form = p;
    rr.reduced = false;
    return rr;
  }

  int max_scalar = 0;
  for (auto &[m, c] : p.terms)
    max_scalar = std::max(max_scalar, m.scalar_degree());

  // symbolic preprocessing: multiplier monomials drawn from divisors of the
  // working support, function degree bounded by the declared multiplier degree
  std::set<Monomial> support;
  for (auto &[m, c] : p.terms) support.insert(m);
  std::set<std::pair<size_t, Monomial>> seen;
  std::vector<std::pair<CoeffPoly, size_t>> candidates;

  const int rounds = 3;
  const size_t cand_cap = 60000;
  for (int round = 0; round < rounds; ++round) {
    std::set<Monomial> fresh;
    for (size_t gi = 0; gi < rel.generators.size(); ++gi) {
      const CoeffPoly &r = rel.generators[gi];
      for (auto &[q, qc] : r.terms) {
        for (const Monomial &s : support) {
          auto m = mono_div(s, q);
          if (!m) continue;
          if (m->function_degree() > rel.multiplier_degree) continue;
          if (m->scalar_degree() > max_scalar) continue;
          auto key = std::make_pair(gi, *m);
          if (seen.count(key)) continue;
          seen.insert(key);
          CoeffPoly cand;
          CoeffPoly mul;
          mul.terms.emplace(*m, GaussQ(1));
          cand = mul * r;
          for (auto &[cm, cc] : cand.terms)
            if (!support.count(cm)) fresh.insert(cm);
          candidates.emplace_back(std::move(cand), gi);
          if (candidates.size() > cand_cap)
            throw std::runtime_error("reduce: candidate explosion");
        }
      }
    }
    if (fresh.empty()) break;
    support.insert(fresh.begin(), fresh.end());
  }

  // echelonize candidates
  std::map<Monomial, EchelonRow> basis;
  for (auto &[cand, gi] : candidates) {
    std::set<std::string> srcs{rel.labels[gi]};
    CoeffPoly red = cand;
    // reduce against current basis, merging sources of used rows
    bool progress = true;
    while (progress && !red.is_zero()) {
      progress = false;
      for (auto it = red.terms.rbegin(); it != red.terms.rend(); ++it) {
        auto bit = basis.find(it->first);
        if (bit != basis.end()) {
          GaussQ c = it->second;
          CoeffPoly sub;
          for (auto &[m, k] : bit->second.poly.terms) sub.add_term(m, c * k);
          red -= sub;
          srcs.insert(bit->second.sources.begin(), bit->second.sources.end());
          progress = true;
          break;
        }
      }
    }
    if (red.is_zero()) continue;
    Monomial lead = leading(red);
    GaussQ lc = red.terms.rbegin()->second;
    CoeffPoly norm;
    GaussQ inv = GaussQ(1) / lc;
    for (auto &[m, c] : red.terms) norm.terms.emplace(m, inv * c);
    basis.emplace(lead, EchelonRow{std::move(norm), lead, std::move(srcs)});
  }

  std::set<std::string> used;
  rr.normal_form = row_reduce(p, basis, &used);
  rr.reduced = rr.normal_form.is_zero();
  rr.used.assign(used.begin(), used.end());
  return rr;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string to_string(const AnchorDir &d) {
  return (d.var == Variance::Lower ? "d" : "u") + std::to_string(d.index);
}

std::string to_string(const DerivedFunction &f) {
  std::ostringstream os;
  for (int t = 0; t < f.tpow; ++t) os << "T.";
  os << f.sym->name;
  if (!f.indices.empty()) {
    os << "[";
    for (size_t i = 0; i < f.indices.size(); ++i) {
      if (i) os << ",";
      os << (f.sym->slots[i] == Variance::Upper ? "^" : "_") << f.indices[i];
    }
    os << "]";
  }
  if (!f.word.empty()) {
    os << "{";
    for (size_t i = 0; i < f.word.size(); ++i) {
      if (i) os << ",";
      os << to_string(f.word[i]);
    }
    os << "}";
  }
  return os.str();
}

std::string to_string(const Monomial &m) {
  if (m.is_one()) return "1";
  std::ostringstream os;
  bool first = true;
  for (auto &[f, e] : m.factors) {
    if (!first) os << "*";
    first = false;
    os << (f.is_scalar() ? f.scalar() : to_string(f.fn()));
    if (e > 1) os << "^" << e;
  }
  return os.str();
}

std::string to_string(const CoeffPoly &p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto &[m, c] : p.terms) {
    if (!first) os << " + ";
    first = false;
    os << to_string(c);
    if (!m.is_one()) os << "*" << to_string(m);
  }
  return os.str();
}

}  // namespace susyopal
