#include "susyopal/expr.hpp"

#include <sstream>

namespace susyopal {

bool operator<(const Atom &a, const Atom &b) { return atom_less(a, b); }

bool atom_less(const Atom &a, const Atom &b) {
  if (a.is_gen() != b.is_gen()) return !a.is_gen();  // function atoms first
  if (!a.is_gen()) {
    if (a.prefix_weight() != b.prefix_weight())
      return a.prefix_weight() < b.prefix_weight();
    if (a.tpow != b.tpow) return a.tpow < b.tpow;
    return a.fn < b.fn;
  }
  if (a.prefix_weight() != b.prefix_weight())
    return a.prefix_weight() < b.prefix_weight();
  if (a.tpow != b.tpow) return a.tpow < b.tpow;
  return a.gen < b.gen;
}

FieldExpr FieldExpr::vacuum(GaussQ c) {
  FieldExpr x;
  if (!c.is_zero()) x.terms.emplace(NOWord{}, CoeffPoly(c));
  return x;
}

FieldExpr FieldExpr::coeff(CoeffPoly c) {
  FieldExpr x;
  if (!c.is_zero()) x.terms.emplace(NOWord{}, std::move(c));
  return x;
}

FieldExpr FieldExpr::atom(Atom a, CoeffPoly c) {
  FieldExpr x;
  if (!c.is_zero()) x.terms.emplace(NOWord{a}, std::move(c));
  return x;
}

void FieldExpr::add_term(const NOWord &w, const CoeffPoly &c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms.emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms.erase(it);
  }
}

FieldExpr FieldExpr::operator-() const {
  FieldExpr out;
  for (auto &[w, c] : terms) out.terms.emplace(w, -c);
  return out;
}

FieldExpr &FieldExpr::operator+=(const FieldExpr &o) {
  for (auto &[w, c] : o.terms) add_term(w, c);
  return *this;
}

FieldExpr &FieldExpr::operator-=(const FieldExpr &o) {
  for (auto &[w, c] : o.terms) add_term(w, -c);
  return *this;
}

FieldExpr operator*(const CoeffPoly &c, const FieldExpr &x) {
  FieldExpr out;
  for (auto &[w, k] : x.terms) out.add_term(w, c * k);
  return out;
}

FieldExpr operator*(const GaussQ &c, const FieldExpr &x) {
  if (c.is_zero()) return {};
  FieldExpr out;
  for (auto &[w, k] : x.terms) out.terms.emplace(w, c * k);
  return out;
}

void LambdaPoly::add(const ParamMono &m, const FieldExpr &x) {
  if (x.is_zero()) return;
  auto [it, fresh] = terms.emplace(m, x);
  if (!fresh) {
    it->second += x;
    if (it->second.is_zero()) terms.erase(it);
  }
}

LambdaPoly LambdaPoly::operator-() const {
  LambdaPoly out;
  for (auto &[m, x] : terms) out.terms.emplace(m, -x);
  return out;
}

LambdaPoly &LambdaPoly::operator+=(const LambdaPoly &o) {
  for (auto &[m, x] : o.terms) add(m, x);
  return *this;
}

LambdaPoly &LambdaPoly::operator-=(const LambdaPoly &o) {
  for (auto &[m, x] : o.terms) add(m, -x);
  return *this;
}

LambdaPoly operator*(const GaussQ &c, const LambdaPoly &p) {
  if (c.is_zero()) return {};
  LambdaPoly out;
  for (auto &[m, x] : p.terms) out.terms.emplace(m, c * x);
  return out;
}

LambdaPoly operator*(const CoeffPoly &c, const LambdaPoly &p) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms) out.add(m, c * x);
  return out;
}

LambdaPoly LambdaPoly::to_gamma() const {
  LambdaPoly out;
  for (auto &[m, x] : terms) {
    ParamMono g{0, 0, m.j + m.k, m.J + m.K};
    out.add(g, x);
  }
  return out;
}

LambdaPoly LambdaPoly::to_lambda() const {
  LambdaPoly out;
  for (auto &[m, x] : terms) {
    ParamMono g{m.j + m.k, m.J + m.K, 0, 0};
    out.add(g, x);
  }
  return out;
}

LambdaPoly mul_lambda(const LambdaPoly &p, int power) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms)
    out.add(ParamMono{m.j + power, m.J, m.k, m.K}, x);
  return out;
}

LambdaPoly mul_gamma(const LambdaPoly &p, int power) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms)
    out.add(ParamMono{m.j, m.J, m.k + power, m.K}, x);
  return out;
}

LambdaPoly mul_chi(const LambdaPoly &p) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms) {
    if (m.J == 0) {
      out.add(ParamMono{m.j, 1, m.k, m.K}, x);
    } else {
      // chi * chi = -lambda
      out.add(ParamMono{m.j + 1, 0, m.k, m.K}, -x);
    }
  }
  return out;
}

LambdaPoly mul_eta(const LambdaPoly &p) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms) {
    int sgn = m.J ? -1 : 1;  // eta past chi
    if (m.K == 0) {
      out.add(ParamMono{m.j, m.J, m.k, 1}, GaussQ(sgn) * x);
    } else {
      // eta * eta = -gamma
      out.add(ParamMono{m.j, m.J, m.k + 1, 0}, GaussQ(-sgn) * x);
    }
  }
  return out;
}

LambdaPoly mul_chi_star(const LambdaPoly &p) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms) {
    if (m.J == 0) {
      out.add(ParamMono{m.j, 1, m.k, m.K}, x);
    } else {
      out.add(ParamMono{m.j + 1, 0, m.k, m.K}, x);  // no sign: twisted
    }
  }
  return out;
}

LambdaPoly mul_eta_star(const LambdaPoly &p) {
  LambdaPoly out;
  for (auto &[m, x] : p.terms) {
    if (m.K == 0) {
      out.add(ParamMono{m.j, m.J, m.k, 1}, x);
    } else {
      out.add(ParamMono{m.j, m.J, m.k + 1, 0}, x);  // no sign: twisted
    }
  }
  return out;
}

LambdaPoly mul_prefix(const ParamMono &pre, const LambdaPoly &p) {
  LambdaPoly out = p;
  // multiply the odd parts first (they sit closest to the coefficient),
  // then the even powers, all from the left
  if (pre.K) out = mul_eta(out);
  if (pre.J) out = mul_chi(out);
  if (pre.k) out = mul_gamma(out, pre.k);
  if (pre.j) out = mul_lambda(out, pre.j);
  return out;
}

Parity ParityTable::atom_parity(const Atom &a) const {
  Parity base = a.is_gen() ? gen_parity[a.gen] : Parity::Even;
  return a.spow ? base + Parity::Odd : base;
}

Parity ParityTable::word_parity(const NOWord &w) const {
  Parity p = Parity::Even;
  for (auto &a : w) p = p + atom_parity(a);
  return p;
}

std::optional<Parity> ParityTable::expr_parity(const FieldExpr &x) const {
  std::optional<Parity> p;
  for (auto &[w, c] : x.terms) {
    Parity q = word_parity(w);
    if (!p) {
      p = q;
    } else if (*p != q) {
      return std::nullopt;
    }
  }
  return p;
}

std::string to_string(const NOWord &w, const std::vector<std::string> &gen_names) {
  if (w.empty()) return "|0>";
  std::ostringstream os;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) os << " ";
    const Atom &a = w[i];
    for (int t = 0; t < a.tpow; ++t) os << "T";
    if (a.spow) os << "S";
    if (a.prefix_weight()) os << ".";
    os << (a.is_gen() ? gen_names[a.gen] : to_string(*a.fn));
  }
  return os.str();
}

}  // namespace susyopal
