#include "zground/term.hpp"

#include <algorithm>
#include <boost/functional/hash.hpp>
#include <stdexcept>

namespace zground {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  boost::hash_combine(seed, v);
  return seed;
}

}  // namespace

Term Term::num(Int value) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Num;
  node->value = std::move(value);
  node->sort = Signature::kInt;
  node->ground = true;
  node->hash = mix(0x9e01, boost::hash<Int>()(node->value));
  return Term(std::move(node));
}

Term Term::var(std::string name, SortId sort) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Var;
  node->head = std::move(name);
  node->sort = sort;
  node->ground = false;
  node->hash = mix(mix(0x9e02, std::hash<std::string>()(node->head)), sort);
  return Term(std::move(node));
}

Term Term::app(std::string head, std::vector<Term> args, SortId sort) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::App;
  node->head = std::move(head);
  node->args = std::move(args);
  node->sort = sort;
  node->ground = true;
  std::size_t h = mix(0x9e03, std::hash<std::string>()(node->head));
  for (const Term& a : node->args) {
    node->ground = node->ground && a.is_ground();
    h = mix(h, a.hash());
  }
  node->hash = mix(h, sort);
  return Term(std::move(node));
}

Term Term::constant(std::string name, SortId sort) {
  return app(std::move(name), {}, sort);
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.sort() != b.sort())
    return false;
  switch (a.kind()) {
    case Term::Kind::Num:
      return a.value() == b.value();
    case Term::Kind::Var:
      return a.head() == b.head();
    case Term::Kind::App: {
      if (a.head() != b.head() || a.args().size() != b.args().size())
        return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!(a.args()[i] == b.args()[i])) return false;
      return true;
    }
  }
  return false;
}

int Term::compare(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return 0;
  auto rank = [](Kind k) {
    switch (k) {
      case Kind::Num: return 0;
      case Kind::Var: return 1;
      case Kind::App: return 2;
    }
    return 3;
  };
  if (rank(a.kind()) != rank(b.kind()))
    return rank(a.kind()) < rank(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Kind::Num: {
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    }
    case Kind::Var: {
      int c = a.head().compare(b.head());
      if (c != 0) return c < 0 ? -1 : 1;
      if (a.sort() != b.sort()) return a.sort() < b.sort() ? -1 : 1;
      return 0;
    }
    case Kind::App: {
      int c = a.head().compare(b.head());
      if (c != 0) return c < 0 ? -1 : 1;
      if (a.args().size() != b.args().size())
        return a.args().size() < b.args().size() ? -1 : 1;
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        c = compare(a.args()[i], b.args()[i]);
        if (c != 0) return c;
      }
      if (a.sort() != b.sort()) return a.sort() < b.sort() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

std::string Term::str() const {
  switch (kind()) {
    case Kind::Num:
      return value().str();
    case Kind::Var:
      return head();
    case Kind::App: {
      if (args().empty()) return head();
      std::string out = "(" + head();
      for (const Term& a : args()) {
        out += ' ';
        out += a.str();
      }
      out += ')';
      return out;
    }
  }
  return "?";
}

bool Atom::is_ground() const {
  if (kind == AtomKind::InImage) return lhs.is_ground();
  return lhs.is_ground() && rhs.is_ground();
}

std::string Atom::str() const {
  switch (kind) {
    case AtomKind::Eq:
      return "(eq " + lhs.str() + ' ' + rhs.str() + ')';
    case AtomKind::Leq:
      return "(le " + lhs.str() + ' ' + rhs.str() + ')';
    case AtomKind::InImage:
      return "(in-image " + lhs.str() + ' ' + fn + ')';
  }
  return "?";
}

bool operator==(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) return false;
  if (!(a.lhs == b.lhs)) return false;
  if (a.kind == AtomKind::InImage) return a.fn == b.fn;
  return a.rhs == b.rhs;
}

int Atom::compare(const Atom& a, const Atom& b) {
  auto rank = [](AtomKind k) {
    switch (k) {
      case AtomKind::Eq: return 0;
      case AtomKind::Leq: return 1;
      case AtomKind::InImage: return 2;
    }
    return 3;
  };
  if (rank(a.kind) != rank(b.kind))
    return rank(a.kind) < rank(b.kind) ? -1 : 1;
  int c = Term::compare(a.lhs, b.lhs);
  if (c != 0) return c;
  if (a.kind == AtomKind::InImage) {
    c = a.fn.compare(b.fn);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  return Term::compare(a.rhs, b.rhs);
}

bool is_arith_atom(const Atom& a) {
  switch (a.kind) {
    case AtomKind::Leq:
      return true;
    case AtomKind::Eq:
      return a.lhs.sort() == Signature::kInt &&
             a.rhs.sort() == Signature::kInt;
    case AtomKind::InImage:
      return false;
  }
  return false;
}

std::string Substitution::str() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : map_) {
    if (!first) out += ", ";
    first = false;
    out += v + " -> " + t.str();
  }
  out += '}';
  return out;
}

Term apply_substitution(const Term& t, const Substitution& s) {
  if (t.is_ground() || s.empty()) return t;
  switch (t.kind()) {
    case Term::Kind::Num:
      return t;
    case Term::Kind::Var: {
      const Term* image = s.find(t.head());
      return image ? *image : t;
    }
    case Term::Kind::App: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      bool changed = false;
      for (const Term& a : t.args()) {
        Term na = apply_substitution(a, s);
        changed = changed || !(na == a);
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      return Term::app(t.head(), std::move(args), t.sort());
    }
  }
  return t;
}

Atom apply_substitution(const Atom& a, const Substitution& s) {
  Atom out = a;
  out.lhs = apply_substitution(a.lhs, s);
  if (a.kind != AtomKind::InImage) out.rhs = apply_substitution(a.rhs, s);
  return out;
}

namespace {

bool is_neg_node(const Term& t) {
  return t.is_app() && t.head() == "-" && t.args().size() == 1;
}
bool is_sum_node(const Term& t) {
  return t.is_app() && t.head() == "+";
}

/// Signed multiset of non-numeral summands plus a numeral offset.
struct SumParts {
  std::map<Term, Int, TermLess> coeffs;
  Int offset = 0;
};

void collect(const Term& t, int sign, SumParts& parts);

/// Folds an already-normalized term into the sum accumulator.
void fold_normal(const Term& n, int sign, SumParts& parts) {
  if (n.is_num()) {
    parts.offset += sign * n.value();
  } else if (is_sum_node(n)) {
    for (const Term& a : n.args()) fold_normal(a, sign, parts);
  } else if (is_neg_node(n)) {
    parts.coeffs[n.args()[0]] -= sign;
  } else {
    parts.coeffs[n] += sign;
  }
}

void collect(const Term& t, int sign, SumParts& parts) {
  fold_normal(normalize_numerals(t), sign, parts);
}

Term rebuild(SumParts& parts) {
  std::vector<Term> summands;
  for (const auto& [base, coeff] : parts.coeffs) {
    if (coeff == 0) continue;
    Term unit = coeff > 0 ? base : Term::app("-", {base}, Signature::kInt);
    Int n = boost::multiprecision::abs(coeff);
    for (Int i = 0; i < n; ++i) summands.push_back(unit);
  }
  std::stable_sort(summands.begin(), summands.end(), TermLess());
  if (summands.empty()) return Term::num(parts.offset);
  if (parts.offset == 0 && summands.size() == 1) return summands[0];
  if (parts.offset != 0) summands.push_back(Term::num(parts.offset));
  if (summands.size() == 1) return summands[0];
  return Term::app("+", std::move(summands), Signature::kInt);
}

}  // namespace

Term normalize_numerals(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Num:
    case Term::Kind::Var:
      return t;
    case Term::Kind::App: {
      if (is_sum_node(t) || is_neg_node(t)) {
        SumParts parts;
        if (is_sum_node(t)) {
          for (const Term& a : t.args()) collect(a, +1, parts);
        } else {
          collect(t.args()[0], -1, parts);
        }
        return rebuild(parts);
      }
      std::vector<Term> args;
      args.reserve(t.args().size());
      bool changed = false;
      for (const Term& a : t.args()) {
        Term na = normalize_numerals(a);
        changed = changed || !(na == a);
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      return Term::app(t.head(), std::move(args), t.sort());
    }
  }
  return t;
}

Atom normalize_numerals(const Atom& a) {
  Atom out = a;
  out.lhs = normalize_numerals(a.lhs);
  if (a.kind != AtomKind::InImage) out.rhs = normalize_numerals(a.rhs);
  return out;
}

Term add_offset(const Term& t, const Int& k) {
  SumParts parts;
  collect(t, +1, parts);
  parts.offset += k;
  return rebuild(parts);
}

Term negate_term(const Term& t) {
  SumParts parts;
  collect(t, -1, parts);
  return rebuild(parts);
}

std::optional<OffsetForm> as_offset_form(const Term& raw) {
  Term t = normalize_numerals(raw);
  if (t.is_num()) return OffsetForm{Term(), t.value()};
  if (is_neg_node(t)) return std::nullopt;  // -(base): not an offset form
  if (!is_sum_node(t)) return OffsetForm{t, 0};
  Term base;
  Int offset = 0;
  for (const Term& a : t.args()) {
    if (a.is_num()) {
      offset += a.value();
    } else if (is_neg_node(a)) {
      return std::nullopt;
    } else {
      if (base.valid()) return std::nullopt;  // two non-numeral summands
      base = a;
    }
  }
  if (!base.valid()) return OffsetForm{Term(), offset};
  return OffsetForm{base, offset};
}

std::vector<Term> enumerate_ground_terms(const Signature& sig, SortId sort) {
  StratificationResult strat = stratification_levels(sig);
  if (!strat.ok)
    throw std::invalid_argument(
        "enumerate_ground_terms requires a stratified signature");
  constexpr std::size_t kUniverseCap = 2'000'000;

  std::vector<std::vector<Term>> universe(sig.sort_count());
  // Process sorts by (level, id); every function's arguments sit strictly
  // below its range, so argument universes are complete when needed.
  std::vector<SortId> order;
  for (SortId s = 0; s < sig.sort_count(); ++s) order.push_back(s);
  std::sort(order.begin(), order.end(), [&](SortId a, SortId b) {
    auto la = strat.levels.at(a), lb = strat.levels.at(b);
    return la != lb ? la < lb : a < b;
  });
  for (SortId s : order) {
    std::vector<Term>& out = universe[s];
    for (const auto& [name, decl] : sig.functions()) {
      if (decl.range != s) continue;
      if (decl.args.empty()) {
        out.push_back(Term::constant(name, s));
        continue;
      }
      // Odometer over the argument universes, rightmost position fastest.
      bool any_empty = std::any_of(
          decl.args.begin(), decl.args.end(),
          [&](SortId a) { return universe[a].empty(); });
      if (any_empty) continue;
      std::vector<std::size_t> idx(decl.args.size(), 0);
      bool done = false;
      while (!done) {
        std::vector<Term> args;
        args.reserve(decl.args.size());
        for (std::size_t i = 0; i < decl.args.size(); ++i)
          args.push_back(universe[decl.args[i]][idx[i]]);
        out.push_back(Term::app(name, std::move(args), s));
        if (out.size() > kUniverseCap)
          throw std::runtime_error("ground term universe too large");
        done = true;
        for (std::size_t pos = idx.size(); pos-- > 0;) {
          if (++idx[pos] < universe[decl.args[pos]].size()) {
            done = false;
            break;
          }
          idx[pos] = 0;
        }
      }
    }
    std::sort(out.begin(), out.end(), TermLess());
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Term& a, const Term& b) { return a == b; }),
              out.end());
  }
  return universe[sort];
}

}  // namespace zground
