#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zground/signature.hpp"

namespace zground {

/// Arbitrary-precision signed integer used for numerals.
using Int = boost::multiprecision::cpp_int;

/// An immutable, structurally shared term.
///
/// Three node kinds:
///  - Num: an integer numeral (sort Int);
///  - Var: a named variable with a sort;
///  - App: a function application (constants are zero-ary applications).
///
/// The arithmetic built-ins are ordinary App nodes with reserved heads:
/// "+" with two or more integer arguments and "-" with exactly one. The
/// normal form produced by normalize_numerals keeps "+" flat and sorted with
/// any numeral folded into a single trailing offset, and "-" only around
/// non-numeral, non-sum terms.
class Term {
 public:
  enum class Kind { Num, Var, App };

  Term() = default;  ///< empty handle; only assignment and valid() are legal
  bool valid() const { return node_ != nullptr; }

  static Term num(Int value);
  static Term var(std::string name, SortId sort);
  static Term app(std::string head, std::vector<Term> args, SortId sort);
  /// Zero-ary application (constant).
  static Term constant(std::string name, SortId sort);

  Kind kind() const { return node_->kind; }
  bool is_num() const { return kind() == Kind::Num; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_app() const { return kind() == Kind::App; }
  /// Numeral value; only valid for Num nodes.
  const Int& value() const { return node_->value; }
  /// Variable name or application head; not valid for Num nodes.
  const std::string& head() const { return node_->head; }
  const std::vector<Term>& args() const { return node_->args; }
  SortId sort() const { return node_->sort; }
  bool is_ground() const { return node_->ground; }
  std::size_t hash() const { return node_->hash; }

  /// Structural equality (pointer fast path, then hash, then recursion).
  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

  /// Total order used for canonical output: Num < Var < App; numerals by
  /// value; variables by name; applications by head, then arity, then
  /// arguments left to right. Returns <0, 0, >0.
  static int compare(const Term& a, const Term& b);

  /// Parseable rendering: numerals in decimal, constants bare, applications
  /// as (head arg...).
  std::string str() const;

 private:
  struct Node {
    Kind kind;
    Int value;               // Num
    std::string head;        // Var / App
    std::vector<Term> args;  // App
    SortId sort = 0;
    bool ground = true;
    std::size_t hash = 0;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Strict-weak-order functor so Term can key std::map / std::set.
struct TermLess {
  bool operator()(const Term& a, const Term& b) const {
    return Term::compare(a, b) < 0;
  }
};

/// The three atom forms of the clause language.
enum class AtomKind { Eq, Leq, InImage };

/// An atom: t = s, t <= s, or t in the image of a function symbol.
struct Atom {
  AtomKind kind = AtomKind::Eq;
  Term lhs;
  Term rhs;         ///< unused for InImage
  std::string fn;   ///< function name; only for InImage

  static Atom eq(Term l, Term r) { return {AtomKind::Eq, std::move(l), std::move(r), {}}; }
  static Atom leq(Term l, Term r) { return {AtomKind::Leq, std::move(l), std::move(r), {}}; }
  static Atom in_image(Term t, std::string fn) {
    return {AtomKind::InImage, std::move(t), Term(), std::move(fn)};
  }

  bool is_ground() const;
  std::string str() const;

  friend bool operator==(const Atom& a, const Atom& b);
  friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }
  /// Total order mirroring Term::compare, for canonical containers.
  static int compare(const Atom& a, const Atom& b);
};

struct AtomLess {
  bool operator()(const Atom& a, const Atom& b) const {
    return Atom::compare(a, b) < 0;
  }
};

/// True for atoms the constraint part may hold: Leq always, Eq over
/// integer-sorted sides. InImage is never arithmetic.
bool is_arith_atom(const Atom& a);

/// A finite mapping from variable names to terms.
class Substitution {
 public:
  Substitution() = default;
  void set(const std::string& var, Term t) { map_[var] = std::move(t); }
  const Term* find(const std::string& var) const {
    auto it = map_.find(var);
    return it == map_.end() ? nullptr : &it->second;
  }
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const std::map<std::string, Term>& entries() const { return map_; }
  std::string str() const;

 private:
  std::map<std::string, Term> map_;
};

/// Replaces variables by their images. Unmapped variables stay. The result
/// is NOT renormalized; callers that substitute into arithmetic positions
/// should call normalize_numerals afterwards.
Term apply_substitution(const Term& t, const Substitution& s);
Atom apply_substitution(const Atom& a, const Substitution& s);

/// Rewrites a term to the arithmetic normal form:
///  - nested "+" flattened, numerals folded into one trailing offset;
///  - summands with equal absolute part cancelled/collected;
///  - "-" pushed down: -(x+y) distributes, -(-x) drops, -(numeral) folds;
///  - sums sorted by Term::compare; a sum that collapses to one summand or a
///    lone numeral loses its "+" node.
/// Non-arithmetic applications are rebuilt with normalized arguments.
Term normalize_numerals(const Term& t);
Atom normalize_numerals(const Atom& a);

/// Convenience builders for arithmetic terms (results are normalized).
Term add_offset(const Term& t, const Int& k);  ///< t + k
Term negate_term(const Term& t);               ///< -t

/// If t is a numeral-offset form "base + k" (or a bare base / bare numeral),
/// returns {base, k} where base is empty for pure numerals. Returns
/// std::nullopt for sums with more than one non-numeral summand or other
/// shapes.
struct OffsetForm {
  Term base;  ///< invalid() when the term is a pure numeral
  Int offset;
};
std::optional<OffsetForm> as_offset_form(const Term& t);

/// All ground terms of sort `sort` over the signature's user functions, in
/// canonical order. The integer universe is the declared zero-ary integer
/// constants (numerals and arithmetic are excluded; they would be infinite).
/// Requires stratification_levels(sig).ok; throws std::invalid_argument
/// otherwise. Term depth is bounded by the sort's level.
std::vector<Term> enumerate_ground_terms(const Signature& sig, SortId sort);

}  // namespace zground
