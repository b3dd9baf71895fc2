#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace zground {

/// Index of a sort inside a Signature. The integer sort is always id 0.
using SortId = std::uint32_t;

/// A declared function symbol: name, argument sorts, range sort.
/// Constants are functions of arity zero.
struct FunDecl {
  std::string name;
  std::vector<SortId> args;
  SortId range;
};

/// One diagnostic produced by a validation pass.
struct Diagnostic {
  std::string code;     ///< stable machine-readable tag, e.g. "int-range-args"
  std::string message;  ///< human-readable explanation
};

/// Result of a validation pass: empty means the input is well-formed.
struct ValidationReport {
  std::vector<Diagnostic> issues;
  bool ok() const { return issues.empty(); }
  void add(std::string code, std::string message) {
    issues.push_back({std::move(code), std::move(message)});
  }
};

/// A many-sorted first-order signature with a distinguished integer sort.
///
/// The arithmetic symbols (numerals, n-ary "+", unary "-") are built-ins of
/// the term language, not signature entries; user declarations may not reuse
/// their names. Sort and function names are case-sensitive.
class Signature {
 public:
  static constexpr SortId kInt = 0;

  Signature();

  /// Declares a new sort. Throws std::invalid_argument on duplicates or
  /// reserved names.
  SortId add_sort(const std::string& name);
  bool has_sort(const std::string& name) const;
  /// Throws std::out_of_range if the sort is unknown.
  SortId sort_id(const std::string& name) const;
  const std::string& sort_name(SortId id) const;
  std::size_t sort_count() const { return sort_names_.size(); }

  /// Declares a function symbol. Throws std::invalid_argument on duplicate
  /// names, reserved names, or undeclared sorts.
  void add_function(FunDecl decl);
  bool has_function(const std::string& name) const;
  /// Returns nullptr if no such function is declared.
  const FunDecl* function(const std::string& name) const;
  /// All declarations in name order (the map is ordered).
  const std::map<std::string, FunDecl>& functions() const { return funs_; }

  /// True for names the term language reserves: "+", "-", "Int", numerals.
  static bool is_reserved(const std::string& name);

  /// Smallest "stem", "stem1", "stem2", ... not declared as a function or
  /// sort. `start` biases the first counter tried (used for seeded runs).
  std::string fresh_symbol(const std::string& stem, unsigned start = 0) const;

 private:
  std::vector<std::string> sort_names_;
  std::map<std::string, SortId> sort_ids_;
  std::map<std::string, FunDecl> funs_;
};

/// Checks well-formedness beyond what add_* enforce:
///  - every integer-range non-constant function has all-integer arguments
///    (code "int-range-args");
///  - every sort is inhabited by at least one ground term, counting numerals
///    for the integer sort (code "uninhabited-sort").
ValidationReport validate_signature(const Signature& sig);

/// Outcome of the sort-level analysis used by the enumeration scheme.
struct StratificationResult {
  bool ok = false;
  /// Level per sort: constants-only sorts sit at 0; each function raises its
  /// range strictly above every argument. Only meaningful when ok.
  std::map<SortId, unsigned> levels;
  /// When !ok: one cycle of sorts witnessing the failure, in edge order.
  std::vector<SortId> cycle;
};

/// Computes sort levels from the user-declared functions (arithmetic
/// built-ins do not participate). A signature is accepted when no sort can
/// reach itself through non-constant function edges (argument sort -> range
/// sort). A user-declared non-constant function with integer range therefore
/// rejects the signature.
StratificationResult stratification_levels(const Signature& sig);

}  // namespace zground
