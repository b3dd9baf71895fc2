#pragma once

#include <stdexcept>
#include <string>

#include "zground/zclause.hpp"

namespace zground {

/// Input rejection with position information (1-based line and column).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int col)
      : std::runtime_error(message + " (line " + std::to_string(line) +
                           ", column " + std::to_string(col) + ")"),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

/// Reads a problem from text, auto-detecting the format:
///  - the native clause format:
///      (sorts name...)
///      (functions (name arg-sorts... range)...)
///      (theory arrays-int|stratified|st2|generic)
///      (zclause (vars (x Int)...) (constraints atom...) (ante atom...)
///               (succ atom...))*
///    with atoms (le t s), (eq t s), (in-image t f), each optionally wrapped
///    in (not ...); integer terms are decimal numerals, declared constants,
///    (+ t...) with two or more integer summands, and unary (- t);
///  - the ground SMT-LIB2 subset this toolkit emits (set-logic, declare-sort,
///    declare-fun, declare-const, assert over or/not/=/<=/</>=/>, check-sat).
///
/// Native clauses are normalized (arithmetic literals moved to the
/// constraint part, negations rewritten) and purified; variables declared
/// but not used are dropped. SMT-LIB2 asserts are normalized only.
Problem parse_problem(const std::string& text);

/// Canonical native rendering of a problem. Printing a parsed problem and
/// parsing it again reproduces the same text (print-parse fixpoint).
std::string print_problem(const Problem& p);

}  // namespace zground
