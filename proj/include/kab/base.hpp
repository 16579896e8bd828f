// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#ifndef KAB_BASE_HPP
#define KAB_BASE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kab {

using SymbolId = std::uint32_t;
using TermId = std::uint32_t;
using PredId = std::uint32_t;
using VarId = std::uint32_t;

inline constexpr std::uint32_t kNone = 0xffffffffu;

// A located message. line/col are 1-based; 0 means "no position" (e.g. a
// violation that concerns the spec as a whole).
struct Diagnostic {
  int line = 0;
  int col = 0;
  std::string category;
  std::string message;

  std::string str() const;
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(Diagnostic d);
  const Diagnostic& diagnostic() const { return diag_; }

 private:
  Diagnostic diag_;
};

// Carries every violated invariant found in one validation pass.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Diagnostic> ds);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

class InconsistentKb : public Error {
 public:
  InconsistentKb() : Error("knowledge base is inconsistent") {}
};

class InconsistentInitialState : public Error {
 public:
  InconsistentInitialState()
      : Error("initial ABox is inconsistent with the TBox") {}
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string what, std::size_t states, std::size_t adom)
      : Error(std::move(what)), states_(states), adom_(adom) {}
  std::size_t states_visited() const { return states_; }
  std::size_t adom_size() const { return adom_; }

 private:
  std::size_t states_;
  std::size_t adom_;
};

class AlphabetMismatch : public Error {
 public:
  explicit AlphabetMismatch(const std::string& what) : Error(what) {}
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
}

}  // namespace kab

#endif  // KAB_BASE_HPP
