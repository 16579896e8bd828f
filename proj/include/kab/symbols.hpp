// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#ifndef KAB_SYMBOLS_HPP
#define KAB_SYMBOLS_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kab/base.hpp"

namespace kab {

// One symbol table per loaded KAB. Terms (constants and applications of
// declared function symbols), predicate names (concepts and roles), and
// variable names are interned here; everything downstream works with ids,
// so structural equality is an id comparison.
class Universe {
 public:
  Universe() = default;
  Universe(const Universe&) = delete;
  Universe& operator=(const Universe&) = delete;

  // --- terms ---------------------------------------------------------------

  TermId constant(std::string_view name);
  std::optional<TermId> find_constant(std::string_view name) const;

  SymbolId function(std::string_view name, unsigned arity);
  std::optional<SymbolId> find_function(std::string_view name) const;
  const std::string& function_name(SymbolId f) const { return fns_[f].name; }
  unsigned function_arity(SymbolId f) const { return fns_[f].arity; }
  std::size_t function_count() const { return fns_.size(); }

  // Interns f(args). args.size() must match the declared arity.
  TermId apply(SymbolId f, std::span<const TermId> args);

  bool is_constant(TermId t) const { return terms_[t].fn == kNone; }
  SymbolId term_function(TermId t) const { return terms_[t].fn; }
  std::span<const TermId> term_args(TermId t) const;
  const std::string& constant_name(TermId t) const;

  // Total order used everywhere a canonical term choice is needed:
  // constants precede function terms; constants compare by name; function
  // terms compare by function name, then argument-wise recursively.
  bool term_less(TermId a, TermId b) const;
  int term_cmp(TermId a, TermId b) const;

  std::string term_str(TermId t) const;
  std::size_t term_count() const { return terms_.size(); }

  // --- predicates ----------------------------------------------------------

  PredId pred(std::string_view name, bool is_role);
  std::optional<PredId> find_pred(std::string_view name) const;
  const std::string& pred_name(PredId p) const { return preds_[p].name; }
  bool pred_is_role(PredId p) const { return preds_[p].is_role; }
  std::size_t pred_count() const { return preds_.size(); }

  // --- variables -----------------------------------------------------------

  VarId var(std::string_view name);
  const std::string& var_name(VarId v) const { return var_names_[v]; }
  std::size_t var_count() const { return var_names_.size(); }

  // Fresh variable with a name not colliding with any interned one.
  VarId fresh_var(std::string_view stem);

 private:
  struct TermData {
    SymbolId fn;  // kNone for constants
    std::uint32_t name_or_begin;
    std::uint32_t args_end;
  };
  struct FnData {
    std::string name;
    unsigned arity;
  };
  struct PredData {
    std::string name;
    bool is_role;
  };

  std::vector<TermData> terms_;
  std::vector<TermId> arg_pool_;
  std::vector<std::string> const_names_;
  std::unordered_map<std::string, TermId> const_lookup_;
  std::unordered_map<std::string, TermId> app_lookup_;  // key: f#a1#a2...

  std::vector<FnData> fns_;
  std::unordered_map<std::string, SymbolId> fn_lookup_;

  std::vector<PredData> preds_;
  std::unordered_map<std::string, PredId> pred_lookup_;

  std::vector<std::string> var_names_;
  std::unordered_map<std::string, VarId> var_lookup_;

  std::string app_key(SymbolId f, std::span<const TermId> args) const;
};

}  // namespace kab

#endif  // KAB_SYMBOLS_HPP
