// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#include "kab/symbols.hpp"

#include <sstream>

namespace kab {

std::string Diagnostic::str() const {
  std::ostringstream os;
  if (line > 0) os << line << ':' << col << ": ";
  os << category << ": " << message;
  return os.str();
}

ParseError::ParseError(Diagnostic d) : Error(d.str()), diag_(std::move(d)) {}

static std::string join_diags(const std::vector<Diagnostic>& ds) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i) os << '\n';
    os << ds[i].str();
  }
  return os.str();
}

ValidationError::ValidationError(std::vector<Diagnostic> ds)
    : Error(join_diags(ds)), diags_(std::move(ds)) {}

TermId Universe::constant(std::string_view name) {
  auto it = const_lookup_.find(std::string(name));
  if (it != const_lookup_.end()) return it->second;
  TermId id = static_cast<TermId>(terms_.size());
  terms_.push_back({kNone, static_cast<std::uint32_t>(const_names_.size()), 0});
  const_names_.emplace_back(name);
  const_lookup_.emplace(std::string(name), id);
  return id;
}

std::optional<TermId> Universe::find_constant(std::string_view name) const {
  auto it = const_lookup_.find(std::string(name));
  if (it == const_lookup_.end()) return std::nullopt;
  return it->second;
}

SymbolId Universe::function(std::string_view name, unsigned arity) {
  auto it = fn_lookup_.find(std::string(name));
  if (it != fn_lookup_.end()) {
    if (fns_[it->second].arity != arity)
      throw Error("function " + std::string(name) +
                  " redeclared with different arity");
    return it->second;
  }
  SymbolId id = static_cast<SymbolId>(fns_.size());
  fns_.push_back({std::string(name), arity});
  fn_lookup_.emplace(std::string(name), id);
  return id;
}

std::optional<SymbolId> Universe::find_function(std::string_view name) const {
  auto it = fn_lookup_.find(std::string(name));
  if (it == fn_lookup_.end()) return std::nullopt;
  return it->second;
}

std::string Universe::app_key(SymbolId f, std::span<const TermId> args) const {
  std::string key = std::to_string(f);
  for (TermId a : args) {
    key += '#';
    key += std::to_string(a);
  }
  return key;
}

TermId Universe::apply(SymbolId f, std::span<const TermId> args) {
  if (args.size() != fns_[f].arity)
    throw Error("function " + fns_[f].name + " applied to " +
                std::to_string(args.size()) + " arguments, declared arity " +
                std::to_string(fns_[f].arity));
  std::string key = app_key(f, args);
  auto it = app_lookup_.find(key);
  if (it != app_lookup_.end()) return it->second;
  TermId id = static_cast<TermId>(terms_.size());
  std::uint32_t begin = static_cast<std::uint32_t>(arg_pool_.size());
  arg_pool_.insert(arg_pool_.end(), args.begin(), args.end());
  terms_.push_back({f, begin, static_cast<std::uint32_t>(arg_pool_.size())});
  app_lookup_.emplace(std::move(key), id);
  return id;
}

std::span<const TermId> Universe::term_args(TermId t) const {
  const TermData& d = terms_[t];
  if (d.fn == kNone) return {};
  return {arg_pool_.data() + d.name_or_begin,
          arg_pool_.data() + d.args_end};
}

const std::string& Universe::constant_name(TermId t) const {
  return const_names_[terms_[t].name_or_begin];
}

int Universe::term_cmp(TermId a, TermId b) const {
  if (a == b) return 0;
  bool ca = is_constant(a), cb = is_constant(b);
  if (ca != cb) return ca ? -1 : 1;
  if (ca) return constant_name(a).compare(constant_name(b));
  int c = function_name(term_function(a)).compare(
      function_name(term_function(b)));
  if (c != 0) return c;
  auto aa = term_args(a), ba = term_args(b);
  if (aa.size() != ba.size()) return aa.size() < ba.size() ? -1 : 1;
  for (std::size_t i = 0; i < aa.size(); ++i) {
    c = term_cmp(aa[i], ba[i]);
    if (c != 0) return c;
  }
  return 0;
}

bool Universe::term_less(TermId a, TermId b) const {
  return term_cmp(a, b) < 0;
}

std::string Universe::term_str(TermId t) const {
  if (is_constant(t)) return constant_name(t);
  std::string s = function_name(term_function(t));
  s += '(';
  auto args = term_args(t);
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += term_str(args[i]);
  }
  s += ')';
  return s;
}

PredId Universe::pred(std::string_view name, bool is_role) {
  auto it = pred_lookup_.find(std::string(name));
  if (it != pred_lookup_.end()) {
    if (preds_[it->second].is_role != is_role)
      throw Error("name " + std::string(name) +
                  " used as both a concept and a role");
    return it->second;
  }
  PredId id = static_cast<PredId>(preds_.size());
  preds_.push_back({std::string(name), is_role});
  pred_lookup_.emplace(std::string(name), id);
  return id;
}

std::optional<PredId> Universe::find_pred(std::string_view name) const {
  auto it = pred_lookup_.find(std::string(name));
  if (it == pred_lookup_.end()) return std::nullopt;
  return it->second;
}

VarId Universe::var(std::string_view name) {
  auto it = var_lookup_.find(std::string(name));
  if (it != var_lookup_.end()) return it->second;
  VarId id = static_cast<VarId>(var_names_.size());
  var_names_.emplace_back(name);
  var_lookup_.emplace(std::string(name), id);
  return id;
}

VarId Universe::fresh_var(std::string_view stem) {
  std::string base(stem);
  for (unsigned n = 0;; ++n) {
    std::string cand = base + "'" + (n ? std::to_string(n) : "");
    if (!var_lookup_.count(cand)) return var(cand);
  }
}

}  // namespace kab
