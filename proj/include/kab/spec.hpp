// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#ifndef KAB_SPEC_HPP
#define KAB_SPEC_HPP

#include <memory>
#include <string>
#include <vector>

#include "kab/abox.hpp"
#include "kab/query.hpp"
#include "kab/symbols.hpp"
#include "kab/tbox.hpp"

namespace kab {

// Term template in an effect head: a constant, a condition variable, or a
// function term over such templates.
struct HeadTerm {
  bool is_fn = false;
  bool is_var = false;           // meaningful when !is_fn
  std::uint32_t id = kNone;      // TermId, VarId, or SymbolId for functions
  std::vector<HeadTerm> args;    // when is_fn

  static HeadTerm of_const(TermId t) { return {false, false, t, {}}; }
  static HeadTerm of_var(VarId v) { return {true, true, v, {}}; }
  static HeadTerm of_fn(SymbolId f, std::vector<HeadTerm> as) {
    return {true, false, f, std::move(as)};
  }
  friend bool operator==(const HeadTerm&, const HeadTerm&) = default;
};

// One head assertion template; kind Eq uses a and b as the two terms.
struct HeadAtom {
  AKind kind = AKind::Concept;
  PredId pred = kNone;
  HeadTerm a, b;
  friend bool operator==(const HeadAtom&, const HeadAtom&) = default;
};

// Conditional effect: for every answer of the positive part filtered by the
// epistemic part, instantiate the head.
struct EffectSpec {
  Ucq q_plus;
  Ecq q_minus;  // ecq_true when absent
  std::vector<HeadAtom> head;
  bool from_copyall = false;  // produced by COPYALL expansion
};

struct ActionDef {
  std::string name;
  std::vector<VarId> params;
  std::vector<EffectSpec> effects;
  bool copy_all = false;  // the COPYALL keyword appeared in the source
};

// Condition/action rule: when the condition holds under a binding of its
// free variables, the named action runs with parameters taken from `args`
// (args[i] supplies the i-th action parameter).
struct ProcessRule {
  Ecq condition;
  std::size_t action = 0;  // index into KabSpec::actions
  std::vector<VarId> args;
};

struct KabSpec {
  std::shared_ptr<Universe> universe;
  TBox tbox;
  ABox abox0;
  std::vector<SymbolId> functions;      // declared, in declaration order
  std::vector<TermId> named_consts;     // CONSTS section entries
  std::vector<ActionDef> actions;
  std::vector<ProcessRule> process;

  // Every concept and role name occurring anywhere in the specification,
  // sorted by name. COPYALL expansion, dependency positions, and state
  // equivalence all use this alphabet.
  std::vector<PredId> alphabet;

  const ActionDef* find_action(const std::string& name) const;
};

}  // namespace kab

#endif  // KAB_SPEC_HPP
