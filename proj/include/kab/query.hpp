// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#ifndef KAB_QUERY_HPP
#define KAB_QUERY_HPP

#include <memory>
#include <optional>
#include <vector>

#include "kab/abox.hpp"

namespace kab {

// Query argument: a variable or a ground term.
struct QArg {
  bool is_var = false;
  std::uint32_t id = kNone;  // VarId or TermId

  static QArg of_var(VarId v) { return {true, v}; }
  static QArg of_term(TermId t) { return {false, t}; }
  friend bool operator==(const QArg&, const QArg&) = default;
};

// Atoms use concept/role names only; inverses are expressed by swapping
// arguments during construction.
struct QAtom {
  PredId pred = kNone;
  bool is_role = false;
  QArg a, b;  // b unused for concept atoms

  friend bool operator==(const QAtom&, const QAtom&) = default;
};

struct Cq {
  std::vector<QAtom> atoms;
  // Existentially quantified variables; every other variable is free.
  std::vector<VarId> exist_vars;

  bool is_exist(VarId v) const;
  friend bool operator==(const Cq&, const Cq&) = default;
};

struct Ucq {
  std::vector<Cq> disjuncts;

  std::vector<VarId> free_vars() const;
  friend bool operator==(const Ucq&, const Ucq&) = default;
};

Ucq ucq_of(Cq cq);
Ucq ucq_true();  // one empty conjunct: holds everywhere

// Partial substitution of variables by ground terms.
class Subst {
 public:
  void set(VarId v, TermId t);
  std::optional<TermId> get(VarId v) const;
  bool has(VarId v) const { return get(v).has_value(); }
  const std::vector<std::pair<VarId, TermId>>& items() const { return m_; }
  std::size_t size() const { return m_.size(); }
  Subst restricted(const std::vector<VarId>& vars) const;

  friend bool operator==(const Subst&, const Subst&) = default;
  friend bool operator<(const Subst& x, const Subst& y) { return x.m_ < y.m_; }

 private:
  std::vector<std::pair<VarId, TermId>> m_;  // sorted by VarId
};

// Epistemic query over certain answers:
//   Q ::= true | [ucq] | [x = y] | !Q | Q & Q | EX v. Q
struct EcqNode;
using Ecq = std::shared_ptr<const EcqNode>;

struct EcqNode {
  enum class Op { True, UcqLeaf, EqLeaf, Not, And, Exists };
  Op op;
  Ucq ucq;           // UcqLeaf
  QArg ea, eb;       // EqLeaf
  Ecq child, child2; // Not (child), And (child, child2), Exists (child)
  VarId bound = kNone;  // Exists
};

Ecq ecq_true();
Ecq ecq_ucq(Ucq q);
Ecq ecq_eq(QArg a, QArg b);
Ecq ecq_not(Ecq q);
Ecq ecq_and(Ecq a, Ecq b);
Ecq ecq_exists(VarId v, Ecq q);

std::vector<VarId> ecq_free_vars(const Ecq& q);
bool ecq_equal(const Ecq& a, const Ecq& b);

// Canonical textual forms; also used as cache keys.
std::string ucq_str(const Universe& u, const Ucq& q);
std::string ecq_str(const Universe& u, const Ecq& q);

}  // namespace kab

#endif  // KAB_QUERY_HPP
