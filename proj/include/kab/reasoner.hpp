// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#ifndef KAB_REASONER_HPP
#define KAB_REASONER_HPP

#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kab/abox.hpp"
#include "kab/base.hpp"
#include "kab/query.hpp"
#include "kab/symbols.hpp"
#include "kab/tbox.hpp"

namespace kab {

// Equality information derived from an ABox: explicit equalities, closed
// under congruence and functionality. Tracks only active-domain terms; the
// representative of a class is its least member in global term order.
class EqClosure {
 public:
  bool in_adom(TermId t) const { return slot_.count(t) != 0; }
  bool same(TermId a, TermId b) const;
  TermId repr(TermId t) const;

  // Equality entailment for arbitrary terms: shared class, or congruence
  // through function-term structure.
  bool entails_equal(const Universe& u, TermId a, TermId b) const;

  // All equivalence classes; members sorted, representative first. Class
  // order follows the representatives' term order.
  const std::vector<std::vector<TermId>>& classes() const { return classes_; }

 private:
  friend class Reasoner;
  std::unordered_map<TermId, std::uint32_t> slot_;
  std::vector<std::uint32_t> class_of_;
  std::vector<std::vector<TermId>> classes_;
};

// An ABox after saturation: assertions rewritten to class representatives
// (equalities dropped), with a per-predicate index for evaluation, plus the
// original active domain in term order.
struct SaturatedAbox {
  ABox abox;
  EqClosure eq;
  std::unordered_map<PredId, std::vector<std::pair<TermId, TermId>>> index;
  std::vector<TermId> adom_orig;
};

// One conjunctive query of a rewriting, with an explicit head: head[i] is
// the value of the i-th free variable of the original query. Unification
// steps can merge two free variables or pin one to a constant, which a
// plain variable list cannot express.
struct RewCq {
  std::vector<QArg> head;
  std::vector<QAtom> atoms;
};

// Reasoning for one TBox over one symbol table. Holds the rewriting cache;
// the universe reference stays mutable because rewriting interns fresh
// variables.
class Reasoner {
 public:
  Reasoner(Universe& u, const TBox& t);

  const Universe& universe() const { return u_; }
  const TBox& tbox() const { return t_; }

  SaturatedAbox saturate(const ABox& a) const;
  bool consistent(const SaturatedAbox& s) const;

  // Full rewriting with explicit heads; cached per query text.
  const std::vector<RewCq>& rewrite_internal(const Ucq& q) const;

  // Rewriting restricted to conjuncts whose head is an injective variable
  // tuple, i.e. those expressible as a plain UCQ over the original free
  // variables.
  Ucq rewrite(const Ucq& q) const;

  // Evaluate one rewritten conjunct over the saturated ABox. `bound` maps
  // original free variables to canonical representatives; emits answers
  // over the unbound original variables into `out`.
  void db_eval(const RewCq& rq, const std::vector<VarId>& orig_vars,
               const SaturatedAbox& s, const Subst& bound,
               std::vector<Subst>& out) const;

 private:
  std::vector<RewCq> perfect_ref(const Ucq& q) const;

  Universe& u_;
  const TBox& t_;
  mutable std::unordered_map<std::string, std::vector<RewCq>> rew_cache_;
};

// One ABox bound to a reasoner: saturation, consistency, and query
// evaluation with memoization.
class KbContext {
 public:
  KbContext(const Reasoner& r, ABox a);

  const Reasoner& reasoner() const { return r_; }
  const ABox& original() const { return original_; }
  const SaturatedAbox& sat() const { return sat_; }
  bool consistent() const { return consistent_; }
  const std::vector<TermId>& adom_terms() const { return sat_.adom_orig; }

  // Certain answers of a UCQ under a partial binding, over the query's free
  // variables not bound by `theta`. Representatives are expanded back to
  // all members of their class.
  std::vector<Subst> answers_ucq(const Ucq& q, const Subst& theta) const;

  // Boolean membership check of a UCQ under a total binding.
  bool holds_ucq(const Ucq& q, const Subst& total) const;

  // Epistemic evaluation under a total binding; throws InconsistentKb when
  // the knowledge base is inconsistent.
  bool holds(const Ecq& q, const Subst& sigma) const;

  // All completions of `theta` over the remaining free variables that make
  // the query hold; candidates range over the active domain.
  std::vector<Subst> answers_ecq(const Ecq& q, const Subst& theta) const;

  // Membership or equality entailment; trivially true on an inconsistent
  // knowledge base.
  bool entails(const Assertion& x) const;

  // Canonical database value for an arbitrary term: its representative if
  // in the active domain (directly or through congruence), kNone otherwise.
  TermId canon_for_db(TermId t) const;

 private:
  bool holds_inner(const Ecq& q, Subst& sigma) const;

  const Reasoner& r_;
  ABox original_;
  SaturatedAbox sat_;
  bool consistent_;
  mutable std::map<std::pair<const EcqNode*, Subst>, bool> ecq_memo_;
};

// Logical equivalence of two ABoxes over the predicates in `lambda`:
// mutual entailment of memberships (restricted to `lambda`) and of all
// equalities. Throws InconsistentKb when either side is inconsistent.
bool abox_equivalent(const Reasoner& r, const ABox& a1, const ABox& a2,
                     const std::vector<PredId>& lambda);

struct EntailResult {
  bool holds;
  bool kb_consistent;
};

// Single-shot conveniences; each builds a fresh reasoner.
SaturatedAbox saturate(Universe& u, const TBox& t, const ABox& a);
bool is_consistent(Universe& u, const TBox& t, const ABox& a);
EntailResult entails(Universe& u, const TBox& t, const ABox& a,
                     const Assertion& x);
Ucq rewrite_ucq(Universe& u, const TBox& t, const Ucq& q);
std::vector<Subst> certain_answers_ucq(Universe& u, const TBox& t,
                                       const ABox& a, const Ucq& q);
bool eval_ecq(Universe& u, const TBox& t, const ABox& a, const Ecq& q,
              const Subst& sigma);

}  // namespace kab

#endif  // KAB_REASONER_HPP
