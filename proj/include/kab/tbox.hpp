// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#ifndef KAB_TBOX_HPP
#define KAB_TBOX_HPP

#include <vector>

#include "kab/abox.hpp"

namespace kab {

// A role name or its inverse.
struct RoleExpr {
  PredId role = kNone;
  bool inverse = false;

  RoleExpr inv() const { return {role, !inverse}; }
  friend bool operator==(const RoleExpr&, const RoleExpr&) = default;
};

// Basic concept: a concept name or the domain of a role expression
// (EXISTS R; the range of P is expressed as EXISTS inv(P)).
struct BasicConcept {
  bool is_exists = false;
  PredId name = kNone;  // when !is_exists
  RoleExpr role;        // when is_exists

  static BasicConcept of_name(PredId n) { return {false, n, {}}; }
  static BasicConcept of_exists(RoleExpr r) { return {true, kNone, r}; }
  friend bool operator==(const BasicConcept&, const BasicConcept&) = default;
};

struct TBoxAssertion {
  enum class Kind { ConceptIncl, RoleIncl, Funct };
  Kind kind;
  // ConceptIncl: lhs_c [negated? rhs] rhs_c
  BasicConcept lhs_c, rhs_c;
  // RoleIncl: lhs_r [negated? rhs] rhs_r; Funct: lhs_r
  RoleExpr lhs_r, rhs_r;
  bool rhs_negated = false;

  static TBoxAssertion concept_incl(BasicConcept l, BasicConcept r,
                                    bool neg = false);
  static TBoxAssertion role_incl(RoleExpr l, RoleExpr r, bool neg = false);
  static TBoxAssertion funct(RoleExpr r);
};

class TBox {
 public:
  void add(const TBoxAssertion& x) { items_.push_back(x); }
  const std::vector<TBoxAssertion>& items() const { return items_; }
  bool empty() const { return items_.empty(); }

  // Disallowed combination: (funct R) together with a positive role
  // inclusion whose right side is R or inv(R). Returns one diagnostic per
  // offending pair.
  std::vector<Diagnostic> wellformedness_violations(const Universe& u) const;

  std::vector<const TBoxAssertion*> positive_concept_incls() const;
  std::vector<const TBoxAssertion*> positive_role_incls() const;
  std::vector<const TBoxAssertion*> negative_incls() const;  // both kinds
  std::vector<RoleExpr> functional_roles() const;

 private:
  std::vector<TBoxAssertion> items_;
};

std::string role_str(const Universe& u, const RoleExpr& r);
std::string basic_concept_str(const Universe& u, const BasicConcept& b);

}  // namespace kab

#endif  // KAB_TBOX_HPP
