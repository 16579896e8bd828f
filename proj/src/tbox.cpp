// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#include "kab/tbox.hpp"

namespace kab {

TBoxAssertion TBoxAssertion::concept_incl(BasicConcept l, BasicConcept r,
                                          bool neg) {
  TBoxAssertion x;
  x.kind = Kind::ConceptIncl;
  x.lhs_c = l;
  x.rhs_c = r;
  x.rhs_negated = neg;
  return x;
}

TBoxAssertion TBoxAssertion::role_incl(RoleExpr l, RoleExpr r, bool neg) {
  TBoxAssertion x;
  x.kind = Kind::RoleIncl;
  x.lhs_r = l;
  x.rhs_r = r;
  x.rhs_negated = neg;
  return x;
}

TBoxAssertion TBoxAssertion::funct(RoleExpr r) {
  TBoxAssertion x;
  x.kind = Kind::Funct;
  x.lhs_r = r;
  return x;
}

std::vector<Diagnostic> TBox::wellformedness_violations(
    const Universe& u) const {
  std::vector<Diagnostic> out;
  for (const TBoxAssertion& f : items_) {
    if (f.kind != TBoxAssertion::Kind::Funct) continue;
    for (const TBoxAssertion& r : items_) {
      if (r.kind != TBoxAssertion::Kind::RoleIncl || r.rhs_negated) continue;
      if (r.rhs_r.role != f.lhs_r.role) continue;
      out.push_back(Diagnostic{
          0, 0, "funct-specialization",
          "functional role " + role_str(u, f.lhs_r) +
              " may not be specialized by " + role_str(u, r.lhs_r) +
              " ISA " + role_str(u, r.rhs_r)});
    }
  }
  return out;
}

std::vector<const TBoxAssertion*> TBox::positive_concept_incls() const {
  std::vector<const TBoxAssertion*> out;
  for (const TBoxAssertion& x : items_)
    if (x.kind == TBoxAssertion::Kind::ConceptIncl && !x.rhs_negated)
      out.push_back(&x);
  return out;
}

std::vector<const TBoxAssertion*> TBox::positive_role_incls() const {
  std::vector<const TBoxAssertion*> out;
  for (const TBoxAssertion& x : items_)
    if (x.kind == TBoxAssertion::Kind::RoleIncl && !x.rhs_negated)
      out.push_back(&x);
  return out;
}

std::vector<const TBoxAssertion*> TBox::negative_incls() const {
  std::vector<const TBoxAssertion*> out;
  for (const TBoxAssertion& x : items_)
    if (x.kind != TBoxAssertion::Kind::Funct && x.rhs_negated)
      out.push_back(&x);
  return out;
}

std::vector<RoleExpr> TBox::functional_roles() const {
  std::vector<RoleExpr> out;
  for (const TBoxAssertion& x : items_)
    if (x.kind == TBoxAssertion::Kind::Funct) out.push_back(x.lhs_r);
  return out;
}

std::string role_str(const Universe& u, const RoleExpr& r) {
  if (r.inverse) return "inv(" + u.pred_name(r.role) + ")";
  return u.pred_name(r.role);
}

std::string basic_concept_str(const Universe& u, const BasicConcept& b) {
  if (!b.is_exists) return u.pred_name(b.name);
  return "EXISTS " + role_str(u, b.role);
}

}  // namespace kab
