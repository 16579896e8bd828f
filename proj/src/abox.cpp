// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#include "kab/abox.hpp"

#include <algorithm>

namespace kab {

Assertion concept_of(PredId n, TermId t) {
  return Assertion{AKind::Concept, n, t, kNone};
}

Assertion role_of(PredId p, TermId a, TermId b) {
  return Assertion{AKind::Role, p, a, b};
}

Assertion eq_of(TermId a, TermId b) {
  return Assertion{AKind::Eq, kNone, a, b};
}

bool assertion_less(const Assertion& x, const Assertion& y) {
  if (x.kind != y.kind) return x.kind < y.kind;
  if (x.pred != y.pred) return x.pred < y.pred;
  if (x.a != y.a) return x.a < y.a;
  return x.b < y.b;
}

ABox::ABox(std::vector<Assertion> items) : items_(std::move(items)) {
  normalize();
}

void ABox::normalize() {
  std::sort(items_.begin(), items_.end(), assertion_less);
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

void ABox::insert(const Assertion& x) {
  auto it = std::lower_bound(items_.begin(), items_.end(), x, assertion_less);
  if (it != items_.end() && *it == x) return;
  items_.insert(it, x);
}

void ABox::insert_all(const ABox& other) {
  items_.insert(items_.end(), other.items_.begin(), other.items_.end());
  normalize();
}

bool ABox::contains(const Assertion& x) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), x, assertion_less);
  return it != items_.end() && *it == x;
}

std::vector<TermId> adom(const ABox& a) {
  std::vector<TermId> out;
  out.reserve(a.size() * 2);
  for (const Assertion& x : a) {
    out.push_back(x.a);
    if (x.kind != AKind::Concept) out.push_back(x.b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string assertion_str(const Universe& u, const Assertion& x) {
  switch (x.kind) {
    case AKind::Concept:
      return u.pred_name(x.pred) + "(" + u.term_str(x.a) + ")";
    case AKind::Role:
      return u.pred_name(x.pred) + "(" + u.term_str(x.a) + ", " +
             u.term_str(x.b) + ")";
    case AKind::Eq:
      return u.term_str(x.a) + " = " + u.term_str(x.b);
  }
  return {};
}

}  // namespace kab
