// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#ifndef KAB_ABOX_HPP
#define KAB_ABOX_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "kab/symbols.hpp"

namespace kab {

enum class AKind : std::uint8_t { Concept, Role, Eq };

// Ground membership or equality assertion. For Concept, b is unused; for Eq,
// pred is unused.
struct Assertion {
  AKind kind;
  PredId pred = kNone;
  TermId a = kNone;
  TermId b = kNone;

  friend bool operator==(const Assertion&, const Assertion&) = default;
};

Assertion concept_of(PredId n, TermId t);
Assertion role_of(PredId p, TermId a, TermId b);
Assertion eq_of(TermId a, TermId b);

struct AssertionHash {
  std::size_t operator()(const Assertion& x) const {
    std::size_t h = static_cast<std::size_t>(x.kind);
    h = hash_combine(h, x.pred);
    h = hash_combine(h, x.a);
    return hash_combine(h, x.b);
  }
};

// Comparison is by raw ids; stable within one Universe. Canonical textual
// orderings (for serialization) are produced by the serializer instead.
bool assertion_less(const Assertion& x, const Assertion& y);

// A set of assertions kept sorted and deduplicated.
class ABox {
 public:
  ABox() = default;
  explicit ABox(std::vector<Assertion> items);

  void insert(const Assertion& x);
  void insert_all(const ABox& other);
  bool contains(const Assertion& x) const;

  const std::vector<Assertion>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  friend bool operator==(const ABox&, const ABox&) = default;

 private:
  std::vector<Assertion> items_;
  void normalize();
};

// Active domain: exactly the terms appearing as assertion arguments.
// Subterms of function terms are not included.
std::vector<TermId> adom(const ABox& a);

std::string assertion_str(const Universe& u, const Assertion& x);

}  // namespace kab

#endif  // KAB_ABOX_HPP
