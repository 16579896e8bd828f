// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
//
// Test oracle: a depth-bounded restricted chase with labeled nulls and a
// union-find for equality. Deliberately shares no code with the library's
// reasoner; certain answers are read off the chase by homomorphism search.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "kab/abox.hpp"
#include "kab/query.hpp"
#include "kab/symbols.hpp"
#include "kab/tbox.hpp"

namespace oracle {

// Real terms keep their TermId value; labeled nulls live above 2^32.
using OTerm = std::int64_t;

struct Fact {
  kab::PredId pred;
  bool role;
  OTerm a, b;  // b = -1 for concept facts
  bool operator<(const Fact& o) const {
    if (pred != o.pred) return pred < o.pred;
    if (role != o.role) return role < o.role;
    if (a != o.a) return a < o.a;
    return b < o.b;
  }
};

class Chase {
 public:
  Chase(kab::Universe& u, const kab::TBox& t, const kab::ABox& a,
        int max_depth = 6, std::size_t max_facts = 20000);

  bool hit_bound() const { return hit_bound_; }
  bool consistent() const;

  // Certain answers over the query's free variables; nulls never appear in
  // answers. Results are expanded over equality classes, matching the
  // contract of the library's certain-answer interface.
  std::vector<kab::Subst> answers(const kab::Ucq& q) const;

  bool entails(const kab::Assertion& x) const;

 private:
  OTerm find(OTerm t) const;
  OTerm canon_query_term(kab::TermId t) const;
  bool unite(OTerm x, OTerm y);
  bool equal_terms(OTerm x, OTerm y) const;
  void register_term(OTerm t, int depth);
  std::set<OTerm> extension(const kab::BasicConcept& b) const;
  void run(const kab::TBox& t);

  kab::Universe& u_;
  const kab::TBox& t_;
  mutable std::map<OTerm, OTerm> parent_;
  std::map<OTerm, int> depth_;
  std::set<Fact> facts_;
  int max_depth_;
  std::size_t max_facts_;
  bool hit_bound_ = false;
  OTerm next_null_ = OTerm{1} << 32;
};

}  // namespace oracle
