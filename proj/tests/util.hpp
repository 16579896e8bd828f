// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#ifndef KABTEST_UTIL_HPP
#define KABTEST_UTIL_HPP

#include <cstdlib>
#include <initializer_list>
#include <utility>
#include <vector>

#include "kab/abox.hpp"
#include "kab/query.hpp"
#include "kab/symbols.hpp"
#include "kab/tbox.hpp"

namespace kabtest {

inline kab::QArg V(kab::VarId v) { return kab::QArg::of_var(v); }
inline kab::QArg G(kab::TermId t) { return kab::QArg::of_term(t); }

inline kab::QAtom catom(kab::PredId p, kab::QArg a) {
  return kab::QAtom{p, false, a, {}};
}
inline kab::QAtom ratom(kab::PredId p, kab::QArg a, kab::QArg b) {
  return kab::QAtom{p, true, a, b};
}

inline kab::Cq mkcq(std::vector<kab::QAtom> atoms,
                    std::vector<kab::VarId> ex = {}) {
  kab::Cq c;
  c.atoms = std::move(atoms);
  c.exist_vars = std::move(ex);
  return c;
}

inline kab::Subst sub(
    std::initializer_list<std::pair<kab::VarId, kab::TermId>> xs) {
  kab::Subst s;
  for (const auto& [v, t] : xs) s.set(v, t);
  return s;
}

inline std::uint64_t test_seed() {
  if (const char* e = std::getenv("KAB_TEST_SEED")) {
    char* end = nullptr;
    std::uint64_t v = std::strtoull(e, &end, 10);
    if (end && *end == '\0') return v;
  }
  return 20260821ULL;
}

}  // namespace kabtest

#endif  // KABTEST_UTIL_HPP
