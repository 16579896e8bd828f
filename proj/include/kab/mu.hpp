// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#ifndef KAB_MU_HPP
#define KAB_MU_HPP

#include <memory>
#include <string>
#include <vector>

#include "kab/query.hpp"

namespace kab {

// Temporal formula core: epistemic leaves, negation, conjunction,
// individual quantification, one-step diamond, and least fixpoints.
// Surface forms (ALL, |, ->, [-], nu) are desugared by the parser.
struct MuNode;
using Mu = std::shared_ptr<const MuNode>;

struct MuNode {
  enum class Op { Leaf, Not, And, Exists, Diamond, Var, Mu };
  Op op;
  Ecq leaf;           // Leaf
  Mu a, b;            // Not/Exists/Diamond/Mu (a), And (a, b)
  VarId x = kNone;    // Exists binder
  std::string z;      // Var name, Mu binder
};

Mu mu_leaf(Ecq q);
Mu mu_not(Mu f);
Mu mu_and(Mu f, Mu g);
Mu mu_exists(VarId x, Mu f);
Mu mu_diamond(Mu f);
Mu mu_var(std::string z);
Mu mu_mu(std::string z, Mu f);

// The greatest fixpoint as its abbreviation: nu Z.f becomes
// !mu Z.!f[Z := !Z], with no simplification of double negations.
Mu mu_nu(const std::string& z, Mu f);

// Checks performed before model checking: fixpoint variables bound and not
// shadowed, every occurrence under an even number of negations, individual
// variables bound by EX. Returns every violation.
std::vector<Diagnostic> mu_validate(const Mu& f, const Universe& u);

std::string mu_str(const Universe& u, const Mu& f);

}  // namespace kab

#endif  // KAB_MU_HPP
