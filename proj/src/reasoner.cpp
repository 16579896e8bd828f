// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#include "kab/reasoner.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace kab {

// ---------------------------------------------------------------------------
// EqClosure

bool EqClosure::same(TermId a, TermId b) const {
  auto ia = slot_.find(a), ib = slot_.find(b);
  if (ia == slot_.end() || ib == slot_.end()) return false;
  return class_of_[ia->second] == class_of_[ib->second];
}

TermId EqClosure::repr(TermId t) const {
  auto it = slot_.find(t);
  if (it == slot_.end()) return t;
  return classes_[class_of_[it->second]][0];
}

bool EqClosure::entails_equal(const Universe& u, TermId a, TermId b) const {
  if (a == b) return true;
  if (same(a, b)) return true;
  if (u.is_constant(a) || u.is_constant(b)) return false;
  if (u.term_function(a) != u.term_function(b)) return false;
  auto aa = u.term_args(a), ba = u.term_args(b);
  for (std::size_t i = 0; i < aa.size(); ++i)
    if (!entails_equal(u, aa[i], ba[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Saturation

namespace {

struct Uf {
  std::vector<std::uint32_t> parent;
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  // Returns true when the two were in different classes.
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a < b) std::swap(a, b);
    parent[a] = b;
    return true;
  }
};

}  // namespace

Reasoner::Reasoner(Universe& u, const TBox& t) : u_(u), t_(t) {}

SaturatedAbox Reasoner::saturate(const ABox& a) const {
  SaturatedAbox out;

  std::vector<TermId> dom = adom(a);
  std::unordered_map<TermId, std::uint32_t> slot;
  for (std::size_t i = 0; i < dom.size(); ++i)
    slot.emplace(dom[i], static_cast<std::uint32_t>(i));

  Uf uf;
  uf.parent.resize(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i)
    uf.parent[i] = static_cast<std::uint32_t>(i);

  for (const Assertion& x : a)
    if (x.kind == AKind::Eq) uf.unite(slot.at(x.a), slot.at(x.b));

  // Argument equivalence for the congruence rule: syntactic identity, shared
  // class, or component-wise equivalence of function terms. Recurses through
  // subterms that are not themselves in the active domain.
  std::function<bool(TermId, TermId)> equiv = [&](TermId x, TermId y) {
    if (x == y) return true;
    auto ix = slot.find(x), iy = slot.find(y);
    if (ix != slot.end() && iy != slot.end() &&
        uf.find(ix->second) == uf.find(iy->second))
      return true;
    if (u_.is_constant(x) || u_.is_constant(y)) return false;
    if (u_.term_function(x) != u_.term_function(y)) return false;
    auto xa = u_.term_args(x), ya = u_.term_args(y);
    for (std::size_t i = 0; i < xa.size(); ++i)
      if (!equiv(xa[i], ya[i])) return false;
    return true;
  };

  std::vector<TermId> fn_terms;
  for (TermId t : dom)
    if (!u_.is_constant(t)) fn_terms.push_back(t);

  const auto pos_role_incls = t_.positive_role_incls();
  const auto functs = t_.functional_roles();

  bool changed = true;
  while (changed) {
    changed = false;

    // Congruence, restricted to function terms both in the active domain.
    for (std::size_t i = 0; i < fn_terms.size(); ++i) {
      for (std::size_t j = i + 1; j < fn_terms.size(); ++j) {
        TermId x = fn_terms[i], y = fn_terms[j];
        if (u_.term_function(x) != u_.term_function(y)) continue;
        if (uf.find(slot.at(x)) == uf.find(slot.at(y))) continue;
        auto xa = u_.term_args(x), ya = u_.term_args(y);
        bool all = true;
        for (std::size_t k = 0; k < xa.size() && all; ++k)
          all = equiv(xa[k], ya[k]);
        if (all) changed |= uf.unite(slot.at(x), slot.at(y));
      }
    }

    if (functs.empty()) continue;

    // Role atoms entailed under positive role inclusions, over current
    // class roots; recomputed each round.
    std::set<std::tuple<PredId, std::uint32_t, std::uint32_t>> atoms;
    for (const Assertion& x : a)
      if (x.kind == AKind::Role)
        atoms.insert({x.pred, uf.find(slot.at(x.a)), uf.find(slot.at(x.b))});
    bool grew = true;
    while (grew) {
      grew = false;
      for (const TBoxAssertion* ri : pos_role_incls) {
        std::vector<std::tuple<PredId, std::uint32_t, std::uint32_t>> add;
        for (const auto& [p, s, o] : atoms) {
          if (p != ri->lhs_r.role) continue;
          std::uint32_t ls = ri->lhs_r.inverse ? o : s;
          std::uint32_t lo = ri->lhs_r.inverse ? s : o;
          if (ri->rhs_r.inverse)
            add.push_back({ri->rhs_r.role, lo, ls});
          else
            add.push_back({ri->rhs_r.role, ls, lo});
        }
        for (const auto& t : add) grew |= atoms.insert(t).second;
      }
    }

    for (const RoleExpr& f : functs) {
      // funct P: same subject root forces equal objects; funct inv(P)
      // works on the flipped orientation.
      std::unordered_map<std::uint32_t, std::uint32_t> first;
      for (const auto& [p, s, o] : atoms) {
        if (p != f.role) continue;
        std::uint32_t key = f.inverse ? o : s;
        std::uint32_t val = f.inverse ? s : o;
        auto [it, fresh] = first.emplace(key, val);
        if (!fresh) changed |= uf.unite(it->second, val);
      }
    }
  }

  // Finalize classes, members in global term order.
  std::unordered_map<std::uint32_t, std::uint32_t> root_class;
  std::vector<std::vector<TermId>> classes;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    std::uint32_t r = uf.find(static_cast<std::uint32_t>(i));
    auto [it, fresh] =
        root_class.emplace(r, static_cast<std::uint32_t>(classes.size()));
    if (fresh) classes.emplace_back();
    classes[it->second].push_back(dom[i]);
  }
  for (auto& c : classes)
    std::sort(c.begin(), c.end(),
              [&](TermId x, TermId y) { return u_.term_less(x, y); });
  std::vector<std::uint32_t> order(classes.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return u_.term_less(classes[x][0], classes[y][0]);
  });
  std::vector<std::uint32_t> rank(classes.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  out.eq.slot_ = slot;
  out.eq.classes_.resize(classes.size());
  for (std::uint32_t i = 0; i < classes.size(); ++i)
    out.eq.classes_[rank[i]] = std::move(classes[i]);
  out.eq.class_of_.resize(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i)
    out.eq.class_of_[i] = rank[root_class.at(uf.find(
        static_cast<std::uint32_t>(i)))];

  std::vector<Assertion> canon;
  for (const Assertion& x : a) {
    if (x.kind == AKind::Eq) continue;
    Assertion y = x;
    y.a = out.eq.repr(y.a);
    if (y.kind == AKind::Role) y.b = out.eq.repr(y.b);
    canon.push_back(y);
  }
  out.abox = ABox(std::move(canon));
  for (const Assertion& x : out.abox)
    out.index[x.pred].emplace_back(x.a, x.b);

  out.adom_orig = dom;
  std::sort(out.adom_orig.begin(), out.adom_orig.end(),
            [&](TermId x, TermId y) { return u_.term_less(x, y); });
  return out;
}

// ---------------------------------------------------------------------------
// PerfectRef rewriting

namespace {

int var_occurrences(const RewCq& rq, VarId v) {
  int n = 0;
  for (const QAtom& at : rq.atoms) {
    if (at.a.is_var && at.a.id == v) ++n;
    if (at.is_role && at.b.is_var && at.b.id == v) ++n;
  }
  return n;
}

bool is_distinguished(const RewCq& rq, VarId v) {
  for (const QArg& h : rq.head)
    if (h.is_var && h.id == v) return true;
  return false;
}

bool is_unbound(const RewCq& rq, const QArg& a) {
  return a.is_var && !is_distinguished(rq, a.id) &&
         var_occurrences(rq, a.id) == 1;
}

}  // namespace

const std::vector<RewCq>& Reasoner::rewrite_internal(const Ucq& q) const {
  std::string key = ucq_str(u_, q);
  auto it = rew_cache_.find(key);
  if (it != rew_cache_.end()) return it->second;
  auto res = perfect_ref(q);
  return rew_cache_.emplace(std::move(key), std::move(res)).first->second;
}

namespace {

// Deterministic key for duplicate suppression, canonical up to a renaming
// heuristic: distinguished variables are named by head position, existential
// ones by scan order over atoms sorted with existentials wildcarded.
std::string cq_key(const Universe& u, const RewCq& rq) {
  std::unordered_map<VarId, std::string> names;
  for (std::size_t i = 0; i < rq.head.size(); ++i)
    if (rq.head[i].is_var)
      names.emplace(rq.head[i].id, "d" + std::to_string(i));

  auto arg_str = [&](const QArg& a, bool wild) -> std::string {
    if (!a.is_var) return u.term_str(a.id);
    auto it = names.find(a.id);
    if (it != names.end()) return it->second;
    return wild ? "?" : "e?";
  };
  auto atom_str = [&](const QAtom& at, bool wild) {
    std::string s = u.pred_name(at.pred);
    s += '(';
    s += arg_str(at.a, wild);
    if (at.is_role) {
      s += ',';
      s += arg_str(at.b, wild);
    }
    s += ')';
    return s;
  };

  std::vector<std::size_t> idx(rq.atoms.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    return atom_str(rq.atoms[x], true) < atom_str(rq.atoms[y], true);
  });
  int counter = 0;
  for (std::size_t i : idx) {
    const QAtom& at = rq.atoms[i];
    for (const QArg* a : {&at.a, at.is_role ? &at.b : nullptr}) {
      if (!a || !a->is_var) continue;
      if (!names.count(a->id))
        names.emplace(a->id, "e" + std::to_string(counter++));
    }
  }

  std::vector<std::string> parts;
  for (const QAtom& at : rq.atoms) parts.push_back(atom_str(at, false));
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (std::size_t i = 0; i < rq.head.size(); ++i) {
    key += rq.head[i].is_var ? names.at(rq.head[i].id)
                             : u.term_str(rq.head[i].id);
    key += '|';
  }
  key += "::";
  for (const std::string& p : parts) {
    key += p;
    key += '&';
  }
  return key;
}

}  // namespace

std::vector<RewCq> Reasoner::perfect_ref(const Ucq& q) const {
  std::vector<VarId> orig_vars = q.free_vars();

  std::vector<RewCq> out;
  std::unordered_set<std::string> seen;
  auto push = [&](RewCq rq) {
    std::string k = cq_key(u_, rq);
    if (seen.insert(std::move(k)).second) out.push_back(std::move(rq));
  };

  for (const Cq& cq : q.disjuncts) {
    RewCq rq;
    for (VarId v : orig_vars) rq.head.push_back(QArg::of_var(v));
    rq.atoms = cq.atoms;
    push(std::move(rq));
  }

  const auto pos_c = t_.positive_concept_incls();
  const auto pos_r = t_.positive_role_incls();

  auto atom_of_basic = [&](const BasicConcept& b, const QArg& u) -> QAtom {
    if (!b.is_exists) return QAtom{b.name, false, u, {}};
    VarId w = u_.fresh_var("w");
    if (b.role.inverse)
      return QAtom{b.role.role, true, QArg::of_var(w), u};
    return QAtom{b.role.role, true, u, QArg::of_var(w)};
  };

  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out.size() > 100000)
      throw Error("query rewriting exceeded its size limit");
    RewCq rq = out[k];  // copy: out may reallocate

    // Positive inclusions, applied right to left.
    for (std::size_t ai = 0; ai < rq.atoms.size(); ++ai) {
      const QAtom at = rq.atoms[ai];
      auto replace_with = [&](QAtom na) {
        RewCq nq = rq;
        nq.atoms[ai] = na;
        push(std::move(nq));
      };
      if (!at.is_role) {
        for (const TBoxAssertion* I : pos_c)
          if (!I->rhs_c.is_exists && I->rhs_c.name == at.pred)
            replace_with(atom_of_basic(I->lhs_c, at.a));
      } else {
        for (const TBoxAssertion* I : pos_c) {
          if (!I->rhs_c.is_exists || I->rhs_c.role.role != at.pred) continue;
          if (!I->rhs_c.role.inverse && is_unbound(rq, at.b))
            replace_with(atom_of_basic(I->lhs_c, at.a));
          else if (I->rhs_c.role.inverse && is_unbound(rq, at.a))
            replace_with(atom_of_basic(I->lhs_c, at.b));
        }
        for (const TBoxAssertion* I : pos_r) {
          if (I->rhs_r.role != at.pred) continue;
          QArg u1 = at.a, u2 = at.b;
          if (I->rhs_r.inverse) std::swap(u1, u2);
          if (I->lhs_r.inverse)
            replace_with(QAtom{I->lhs_r.role, true, u2, u1});
          else
            replace_with(QAtom{I->lhs_r.role, true, u1, u2});
        }
      }
    }

    // Unification of atom pairs.
    for (std::size_t i = 0; i < rq.atoms.size(); ++i) {
      for (std::size_t j = i + 1; j < rq.atoms.size(); ++j) {
        const QAtom& g1 = rq.atoms[i];
        const QAtom& g2 = rq.atoms[j];
        if (g1.pred != g2.pred || g1.is_role != g2.is_role) continue;

        std::unordered_map<VarId, QArg> sub;
        std::function<QArg(QArg)> resolve = [&](QArg a) {
          while (a.is_var) {
            auto it = sub.find(a.id);
            if (it == sub.end()) break;
            a = it->second;
          }
          return a;
        };
        auto unify1 = [&](QArg x, QArg y) -> bool {
          x = resolve(x);
          y = resolve(y);
          if (x == y) return true;
          if (!x.is_var && !y.is_var) return false;
          if (!x.is_var) std::swap(x, y);
          // x is a variable. Prefer eliminating existential variables;
          // between two of a kind, eliminate the larger id.
          if (y.is_var) {
            bool xd = is_distinguished(rq, x.id);
            bool yd = is_distinguished(rq, y.id);
            if (xd && !yd) std::swap(x, y);
            else if (xd == yd && x.id < y.id) std::swap(x, y);
          }
          sub.emplace(x.id, y);
          return true;
        };
        bool ok = unify1(g1.a, g2.a) && (!g1.is_role || unify1(g1.b, g2.b));
        if (!ok) continue;
        // An empty unifier still merges syntactically identical atoms.

        RewCq nq;
        nq.head = rq.head;
        for (QArg& h : nq.head) h = resolve(h);
        for (std::size_t t = 0; t < rq.atoms.size(); ++t) {
          if (t == j) continue;  // merged into atom i
          QAtom na = rq.atoms[t];
          na.a = resolve(na.a);
          if (na.is_role) na.b = resolve(na.b);
          if (std::find(nq.atoms.begin(), nq.atoms.end(), na) ==
              nq.atoms.end())
            nq.atoms.push_back(na);
        }
        push(std::move(nq));
      }
    }
  }
  return out;
}

Ucq Reasoner::rewrite(const Ucq& q) const {
  std::vector<VarId> orig_vars = q.free_vars();
  Ucq out;
  for (const RewCq& rq : rewrite_internal(q)) {
    bool injective = true;
    std::unordered_set<VarId> hv;
    for (const QArg& h : rq.head)
      if (!h.is_var || !hv.insert(h.id).second) injective = false;
    if (!injective) continue;
    Cq cq;
    cq.atoms = rq.atoms;
    std::vector<VarId> vs;
    for (const QAtom& at : cq.atoms) {
      if (at.a.is_var) vs.push_back(at.a.id);
      if (at.is_role && at.b.is_var) vs.push_back(at.b.id);
    }
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    for (VarId v : vs)
      if (!hv.count(v)) cq.exist_vars.push_back(v);
    out.disjuncts.push_back(std::move(cq));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Database evaluation

namespace {

// Canonical database value of a ground term: its representative when the
// term belongs to the active domain, directly or through congruence with a
// domain function term; kNone otherwise.
TermId canon_in(const Universe& u, const SaturatedAbox& s, TermId t) {
  if (s.eq.in_adom(t)) return s.eq.repr(t);
  if (!u.is_constant(t)) {
    for (TermId cand : s.adom_orig) {
      if (u.is_constant(cand)) continue;
      if (u.term_function(cand) != u.term_function(t)) continue;
      if (s.eq.entails_equal(u, t, cand)) return s.eq.repr(cand);
    }
  }
  return kNone;
}

}  // namespace

void Reasoner::db_eval(const RewCq& rq_in, const std::vector<VarId>& orig_vars,
                       const SaturatedAbox& s, const Subst& bound,
                       std::vector<Subst>& out) const {
  // Ground terms written in the query compare against canonical facts, so
  // map them to representatives first; a term with no canonical value makes
  // the conjunct unsatisfiable.
  RewCq rq = rq_in;
  for (QAtom& at : rq.atoms) {
    for (QArg* a : {&at.a, at.is_role ? &at.b : nullptr}) {
      if (!a || a->is_var) continue;
      TermId c = canon_in(u_, s, a->id);
      if (c == kNone) return;
      *a = QArg::of_term(c);
    }
  }
  for (QArg& h : rq.head) {
    if (h.is_var) continue;
    TermId c = canon_in(u_, s, h.id);
    if (c == kNone) return;
    h = QArg::of_term(c);
  }
  assert(rq.head.size() == orig_vars.size());

  // Apply the pre-binding through the head coupling.
  std::unordered_map<VarId, TermId> fixed;
  for (std::size_t i = 0; i < rq.head.size(); ++i) {
    auto tv = bound.get(orig_vars[i]);
    if (!tv) continue;
    const QArg& h = rq.head[i];
    if (!h.is_var) {
      if (h.id != *tv) return;  // conjunct pinned to a different constant
    } else {
      auto [it, fresh] = fixed.emplace(h.id, *tv);
      if (!fresh && it->second != *tv) return;
    }
  }

  std::vector<QAtom> atoms = rq.atoms;
  for (QAtom& at : atoms) {
    for (QArg* a : {&at.a, at.is_role ? &at.b : nullptr}) {
      if (!a || !a->is_var) continue;
      auto it = fixed.find(a->id);
      if (it != fixed.end()) *a = QArg::of_term(it->second);
    }
  }

  std::unordered_map<VarId, TermId> asg;
  std::vector<Subst> local;

  std::function<void(std::size_t)> match = [&](std::size_t i) {
    if (i == atoms.size()) {
      // Instantiate the head; any head variable untouched by the atoms
      // ranges over every representative.
      Subst res;
      std::vector<VarId> open;
      for (std::size_t p = 0; p < rq.head.size(); ++p) {
        if (bound.has(orig_vars[p])) continue;
        const QArg& h = rq.head[p];
        TermId val = kNone;
        if (!h.is_var) {
          val = h.id;
        } else {
          auto itf = fixed.find(h.id);
          auto ita = asg.find(h.id);
          if (itf != fixed.end()) val = itf->second;
          else if (ita != asg.end()) val = ita->second;
        }
        if (val == kNone)
          open.push_back(orig_vars[p]);
        else
          res.set(orig_vars[p], val);
      }
      if (open.empty()) {
        local.push_back(std::move(res));
        return;
      }
      std::sort(open.begin(), open.end());
      open.erase(std::unique(open.begin(), open.end()), open.end());
      // Head variables absent from every atom: expand over class
      // representatives. Rare; kept for totality of the semantics.
      std::function<void(std::size_t, Subst)> expand = [&](std::size_t k,
                                                           Subst acc) {
        if (k == open.size()) {
          local.push_back(std::move(acc));
          return;
        }
        for (const auto& cls : s.eq.classes()) {
          Subst next = acc;
          next.set(open[k], cls[0]);
          expand(k + 1, std::move(next));
        }
      };
      expand(0, std::move(res));
      return;
    }
    const QAtom& at = atoms[i];
    auto it = s.index.find(at.pred);
    if (it == s.index.end()) return;
    auto val_of = [&](const QArg& a) -> TermId {
      if (!a.is_var) return a.id;
      auto f = asg.find(a.id);
      return f == asg.end() ? kNone : f->second;
    };
    for (const auto& [fa, fb] : it->second) {
      TermId va = val_of(at.a);
      if (va != kNone && va != fa) continue;
      TermId vb = at.is_role ? val_of(at.b) : kNone;
      if (at.is_role && vb != kNone && vb != fb) continue;
      bool na = false, nb = false;
      if (va == kNone && at.a.is_var) {
        asg.emplace(at.a.id, fa);
        na = true;
        if (at.is_role && at.b.is_var && vb == kNone) {
          // re-resolve in case both positions share the variable
          auto f = asg.find(at.b.id);
          vb = f == asg.end() ? kNone : f->second;
          if (vb != kNone && vb != fb) {
            asg.erase(at.a.id);
            continue;
          }
        }
      }
      if (at.is_role && at.b.is_var && vb == kNone) {
        asg.emplace(at.b.id, fb);
        nb = true;
      }
      match(i + 1);
      if (na) asg.erase(at.a.id);
      if (nb) asg.erase(at.b.id);
    }
  };
  match(0);

  out.insert(out.end(), local.begin(), local.end());
}

// ---------------------------------------------------------------------------
// Consistency

bool Reasoner::consistent(const SaturatedAbox& s) const {
  for (const TBoxAssertion* ni : t_.negative_incls()) {
    Cq cq;
    VarId x = u_.var("@x");
    if (ni->kind == TBoxAssertion::Kind::ConceptIncl) {
      auto atom_of = [&](const BasicConcept& b) -> QAtom {
        if (!b.is_exists) return QAtom{b.name, false, QArg::of_var(x), {}};
        VarId w = u_.fresh_var("w");
        if (b.role.inverse)
          return QAtom{b.role.role, true, QArg::of_var(w), QArg::of_var(x)};
        return QAtom{b.role.role, true, QArg::of_var(x), QArg::of_var(w)};
      };
      cq.atoms.push_back(atom_of(ni->lhs_c));
      cq.atoms.push_back(atom_of(ni->rhs_c));
    } else {
      VarId y = u_.var("@y");
      auto role_atom = [&](const RoleExpr& r) -> QAtom {
        if (r.inverse)
          return QAtom{r.role, true, QArg::of_var(y), QArg::of_var(x)};
        return QAtom{r.role, true, QArg::of_var(x), QArg::of_var(y)};
      };
      cq.atoms.push_back(role_atom(ni->lhs_r));
      cq.atoms.push_back(role_atom(ni->rhs_r));
    }
    // Boolean violation query: everything existential.
    std::vector<VarId> vs;
    for (const QAtom& at : cq.atoms) {
      if (at.a.is_var) vs.push_back(at.a.id);
      if (at.is_role && at.b.is_var) vs.push_back(at.b.id);
    }
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    cq.exist_vars = vs;

    Ucq q = ucq_of(std::move(cq));
    std::vector<Subst> hits;
    for (const RewCq& rq : rewrite_internal(q)) {
      db_eval(rq, {}, s, {}, hits);
      if (!hits.empty()) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// KbContext

KbContext::KbContext(const Reasoner& r, ABox a)
    : r_(r), original_(std::move(a)), sat_(r.saturate(original_)),
      consistent_(r.consistent(sat_)) {}

TermId KbContext::canon_for_db(TermId t) const {
  return canon_in(r_.universe(), sat_, t);
}

std::vector<Subst> KbContext::answers_ucq(const Ucq& q,
                                          const Subst& theta) const {
  std::vector<VarId> orig_vars = q.free_vars();

  Subst bound;
  for (VarId v : orig_vars) {
    if (auto tv = theta.get(v)) {
      TermId c = canon_for_db(*tv);
      if (c == kNone) return {};
      bound.set(v, c);
    }
  }

  std::vector<Subst> raw;
  for (const RewCq& rq : r_.rewrite_internal(q))
    r_.db_eval(rq, orig_vars, sat_, bound, raw);

  // Expand representatives back to all class members (original adom terms).
  std::vector<Subst> out;
  for (const Subst& s : raw) {
    std::vector<Subst> acc{Subst{}};
    for (const auto& [v, t] : s.items()) {
      const std::vector<TermId>* members = nullptr;
      if (sat_.eq.in_adom(t))
        for (const auto& cls : sat_.eq.classes())
          if (std::find(cls.begin(), cls.end(), t) != cls.end()) {
            members = &cls;
            break;
          }
      std::vector<Subst> next;
      for (const Subst& p : acc) {
        if (members) {
          for (TermId m : *members) {
            Subst np = p;
            np.set(v, m);
            next.push_back(std::move(np));
          }
        } else {
          Subst np = p;
          np.set(v, t);
          next.push_back(std::move(np));
        }
      }
      acc = std::move(next);
    }
    out.insert(out.end(), acc.begin(), acc.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool KbContext::holds_ucq(const Ucq& q, const Subst& total) const {
  std::vector<VarId> orig_vars = q.free_vars();
  Subst bound;
  for (VarId v : orig_vars) {
    auto tv = total.get(v);
    if (!tv) throw Error("UCQ evaluated with an unbound free variable");
    TermId c = canon_for_db(*tv);
    if (c == kNone) return false;
    bound.set(v, c);
  }
  std::vector<Subst> hits;
  for (const RewCq& rq : r_.rewrite_internal(q)) {
    r_.db_eval(rq, orig_vars, sat_, bound, hits);
    if (!hits.empty()) return true;
  }
  return false;
}

bool KbContext::holds(const Ecq& q, const Subst& sigma) const {
  if (!consistent_) throw InconsistentKb();
  Subst s = sigma;
  return holds_inner(q, s);
}

bool KbContext::holds_inner(const Ecq& q, Subst& sigma) const {
  Subst key_s = sigma.restricted(ecq_free_vars(q));
  auto key = std::make_pair(q.get(), key_s);
  auto it = ecq_memo_.find(key);
  if (it != ecq_memo_.end()) return it->second;

  bool res = false;
  switch (q->op) {
    case EcqNode::Op::True:
      res = true;
      break;
    case EcqNode::Op::UcqLeaf:
      res = holds_ucq(q->ucq, key_s);
      break;
    case EcqNode::Op::EqLeaf: {
      auto val = [&](const QArg& a) -> TermId {
        if (!a.is_var) return a.id;
        auto tv = sigma.get(a.id);
        if (!tv) throw Error("equality atom with an unbound variable");
        return *tv;
      };
      res = sat_.eq.entails_equal(r_.universe(), val(q->ea), val(q->eb));
      break;
    }
    case EcqNode::Op::Not:
      res = !holds_inner(q->child, sigma);
      break;
    case EcqNode::Op::And:
      res = holds_inner(q->child, sigma) && holds_inner(q->child2, sigma);
      break;
    case EcqNode::Op::Exists: {
      auto saved = sigma.get(q->bound);
      for (TermId t : sat_.adom_orig) {
        sigma.set(q->bound, t);
        if (holds_inner(q->child, sigma)) {
          res = true;
          break;
        }
      }
      if (saved)
        sigma.set(q->bound, *saved);
      break;
    }
  }
  ecq_memo_.emplace(key, res);
  return res;
}

std::vector<Subst> KbContext::answers_ecq(const Ecq& q,
                                          const Subst& theta) const {
  if (!consistent_) throw InconsistentKb();

  std::vector<VarId> fv;
  for (VarId v : ecq_free_vars(q))
    if (!theta.has(v)) fv.push_back(v);

  if (fv.empty()) {
    Subst s = theta;
    return holds_inner(q, s) ? std::vector<Subst>{Subst{}}
                             : std::vector<Subst>{};
  }

  // Seed candidates from top-level positive UCQ conjuncts; everything else
  // ranges over the active domain.
  std::vector<const EcqNode*> conjs;
  std::function<void(const Ecq&)> flat = [&](const Ecq& n) {
    if (n->op == EcqNode::Op::And) {
      flat(n->child);
      flat(n->child2);
    } else {
      conjs.push_back(n.get());
    }
  };
  flat(q);

  std::unordered_map<VarId, std::vector<TermId>> cand;
  for (const EcqNode* c : conjs) {
    if (c->op != EcqNode::Op::UcqLeaf) continue;
    std::vector<VarId> cfv = c->ucq.free_vars();
    bool fresh = false;
    for (VarId v : cfv)
      if (!theta.has(v) && !cand.count(v)) fresh = true;
    if (!fresh) continue;
    std::vector<Subst> ans = answers_ucq(c->ucq, theta);
    for (VarId v : cfv) {
      if (theta.has(v) || cand.count(v)) continue;
      std::vector<TermId> vals;
      for (const Subst& s : ans)
        if (auto tv = s.get(v)) vals.push_back(*tv);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      cand.emplace(v, std::move(vals));
    }
  }

  std::vector<std::vector<TermId>> domains;
  for (VarId v : fv) {
    auto it = cand.find(v);
    if (it != cand.end())
      domains.push_back(it->second);
    else
      domains.push_back(sat_.adom_orig);
  }

  std::vector<Subst> out;
  Subst sigma = theta;
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == fv.size()) {
      if (holds_inner(q, sigma)) {
        Subst res;
        for (VarId v : fv) res.set(v, *sigma.get(v));
        out.push_back(std::move(res));
      }
      return;
    }
    for (TermId t : domains[i]) {
      sigma.set(fv[i], t);
      walk(i + 1);
    }
  };
  walk(0);

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool KbContext::entails(const Assertion& x) const {
  if (!consistent_) return true;
  const Universe& u = r_.universe();
  if (x.kind == AKind::Eq) return sat_.eq.entails_equal(u, x.a, x.b);

  Cq cq;
  if (x.kind == AKind::Concept) {
    cq.atoms.push_back(QAtom{x.pred, false, QArg::of_term(x.a), {}});
  } else {
    cq.atoms.push_back(
        QAtom{x.pred, true, QArg::of_term(x.a), QArg::of_term(x.b)});
  }
  return holds_ucq(ucq_of(std::move(cq)), {});
}

// ---------------------------------------------------------------------------
// Equivalence and single-shot wrappers

bool abox_equivalent(const Reasoner& r, const ABox& a1, const ABox& a2,
                     const std::vector<PredId>& lambda) {
  KbContext c1(r, a1), c2(r, a2);
  if (!c1.consistent() || !c2.consistent()) throw InconsistentKb();
  auto in_lambda = [&](PredId p) {
    return std::find(lambda.begin(), lambda.end(), p) != lambda.end();
  };
  auto covers = [&](const KbContext& c, const ABox& target) {
    for (const Assertion& x : target) {
      if (x.kind != AKind::Eq && !in_lambda(x.pred)) continue;
      if (!c.entails(x)) return false;
    }
    return true;
  };
  return covers(c1, a2) && covers(c2, a1);
}

SaturatedAbox saturate(Universe& u, const TBox& t, const ABox& a) {
  return Reasoner(u, t).saturate(a);
}

bool is_consistent(Universe& u, const TBox& t, const ABox& a) {
  Reasoner r(u, t);
  return r.consistent(r.saturate(a));
}

EntailResult entails(Universe& u, const TBox& t, const ABox& a,
                     const Assertion& x) {
  Reasoner r(u, t);
  KbContext c(r, a);
  return EntailResult{c.entails(x), c.consistent()};
}

Ucq rewrite_ucq(Universe& u, const TBox& t, const Ucq& q) {
  return Reasoner(u, t).rewrite(q);
}

std::vector<Subst> certain_answers_ucq(Universe& u, const TBox& t,
                                       const ABox& a, const Ucq& q) {
  Reasoner r(u, t);
  KbContext c(r, a);
  if (!c.consistent()) throw InconsistentKb();
  return c.answers_ucq(q, {});
}

bool eval_ecq(Universe& u, const TBox& t, const ABox& a, const Ecq& q,
              const Subst& sigma) {
  Reasoner r(u, t);
  KbContext c(r, a);
  return c.holds(q, sigma);
}

}  // namespace kab
