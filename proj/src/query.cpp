// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#include "kab/query.hpp"

#include <algorithm>
#include <sstream>

namespace kab {

bool Cq::is_exist(VarId v) const {
  return std::find(exist_vars.begin(), exist_vars.end(), v) !=
         exist_vars.end();
}

std::vector<VarId> Ucq::free_vars() const {
  std::vector<VarId> out;
  for (const Cq& cq : disjuncts) {
    for (const QAtom& at : cq.atoms) {
      if (at.a.is_var && !cq.is_exist(at.a.id)) out.push_back(at.a.id);
      if (at.is_role && at.b.is_var && !cq.is_exist(at.b.id))
        out.push_back(at.b.id);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Ucq ucq_of(Cq cq) {
  Ucq q;
  q.disjuncts.push_back(std::move(cq));
  return q;
}

Ucq ucq_true() { return ucq_of(Cq{}); }

void Subst::set(VarId v, TermId t) {
  auto it = std::lower_bound(
      m_.begin(), m_.end(), v,
      [](const auto& p, VarId x) { return p.first < x; });
  if (it != m_.end() && it->first == v) {
    it->second = t;
    return;
  }
  m_.insert(it, {v, t});
}

std::optional<TermId> Subst::get(VarId v) const {
  auto it = std::lower_bound(
      m_.begin(), m_.end(), v,
      [](const auto& p, VarId x) { return p.first < x; });
  if (it != m_.end() && it->first == v) return it->second;
  return std::nullopt;
}

Subst Subst::restricted(const std::vector<VarId>& vars) const {
  Subst out;
  for (VarId v : vars)
    if (auto t = get(v)) out.set(v, *t);
  return out;
}

static Ecq make(EcqNode n) { return std::make_shared<const EcqNode>(std::move(n)); }

Ecq ecq_true() {
  EcqNode n;
  n.op = EcqNode::Op::True;
  return make(std::move(n));
}

Ecq ecq_ucq(Ucq q) {
  EcqNode n;
  n.op = EcqNode::Op::UcqLeaf;
  n.ucq = std::move(q);
  return make(std::move(n));
}

Ecq ecq_eq(QArg a, QArg b) {
  EcqNode n;
  n.op = EcqNode::Op::EqLeaf;
  n.ea = a;
  n.eb = b;
  return make(std::move(n));
}

Ecq ecq_not(Ecq q) {
  EcqNode n;
  n.op = EcqNode::Op::Not;
  n.child = std::move(q);
  return make(std::move(n));
}

Ecq ecq_and(Ecq a, Ecq b) {
  EcqNode n;
  n.op = EcqNode::Op::And;
  n.child = std::move(a);
  n.child2 = std::move(b);
  return make(std::move(n));
}

Ecq ecq_exists(VarId v, Ecq q) {
  EcqNode n;
  n.op = EcqNode::Op::Exists;
  n.bound = v;
  n.child = std::move(q);
  return make(std::move(n));
}

static void collect_free(const Ecq& q, std::vector<VarId>& bound,
                         std::vector<VarId>& out) {
  switch (q->op) {
    case EcqNode::Op::True:
      return;
    case EcqNode::Op::UcqLeaf:
      for (VarId v : q->ucq.free_vars())
        if (std::find(bound.begin(), bound.end(), v) == bound.end())
          out.push_back(v);
      return;
    case EcqNode::Op::EqLeaf:
      for (QArg a : {q->ea, q->eb})
        if (a.is_var &&
            std::find(bound.begin(), bound.end(), a.id) == bound.end())
          out.push_back(a.id);
      return;
    case EcqNode::Op::Not:
      collect_free(q->child, bound, out);
      return;
    case EcqNode::Op::And:
      collect_free(q->child, bound, out);
      collect_free(q->child2, bound, out);
      return;
    case EcqNode::Op::Exists: {
      bound.push_back(q->bound);
      collect_free(q->child, bound, out);
      bound.pop_back();
      return;
    }
  }
}

std::vector<VarId> ecq_free_vars(const Ecq& q) {
  std::vector<VarId> bound, out;
  collect_free(q, bound, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool ecq_equal(const Ecq& a, const Ecq& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->op != b->op) return false;
  switch (a->op) {
    case EcqNode::Op::True:
      return true;
    case EcqNode::Op::UcqLeaf:
      return a->ucq == b->ucq;
    case EcqNode::Op::EqLeaf:
      return a->ea == b->ea && a->eb == b->eb;
    case EcqNode::Op::Not:
      return ecq_equal(a->child, b->child);
    case EcqNode::Op::And:
      return ecq_equal(a->child, b->child) && ecq_equal(a->child2, b->child2);
    case EcqNode::Op::Exists:
      return a->bound == b->bound && ecq_equal(a->child, b->child);
  }
  return false;
}

static void arg_out(std::ostream& os, const Universe& u, const QArg& a) {
  if (a.is_var)
    os << u.var_name(a.id);
  else
    os << u.term_str(a.id);
}

static void cq_out(std::ostream& os, const Universe& u, const Cq& cq) {
  for (VarId v : cq.exist_vars) os << "EX " << u.var_name(v) << ". ";
  if (cq.atoms.empty()) {
    os << "TRUE";
    return;
  }
  for (std::size_t i = 0; i < cq.atoms.size(); ++i) {
    if (i) os << " & ";
    const QAtom& at = cq.atoms[i];
    os << u.pred_name(at.pred) << '(';
    arg_out(os, u, at.a);
    if (at.is_role) {
      os << ", ";
      arg_out(os, u, at.b);
    }
    os << ')';
  }
}

std::string ucq_str(const Universe& u, const Ucq& q) {
  std::ostringstream os;
  for (std::size_t i = 0; i < q.disjuncts.size(); ++i) {
    if (i) os << " | ";
    cq_out(os, u, q.disjuncts[i]);
  }
  return os.str();
}

std::string ecq_str(const Universe& u, const Ecq& q) {
  std::ostringstream os;
  switch (q->op) {
    case EcqNode::Op::True:
      os << "TRUE";
      break;
    case EcqNode::Op::UcqLeaf:
      os << '[' << ucq_str(u, q->ucq) << ']';
      break;
    case EcqNode::Op::EqLeaf:
      os << '[';
      arg_out(os, u, q->ea);
      os << " = ";
      arg_out(os, u, q->eb);
      os << ']';
      break;
    case EcqNode::Op::Not:
      os << "!(" << ecq_str(u, q->child) << ')';
      break;
    case EcqNode::Op::And:
      os << '(' << ecq_str(u, q->child) << " & " << ecq_str(u, q->child2)
         << ')';
      break;
    case EcqNode::Op::Exists:
      os << "EX " << u.var_name(q->bound) << ". (" << ecq_str(u, q->child)
         << ')';
      break;
  }
  return os.str();
}

}  // namespace kab
