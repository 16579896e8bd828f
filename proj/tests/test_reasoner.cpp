// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#include "kab/reasoner.hpp"

#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "util.hpp"

using namespace kab;
using kabtest::G;
using kabtest::V;
using kabtest::catom;
using kabtest::mkcq;
using kabtest::ratom;
using kabtest::sub;

TEST_CASE("explicit equalities merge into classes") {
  Universe u;
  TBox t;
  PredId P = u.pred("P", true);
  TermId a = u.constant("a"), b = u.constant("b"), c = u.constant("c");
  ABox ab({role_of(P, a, b), eq_of(a, c)});

  Reasoner r(u, t);
  SaturatedAbox s = r.saturate(ab);
  CHECK(s.eq.same(a, c));
  CHECK(!s.eq.same(a, b));
  CHECK(s.eq.repr(c) == a);  // least member represents
  CHECK(s.abox.contains(role_of(P, a, b)));
  CHECK(s.abox.size() == 1);

  KbContext kc(r, ab);
  CHECK(kc.entails(eq_of(a, c)));
  CHECK(kc.entails(eq_of(c, a)));
  CHECK(!kc.entails(eq_of(b, c)));
  CHECK(kc.entails(role_of(P, c, b)));  // through the class of a
}

TEST_CASE("functional roles merge fillers") {
  Universe u;
  TBox t;
  PredId P = u.pred("P", true);
  t.add(TBoxAssertion::funct(RoleExpr{P, false}));
  TermId a = u.constant("a"), b = u.constant("b"), c = u.constant("c");

  ABox ab({role_of(P, a, b), role_of(P, a, c)});
  Reasoner r(u, t);
  SaturatedAbox s = r.saturate(ab);
  CHECK(s.eq.same(b, c));
  CHECK(!s.eq.same(a, b));

  oracle::Chase ch(u, t, ab);
  CHECK(!ch.hit_bound());
  CHECK(ch.entails(eq_of(b, c)));
}

TEST_CASE("functionality applies through role inclusions") {
  Universe u;
  TBox t;
  PredId R = u.pred("R", true), P = u.pred("P", true);
  t.add(TBoxAssertion::role_incl(RoleExpr{R, false}, RoleExpr{P, false}));
  t.add(TBoxAssertion::funct(RoleExpr{P, false}));
  CHECK(!t.wellformedness_violations(u).empty());  // not well formed; the
  // reasoner still saturates it, which the next checks rely on.
  TermId a = u.constant("a"), b = u.constant("b"), c = u.constant("c");

  ABox ab({role_of(R, a, b), role_of(P, a, c)});
  Reasoner r(u, t);
  SaturatedAbox s = r.saturate(ab);
  CHECK(s.eq.same(b, c));
}

TEST_CASE("inverse functionality") {
  Universe u;
  TBox t;
  PredId P = u.pred("P", true);
  t.add(TBoxAssertion::funct(RoleExpr{P, true}));
  TermId a = u.constant("a"), b = u.constant("b"), c = u.constant("c");

  ABox ab({role_of(P, b, a), role_of(P, c, a)});
  Reasoner r(u, t);
  CHECK(r.saturate(ab).eq.same(b, c));
}

TEST_CASE("congruence closes over function terms in the domain") {
  Universe u;
  TBox t;
  PredId A = u.pred("A", false), B = u.pred("B", false);
  SymbolId f = u.function("f", 1);
  TermId a = u.constant("a"), b = u.constant("b");
  TermId fa = u.apply(f, std::vector<TermId>{a});
  TermId fb = u.apply(f, std::vector<TermId>{b});

  ABox ab({concept_of(A, fa), concept_of(B, fb), eq_of(a, b)});
  Reasoner r(u, t);
  SaturatedAbox s = r.saturate(ab);
  CHECK(s.eq.same(fa, fb));

  KbContext kc(r, ab);
  CHECK(kc.entails(concept_of(A, fb)));
  CHECK(kc.entails(concept_of(B, fa)));

  oracle::Chase ch(u, t, ab);
  CHECK(ch.entails(concept_of(A, fb)));
}

TEST_CASE("congruence recurses through subterms outside the domain") {
  Universe u;
  TBox t;
  PredId A = u.pred("A", false), B = u.pred("B", false);
  SymbolId f = u.function("f", 1), g = u.function("g", 1);
  TermId a = u.constant("a"), b = u.constant("b");
  TermId ga = u.apply(g, std::vector<TermId>{a});
  TermId gb = u.apply(g, std::vector<TermId>{b});
  TermId fga = u.apply(f, std::vector<TermId>{ga});
  TermId fgb = u.apply(f, std::vector<TermId>{gb});

  // g(a), g(b) appear only as subterms; the equality still propagates.
  ABox ab({concept_of(A, fga), concept_of(B, fgb), eq_of(a, b)});
  Reasoner r(u, t);
  SaturatedAbox s = r.saturate(ab);
  CHECK(s.eq.same(fga, fgb));
  CHECK(s.eq.entails_equal(u, ga, gb));
  CHECK(!s.eq.in_adom(ga));

  oracle::Chase ch(u, t, ab);
  CHECK(ch.entails(eq_of(fga, fgb)));
}

TEST_CASE("rewriting expands concept hierarchies") {
  Universe u;
  TBox t;
  PredId Student = u.pred("Student", false), Person = u.pred("Person", false);
  t.add(TBoxAssertion::concept_incl(BasicConcept::of_name(Student),
                                    BasicConcept::of_name(Person)));
  TermId s = u.constant("s");
  VarId x = u.var("x");

  ABox ab({concept_of(Student, s)});
  Ucq q = ucq_of(mkcq({catom(Person, V(x))}));

  Ucq rew = rewrite_ucq(u, t, q);
  CHECK(rew.disjuncts.size() == 2);

  auto ans = certain_answers_ucq(u, t, ab, q);
  REQUIRE(ans.size() == 1);
  CHECK(ans[0].get(x) == s);

  oracle::Chase ch(u, t, ab);
  CHECK(ch.answers(q) == ans);
}

TEST_CASE("rewriting reaches through inverse role domains") {
  Universe u;
  TBox t;
  PredId teaches = u.pred("teaches", true), Course = u.pred("Course", false);
  t.add(TBoxAssertion::concept_incl(
      BasicConcept::of_exists(RoleExpr{teaches, true}),
      BasicConcept::of_name(Course)));
  TermId tt = u.constant("t"), cc = u.constant("c");
  VarId x = u.var("x");

  ABox ab({role_of(teaches, tt, cc)});
  Ucq q = ucq_of(mkcq({catom(Course, V(x))}));
  auto ans = certain_answers_ucq(u, t, ab, q);
  REQUIRE(ans.size() == 1);
  CHECK(ans[0].get(x) == cc);

  oracle::Chase ch(u, t, ab);
  CHECK(ch.answers(q) == ans);
}

TEST_CASE("reduction couples answer variables through shared witnesses") {
  Universe u;
  TBox t;
  PredId A = u.pred("A", false), P = u.pred("P", true);
  t.add(TBoxAssertion::concept_incl(BasicConcept::of_name(A),
                                    BasicConcept::of_exists(RoleExpr{P, false})));
  TermId c = u.constant("c"), d = u.constant("d");
  VarId x1 = u.var("x1"), x2 = u.var("x2"), y = u.var("y");

  // q(x1, x2) = EX y. P(x1, y) & P(x2, y)
  Ucq q = ucq_of(mkcq({ratom(P, V(x1), V(y)), ratom(P, V(x2), V(y))}, {y}));

  SUBCASE("single constant yields only the diagonal") {
    ABox ab({concept_of(A, c)});
    auto ans = certain_answers_ucq(u, t, ab, q);
    REQUIRE(ans.size() == 1);
    CHECK(ans[0].get(x1) == c);
    CHECK(ans[0].get(x2) == c);

    oracle::Chase ch(u, t, ab);
    CHECK(!ch.hit_bound());
    CHECK(ch.answers(q) == ans);
  }

  SUBCASE("two constants yield both diagonals and nothing else") {
    ABox ab({concept_of(A, c), concept_of(A, d)});
    auto ans = certain_answers_ucq(u, t, ab, q);
    CHECK(ans.size() == 2);
    for (const Subst& s : ans) CHECK(s.get(x1) == s.get(x2));

    oracle::Chase ch(u, t, ab);
    CHECK(ch.answers(q) == ans);
  }

  SUBCASE("the plain UCQ view omits the coupled conjunct") {
    // Over the same data the injective-head rewriting has no conjunct
    // producing (c, c); evaluating it directly must miss that answer,
    // which is exactly why certain answers use the internal form.
    ABox ab({concept_of(A, c)});
    Reasoner r(u, t);
    Ucq rew = r.rewrite(q);
    for (const Cq& cq : rew.disjuncts) {
      bool uses_a = false;
      for (const QAtom& at : cq.atoms)
        if (at.pred == A) uses_a = true;
      CHECK(!uses_a);
    }
  }
}

TEST_CASE("negative inclusions detect clashes on the anonymous part") {
  Universe u;
  TBox t;
  PredId A = u.pred("A", false), B = u.pred("B", false), C = u.pred("C", false);
  PredId P = u.pred("P", true);
  RoleExpr p{P, false};
  t.add(TBoxAssertion::concept_incl(BasicConcept::of_name(A),
                                    BasicConcept::of_exists(p)));
  t.add(TBoxAssertion::concept_incl(BasicConcept::of_exists(p.inv()),
                                    BasicConcept::of_name(B)));
  t.add(TBoxAssertion::concept_incl(BasicConcept::of_exists(p.inv()),
                                    BasicConcept::of_name(C)));
  t.add(TBoxAssertion::concept_incl(BasicConcept::of_name(B),
                                    BasicConcept::of_name(C), true));
  TermId a = u.constant("a");

  ABox ab({concept_of(A, a)});
  CHECK(!is_consistent(u, t, ab));

  oracle::Chase ch(u, t, ab);
  CHECK(!ch.consistent());
}

TEST_CASE("equalities can trigger negative inclusions") {
  Universe u;
  TBox t;
  PredId B = u.pred("B", false), C = u.pred("C", false);
  t.add(TBoxAssertion::concept_incl(BasicConcept::of_name(B),
                                    BasicConcept::of_name(C), true));
  TermId a = u.constant("a"), b = u.constant("b");

  CHECK(!is_consistent(u, t, ABox({concept_of(B, a), concept_of(C, a)})));
  CHECK(is_consistent(u, t, ABox({concept_of(B, a), concept_of(C, b)})));
  CHECK(!is_consistent(
      u, t, ABox({concept_of(B, a), concept_of(C, b), eq_of(a, b)})));

  oracle::Chase ch(u, t, ABox({concept_of(B, a), concept_of(C, b), eq_of(a, b)}));
  CHECK(!ch.consistent());
}

TEST_CASE("disjoint roles") {
  Universe u;
  TBox t;
  PredId P = u.pred("P", true), R = u.pred("R", true);
  t.add(TBoxAssertion::role_incl(RoleExpr{P, false}, RoleExpr{R, false}, true));
  TermId a = u.constant("a"), b = u.constant("b");

  CHECK(!is_consistent(u, t, ABox({role_of(P, a, b), role_of(R, a, b)})));
  CHECK(is_consistent(u, t, ABox({role_of(P, a, b), role_of(R, b, a)})));
}

TEST_CASE("functionality alone never causes inconsistency") {
  Universe u;
  TBox t;
  PredId P = u.pred("P", true);
  t.add(TBoxAssertion::funct(RoleExpr{P, false}));
  TermId a = u.constant("a"), b = u.constant("b"), c = u.constant("c");

  // Without unique names the two fillers simply become equal.
  ABox ab({role_of(P, a, b), role_of(P, a, c)});
  CHECK(is_consistent(u, t, ab));
  EntailResult e = entails(u, t, ab, eq_of(b, c));
  CHECK(e.holds);
  CHECK(e.kb_consistent);
}

TEST_CASE("epistemic quantification differs from certain existence") {
  Universe u;
  TBox t;
  PredId Prof = u.pred("Prof", false), teaches = u.pred("teaches", true);
  t.add(TBoxAssertion::concept_incl(
      BasicConcept::of_name(Prof),
      BasicConcept::of_exists(RoleExpr{teaches, false})));
  TermId p = u.constant("p");
  VarId x = u.var("x"), y = u.var("y");

  ABox ab({concept_of(Prof, p)});
  Reasoner r(u, t);
  KbContext kc(r, ab);

  // Certain: someone is taught by p.
  Ucq q_exist = ucq_of(mkcq({ratom(teaches, G(p), V(y))}, {y}));
  CHECK(kc.holds(ecq_ucq(q_exist), {}));

  // But no known individual is taught by p.
  Ucq q_open = ucq_of(mkcq({ratom(teaches, G(p), V(x))}));
  Ecq known_some = ecq_exists(x, ecq_ucq(q_open));
  CHECK(!kc.holds(known_some, {}));
}

TEST_CASE("epistemic answers filter by negation") {
  Universe u;
  TBox t;
  PredId Student = u.pred("Student", false), Grad = u.pred("Grad", false);
  TermId s = u.constant("s"), g = u.constant("g");
  VarId x = u.var("x");

  ABox ab({concept_of(Student, s), concept_of(Student, g), concept_of(Grad, g)});
  Reasoner r(u, t);
  KbContext kc(r, ab);

  Ecq q = ecq_and(ecq_ucq(ucq_of(mkcq({catom(Student, V(x))}))),
                  ecq_not(ecq_ucq(ucq_of(mkcq({catom(Grad, V(x))})))));
  auto ans = kc.answers_ecq(q, {});
  REQUIRE(ans.size() == 1);
  CHECK(ans[0].get(x) == s);
}

TEST_CASE("equality atoms in epistemic queries use the closure") {
  Universe u;
  TBox t;
  PredId P = u.pred("P", true);
  t.add(TBoxAssertion::funct(RoleExpr{P, false}));
  TermId a = u.constant("a"), b = u.constant("b"), c = u.constant("c");
  VarId x = u.var("x"), y = u.var("y");

  ABox ab({role_of(P, a, b), role_of(P, a, c)});
  Reasoner r(u, t);
  KbContext kc(r, ab);

  Ecq q = ecq_eq(V(x), V(y));
  CHECK(kc.holds(q, sub({{x, b}, {y, c}})));
  CHECK(!kc.holds(q, sub({{x, a}, {y, b}})));

  // Via answers: which pairs are known equal to b?
  Ecq q2 = ecq_eq(V(x), G(b));
  auto ans = kc.answers_ecq(q2, {});
  CHECK(ans.size() == 2);  // b and c
}

TEST_CASE("inconsistent knowledge bases refuse epistemic evaluation") {
  Universe u;
  TBox t;
  PredId B = u.pred("B", false), C = u.pred("C", false);
  t.add(TBoxAssertion::concept_incl(BasicConcept::of_name(B),
                                    BasicConcept::of_name(C), true));
  TermId a = u.constant("a");

  ABox ab({concept_of(B, a), concept_of(C, a)});
  Reasoner r(u, t);
  KbContext kc(r, ab);
  CHECK(!kc.consistent());
  CHECK_THROWS_AS(kc.holds(ecq_true(), {}), InconsistentKb);
  CHECK(kc.entails(concept_of(B, a)));   // ex falso
  CHECK(kc.entails(eq_of(a, a)));
}

TEST_CASE("partial bindings restrict certain answers") {
  Universe u;
  TBox t;
  PredId P = u.pred("P", true);
  TermId a = u.constant("a"), b = u.constant("b"), c = u.constant("c");
  VarId x = u.var("x"), y = u.var("y");

  ABox ab({role_of(P, a, b), role_of(P, c, b), role_of(P, a, c)});
  Reasoner r(u, t);
  KbContext kc(r, ab);

  Ucq q = ucq_of(mkcq({ratom(P, V(x), V(y))}));
  auto all = kc.answers_ucq(q, {});
  CHECK(all.size() == 3);

  auto from_a = kc.answers_ucq(q, sub({{x, a}}));
  CHECK(from_a.size() == 2);
  for (const Subst& s : from_a) {
    CHECK(!s.has(x));
    CHECK(s.has(y));
  }
}

TEST_CASE("answers expand across equality classes") {
  Universe u;
  TBox t;
  PredId A = u.pred("A", false);
  TermId a = u.constant("a"), b = u.constant("b");
  VarId x = u.var("x");

  ABox ab({concept_of(A, a), eq_of(a, b)});
  Reasoner r(u, t);
  KbContext kc(r, ab);
  auto ans = kc.answers_ucq(ucq_of(mkcq({catom(A, V(x))})), {});
  CHECK(ans.size() == 2);  // both members of the class answer

  oracle::Chase ch(u, t, ab);
  CHECK(ch.answers(ucq_of(mkcq({catom(A, V(x))}))) == ans);
}

TEST_CASE("queries mentioning out-of-domain terms") {
  Universe u;
  TBox t;
  PredId A = u.pred("A", false);
  SymbolId f = u.function("f", 1);
  TermId a = u.constant("a"), b = u.constant("b");
  TermId fa = u.apply(f, std::vector<TermId>{a});
  TermId fb = u.apply(f, std::vector<TermId>{b});
  VarId x = u.var("x");

  ABox ab({concept_of(A, fa), eq_of(a, b)});
  Reasoner r(u, t);
  KbContext kc(r, ab);

  // f(b) is not in the active domain but is equal to f(a).
  CHECK(kc.holds_ucq(ucq_of(mkcq({catom(A, V(x))})), sub({{x, fb}})));
  // An unrelated constant simply fails.
  TermId z = u.constant("z");
  CHECK(!kc.holds_ucq(ucq_of(mkcq({catom(A, V(x))})), sub({{x, z}})));
}

TEST_CASE("abox equivalence respects the predicate filter") {
  Universe u;
  TBox t;
  PredId A = u.pred("A", false), B = u.pred("B", false);
  TermId a = u.constant("a");

  ABox a1({concept_of(A, a)});
  ABox a2({concept_of(A, a), concept_of(B, a)});
  CHECK(abox_equivalent(Reasoner(u, t), a1, a2, {A}));
  CHECK(!abox_equivalent(Reasoner(u, t), a1, a2, {A, B}));
}

TEST_CASE("abox equivalence always compares equalities") {
  Universe u;
  TBox t;
  PredId A = u.pred("A", false);
  TermId a = u.constant("a"), b = u.constant("b");

  ABox a1({concept_of(A, a), eq_of(a, b)});
  ABox a2({concept_of(A, a), concept_of(A, b)});
  // Same A-memberships, but only a1 knows a = b.
  CHECK(!abox_equivalent(Reasoner(u, t), a1, a2, {A}));
}

TEST_CASE("rewriting terminates on cyclic hierarchies") {
  Universe u;
  TBox t;
  PredId A = u.pred("A", false), B = u.pred("B", false);
  t.add(TBoxAssertion::concept_incl(BasicConcept::of_name(A),
                                    BasicConcept::of_name(B)));
  t.add(TBoxAssertion::concept_incl(BasicConcept::of_name(B),
                                    BasicConcept::of_name(A)));
  TermId c = u.constant("c");
  VarId x = u.var("x");

  ABox ab({concept_of(A, c)});
  auto ans = certain_answers_ucq(u, t, ab, ucq_of(mkcq({catom(B, V(x))})));
  REQUIRE(ans.size() == 1);
  CHECK(ans[0].get(x) == c);
}

TEST_CASE("qualified existentials on both sides") {
  Universe u;
  TBox t;
  PredId P = u.pred("P", true), R = u.pred("R", true);
  // EXISTS P ISA EXISTS R: anyone with a P-successor has an R-successor.
  t.add(TBoxAssertion::concept_incl(
      BasicConcept::of_exists(RoleExpr{P, false}),
      BasicConcept::of_exists(RoleExpr{R, false})));
  TermId a = u.constant("a"), b = u.constant("b");
  VarId x = u.var("x"), y = u.var("y");

  ABox ab({role_of(P, a, b)});
  Ucq q = ucq_of(mkcq({ratom(R, V(x), V(y))}, {y}));
  auto ans = certain_answers_ucq(u, t, ab, q);
  REQUIRE(ans.size() == 1);
  CHECK(ans[0].get(x) == a);

  oracle::Chase ch(u, t, ab);
  CHECK(!ch.hit_bound());
  CHECK(ch.answers(q) == ans);
}
