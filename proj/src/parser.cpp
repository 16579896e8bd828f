// kabcheck: verification toolkit for knowledge and action bases.
// SPDX-License-Identifier: Apache-2.0
#include "kab/parser.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace kab {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Ident, Int, LBrace, RBrace, LParen, RParen, LBrack, RBrack, Box,
  Comma, Semi, Dot, Eq, Bang, Amp, Pipe, Arrow, Diamond, Slash, End,
};

struct Token {
  Tok kind;
  std::string text;
  int line = 1, col = 1;
};

[[noreturn]] void fail(int line, int col, const std::string& category,
                       const std::string& message) {
  throw ParseError(Diagnostic{line, col, category, message});
}

bool ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_cont(unsigned char c) {
  return ident_start(c) || (c >= '0' && c <= '9') || c == '@' || c == '\'';
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i < s.size() && s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    int tl = line, tc = col;
    auto push = [&](Tok k, std::string t, std::size_t n) {
      out.push_back(Token{k, std::move(t), tl, tc});
      advance(n);
    };
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_cont(static_cast<unsigned char>(s[j]))) ++j;
      push(Tok::Ident, std::string(s.substr(i, j - i)), j - i);
      continue;
    }
    if (c >= '0' && c <= '9') {
      std::size_t j = i;
      while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
      push(Tok::Int, std::string(s.substr(i, j - i)), j - i);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < s.size() && s[i + 1] == b;
    };
    if (two('-', '>')) { push(Tok::Arrow, "->", 2); continue; }
    if (c == '<' && i + 2 < s.size() && s[i + 1] == '-' && s[i + 2] == '>') {
      push(Tok::Diamond, "<->", 3);
      continue;
    }
    if (c == '[' && i + 2 < s.size() && s[i + 1] == '-' && s[i + 2] == ']') {
      push(Tok::Box, "[-]", 3);
      continue;
    }
    switch (c) {
      case '{': push(Tok::LBrace, "{", 1); continue;
      case '}': push(Tok::RBrace, "}", 1); continue;
      case '(': push(Tok::LParen, "(", 1); continue;
      case ')': push(Tok::RParen, ")", 1); continue;
      case '[': push(Tok::LBrack, "[", 1); continue;
      case ']': push(Tok::RBrack, "]", 1); continue;
      case ',': push(Tok::Comma, ",", 1); continue;
      case ';': push(Tok::Semi, ";", 1); continue;
      case '.': push(Tok::Dot, ".", 1); continue;
      case '=': push(Tok::Eq, "=", 1); continue;
      case '!': push(Tok::Bang, "!", 1); continue;
      case '&': push(Tok::Amp, "&", 1); continue;
      case '|': push(Tok::Pipe, "|", 1); continue;
      case '/': push(Tok::Slash, "/", 1); continue;
      default:
        fail(line, col, "syntax",
             "unexpected character '" + std::string(1, static_cast<char>(c)) +
                 "'");
    }
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> r = {
      "FUNCTIONS", "CONSTS", "TBOX", "ABOX", "ACTION", "PROCESS",
      "ISA", "FUNCT", "DISJOINT", "EXISTS", "NOT", "inv",
      "EX", "ALL", "TRUE", "COPYALL", "mu", "nu"};
  return r;
}

// ---------------------------------------------------------------------------
// Raw syntax trees (names unresolved)

struct RTerm {
  bool is_fn = false;
  std::string name;          // identifier or integer text
  std::vector<RTerm> args;   // when is_fn
  int line = 0, col = 0;
};

struct RAtom {
  std::string pred;
  std::vector<RTerm> args;  // size 1 or 2
  int line = 0, col = 0;
};

struct RCq {
  std::vector<std::string> ex_vars;
  std::vector<RAtom> atoms;
  int line = 0, col = 0;
};

struct RUcq {
  std::vector<RCq> disjuncts;
  bool is_true = false;  // [TRUE]
  int line = 0, col = 0;
};

struct REcq;
using REcqP = std::shared_ptr<REcq>;
struct REcq {
  enum class K { True, Ucq, Eq, Not, And, Exists };
  K k = K::True;
  RUcq ucq;          // Ucq
  RTerm ea, eb;      // Eq
  REcqP child, child2;
  std::string var;   // Exists
  int line = 0, col = 0;
};

struct RSide {
  bool is_exists = false;
  bool inv = false;
  std::string name;
  int line = 0, col = 0;
};

struct RTEntry {
  enum class K { Isa, Funct };
  K k = K::Isa;
  RSide lhs, rhs;
  bool neg = false;  // Isa: rhs negated (NOT / DISJOINT)
  int line = 0, col = 0;
};

struct RHeadAtom {
  bool is_eq = false;
  std::string pred;
  std::vector<RTerm> args;
  RTerm ea, eb;
  int line = 0, col = 0;
};

struct REffect {
  REcqP cond;
  std::vector<RHeadAtom> head;
  int line = 0, col = 0;
};

struct RAction {
  std::string name;
  std::vector<std::string> params;
  std::vector<REffect> effects;
  bool copyall = false;
  int line = 0, col = 0;
};

struct RRule {
  REcqP cond;
  std::string action;
  std::vector<std::string> args;
  int line = 0, col = 0;
};

struct RSpec {
  std::vector<std::tuple<std::string, unsigned, int, int>> functions;
  std::vector<std::pair<std::string, std::pair<int, int>>> consts;
  std::vector<RTEntry> tbox;
  std::vector<RHeadAtom> abox;
  std::vector<RAction> actions;
  std::vector<RRule> rules;
};

// ---------------------------------------------------------------------------
// Syntax parser (shared token machinery)

struct Cursor {
  const std::vector<Token>& toks;
  std::size_t pos = 0;

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t p = pos + ahead;
    return p < toks.size() ? toks[p] : toks.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (t.kind != Tok::End) ++pos;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(const char* w) const {
    return peek().kind == Tok::Ident && peek().text == w;
  }
  bool eat(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  bool eat_word(const char* w) {
    if (!at_word(w)) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (!at(k)) {
      fail(peek().line, peek().col, "syntax",
           std::string("expected ") + what + ", found '" +
               (peek().kind == Tok::End ? "end of input" : peek().text) + "'");
    }
    return next();
  }
  std::string expect_name(const char* what) {
    const Token& t = expect(Tok::Ident, what);
    if (reserved_words().count(t.text))
      fail(t.line, t.col, "syntax",
           "'" + t.text + "' is a reserved word and cannot name a " + what);
    return t.text;
  }
};

RTerm parse_term(Cursor& c) {
  const Token& t = c.peek();
  RTerm r;
  r.line = t.line;
  r.col = t.col;
  if (t.kind == Tok::Int) {
    r.name = c.next().text;
    return r;
  }
  if (t.kind != Tok::Ident)
    fail(t.line, t.col, "syntax", "expected a term, found '" + t.text + "'");
  if (reserved_words().count(t.text))
    fail(t.line, t.col, "syntax",
         "'" + t.text + "' is a reserved word and cannot be a term");
  r.name = c.next().text;
  if (c.eat(Tok::LParen)) {
    r.is_fn = true;
    if (!c.at(Tok::RParen)) {
      r.args.push_back(parse_term(c));
      while (c.eat(Tok::Comma)) r.args.push_back(parse_term(c));
    }
    c.expect(Tok::RParen, "')'");
  }
  return r;
}

RAtom parse_atom(Cursor& c) {
  const Token& t = c.peek();
  RAtom a;
  a.line = t.line;
  a.col = t.col;
  a.pred = c.expect_name("predicate");
  c.expect(Tok::LParen, "'('");
  a.args.push_back(parse_term(c));
  if (c.eat(Tok::Comma)) a.args.push_back(parse_term(c));
  c.expect(Tok::RParen, "')'");
  if (c.at(Tok::Comma))
    fail(c.peek().line, c.peek().col, "syntax",
         "atoms take at most two arguments");
  return a;
}

RCq parse_cq(Cursor& c) {
  RCq cq;
  cq.line = c.peek().line;
  cq.col = c.peek().col;
  if (c.eat_word("EX")) {
    cq.ex_vars.push_back(c.expect_name("variable"));
    while (c.eat(Tok::Comma)) cq.ex_vars.push_back(c.expect_name("variable"));
    c.expect(Tok::Dot, "'.'");
  }
  cq.atoms.push_back(parse_atom(c));
  while (c.eat(Tok::Amp)) cq.atoms.push_back(parse_atom(c));
  return cq;
}

RUcq parse_ucq(Cursor& c) {
  RUcq q;
  q.line = c.peek().line;
  q.col = c.peek().col;
  if (c.at_word("TRUE")) {
    c.next();
    q.is_true = true;
    return q;
  }
  q.disjuncts.push_back(parse_cq(c));
  while (c.eat(Tok::Pipe)) q.disjuncts.push_back(parse_cq(c));
  return q;
}

// Bracket content: TRUE, a UCQ, or an equality between two terms.
REcqP parse_bracket(Cursor& c) {
  auto node = std::make_shared<REcq>();
  node->line = c.peek().line;
  node->col = c.peek().col;
  c.expect(Tok::LBrack, "'['");
  // Equality: term '=' term. Distinguished by trying a term followed by '='.
  std::size_t save = c.pos;
  bool is_eq = false;
  if (!c.at_word("TRUE") && !c.at_word("EX") &&
      (c.at(Tok::Ident) || c.at(Tok::Int))) {
    try {
      RTerm t1 = parse_term(c);
      if (c.at(Tok::Eq)) {
        c.next();
        RTerm t2 = parse_term(c);
        node->k = REcq::K::Eq;
        node->ea = std::move(t1);
        node->eb = std::move(t2);
        is_eq = true;
      }
    } catch (const ParseError&) {
      // fall through to UCQ parse below
    }
    if (!is_eq) c.pos = save;
  }
  if (!is_eq) {
    node->k = REcq::K::Ucq;
    node->ucq = parse_ucq(c);
  }
  c.expect(Tok::RBrack, "']'");
  return node;
}

REcqP parse_ecq(Cursor& c);

REcqP parse_ecq_term(Cursor& c) {
  const Token& t = c.peek();
  if (c.eat(Tok::Bang)) {
    auto n = std::make_shared<REcq>();
    n->k = REcq::K::Not;
    n->line = t.line;
    n->col = t.col;
    n->child = parse_ecq_term(c);
    return n;
  }
  if (c.eat_word("EX")) {
    auto n = std::make_shared<REcq>();
    n->k = REcq::K::Exists;
    n->line = t.line;
    n->col = t.col;
    n->var = c.expect_name("variable");
    REcqP inner = n;
    while (c.eat(Tok::Comma)) {
      auto m = std::make_shared<REcq>();
      m->k = REcq::K::Exists;
      m->line = c.peek().line;
      m->col = c.peek().col;
      m->var = c.expect_name("variable");
      inner->child = m;
      inner = m;
    }
    c.expect(Tok::Dot, "'.'");
    inner->child = parse_ecq(c);
    // relink: the chain shares one body
    return n;
  }
  if (c.at_word("TRUE")) {
    c.next();
    auto n = std::make_shared<REcq>();
    n->k = REcq::K::True;
    n->line = t.line;
    n->col = t.col;
    return n;
  }
  if (c.at(Tok::LBrack)) return parse_bracket(c);
  if (c.eat(Tok::LParen)) {
    REcqP n = parse_ecq(c);
    c.expect(Tok::RParen, "')'");
    return n;
  }
  fail(t.line, t.col, "syntax",
       "expected a condition, found '" + t.text + "'");
}

REcqP parse_ecq(Cursor& c) {
  REcqP lhs = parse_ecq_term(c);
  while (c.at(Tok::Amp)) {
    const Token& t = c.next();
    auto n = std::make_shared<REcq>();
    n->k = REcq::K::And;
    n->line = t.line;
    n->col = t.col;
    n->child = lhs;
    n->child2 = parse_ecq_term(c);
    lhs = n;
  }
  return lhs;
}

RSide parse_side(Cursor& c) {
  RSide s;
  s.line = c.peek().line;
  s.col = c.peek().col;
  if (c.eat_word("EXISTS")) s.is_exists = true;
  if (c.at_word("inv")) {
    c.next();
    c.expect(Tok::LParen, "'('");
    s.inv = true;
    s.name = c.expect_name("role");
    c.expect(Tok::RParen, "')'");
    return s;
  }
  s.name = c.expect_name(s.is_exists ? "role" : "concept or role");
  return s;
}

RHeadAtom parse_ground_or_head_atom(Cursor& c) {
  RHeadAtom h;
  h.line = c.peek().line;
  h.col = c.peek().col;
  // Either pred(args) or term '=' term.
  if (c.at(Tok::Ident) && c.peek(1).kind == Tok::LParen &&
      !reserved_words().count(c.peek().text)) {
    // Could still be a function term opening an equality: f(a) = b.
    std::size_t save = c.pos;
    RTerm t1 = parse_term(c);
    if (c.at(Tok::Eq)) {
      c.next();
      h.is_eq = true;
      h.ea = std::move(t1);
      h.eb = parse_term(c);
      return h;
    }
    c.pos = save;
    RAtom a = parse_atom(c);
    h.pred = std::move(a.pred);
    h.args = std::move(a.args);
    return h;
  }
  RTerm t1 = parse_term(c);
  c.expect(Tok::Eq, "'='");
  h.is_eq = true;
  h.ea = std::move(t1);
  h.eb = parse_term(c);
  return h;
}

RSpec parse_raw(const std::vector<Token>& toks) {
  Cursor c{toks};
  RSpec r;

  if (c.eat_word("FUNCTIONS")) {
    c.expect(Tok::LBrace, "'{'");
    while (!c.eat(Tok::RBrace)) {
      const Token& t = c.peek();
      std::string name = c.expect_name("function");
      c.expect(Tok::Slash, "'/'");
      const Token& a = c.expect(Tok::Int, "arity");
      unsigned ar = static_cast<unsigned>(std::stoul(a.text));
      if (ar == 0) fail(a.line, a.col, "arity", "function arity must be >= 1");
      r.functions.emplace_back(name, ar, t.line, t.col);
      c.expect(Tok::Semi, "';'");
    }
  }
  if (c.eat_word("CONSTS")) {
    c.expect(Tok::LBrace, "'{'");
    while (!c.eat(Tok::RBrace)) {
      const Token& t = c.peek();
      std::string name =
          c.at(Tok::Int) ? c.next().text : c.expect_name("constant");
      r.consts.emplace_back(name, std::pair{t.line, t.col});
      c.expect(Tok::Semi, "';'");
    }
  }
  if (c.eat_word("TBOX")) {
    c.expect(Tok::LBrace, "'{'");
    while (!c.eat(Tok::RBrace)) {
      RTEntry e;
      e.line = c.peek().line;
      e.col = c.peek().col;
      if (c.eat_word("FUNCT")) {
        e.k = RTEntry::K::Funct;
        e.lhs = parse_side(c);
        if (e.lhs.is_exists)
          fail(e.lhs.line, e.lhs.col, "syntax",
               "FUNCT takes a role, not EXISTS");
      } else {
        e.lhs = parse_side(c);
        if (c.eat_word("DISJOINT")) {
          e.neg = true;
        } else {
          if (!c.eat_word("ISA"))
            fail(c.peek().line, c.peek().col, "syntax",
                 "expected ISA or DISJOINT");
          if (c.eat_word("NOT")) e.neg = true;
        }
        e.rhs = parse_side(c);
      }
      c.expect(Tok::Semi, "';'");
      r.tbox.push_back(std::move(e));
    }
  }
  if (c.eat_word("ABOX")) {
    c.expect(Tok::LBrace, "'{'");
    while (!c.eat(Tok::RBrace)) {
      r.abox.push_back(parse_ground_or_head_atom(c));
      c.expect(Tok::Semi, "';'");
    }
  }
  while (c.at_word("ACTION")) {
    c.next();
    RAction a;
    a.line = c.peek().line;
    a.col = c.peek().col;
    a.name = c.expect_name("action");
    c.expect(Tok::LParen, "'('");
    if (!c.at(Tok::RParen)) {
      a.params.push_back(c.expect_name("parameter"));
      while (c.eat(Tok::Comma)) a.params.push_back(c.expect_name("parameter"));
    }
    c.expect(Tok::RParen, "')'");
    c.expect(Tok::LBrace, "'{'");
    while (!c.eat(Tok::RBrace)) {
      if (c.at_word("COPYALL")) {
        c.next();
        a.copyall = true;
        c.expect(Tok::Semi, "';'");
        continue;
      }
      REffect e;
      e.line = c.peek().line;
      e.col = c.peek().col;
      e.cond = parse_ecq(c);
      c.expect(Tok::Arrow, "'->'");
      c.expect(Tok::LBrace, "'{'");
      if (!c.at(Tok::RBrace)) {
        e.head.push_back(parse_ground_or_head_atom(c));
        while (c.eat(Tok::Comma))
          e.head.push_back(parse_ground_or_head_atom(c));
      }
      c.expect(Tok::RBrace, "'}'");
      c.expect(Tok::Semi, "';'");
      a.effects.push_back(std::move(e));
    }
    r.actions.push_back(std::move(a));
  }
  if (c.eat_word("PROCESS")) {
    c.expect(Tok::LBrace, "'{'");
    while (!c.eat(Tok::RBrace)) {
      RRule rule;
      rule.line = c.peek().line;
      rule.col = c.peek().col;
      rule.cond = parse_ecq(c);
      c.expect(Tok::Arrow, "'->'");
      rule.action = c.expect_name("action");
      c.expect(Tok::LParen, "'('");
      if (!c.at(Tok::RParen)) {
        rule.args.push_back(c.expect_name("variable"));
        while (c.eat(Tok::Comma))
          rule.args.push_back(c.expect_name("variable"));
      }
      c.expect(Tok::RParen, "')'");
      c.expect(Tok::Semi, "';'");
      r.rules.push_back(std::move(rule));
    }
  }
  if (!c.at(Tok::End))
    fail(c.peek().line, c.peek().col, "syntax",
         "unexpected '" + c.peek().text +
             "' (sections must appear in order: FUNCTIONS, CONSTS, TBOX, "
             "ABOX, ACTION..., PROCESS)");
  return r;
}

// ---------------------------------------------------------------------------
// Name and kind resolution

struct Resolver {
  const RSpec& raw;
  std::vector<Diagnostic> diags;

  std::set<std::string> const_names;
  std::map<std::string, unsigned> fn_arity;

  // Predicate kind resolution: union-find over names tied by plain
  // inclusions, with role/concept evidence attached to each name.
  std::map<std::string, std::string> kin_parent;
  std::map<std::string, std::pair<int, int>> first_seen;
  std::map<std::string, int> evid;  // +1 role evidence, -1 concept, 0 none
  std::map<std::string, std::pair<int, int>> evid_where;

  explicit Resolver(const RSpec& r) : raw(r) {}

  void diag(int line, int col, const std::string& cat,
            const std::string& msg) {
    diags.push_back(Diagnostic{line, col, cat, msg});
  }

  std::string kin_find(const std::string& n) {
    auto it = kin_parent.find(n);
    if (it == kin_parent.end() || it->second == n) return n;
    std::string r = kin_find(it->second);
    kin_parent[n] = r;
    return r;
  }
  void kin_union(const std::string& a, const std::string& b) {
    std::string ra = kin_find(a), rb = kin_find(b);
    if (ra != rb) kin_parent[ra] = rb;
  }

  void see_pred(const std::string& n, int line, int col) {
    kin_parent.emplace(n, n);
    first_seen.emplace(n, std::pair{line, col});
    evid.emplace(n, 0);
    evid_where.emplace(n, std::pair{line, col});
  }

  void evidence(const std::string& n, int kind, int line, int col) {
    see_pred(n, line, col);
    int& e = evid[n];
    if (e == 0) {
      e = kind;
      evid_where[n] = {line, col};
    } else if (e != kind) {
      diag(line, col, "kind-conflict",
           "'" + n + "' is used as both a concept and a role (other use at " +
               std::to_string(evid_where[n].first) + ":" +
               std::to_string(evid_where[n].second) + ")");
    }
  }

  void scan_term_for_consts(const RTerm& t) {
    if (t.is_fn) {
      for (const RTerm& a : t.args) scan_term_for_consts(a);
      return;
    }
    const_names.insert(t.name);
  }

  void scan_atom(const RAtom& a) {
    evidence(a.pred, a.args.size() == 2 ? +1 : -1, a.line, a.col);
  }

  void scan_ucq(const RUcq& q) {
    for (const RCq& cq : q.disjuncts)
      for (const RAtom& a : cq.atoms) scan_atom(a);
  }

  void scan_ecq(const REcqP& e) {
    if (!e) return;
    switch (e->k) {
      case REcq::K::Ucq: scan_ucq(e->ucq); break;
      case REcq::K::Not: scan_ecq(e->child); break;
      case REcq::K::And:
        scan_ecq(e->child);
        scan_ecq(e->child2);
        break;
      case REcq::K::Exists: scan_ecq(e->child); break;
      default: break;
    }
  }

  void collect() {
    for (const auto& [name, ar, line, col] : raw.functions) {
      if (!fn_arity.emplace(name, ar).second)
        diag(line, col, "duplicate", "function '" + name + "' declared twice");
    }
    for (const auto& [name, pos] : raw.consts) const_names.insert(name);
    for (const RHeadAtom& x : raw.abox) {
      if (x.is_eq) {
        scan_term_for_consts(x.ea);
        scan_term_for_consts(x.eb);
      } else {
        evidence(x.pred, x.args.size() == 2 ? +1 : -1, x.line, x.col);
        for (const RTerm& t : x.args) scan_term_for_consts(t);
      }
    }
    // Integer literals are constants wherever they occur; identifier
    // constants come only from ABOX and CONSTS. Collect integers from
    // heads and conditions.
    for (const RAction& a : raw.actions)
      for (const REffect& e : a.effects) {
        collect_ints_ecq(e.cond);
        for (const RHeadAtom& h : e.head) collect_ints_head(h);
      }
    for (const RRule& r : raw.rules) collect_ints_ecq(r.cond);

    // TBox evidence.
    for (const RTEntry& e : raw.tbox) {
      if (e.k == RTEntry::K::Funct) {
        evidence(e.lhs.name, +1, e.lhs.line, e.lhs.col);
        continue;
      }
      bool role_incl = (e.lhs.inv && !e.lhs.is_exists) ||
                       (e.rhs.inv && !e.rhs.is_exists);
      bool concept_incl = e.lhs.is_exists || e.rhs.is_exists;
      if (role_incl && concept_incl) {
        diag(e.line, e.col, "syntax",
             "cannot mix a role and a concept in one inclusion");
        continue;
      }
      if (e.lhs.is_exists) evidence(e.lhs.name, +1, e.lhs.line, e.lhs.col);
      if (e.rhs.is_exists) evidence(e.rhs.name, +1, e.rhs.line, e.rhs.col);
      if (role_incl) {
        evidence(e.lhs.name, +1, e.lhs.line, e.lhs.col);
        evidence(e.rhs.name, +1, e.rhs.line, e.rhs.col);
      } else if (concept_incl) {
        if (!e.lhs.is_exists) evidence(e.lhs.name, -1, e.lhs.line, e.lhs.col);
        if (!e.rhs.is_exists) evidence(e.rhs.name, -1, e.rhs.line, e.rhs.col);
      } else {
        // Both plain names: same kind, decided by evidence elsewhere.
        see_pred(e.lhs.name, e.lhs.line, e.lhs.col);
        see_pred(e.rhs.name, e.rhs.line, e.rhs.col);
        kin_union(e.lhs.name, e.rhs.name);
      }
    }

    // Condition and head evidence.
    for (const RAction& a : raw.actions)
      for (const REffect& e : a.effects) {
        scan_ecq(e.cond);
        for (const RHeadAtom& h : e.head)
          if (!h.is_eq)
            evidence(h.pred, h.args.size() == 2 ? +1 : -1, h.line, h.col);
      }
    for (const RRule& r : raw.rules) scan_ecq(r.cond);

    // Reserved concept name.
    for (const auto& [n, where] : first_seen)
      if (n == "Dummy")
        diag(where.first, where.second, "reserved-name",
             "'Dummy' is reserved for normalization output");
    for (const auto& [name, ar, line, col] : raw.functions) {
      (void)ar;
      if (name == "Dummy")
        diag(line, col, "reserved-name",
             "'Dummy' is reserved for normalization output");
    }
  }

  void collect_ints_term(const RTerm& t) {
    if (t.is_fn) {
      for (const RTerm& a : t.args) collect_ints_term(a);
    } else if (!t.name.empty() && t.name[0] >= '0' && t.name[0] <= '9') {
      const_names.insert(t.name);
    }
  }
  void collect_ints_head(const RHeadAtom& h) {
    if (h.is_eq) {
      collect_ints_term(h.ea);
      collect_ints_term(h.eb);
    } else {
      for (const RTerm& t : h.args) collect_ints_term(t);
    }
  }
  void collect_ints_ecq(const REcqP& e) {
    if (!e) return;
    switch (e->k) {
      case REcq::K::Ucq:
        for (const RCq& cq : e->ucq.disjuncts)
          for (const RAtom& a : cq.atoms)
            for (const RTerm& t : a.args) collect_ints_term(t);
        break;
      case REcq::K::Eq:
        collect_ints_term(e->ea);
        collect_ints_term(e->eb);
        break;
      case REcq::K::Not: collect_ints_ecq(e->child); break;
      case REcq::K::And:
        collect_ints_ecq(e->child);
        collect_ints_ecq(e->child2);
        break;
      case REcq::K::Exists: collect_ints_ecq(e->child); break;
      default: break;
    }
  }

  // Final kind of each predicate name: role if its group has role
  // evidence, concept otherwise.
  std::map<std::string, bool> resolve_kinds() {
    std::map<std::string, int> group_kind;
    for (const auto& [n, e] : evid) {
      if (e == 0) continue;
      std::string g = kin_find(n);
      int& gk = group_kind[g];
      if (gk == 0) {
        gk = e;
      } else if (gk != e) {
        auto where = evid_where[n];
        diag(where.first, where.second, "kind-conflict",
             "'" + n +
                 "' is tied by inclusions to a name of the other kind");
      }
    }
    std::map<std::string, bool> kinds;
    for (const auto& [n, where] : first_seen) {
      (void)where;
      int gk = group_kind.count(kin_find(n)) ? group_kind[kin_find(n)] : -1;
      kinds[n] = gk == +1;
    }
    return kinds;
  }
};

// ---------------------------------------------------------------------------
// Building the typed spec

struct Builder {
  const RSpec& raw;
  Resolver& rz;
  std::shared_ptr<Universe> u;
  std::map<std::string, bool> kinds;  // name -> is_role
  KabSpec out;

  Builder(const RSpec& r, Resolver& res)
      : raw(r), rz(res), u(std::make_shared<Universe>()) {}

  void diag(int line, int col, const std::string& cat,
            const std::string& msg) {
    rz.diag(line, col, cat, msg);
  }

  bool is_const_name(const std::string& n) const {
    return rz.const_names.count(n) != 0;
  }

  TermId ground_term(const RTerm& t) {
    if (!t.is_fn) return u->constant(t.name);
    auto it = rz.fn_arity.find(t.name);
    if (it == rz.fn_arity.end()) {
      diag(t.line, t.col, "unknown-symbol",
           "function '" + t.name + "' is not declared");
      return u->constant(t.name + "@undeclared");
    }
    if (it->second != t.args.size())
      diag(t.line, t.col, "arity",
           "function '" + t.name + "' declared with arity " +
               std::to_string(it->second) + ", used with " +
               std::to_string(t.args.size()));
    std::vector<TermId> args;
    for (const RTerm& a : t.args) args.push_back(ground_term(a));
    SymbolId f = u->function(t.name, it->second);
    while (args.size() < it->second) args.push_back(u->constant("@pad"));
    args.resize(it->second);
    return u->apply(f, args);
  }

  PredId lookup_pred(const std::string& n, std::size_t arity, int line,
                     int col) {
    auto it = kinds.find(n);
    bool is_role = it != kinds.end() ? it->second : (arity == 2);
    if ((arity == 2) != is_role)
      diag(line, col, "kind-conflict",
           "'" + n + "' resolved as " + (is_role ? "role" : "concept") +
               " but used with " + std::to_string(arity) + " argument(s)");
    return u->pred(n, is_role);
  }

  // Variable scope: innermost last. Returns kNone when not bound.
  struct Scope {
    std::vector<std::pair<std::string, VarId>> bound;
    VarId find(const std::string& n) const {
      for (auto it = bound.rbegin(); it != bound.rend(); ++it)
        if (it->first == n) return it->second;
      return kNone;
    }
  };

  QArg term_arg(const RTerm& t, Scope& sc, std::vector<VarId>* free_out) {
    if (t.is_fn) return QArg::of_term(ground_term_checked(t, sc));
    if (is_const_name(t.name)) return QArg::of_term(u->constant(t.name));
    VarId b = sc.find(t.name);
    if (b != kNone) return QArg::of_var(b);
    VarId v = u->var(t.name);
    if (free_out) free_out->push_back(v);
    return QArg::of_var(v);
  }

  // Function terms inside queries must be ground.
  TermId ground_term_checked(const RTerm& t, Scope& sc) {
    check_ground(t, sc);
    return ground_term(t);
  }
  void check_ground(const RTerm& t, Scope& sc) {
    if (!t.is_fn) {
      if (!is_const_name(t.name) &&
          (sc.find(t.name) != kNone || !is_const_name(t.name)))
        if (!is_const_name(t.name))
          diag(t.line, t.col, "syntax",
               "function terms in queries must be ground; '" + t.name +
                   "' is not a constant");
      return;
    }
    for (const RTerm& a : t.args) check_ground(a, sc);
  }

  Ucq build_ucq(const RUcq& q, Scope& sc, std::vector<VarId>* free_out) {
    if (q.is_true) return ucq_true();
    Ucq out;
    std::vector<std::vector<VarId>> disjunct_free;
    for (const RCq& rcq : q.disjuncts) {
      Cq cq;
      std::size_t mark = sc.bound.size();
      for (const std::string& v : rcq.ex_vars) {
        if (is_const_name(v))
          diag(rcq.line, rcq.col, "syntax",
               "'" + v + "' is a constant and cannot be quantified");
        VarId vid = u->var(v);
        sc.bound.emplace_back(v, vid);
        cq.exist_vars.push_back(vid);
      }
      std::vector<VarId> free_here;
      for (const RAtom& a : rcq.atoms) {
        PredId p = lookup_pred(a.pred, a.args.size(), a.line, a.col);
        QAtom at;
        at.pred = p;
        at.is_role = a.args.size() == 2;
        at.a = term_arg(a.args[0], sc, &free_here);
        if (at.is_role) at.b = term_arg(a.args[1], sc, &free_here);
        // A free variable of the surrounding scope is also "free here"
        // for the disjunct-agreement check.
        auto note_outer = [&](const QArg& qa, const RTerm& rt) {
          if (qa.is_var && sc.find(rt.name) != kNone &&
              std::find(cq.exist_vars.begin(), cq.exist_vars.end(), qa.id) ==
                  cq.exist_vars.end())
            free_here.push_back(qa.id);
        };
        note_outer(at.a, a.args[0]);
        if (at.is_role) note_outer(at.b, a.args[1]);
        cq.atoms.push_back(at);
      }
      std::sort(free_here.begin(), free_here.end());
      free_here.erase(std::unique(free_here.begin(), free_here.end()),
                      free_here.end());
      // Remove existentials of this disjunct.
      std::vector<VarId> fh;
      for (VarId v : free_here)
        if (std::find(cq.exist_vars.begin(), cq.exist_vars.end(), v) ==
            cq.exist_vars.end())
          fh.push_back(v);
      disjunct_free.push_back(fh);
      sc.bound.resize(mark);
      out.disjuncts.push_back(std::move(cq));
    }
    for (std::size_t i = 1; i < disjunct_free.size(); ++i)
      if (disjunct_free[i] != disjunct_free[0])
        diag(q.line, q.col, "free-variable-mismatch",
             "disjuncts of a union query must share the same free variables");
    if (free_out)
      for (VarId v : disjunct_free.empty() ? std::vector<VarId>{}
                                           : disjunct_free[0])
        free_out->push_back(v);
    return out;
  }

  QArg eq_operand(const RTerm& t, Scope& sc, std::vector<VarId>* free_out) {
    if (t.is_fn) {
      // must be ground
      return QArg::of_term(ground_term_checked(t, sc));
    }
    return term_arg(t, sc, free_out);
  }

  Ecq build_ecq(const REcqP& e, Scope& sc, std::vector<VarId>* free_out) {
    switch (e->k) {
      case REcq::K::True:
        return ecq_true();
      case REcq::K::Ucq:
        return ecq_ucq(build_ucq(e->ucq, sc, free_out));
      case REcq::K::Eq: {
        QArg a = eq_operand(e->ea, sc, free_out);
        QArg b = eq_operand(e->eb, sc, free_out);
        return ecq_eq(a, b);
      }
      case REcq::K::Not:
        return ecq_not(build_ecq(e->child, sc, free_out));
      case REcq::K::And: {
        Ecq a = build_ecq(e->child, sc, free_out);
        Ecq b = build_ecq(e->child2, sc, free_out);
        return ecq_and(a, b);
      }
      case REcq::K::Exists: {
        if (is_const_name(e->var))
          diag(e->line, e->col, "syntax",
               "'" + e->var + "' is a constant and cannot be quantified");
        VarId v = u->var(e->var);
        sc.bound.emplace_back(e->var, v);
        Ecq body = build_ecq(e->child, sc, free_out);
        sc.bound.pop_back();
        return ecq_exists(v, body);
      }
    }
    return ecq_true();
  }

  HeadTerm build_head_term(const RTerm& t, const std::set<VarId>& scope_vars,
                           int eline, int ecol) {
    if (t.is_fn) {
      auto it = rz.fn_arity.find(t.name);
      if (it == rz.fn_arity.end()) {
        diag(t.line, t.col, "unknown-symbol",
             "function '" + t.name + "' is not declared");
        return HeadTerm::of_const(u->constant(t.name + "@undeclared"));
      }
      if (it->second != t.args.size())
        diag(t.line, t.col, "arity",
             "function '" + t.name + "' declared with arity " +
                 std::to_string(it->second) + ", used with " +
                 std::to_string(t.args.size()));
      std::vector<HeadTerm> args;
      for (const RTerm& a : t.args)
        args.push_back(build_head_term(a, scope_vars, eline, ecol));
      return HeadTerm::of_fn(u->function(t.name, it->second),
                             std::move(args));
    }
    if (is_const_name(t.name)) return HeadTerm::of_const(u->constant(t.name));
    VarId v = u->var(t.name);
    if (!scope_vars.count(v))
      diag(t.line, t.col, "free-variable-mismatch",
           "head variable '" + t.name +
               "' does not occur free in the effect condition");
    return HeadTerm::of_var(v);
  }

  void build() {
    kinds = rz.resolve_kinds();
    out.universe = u;

    for (const auto& [name, ar, line, col] : raw.functions) {
      (void)line;
      (void)col;
      out.functions.push_back(u->function(name, ar));
    }
    for (const auto& [name, pos] : raw.consts) {
      (void)pos;
      out.named_consts.push_back(u->constant(name));
    }

    // TBox.
    for (const RTEntry& e : raw.tbox) {
      if (e.k == RTEntry::K::Funct) {
        PredId p = u->pred(e.lhs.name, true);
        out.tbox.add(TBoxAssertion::funct(RoleExpr{p, e.lhs.inv}));
        continue;
      }
      bool role_incl = (e.lhs.inv && !e.lhs.is_exists) ||
                       (e.rhs.inv && !e.rhs.is_exists);
      if (!role_incl && !e.lhs.is_exists && !e.rhs.is_exists) {
        auto it = kinds.find(e.lhs.name);
        role_incl = it != kinds.end() && it->second;
      }
      if (role_incl) {
        PredId l = u->pred(e.lhs.name, true);
        PredId r = u->pred(e.rhs.name, true);
        out.tbox.add(TBoxAssertion::role_incl(RoleExpr{l, e.lhs.inv},
                                              RoleExpr{r, e.rhs.inv}, e.neg));
      } else {
        auto side = [&](const RSide& s) -> BasicConcept {
          if (s.is_exists)
            return BasicConcept::of_exists(
                RoleExpr{u->pred(s.name, true), s.inv});
          if (s.inv)
            diag(s.line, s.col, "syntax",
                 "inv(...) alone is not a concept; use EXISTS inv(...)");
          return BasicConcept::of_name(u->pred(s.name, false));
        };
        out.tbox.add(TBoxAssertion::concept_incl(side(e.lhs), side(e.rhs),
                                                 e.neg));
      }
    }

    // ABox.
    {
      std::vector<Assertion> items;
      for (const RHeadAtom& x : raw.abox) {
        if (x.is_eq) {
          items.push_back(eq_of(ground_term(x.ea), ground_term(x.eb)));
        } else {
          PredId p = lookup_pred(x.pred, x.args.size(), x.line, x.col);
          if (x.args.size() == 1) {
            items.push_back(concept_of(p, ground_term(x.args[0])));
          } else {
            items.push_back(
                role_of(p, ground_term(x.args[0]), ground_term(x.args[1])));
          }
        }
      }
      out.abox0 = ABox(std::move(items));
    }

    // Actions.
    std::set<std::string> action_names;
    for (const RAction& ra : raw.actions) {
      if (!action_names.insert(ra.name).second)
        diag(ra.line, ra.col, "duplicate",
             "action '" + ra.name + "' defined twice");
      ActionDef ad;
      ad.name = ra.name;
      ad.copy_all = ra.copyall;
      std::set<std::string> pnames;
      for (const std::string& p : ra.params) {
        if (is_const_name(p))
          diag(ra.line, ra.col, "syntax",
               "parameter '" + p + "' collides with a constant");
        if (!pnames.insert(p).second)
          diag(ra.line, ra.col, "duplicate",
               "parameter '" + p + "' repeated");
        ad.params.push_back(u->var(p));
      }
      for (const REffect& re : ra.effects) {
        EffectSpec es;
        // Split the condition: first conjunct of the top-level chain must
        // be a bracketed positive query (or TRUE).
        std::vector<REcqP> conjs;
        std::function<void(const REcqP&)> flat = [&](const REcqP& n) {
          if (n->k == REcq::K::And) {
            flat(n->child);
            flat(n->child2);
          } else {
            conjs.push_back(n);
          }
        };
        flat(re.cond);
        Scope sc;
        for (std::size_t i = 0; i < ra.params.size(); ++i)
          sc.bound.emplace_back(ra.params[i], ad.params[i]);

        std::vector<VarId> plus_free;
        if (conjs[0]->k == REcq::K::Ucq) {
          es.q_plus = build_ucq(conjs[0]->ucq, sc, &plus_free);
        } else if (conjs[0]->k == REcq::K::True) {
          es.q_plus = ucq_true();
        } else {
          diag(re.line, re.col, "syntax",
               "an effect condition must start with a bracketed positive "
               "query");
          es.q_plus = ucq_true();
        }
        std::vector<VarId> minus_free;
        Ecq qm = ecq_true();
        for (std::size_t i = 1; i < conjs.size(); ++i) {
          Ecq c = build_ecq(conjs[i], sc, &minus_free);
          qm = i == 1 ? c : ecq_and(qm, c);
        }
        es.q_minus = qm;

        std::set<VarId> scope_vars(plus_free.begin(), plus_free.end());
        for (VarId p : ad.params) scope_vars.insert(p);
        for (VarId v : minus_free)
          if (!scope_vars.count(v)) {
            diag(re.line, re.col, "free-variable-mismatch",
                 "variable '" + u->var_name(v) +
                     "' of the filter part does not occur in the positive "
                     "part or parameters");
          }
        for (const RHeadAtom& rh : re.head) {
          HeadAtom ha;
          if (rh.is_eq) {
            ha.kind = AKind::Eq;
            ha.a = build_head_term(rh.ea, scope_vars, re.line, re.col);
            ha.b = build_head_term(rh.eb, scope_vars, re.line, re.col);
          } else {
            PredId p = lookup_pred(rh.pred, rh.args.size(), rh.line, rh.col);
            ha.kind = rh.args.size() == 2 ? AKind::Role : AKind::Concept;
            ha.pred = p;
            ha.a = build_head_term(rh.args[0], scope_vars, re.line, re.col);
            if (rh.args.size() == 2)
              ha.b = build_head_term(rh.args[1], scope_vars, re.line, re.col);
          }
          es.head.push_back(std::move(ha));
        }
        ad.effects.push_back(std::move(es));
      }
      out.actions.push_back(std::move(ad));
    }

    // Rules.
    for (const RRule& rr : raw.rules) {
      ProcessRule pr;
      Scope sc;
      std::vector<VarId> cond_free;
      pr.condition = build_ecq(rr.cond, sc, &cond_free);
      std::sort(cond_free.begin(), cond_free.end());
      cond_free.erase(std::unique(cond_free.begin(), cond_free.end()),
                      cond_free.end());

      auto it = std::find_if(out.actions.begin(), out.actions.end(),
                             [&](const ActionDef& a) {
                               return a.name == rr.action;
                             });
      if (it == out.actions.end()) {
        diag(rr.line, rr.col, "unknown-symbol",
             "rule invokes undefined action '" + rr.action + "'");
        continue;
      }
      pr.action = static_cast<std::size_t>(it - out.actions.begin());

      std::set<VarId> argset;
      for (const std::string& an : rr.args) {
        if (is_const_name(an)) {
          diag(rr.line, rr.col, "syntax",
               "rule argument '" + an + "' is a constant; arguments must be "
               "condition variables");
          continue;
        }
        VarId v = u->var(an);
        if (!argset.insert(v).second)
          diag(rr.line, rr.col, "duplicate",
               "rule argument '" + an + "' repeated");
        pr.args.push_back(v);
      }
      if (pr.args.size() != it->params.size())
        diag(rr.line, rr.col, "arity",
             "action '" + rr.action + "' takes " +
                 std::to_string(it->params.size()) + " parameter(s), rule "
                 "passes " + std::to_string(pr.args.size()));
      std::set<VarId> condset(cond_free.begin(), cond_free.end());
      if (condset != argset)
        diag(rr.line, rr.col, "free-variable-mismatch",
             "free variables of the rule condition must exactly match the "
             "invocation arguments");
      out.process.push_back(std::move(pr));
    }

    // Alphabet: every concept/role name anywhere in the spec.
    {
      std::set<PredId> ps;
      auto add_ucq = [&](const Ucq& q) {
        for (const Cq& cq : q.disjuncts)
          for (const QAtom& at : cq.atoms) ps.insert(at.pred);
      };
      std::function<void(const Ecq&)> add_ecq = [&](const Ecq& e) {
        switch (e->op) {
          case EcqNode::Op::UcqLeaf: add_ucq(e->ucq); break;
          case EcqNode::Op::Not: add_ecq(e->child); break;
          case EcqNode::Op::And:
            add_ecq(e->child);
            add_ecq(e->child2);
            break;
          case EcqNode::Op::Exists: add_ecq(e->child); break;
          default: break;
        }
      };
      for (const TBoxAssertion& x : out.tbox.items()) {
        switch (x.kind) {
          case TBoxAssertion::Kind::ConceptIncl:
            for (const BasicConcept* b : {&x.lhs_c, &x.rhs_c})
              ps.insert(b->is_exists ? b->role.role : b->name);
            break;
          case TBoxAssertion::Kind::RoleIncl:
            ps.insert(x.lhs_r.role);
            ps.insert(x.rhs_r.role);
            break;
          case TBoxAssertion::Kind::Funct:
            ps.insert(x.lhs_r.role);
            break;
        }
      }
      for (const Assertion& x : out.abox0)
        if (x.kind != AKind::Eq) ps.insert(x.pred);
      for (const ActionDef& a : out.actions)
        for (const EffectSpec& e : a.effects) {
          add_ucq(e.q_plus);
          add_ecq(e.q_minus);
          for (const HeadAtom& h : e.head)
            if (h.kind != AKind::Eq) ps.insert(h.pred);
        }
      for (const ProcessRule& r : out.process) add_ecq(r.condition);
      out.alphabet.assign(ps.begin(), ps.end());
      std::sort(out.alphabet.begin(), out.alphabet.end(),
                [&](PredId a, PredId b) {
                  return u->pred_name(a) < u->pred_name(b);
                });
    }

    // COPYALL expansion over the alphabet.
    {
      VarId cx = u->var("x");
      VarId cy = u->var("y");
      for (ActionDef& a : out.actions) {
        if (!a.copy_all) continue;
        for (PredId p : out.alphabet) {
          EffectSpec es;
          es.from_copyall = true;
          Cq cq;
          HeadAtom ha;
          if (u->pred_is_role(p)) {
            cq.atoms.push_back(QAtom{p, true, QArg::of_var(cx),
                                     QArg::of_var(cy)});
            ha.kind = AKind::Role;
            ha.pred = p;
            ha.a = HeadTerm::of_var(cx);
            ha.b = HeadTerm::of_var(cy);
          } else {
            cq.atoms.push_back(QAtom{p, false, QArg::of_var(cx), {}});
            ha.kind = AKind::Concept;
            ha.pred = p;
            ha.a = HeadTerm::of_var(cx);
          }
          es.q_plus = ucq_of(std::move(cq));
          es.q_minus = ecq_true();
          es.head.push_back(std::move(ha));
          a.effects.push_back(std::move(es));
        }
      }
    }

    // TBox well-formedness.
    for (const Diagnostic& d : out.tbox.wellformedness_violations(*u))
      rz.diags.push_back(d);
  }
};

}  // namespace

const ActionDef* KabSpec::find_action(const std::string& name) const {
  for (const ActionDef& a : actions)
    if (a.name == name) return &a;
  return nullptr;
}

KabSpec parse_kab(std::string_view text) {
  std::vector<Token> toks = lex(text);
  RSpec raw = parse_raw(toks);
  Resolver rz(raw);
  rz.collect();
  Builder b(raw, rz);
  b.build();
  if (!rz.diags.empty()) throw ValidationError(rz.diags);
  return std::move(b.out);
}

// ---------------------------------------------------------------------------
// Formula parsing

namespace {

struct FNode;
using FNodeP = std::shared_ptr<FNode>;
struct FNode {
  enum class K {
    True, Bracket, Not, And, Or, Impl, Ex, All, Dia, Box, Z, Mu, Nu
  };
  K k;
  REcqP bracket;          // Bracket (Ucq or Eq raw node)
  FNodeP a, b;
  std::string name;       // Ex/All binder, Z, Mu/Nu binder
  int line = 0, col = 0;
};

FNodeP parse_phi(Cursor& c);

FNodeP parse_phi_unary(Cursor& c) {
  const Token& t = c.peek();
  auto node = [&](FNode::K k) {
    auto n = std::make_shared<FNode>();
    n->k = k;
    n->line = t.line;
    n->col = t.col;
    return n;
  };
  if (c.eat(Tok::Bang)) {
    auto n = node(FNode::K::Not);
    n->a = parse_phi_unary(c);
    return n;
  }
  if (c.eat(Tok::Diamond)) {
    auto n = node(FNode::K::Dia);
    n->a = parse_phi_unary(c);
    return n;
  }
  if (c.eat(Tok::Box)) {
    auto n = node(FNode::K::Box);
    n->a = parse_phi_unary(c);
    return n;
  }
  if (c.at_word("mu") || c.at_word("nu")) {
    bool is_mu = c.next().text == "mu";
    auto n = node(is_mu ? FNode::K::Mu : FNode::K::Nu);
    n->name = c.expect_name("fixpoint variable");
    c.expect(Tok::Dot, "'.'");
    n->a = parse_phi(c);
    return n;
  }
  if (c.at_word("EX") || c.at_word("ALL")) {
    bool is_ex = c.next().text == "EX";
    auto n = node(is_ex ? FNode::K::Ex : FNode::K::All);
    n->name = c.expect_name("variable");
    c.expect(Tok::Dot, "'.'");
    n->a = parse_phi(c);
    return n;
  }
  if (c.at_word("TRUE")) {
    c.next();
    return node(FNode::K::True);
  }
  if (c.at(Tok::LBrack)) {
    auto n = node(FNode::K::Bracket);
    n->bracket = parse_bracket(c);
    return n;
  }
  if (c.at(Tok::LParen)) {
    c.next();
    FNodeP n = parse_phi(c);
    c.expect(Tok::RParen, "')'");
    return n;
  }
  if (c.at(Tok::Ident)) {
    auto n = node(FNode::K::Z);
    n->name = c.expect_name("fixpoint variable");
    return n;
  }
  fail(t.line, t.col, "syntax",
       "expected a formula, found '" + t.text + "'");
}

FNodeP parse_phi_and(Cursor& c) {
  FNodeP lhs = parse_phi_unary(c);
  while (c.at(Tok::Amp)) {
    const Token& t = c.next();
    auto n = std::make_shared<FNode>();
    n->k = FNode::K::And;
    n->line = t.line;
    n->col = t.col;
    n->a = lhs;
    n->b = parse_phi_unary(c);
    lhs = n;
  }
  return lhs;
}

FNodeP parse_phi_or(Cursor& c) {
  FNodeP lhs = parse_phi_and(c);
  while (c.at(Tok::Pipe)) {
    const Token& t = c.next();
    auto n = std::make_shared<FNode>();
    n->k = FNode::K::Or;
    n->line = t.line;
    n->col = t.col;
    n->a = lhs;
    n->b = parse_phi_and(c);
    lhs = n;
  }
  return lhs;
}

FNodeP parse_phi(Cursor& c) {
  FNodeP lhs = parse_phi_or(c);
  if (c.at(Tok::Arrow)) {
    const Token& t = c.next();
    auto n = std::make_shared<FNode>();
    n->k = FNode::K::Impl;
    n->line = t.line;
    n->col = t.col;
    n->a = lhs;
    n->b = parse_phi(c);  // right associative
    return n;
  }
  return lhs;
}

// Resolve and desugar to the core AST. Identifiers inside brackets must be
// bound variables or existing constants.
struct FormulaBuilder {
  Universe& u;
  std::vector<std::pair<std::string, VarId>> vars;
  std::vector<std::string> zs;

  TermId need_const(const RTerm& t) {
    if (t.is_fn) {
      auto f = u.find_function(t.name);
      if (!f)
        fail(t.line, t.col, "unknown-symbol",
             "function '" + t.name + "' is not declared in the "
             "specification");
      if (u.function_arity(*f) != t.args.size())
        fail(t.line, t.col, "arity",
             "function '" + t.name + "' has arity " +
                 std::to_string(u.function_arity(*f)));
      std::vector<TermId> args;
      for (const RTerm& a : t.args) args.push_back(need_const(a));
      return u.apply(*f, args);
    }
    auto ct = u.find_constant(t.name);
    if (!ct)
      fail(t.line, t.col, "unknown-symbol",
           "'" + t.name + "' is neither a bound variable nor a constant of "
           "the specification");
    return *ct;
  }

  QArg atom_arg(const RTerm& t) {
    if (!t.is_fn) {
      for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        if (it->first == t.name) return QArg::of_var(it->second);
    }
    return QArg::of_term(need_const(t));
  }

  PredId need_pred(const std::string& n, std::size_t arity, int line,
                   int col) {
    auto p = u.find_pred(n);
    if (!p)
      fail(line, col, "unknown-symbol",
           "predicate '" + n + "' does not occur in the specification");
    if (u.pred_is_role(*p) != (arity == 2))
      fail(line, col, "kind-conflict",
           "'" + n + "' is a " + (u.pred_is_role(*p) ? "role" : "concept"));
    return *p;
  }

  Ucq build_ucq(const RUcq& q) {
    if (q.is_true) return ucq_true();
    Ucq out;
    for (const RCq& rcq : q.disjuncts) {
      Cq cq;
      std::size_t mark = vars.size();
      for (const std::string& v : rcq.ex_vars) {
        VarId vid = u.var(v);
        vars.emplace_back(v, vid);
        cq.exist_vars.push_back(vid);
      }
      for (const RAtom& a : rcq.atoms) {
        QAtom at;
        at.pred = need_pred(a.pred, a.args.size(), a.line, a.col);
        at.is_role = a.args.size() == 2;
        at.a = atom_arg(a.args[0]);
        if (at.is_role) at.b = atom_arg(a.args[1]);
        cq.atoms.push_back(at);
      }
      vars.resize(mark);
      out.disjuncts.push_back(std::move(cq));
    }
    return out;
  }

  Ecq build_leaf(const REcqP& br) {
    if (br->k == REcq::K::Eq)
      return ecq_eq(atom_arg(br->ea), atom_arg(br->eb));
    return ecq_ucq(build_ucq(br->ucq));
  }

  Mu build(const FNodeP& f) {
    switch (f->k) {
      case FNode::K::True:
        return mu_leaf(ecq_true());
      case FNode::K::Bracket:
        return mu_leaf(build_leaf(f->bracket));
      case FNode::K::Not:
        return mu_not(build(f->a));
      case FNode::K::And:
        return mu_and(build(f->a), build(f->b));
      case FNode::K::Or:
        return mu_not(mu_and(mu_not(build(f->a)), mu_not(build(f->b))));
      case FNode::K::Impl:
        return mu_not(mu_and(build(f->a), mu_not(build(f->b))));
      case FNode::K::Ex: {
        VarId v = u.var(f->name);
        vars.emplace_back(f->name, v);
        Mu body = build(f->a);
        vars.pop_back();
        return mu_exists(v, body);
      }
      case FNode::K::All: {
        VarId v = u.var(f->name);
        vars.emplace_back(f->name, v);
        Mu body = build(f->a);
        vars.pop_back();
        return mu_not(mu_exists(v, mu_not(body)));
      }
      case FNode::K::Dia:
        return mu_diamond(build(f->a));
      case FNode::K::Box:
        return mu_not(mu_diamond(mu_not(build(f->a))));
      case FNode::K::Z: {
        if (std::find(zs.begin(), zs.end(), f->name) == zs.end())
          fail(f->line, f->col, "unknown-symbol",
               "unbound fixpoint variable '" + f->name + "'");
        return mu_var(f->name);
      }
      case FNode::K::Mu: {
        if (std::find(zs.begin(), zs.end(), f->name) != zs.end())
          fail(f->line, f->col, "duplicate",
               "fixpoint variable '" + f->name + "' shadows an outer binder");
        zs.push_back(f->name);
        Mu body = build(f->a);
        zs.pop_back();
        return mu_mu(f->name, body);
      }
      case FNode::K::Nu: {
        if (std::find(zs.begin(), zs.end(), f->name) != zs.end())
          fail(f->line, f->col, "duplicate",
               "fixpoint variable '" + f->name + "' shadows an outer binder");
        zs.push_back(f->name);
        Mu body = build(f->a);
        zs.pop_back();
        return mu_nu(f->name, body);
      }
    }
    return mu_leaf(ecq_true());
  }
};

}  // namespace

Mu parse_formula(std::string_view text, Universe& u) {
  std::vector<Token> toks = lex(text);
  Cursor c{toks};
  FNodeP f = parse_phi(c);
  if (c.eat(Tok::Semi)) {
    // allow one trailing semicolon
  }
  if (!c.at(Tok::End))
    fail(c.peek().line, c.peek().col, "syntax",
         "unexpected '" + c.peek().text + "' after the formula");
  FormulaBuilder fb{u, {}, {}};
  return fb.build(f);
}

std::vector<Mu> parse_formula_file(std::string_view text, Universe& u) {
  std::vector<Token> toks = lex(text);
  Cursor c{toks};
  std::vector<Mu> out;
  while (!c.at(Tok::End)) {
    FNodeP f = parse_phi(c);
    c.expect(Tok::Semi, "';' after the formula");
    FormulaBuilder fb{u, {}, {}};
    out.push_back(fb.build(f));
  }
  return out;
}

}  // namespace kab
