// Copyright 2026 The mdmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "mdmc/diagnostics.hpp"
#include "mdmc/scheme.hpp"
#include "mdmc/validate.hpp"

namespace mdmc {

// ---------------------------------------------------------------------------
// Lexer shared by the scheme language and the formula sublanguage.
// Identifiers are case-sensitive; '#' starts a line comment. A few statement
// keywords contain hyphens; the lexer glues them back together when the
// joined spelling is one of the known keywords.
// ---------------------------------------------------------------------------

struct Token {
  enum class Kind { Ident, Int, Str, CharLit, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t int_value = 0;
  SourceSpan span;

  bool is_punct(const std::string &p) const { return kind == Kind::Punct && text == p; }
  bool is_ident(const std::string &i) const { return kind == Kind::Ident && text == i; }
};

namespace detail {

inline bool is_hyphen_keyword(const std::string &s) {
  return s == "subset-of" || s == "null-reflexive" || s == "no-overlap";
}

class Lexer {
 public:
  Lexer(std::string text, std::string file)
      : text_(std::move(text)), file_(std::move(file)) {}

  std::vector<Token> run(std::vector<Diagnostic> &errors) {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Token t = next(errors);
      bool end = t.kind == Token::Kind::End;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  std::string text_, file_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  char cur() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char peek(std::size_t k = 1) const {
    return pos_ + k < text_.size() ? text_[pos_ + k] : '\0';
  }
  void advance() {
    if (cur() == '\n') { ++line_; col_ = 1; } else { ++col_; }
    ++pos_;
  }
  SourceSpan here() const { return {file_, line_, col_, line_, col_}; }

  void skip_ws() {
    for (;;) {
      while (std::isspace(static_cast<unsigned char>(cur()))) advance();
      if (cur() == '#') {
        while (cur() != '\n' && cur() != '\0') advance();
        continue;
      }
      break;
    }
  }

  Token next(std::vector<Diagnostic> &errors) {
    Token t;
    t.span = here();
    char c = cur();
    if (c == '\0') { t.kind = Token::Kind::End; return t; }

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word = scan_word();
      // try to extend with hyphenated segments forming a known keyword
      while (cur() == '-' && (std::isalpha(static_cast<unsigned char>(peek())))) {
        std::size_t save_pos = pos_;
        int save_line = line_, save_col = col_;
        advance();  // '-'
        std::string seg = scan_word();
        if (is_hyphen_keyword(word + "-" + seg)) {
          word += "-" + seg;
        } else {
          pos_ = save_pos; line_ = save_line; col_ = save_col;
          break;
        }
      }
      t.kind = Token::Kind::Ident;
      t.text = word;
      t.span.line_end = line_; t.span.col_end = col_;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (std::isdigit(static_cast<unsigned char>(cur()))) { num += cur(); advance(); }
      t.kind = Token::Kind::Int;
      t.text = num;
      t.int_value = std::stoll(num);
      t.span.line_end = line_; t.span.col_end = col_;
      return t;
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      advance();
      std::string s;
      while (cur() != quote) {
        if (cur() == '\0' || (quote == '\'' && cur() == '\n')) {
          errors.push_back({Severity::Error, "unterminated string literal", t.span});
          break;
        }
        if (cur() == '\\' && peek() == quote) advance();
        s += cur();
        advance();
      }
      if (cur() == quote) advance();
      t.kind = quote == '"' ? Token::Kind::Str : Token::Kind::CharLit;
      t.text = s;
      t.span.line_end = line_; t.span.col_end = col_;
      return t;
    }

    // punctuation, two-char first
    static const char *two[] = {"->", "<>", "<=", ">="};
    for (const char *p : two) {
      if (c == p[0] && peek() == p[1]) {
        advance(); advance();
        t.kind = Token::Kind::Punct;
        t.text = p;
        return t;
      }
    }
    static const std::string singles = ";:,.(){}[]=<>+-";
    if (singles.find(c) != std::string::npos) {
      advance();
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      return t;
    }
    errors.push_back({Severity::Error,
                      std::string("unexpected character '") + c + "'", t.span});
    advance();
    return next(errors);
  }

  std::string scan_word() {
    std::string w;
    while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_') {
      w += cur();
      advance();
    }
    return w;
  }
};

// ---------------------------------------------------------------------------
// Untyped expression tree for the formula sublanguage; conversion into the
// typed Formula/Term AST resolves mappings and type checks.
// ---------------------------------------------------------------------------

struct PExpr {
  enum class Kind {
    And, Or, Not, Implies, Cmp, IsNull, Quant,
    Apply, Var, IntLit, StrLit, Add, Sub, Coalesce, CurrentYear,
  };
  Kind kind;
  std::shared_ptr<PExpr> a, b;
  CompareOp op = CompareOp::Eq;
  bool null_positive = true;
  bool universal = true;
  std::vector<std::string> vars;
  std::string name;
  std::int64_t int_value = 0;
  SourceSpan span;
};
using PExprPtr = std::shared_ptr<PExpr>;

class FormulaParser {
 public:
  FormulaParser(const std::vector<Token> &toks, std::vector<Diagnostic> &errors)
      : toks_(toks), errors_(errors) {}

  PExprPtr parse(std::size_t &pos) {
    pos_ = pos;
    PExprPtr e = parse_implies();
    pos = pos_;
    return e;
  }

  bool at_end() const { return toks_[pos_].kind == Token::Kind::End; }

 private:
  const std::vector<Token> &toks_;
  std::vector<Diagnostic> &errors_;
  std::size_t pos_ = 0;

  const Token &cur() const { return toks_[pos_]; }
  void advance() { if (cur().kind != Token::Kind::End) ++pos_; }
  bool eat_punct(const std::string &p) {
    if (cur().is_punct(p)) { advance(); return true; }
    return false;
  }
  bool eat_ident(const std::string &w) {
    if (cur().is_ident(w)) { advance(); return true; }
    return false;
  }
  PExprPtr error(const std::string &msg) {
    errors_.push_back({Severity::Error, msg, cur().span});
    return nullptr;
  }
  PExprPtr node(PExpr::Kind k) {
    auto e = std::make_shared<PExpr>();
    e->kind = k;
    e->span = cur().span;
    return e;
  }

  PExprPtr parse_implies() {
    PExprPtr lhs = parse_or();
    if (!lhs) return nullptr;
    if (eat_ident("implies")) {
      PExprPtr rhs = parse_implies();
      if (!rhs) return nullptr;
      auto e = node(PExpr::Kind::Implies);
      e->a = lhs; e->b = rhs;
      return e;
    }
    return lhs;
  }
  PExprPtr parse_or() {
    PExprPtr lhs = parse_and();
    if (!lhs) return nullptr;
    while (eat_ident("or")) {
      PExprPtr rhs = parse_and();
      if (!rhs) return nullptr;
      auto e = node(PExpr::Kind::Or);
      e->a = lhs; e->b = rhs;
      lhs = e;
    }
    return lhs;
  }
  PExprPtr parse_and() {
    PExprPtr lhs = parse_unary();
    if (!lhs) return nullptr;
    while (eat_ident("and")) {
      PExprPtr rhs = parse_unary();
      if (!rhs) return nullptr;
      auto e = node(PExpr::Kind::And);
      e->a = lhs; e->b = rhs;
      lhs = e;
    }
    return lhs;
  }
  PExprPtr parse_unary() {
    if (cur().is_ident("not")) {
      advance();
      PExprPtr inner = parse_unary();
      if (!inner) return nullptr;
      auto e = node(PExpr::Kind::Not);
      e->a = inner;
      return e;
    }
    if (cur().is_ident("forall") || cur().is_ident("exists")) return parse_quantifier();
    return parse_cmp();
  }
  PExprPtr parse_quantifier() {
    auto e = node(PExpr::Kind::Quant);
    e->universal = cur().is_ident("forall");
    advance();
    for (;;) {
      if (cur().kind != Token::Kind::Ident) return error("expected variable name");
      e->vars.push_back(cur().text);
      advance();
      if (!eat_punct(",")) break;
    }
    if (!eat_ident("in")) return error("expected 'in'");
    if (cur().kind != Token::Kind::Ident) return error("expected set name");
    e->name = cur().text;
    advance();
    if (!eat_punct(":")) return error("expected ':' after quantifier");
    e->a = parse_implies();
    return e->a ? e : nullptr;
  }
  PExprPtr parse_cmp() {
    PExprPtr lhs = parse_sum();
    if (!lhs) return nullptr;
    if (cur().is_ident("is")) {
      advance();
      bool positive = true;
      if (eat_ident("not")) positive = false;
      if (!eat_ident("null")) return error("expected 'null'");
      auto e = node(PExpr::Kind::IsNull);
      e->a = lhs;
      e->null_positive = positive;
      return e;
    }
    static const std::pair<const char *, CompareOp> ops[] = {
        {"=", CompareOp::Eq}, {"<>", CompareOp::Ne}, {"<=", CompareOp::Le},
        {">=", CompareOp::Ge}, {"<", CompareOp::Lt}, {">", CompareOp::Gt}};
    for (auto [txt, op] : ops) {
      if (cur().is_punct(txt)) {
        advance();
        PExprPtr rhs = parse_sum();
        if (!rhs) return nullptr;
        auto e = node(PExpr::Kind::Cmp);
        e->op = op; e->a = lhs; e->b = rhs;
        return e;
      }
    }
    return lhs;
  }
  PExprPtr parse_sum() {
    PExprPtr lhs = parse_atom();
    if (!lhs) return nullptr;
    for (;;) {
      PExpr::Kind k;
      if (cur().is_punct("+")) k = PExpr::Kind::Add;
      else if (cur().is_punct("-")) k = PExpr::Kind::Sub;
      else break;
      advance();
      PExprPtr rhs = parse_atom();
      if (!rhs) return nullptr;
      auto e = node(k);
      e->a = lhs; e->b = rhs;
      lhs = e;
    }
    return lhs;
  }
  PExprPtr parse_atom() {
    if (cur().kind == Token::Kind::Int) {
      auto e = node(PExpr::Kind::IntLit);
      e->int_value = cur().int_value;
      advance();
      return e;
    }
    if (cur().is_punct("-")) {
      advance();
      PExprPtr inner = parse_atom();
      if (!inner) return nullptr;
      if (inner->kind == PExpr::Kind::IntLit) {
        inner->int_value = -inner->int_value;
        return inner;
      }
      auto zero = node(PExpr::Kind::IntLit);
      auto e = node(PExpr::Kind::Sub);
      e->a = zero; e->b = inner;
      return e;
    }
    if (cur().kind == Token::Kind::CharLit) {
      auto e = node(PExpr::Kind::StrLit);
      e->name = cur().text;
      advance();
      return e;
    }
    if (cur().is_punct("(")) {
      advance();
      PExprPtr inner = parse_implies();
      if (!inner) return nullptr;
      if (!eat_punct(")")) return error("expected ')'");
      return inner;
    }
    if (cur().kind == Token::Kind::Ident) {
      std::string name = cur().text;
      SourceSpan sp = cur().span;
      advance();
      if (eat_punct("(")) {
        if (name == "currentYear") {
          if (!eat_punct(")")) return error("expected ')'");
          auto e = node(PExpr::Kind::CurrentYear);
          e->span = sp;
          return e;
        }
        PExprPtr a = parse_implies();
        if (!a) return nullptr;
        if (name == "isNull") {
          if (!eat_punct(",")) return error("isNull takes two arguments");
          PExprPtr b = parse_implies();
          if (!b) return nullptr;
          if (!eat_punct(")")) return error("expected ')'");
          auto e = node(PExpr::Kind::Coalesce);
          e->a = a; e->b = b; e->span = sp;
          return e;
        }
        if (!eat_punct(")")) return error("expected ')'");
        auto e = node(PExpr::Kind::Apply);
        e->name = name; e->a = a; e->span = sp;
        return e;
      }
      auto e = node(PExpr::Kind::Var);
      e->name = name; e->span = sp;
      return e;
    }
    return error("expected a term");
  }
};

/// Conversion of untyped trees into the typed AST. Returns null on error and
/// appends diagnostics.
class FormulaBuilder {
 public:
  FormulaBuilder(const MdmScheme &scheme, std::vector<Diagnostic> &errors)
      : scheme_(scheme), errors_(errors) {}

  FormulaPtr to_formula(const PExprPtr &e, std::map<std::string, int> env) {
    if (!e) return nullptr;
    switch (e->kind) {
      case PExpr::Kind::Quant: {
        int si = scheme_.find_set(e->name);
        if (si < 0) return fail(e, "unknown set '" + e->name + "'");
        const ObjectSet &s = scheme_.sets[si];
        if (s.kind == ObjectSet::Kind::ComputedView ||
            s.kind == ObjectSet::Kind::StaticEnum)
          return fail(e, "cannot quantify over " + s.name);
        for (const auto &v : e->vars) {
          if (env.count(v)) return fail(e, "variable '" + v + "' already bound");
          env[v] = si;
        }
        FormulaPtr body = to_formula(e->a, env);
        if (!body) return nullptr;
        return Formula::quantifier(
            e->universal ? Formula::Kind::Forall : Formula::Kind::Exists, e->vars,
            e->name, si, body);
      }
      case PExpr::Kind::And:
      case PExpr::Kind::Or:
      case PExpr::Kind::Implies: {
        FormulaPtr l = to_formula(e->a, env);
        FormulaPtr r = to_formula(e->b, env);
        if (!l || !r) return nullptr;
        Formula::Kind k = e->kind == PExpr::Kind::And ? Formula::Kind::And
                          : e->kind == PExpr::Kind::Or ? Formula::Kind::Or
                                                       : Formula::Kind::Implies;
        return Formula::binary(k, l, r);
      }
      case PExpr::Kind::Not: {
        FormulaPtr b = to_formula(e->a, env);
        return b ? Formula::negation(b) : nullptr;
      }
      case PExpr::Kind::IsNull: {
        auto [t, ty] = to_term(e->a, env);
        if (!t) return nullptr;
        return Formula::is_null(t, e->null_positive);
      }
      case PExpr::Kind::Cmp: {
        auto [l, lt] = to_term(e->a, env);
        auto [r, rt] = to_term(e->b, env);
        if (!l || !r) return nullptr;
        if (!lt.same_category(rt))
          return fail(e, "comparison of incompatible operands");
        bool ordering = e->op != CompareOp::Eq && e->op != CompareOp::Ne;
        if (ordering && lt.kind != TermType::Kind::Int)
          return fail(e, "ordering comparison requires integer operands");
        return Formula::compare(e->op, l, r);
      }
      default:
        return fail(e, "expected a formula, found a term");
    }
  }

  std::pair<TermPtr, TermType> to_term(const PExprPtr &e,
                                       const std::map<std::string, int> &env) {
    if (!e) return {nullptr, TermType::invalid()};
    switch (e->kind) {
      case PExpr::Kind::Var: {
        auto it = env.find(e->name);
        if (it == env.end()) {
          fail(e, "unbound variable '" + e->name + "'");
          return {nullptr, TermType::invalid()};
        }
        return {Term::var(e->name), TermType::object(it->second)};
      }
      case PExpr::Kind::IntLit:
        return {Term::int_lit(e->int_value), TermType::integer()};
      case PExpr::Kind::StrLit:
        return {Term::str_lit(e->name), TermType::text()};
      case PExpr::Kind::CurrentYear:
        return {Term::current_year(), TermType::integer()};
      case PExpr::Kind::Apply: {
        auto [arg, at] = to_term(e->a, env);
        if (!arg) return {nullptr, TermType::invalid()};
        if (at.kind != TermType::Kind::Set) {
          fail(e, "'" + e->name + "' applied to a non-object term");
          return {nullptr, TermType::invalid()};
        }
        int mi = scheme_.find_mapping(e->name, at.set_index);
        if (mi < 0) {
          fail(e, "no function '" + e->name + "' on " +
                      scheme_.sets[at.set_index].name);
          return {nullptr, TermType::invalid()};
        }
        const Mapping &m = scheme_.mappings[mi];
        if (m.kind == Mapping::Kind::ObjectIdentifier) {
          fail(e, "object identifier x may not be applied as a function");
          return {nullptr, TermType::invalid()};
        }
        TermType rt = m.has_set_codomain() ? TermType::object(m.codomain_set)
                                           : value_type_category(m.codomain_type);
        return {Term::apply(e->name, mi, arg), rt};
      }
      case PExpr::Kind::Add:
      case PExpr::Kind::Sub: {
        auto [l, lt] = to_term(e->a, env);
        auto [r, rt] = to_term(e->b, env);
        if (!l || !r) return {nullptr, TermType::invalid()};
        if (lt.kind != TermType::Kind::Int || rt.kind != TermType::Kind::Int) {
          fail(e, "arithmetic requires integer operands");
          return {nullptr, TermType::invalid()};
        }
        return {Term::binary(e->kind == PExpr::Kind::Add ? Term::Kind::Add
                                                         : Term::Kind::Sub,
                             l, r),
                TermType::integer()};
      }
      case PExpr::Kind::Coalesce: {
        auto [l, lt] = to_term(e->a, env);
        auto [r, rt] = to_term(e->b, env);
        if (!l || !r) return {nullptr, TermType::invalid()};
        if (!lt.same_category(rt)) {
          fail(e, "isNull(a, b) requires same-typed arguments");
          return {nullptr, TermType::invalid()};
        }
        return {Term::binary(Term::Kind::Coalesce, l, r), lt};
      }
      default:
        fail(e, "expected a term, found a formula");
        return {nullptr, TermType::invalid()};
    }
  }

 private:
  const MdmScheme &scheme_;
  std::vector<Diagnostic> &errors_;

  FormulaPtr fail(const PExprPtr &e, const std::string &msg) {
    errors_.push_back({Severity::Error, msg, e->span});
    return nullptr;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Public parsing entry points.
// ---------------------------------------------------------------------------

struct ParseResult {
  MdmScheme scheme;
  std::vector<Diagnostic> errors;
  bool ok() const { return !has_errors(errors); }
};

struct FormulaResult {
  FormulaPtr formula;
  std::vector<Diagnostic> errors;
  bool ok() const { return formula && !has_errors(errors); }
};

/// Parses a closed formula against a scheme.
inline FormulaResult parse_formula(const MdmScheme &scheme, const std::string &text,
                                   const std::string &file = "<formula>") {
  FormulaResult res;
  detail::Lexer lex(text, file);
  auto toks = lex.run(res.errors);
  detail::FormulaParser fp(toks, res.errors);
  std::size_t pos = 0;
  auto pe = fp.parse(pos);
  if (pe && toks[pos].kind != Token::Kind::End)
    res.errors.push_back({Severity::Error, "trailing input after formula", toks[pos].span});
  if (!pe || has_errors(res.errors)) return res;
  detail::FormulaBuilder fb(scheme, res.errors);
  res.formula = fb.to_formula(pe, {});
  return res;
}

/// Parses a term with one free variable (used for tuple bodies rendered as
/// terms and for computed-attribute expressions).
inline std::pair<TermPtr, std::vector<Diagnostic>> parse_term(
    const MdmScheme &scheme, const std::string &text, const std::string &var,
    int set_index, const std::string &file = "<term>") {
  std::vector<Diagnostic> errors;
  detail::Lexer lex(text, file);
  auto toks = lex.run(errors);
  detail::FormulaParser fp(toks, errors);
  std::size_t pos = 0;
  auto pe = fp.parse(pos);
  if (pe && toks[pos].kind != Token::Kind::End)
    errors.push_back({Severity::Error, "trailing input after expression", toks[pos].span});
  if (!pe || has_errors(errors)) return {nullptr, errors};
  detail::FormulaBuilder fb(scheme, errors);
  auto [t, ty] = fb.to_term(pe, {{var, set_index}});
  return {t, errors};
}

namespace detail {

/// Statement-splitting parser for the scheme language. Work proceeds in
/// stages so later statements may reference earlier declarations of any kind:
/// sets first, then functions, then keys/ranges/defaults/constraints.
class SchemeParser {
 public:
  SchemeParser(std::string text, std::string file)
      : text_(std::move(text)), file_(std::move(file)) {}

  ParseResult run() {
    ParseResult res;
    Lexer lex(text_, file_);
    auto toks = lex.run(res.errors);

    // split into statements on top-level ';'
    std::vector<std::vector<Token>> stmts;
    std::vector<Token> curstmt;
    for (auto &t : toks) {
      if (t.kind == Token::Kind::End) break;
      if (t.is_punct(";")) {
        if (!curstmt.empty()) {
          Token end; end.kind = Token::Kind::End;
          end.span = t.span;
          curstmt.push_back(end);
          stmts.push_back(std::move(curstmt));
          curstmt.clear();
        }
        continue;
      }
      curstmt.push_back(t);
    }
    if (!curstmt.empty()) {
      res.errors.push_back(
          {Severity::Error, "missing ';' after last statement", curstmt.front().span});
      Token end; end.kind = Token::Kind::End;
      curstmt.push_back(end);
      stmts.push_back(std::move(curstmt));
    }

    MdmScheme &s = res.scheme;
    // stage 1: sets (and their synthesized identifiers and inclusions)
    for (auto &st : stmts)
      if (!st.empty() && st[0].is_ident("set")) parse_set(st, s, res.errors);
    // resolve supersets into inclusion mappings now that all sets exist
    synthesize_inclusions(s, res.errors);
    // stage 2: functions
    for (auto &st : stmts)
      if (!st.empty() && st[0].is_ident("fun")) parse_fun(st, s, res.errors);
    // stage 3: everything else
    for (auto &st : stmts) {
      if (st.empty()) continue;
      if (st[0].is_ident("set") || st[0].is_ident("fun")) continue;
      if (st[0].is_ident("key")) parse_key(st, s, res.errors);
      else if (st[0].is_ident("range")) parse_range(st, s, res.errors);
      else if (st[0].is_ident("default")) parse_default(st, s, res.errors);
      else if (st[0].is_ident("constraint")) parse_constraint(st, s, res.errors);
      else
        res.errors.push_back({Severity::Error,
                              "unknown statement '" + st[0].text + "'", st[0].span});
    }
    // stage 4: computed-attribute expressions (may use any function)
    for (std::size_t mi = 0; mi < s.mappings.size(); ++mi) {
      Mapping &m = s.mappings[mi];
      if (m.kind != Mapping::Kind::ComputedAttribute) continue;
      auto it = pending_exprs_.find(static_cast<int>(mi));
      if (it == pending_exprs_.end()) continue;
      auto [t, errs] = parse_term(s, it->second, "x", m.domain, file_);
      res.errors.insert(res.errors.end(), errs.begin(), errs.end());
      m.compute_expr = t;
    }

    if (!has_errors(res.errors)) {
      auto vdiags = validate_scheme(s);
      res.errors.insert(res.errors.end(), vdiags.begin(), vdiags.end());
    }
    return res;
  }

 private:
  std::string text_, file_;
  std::map<int, std::string> pending_exprs_;  // mapping index -> source text

  struct Cursor {
    const std::vector<Token> &t;
    std::size_t i = 0;
    const Token &cur() const { return t[i]; }
    void advance() { if (t[i].kind != Token::Kind::End) ++i; }
    bool eat_ident(const std::string &w) {
      if (t[i].is_ident(w)) { ++i; return true; }
      return false;
    }
    bool eat_punct(const std::string &p) {
      if (t[i].is_punct(p)) { ++i; return true; }
      return false;
    }
    bool at_end() const { return t[i].kind == Token::Kind::End; }
  };

  static void fail(std::vector<Diagnostic> &errors, const Token &tok,
                   const std::string &msg) {
    errors.push_back({Severity::Error, msg, tok.span});
  }

  void parse_set(const std::vector<Token> &st, MdmScheme &s,
                 std::vector<Diagnostic> &errors) {
    Cursor c{st};
    c.advance();  // 'set'
    if (c.cur().kind != Token::Kind::Ident) return fail(errors, c.cur(), "expected set name");
    ObjectSet set;
    set.name = c.cur().text;
    c.advance();

    if (c.eat_ident("entity")) set.kind = ObjectSet::Kind::Entity;
    else if (c.eat_ident("relationship")) set.kind = ObjectSet::Kind::Relationship;
    else if (c.eat_ident("static")) set.kind = ObjectSet::Kind::StaticEnum;
    else if (c.eat_ident("computed")) set.kind = ObjectSet::Kind::ComputedView;
    else return fail(errors, c.cur(), "expected set kind (entity/relationship/static/computed)");

    while (!c.at_end()) {
      if (c.eat_ident("card")) {
        if (c.cur().kind != Token::Kind::Int) return fail(errors, c.cur(), "expected cardinality exponent");
        set.card_exponent = static_cast<int>(c.cur().int_value);
        c.advance();
      } else if (c.eat_ident("subset-of")) {
        for (;;) {
          if (c.cur().kind != Token::Kind::Ident) return fail(errors, c.cur(), "expected superset name");
          set.supersets.push_back(c.cur().text);
          c.advance();
          if (!c.eat_punct(",")) break;
        }
      } else if (c.eat_ident("view")) {
        if (c.cur().kind != Token::Kind::Str) return fail(errors, c.cur(), "expected view body string");
        set.view_body = c.cur().text;
        c.advance();
      } else if (c.cur().is_punct("{")) {
        c.advance();
        for (;;) {
          if (c.cur().kind != Token::Kind::CharLit)
            return fail(errors, c.cur(), "expected quoted member literal");
          set.members.push_back(c.cur().text);
          c.advance();
          if (!c.eat_punct(",")) break;
        }
        if (!c.eat_punct("}")) return fail(errors, c.cur(), "expected '}'");
      } else {
        return fail(errors, c.cur(), "unexpected token in set declaration");
      }
    }

    if (s.find_set(set.name) >= 0)
      return fail(errors, st[1], "duplicate set '" + set.name + "'");
    if (set.kind == ObjectSet::Kind::StaticEnum && set.card_exponent != 0)
      return fail(errors, st[0], "static set may not declare card");
    if (set.is_subset() && set.card_exponent != 0)
      return fail(errors, st[0], "subset set inherits its identifier; card not allowed");

    int si = static_cast<int>(s.sets.size());
    s.sets.push_back(set);
    if (set.kind == ObjectSet::Kind::Entity || set.kind == ObjectSet::Kind::Relationship) {
      Mapping x;
      x.name = "x";
      x.domain = si;
      x.kind = Mapping::Kind::ObjectIdentifier;
      x.total = true;
      x.codomain_type = ValueType::autonumber(set.card_exponent);
      s.mappings.push_back(x);
    }
  }

  void synthesize_inclusions(MdmScheme &s, std::vector<Diagnostic> &errors) {
    // Insert inclusion witnesses right after each subset's identifier so the
    // resulting column order is x, xT..., then declared functions.
    for (std::size_t si = 0; si < s.sets.size(); ++si) {
      const ObjectSet set = s.sets[si];
      if (!set.is_subset()) continue;
      if (set.kind == ObjectSet::Kind::StaticEnum ||
          set.kind == ObjectSet::Kind::ComputedView)
        continue;
      int insert_at = s.object_identifier_of(static_cast<int>(si)) + 1;
      for (const auto &sup : set.supersets) {
        int ti = s.find_set(sup);
        if (ti < 0) {
          errors.push_back({Severity::Error,
                            "unknown superset '" + sup + "' of " + set.name, {}});
          continue;
        }
        Mapping inc;
        inc.name = "x" + sup;
        inc.domain = static_cast<int>(si);
        inc.codomain_set = ti;
        inc.kind = Mapping::Kind::CanonicalInclusion;
        inc.total = false;  // totality of the witness column is synthesized in expansion
        s.mappings.insert(s.mappings.begin() + insert_at, inc);
        ++insert_at;
      }
    }
  }

  void parse_fun(const std::vector<Token> &st, MdmScheme &s,
                 std::vector<Diagnostic> &errors) {
    Cursor c{st};
    c.advance();  // 'fun'
    if (c.cur().kind != Token::Kind::Ident) return fail(errors, c.cur(), "expected function name");
    Mapping m;
    m.name = c.cur().text;
    c.advance();
    if (!c.eat_punct(":")) return fail(errors, c.cur(), "expected ':'");
    if (c.cur().kind != Token::Kind::Ident) return fail(errors, c.cur(), "expected domain set");
    std::string dom = c.cur().text;
    c.advance();
    m.domain = s.find_set(dom);
    if (m.domain < 0) return fail(errors, st[0], "unknown set '" + dom + "'");
    if (!c.eat_punct("->")) return fail(errors, c.cur(), "expected '->'");

    // codomain
    bool is_value_type = false;
    if (c.cur().is_ident("ascii") || c.cur().is_ident("nat") || c.cur().is_ident("int") ||
        c.cur().is_punct("{")) {
      is_value_type = true;
      if (!parse_value_type(c, m.codomain_type, errors)) return;
    } else if (c.cur().kind == Token::Kind::Ident) {
      std::string cod = c.cur().text;
      const Token &ct = c.cur();
      c.advance();
      m.codomain_set = s.find_set(cod);
      if (m.codomain_set < 0) return fail(errors, ct, "unknown set '" + cod + "'");
    } else {
      return fail(errors, c.cur(), "expected codomain");
    }

    std::string computed_src;
    bool has_computed = false;
    while (!c.at_end()) {
      if (c.eat_ident("total")) m.total = true;
      else if (c.eat_ident("computed")) {
        if (c.cur().kind != Token::Kind::Str)
          return fail(errors, c.cur(), "expected computed expression string");
        computed_src = c.cur().text;
        has_computed = true;
        c.advance();
      } else {
        return fail(errors, c.cur(), "unexpected token in function declaration");
      }
    }

    if (is_value_type) {
      m.kind = has_computed ? Mapping::Kind::ComputedAttribute : Mapping::Kind::Attribute;
    } else {
      if (has_computed) return fail(errors, st[0], "only attributes may be computed");
      bool rel = s.sets[m.domain].kind == ObjectSet::Kind::Relationship;
      m.kind = rel ? Mapping::Kind::CanonicalProjection : Mapping::Kind::Structural;
      if (rel) m.total = true;  // roles are always total
    }

    if (s.find_mapping(m.name, m.domain) >= 0)
      return fail(errors, st[1],
                  "duplicate function '" + m.name + "' on " + s.sets[m.domain].name);
    s.mappings.push_back(m);
    if (has_computed)
      pending_exprs_[static_cast<int>(s.mappings.size()) - 1] = computed_src;
  }

  bool parse_bound(Cursor &c, Bound &b, std::vector<Diagnostic> &errors) {
    bool neg = c.eat_punct("-");
    if (c.cur().kind == Token::Kind::Int) {
      b = Bound::fixed(neg ? -c.cur().int_value : c.cur().int_value);
      c.advance();
      return true;
    }
    if (!neg && c.eat_ident("currentYear")) {
      if (!c.eat_punct("(") || !c.eat_punct(")")) {
        fail(errors, c.cur(), "expected 'currentYear()'");
        return false;
      }
      b = Bound::current_year();
      return true;
    }
    fail(errors, c.cur(), "expected integer bound or currentYear()");
    return false;
  }

  bool parse_value_type(Cursor &c, ValueType &vt, std::vector<Diagnostic> &errors) {
    if (c.cur().is_ident("ascii") || c.cur().is_ident("nat")) {
      bool is_ascii = c.cur().is_ident("ascii");
      c.advance();
      if (!c.eat_punct("(")) { fail(errors, c.cur(), "expected '('"); return false; }
      if (c.cur().kind != Token::Kind::Int) { fail(errors, c.cur(), "expected size"); return false; }
      int n = static_cast<int>(c.cur().int_value);
      c.advance();
      if (!c.eat_punct(")")) { fail(errors, c.cur(), "expected ')'"); return false; }
      vt = is_ascii ? ValueType::text(n) : ValueType::natural(n);
      return true;
    }
    if (c.eat_ident("int")) {
      if (!c.eat_punct("[")) { fail(errors, c.cur(), "expected '['"); return false; }
      Bound lo, hi;
      if (!parse_bound(c, lo, errors)) return false;
      if (!c.eat_punct(",")) { fail(errors, c.cur(), "expected ','"); return false; }
      if (!parse_bound(c, hi, errors)) return false;
      if (!c.eat_punct("]")) { fail(errors, c.cur(), "expected ']'"); return false; }
      vt = ValueType::integer_range(lo, hi);
      return true;
    }
    if (c.eat_punct("{")) {
      std::vector<std::string> lits;
      for (;;) {
        if (c.cur().kind != Token::Kind::CharLit) {
          fail(errors, c.cur(), "expected quoted literal");
          return false;
        }
        lits.push_back(c.cur().text);
        c.advance();
        if (!c.eat_punct(",")) break;
      }
      if (!c.eat_punct("}")) { fail(errors, c.cur(), "expected '}'"); return false; }
      vt = ValueType::enum_literals(std::move(lits));
      return true;
    }
    fail(errors, c.cur(), "expected value type");
    return false;
  }

  /// f or SET.f; when `domain` >= 0 the function must live on that set.
  int resolve_mapping(Cursor &c, const MdmScheme &s, int domain,
                      std::vector<Diagnostic> &errors) {
    if (c.cur().kind != Token::Kind::Ident) {
      fail(errors, c.cur(), "expected function name");
      return -1;
    }
    std::string first = c.cur().text;
    const Token &tok = c.cur();
    c.advance();
    if (c.cur().is_punct(".") && domain < 0) {
      // qualified SET.f
      int si = s.find_set(first);
      if (si < 0) { fail(errors, tok, "unknown set '" + first + "'"); return -1; }
      c.advance();
      if (c.cur().kind != Token::Kind::Ident) {
        fail(errors, c.cur(), "expected function name");
        return -1;
      }
      std::string fname = c.cur().text;
      c.advance();
      int mi = s.find_mapping(fname, si);
      if (mi < 0) fail(errors, tok, "no function '" + fname + "' on " + first);
      return mi;
    }
    int mi = s.find_mapping(first, domain);
    if (mi == -2) fail(errors, tok, "ambiguous function '" + first + "'; qualify with SET.f");
    else if (mi < 0) fail(errors, tok, "unknown function '" + first + "'");
    return mi;
  }

  void parse_key(const std::vector<Token> &st, MdmScheme &s,
                 std::vector<Diagnostic> &errors) {
    Cursor c{st};
    c.advance();  // 'key'
    if (c.cur().kind != Token::Kind::Ident) return fail(errors, c.cur(), "expected set name");
    std::string set = c.cur().text;
    int si = s.find_set(set);
    if (si < 0) return fail(errors, c.cur(), "unknown set '" + set + "'");
    c.advance();
    if (!c.eat_punct("(")) return fail(errors, c.cur(), "expected '('");
    Constraint k;
    k.kind = Constraint::Kind::Key;
    k.host_set = si;
    std::string label = "key:" + set + "(";
    for (;;) {
      int mi = resolve_mapping(c, s, si, errors);
      if (mi < 0) return;
      if (!k.product.empty()) label += "\xE2\x80\xA2";  // bullet
      label += s.mappings[mi].name;
      k.product.push_back(mi);
      if (!c.eat_punct(".")) break;
    }
    label += ")";
    if (!c.eat_punct(")")) return fail(errors, c.cur(), "expected ')'");
    k.label = label;
    s.constraints.push_back(std::move(k));
  }

  void parse_range(const std::vector<Token> &st, MdmScheme &s,
                   std::vector<Diagnostic> &errors) {
    Cursor c{st};
    c.advance();  // 'range'
    int mi = resolve_mapping(c, s, -1, errors);
    if (mi < 0) return;
    if (!c.eat_punct("[")) return fail(errors, c.cur(), "expected '['");
    Bound lo, hi;
    if (!parse_bound(c, lo, errors)) return;
    if (!c.eat_punct(",")) return fail(errors, c.cur(), "expected ','");
    if (!parse_bound(c, hi, errors)) return;
    if (!c.eat_punct("]")) return fail(errors, c.cur(), "expected ']'");
    Constraint r;
    r.kind = Constraint::Kind::Range;
    r.mapping = mi;
    r.range = ValueType::integer_range(lo, hi);
    r.label = "range:" + s.mapping_display(mi);
    s.constraints.push_back(std::move(r));
  }

  void parse_default(const std::vector<Token> &st, MdmScheme &s,
                     std::vector<Diagnostic> &errors) {
    Cursor c{st};
    c.advance();  // 'default'
    int mi = resolve_mapping(c, s, -1, errors);
    if (mi < 0) return;
    Constraint d;
    d.kind = Constraint::Kind::Default;
    d.mapping = mi;
    if (c.cur().kind == Token::Kind::Int) {
      d.default_literal = std::to_string(c.cur().int_value);
      c.advance();
    } else if (c.cur().kind == Token::Kind::CharLit) {
      d.default_literal = "'" + c.cur().text + "'";
      c.advance();
    } else if (c.cur().is_punct("-")) {
      c.advance();
      if (c.cur().kind != Token::Kind::Int)
        return fail(errors, c.cur(), "expected default literal");
      d.default_literal = "-" + std::to_string(c.cur().int_value);
      c.advance();
    } else {
      return fail(errors, c.cur(), "expected default literal");
    }
    d.label = "default:" + s.mapping_display(mi);
    s.constraints.push_back(std::move(d));
  }

  void parse_constraint(const std::vector<Token> &st, MdmScheme &s,
                        std::vector<Diagnostic> &errors) {
    Cursor c{st};
    c.advance();  // 'constraint'
    if (c.cur().kind != Token::Kind::Ident) return fail(errors, c.cur(), "expected label");
    Constraint k;
    k.label = c.cur().text;
    c.advance();

    auto take_description = [&]() {
      if (c.cur().kind == Token::Kind::Str) {
        k.description = c.cur().text;
        c.advance();
        return true;
      }
      fail(errors, c.cur(), "expected description string");
      return false;
    };

    if (c.eat_ident("tuple")) {
      if (c.cur().kind != Token::Kind::Ident) return fail(errors, c.cur(), "expected host set");
      int si = s.find_set(c.cur().text);
      if (si < 0) return fail(errors, c.cur(), "unknown set '" + c.cur().text + "'");
      c.advance();
      if (c.cur().kind != Token::Kind::Str) return fail(errors, c.cur(), "expected formula body");
      std::string body = c.cur().text;
      c.advance();
      if (!take_description()) return;
      k.kind = Constraint::Kind::Tuple;
      k.host_set = si;
      auto fr = parse_formula(s, "forall x in " + s.sets[si].name + ": " + body, file_);
      errors.insert(errors.end(), fr.errors.begin(), fr.errors.end());
      if (!fr.formula) return;
      k.formula = fr.formula;
    } else if (c.eat_ident("null-reflexive")) {
      // OUTER o INNER
      if (c.cur().kind != Token::Kind::Ident) return fail(errors, c.cur(), "expected function name");
      std::string outer_name = c.cur().text;
      const Token &outer_tok = c.cur();
      c.advance();
      if (!c.eat_ident("o")) return fail(errors, c.cur(), "expected 'o' between functions");
      int inner = resolve_mapping(c, s, -1, errors);
      if (inner < 0) return;
      if (!s.mappings[inner].has_set_codomain())
        return fail(errors, outer_tok, k.label + ": inner function must target a set");
      int outer = s.find_mapping(outer_name, s.mappings[inner].codomain_set);
      if (outer < 0)
        return fail(errors, outer_tok,
                    "no function '" + outer_name + "' on " +
                        s.sets[s.mappings[inner].codomain_set].name);
      if (!take_description()) return;
      k.kind = Constraint::Kind::NullReflexive;
      k.inner = inner;
      k.outer = outer;
    } else if (c.eat_ident("acyclic")) {
      int mi = resolve_mapping(c, s, -1, errors);
      if (mi < 0) return;
      if (!take_description()) return;
      k.kind = Constraint::Kind::Acyclic;
      k.mapping = mi;
    } else if (c.eat_ident("existence")) {
      int fi = resolve_mapping(c, s, -1, errors);
      if (fi < 0) return;
      if (!c.eat_punct("->")) return fail(errors, c.cur(), "expected '->'");
      int gi = resolve_mapping(c, s, s.mappings[fi].domain, errors);
      if (gi < 0) return;
      if (!take_description()) return;
      k.kind = Constraint::Kind::Existence;
      k.if_mapping = fi;
      k.then_mapping = gi;
    } else if (c.eat_ident("no-overlap")) {
      if (c.cur().kind != Token::Kind::Ident) return fail(errors, c.cur(), "expected host set");
      int si = s.find_set(c.cur().text);
      if (si < 0) return fail(errors, c.cur(), "unknown set '" + c.cur().text + "'");
      c.advance();
      if (!c.eat_ident("distinct")) return fail(errors, c.cur(), "expected 'distinct'");
      int di = resolve_mapping(c, s, si, errors);
      if (di < 0) return;
      std::vector<int> group;
      if (c.eat_ident("group")) {
        for (;;) {
          int gi = resolve_mapping(c, s, si, errors);
          if (gi < 0) return;
          group.push_back(gi);
          if (!c.eat_punct(",")) break;
        }
      }
      if (!c.eat_ident("interval")) return fail(errors, c.cur(), "expected 'interval'");
      int lo = resolve_mapping(c, s, si, errors);
      if (lo < 0) return;
      if (!c.eat_punct(",")) return fail(errors, c.cur(), "expected ','");
      int hi = resolve_mapping(c, s, si, errors);
      if (hi < 0) return;
      if (!take_description()) return;
      k.kind = Constraint::Kind::NoOverlap;
      k.host_set = si;
      k.distinct_on = di;
      k.group = group;
      k.lo = lo;
      k.hi = hi;
    } else if (c.eat_ident("object")) {
      if (c.cur().kind != Token::Kind::Str) return fail(errors, c.cur(), "expected formula string");
      std::string body = c.cur().text;
      c.advance();
      if (!take_description()) return;
      k.kind = Constraint::Kind::ObjectFormula;
      auto fr = parse_formula(s, body, file_);
      errors.insert(errors.end(), fr.errors.begin(), fr.errors.end());
      if (!fr.formula) return;
      k.formula = fr.formula;
      if (k.formula->kind == Formula::Kind::Forall)
        k.host_set = k.formula->set_index;
    } else {
      return fail(errors, c.cur(), "unknown constraint form");
    }

    if (!c.at_end()) return fail(errors, c.cur(), "unexpected trailing tokens");
    s.constraints.push_back(std::move(k));
  }
};

}  // namespace detail

/// Parses a scheme source file. On success the result passes
/// validate_scheme and carries synthesized object identifiers.
inline ParseResult parse_scheme(const std::string &text,
                                const std::string &file = "<input>") {
  detail::SchemeParser p(text, file);
  return p.run();
}

}  // namespace mdmc
