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

#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace mdmc {

struct Term;
struct Formula;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

inline const char *to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "<>";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

/// First-order term. Apply nodes reference a mapping by index into
/// MdmScheme::mappings; `name` keeps the surface spelling for printing.
struct Term {
  enum class Kind { Var, Apply, IntLit, StrLit, Add, Sub, Coalesce, CurrentYear };

  Kind kind = Kind::Var;
  std::string name;            // Var name or Apply mapping name
  int mapping = -1;            // Apply
  std::int64_t int_value = 0;  // IntLit
  std::string str_value;       // StrLit
  TermPtr lhs, rhs;            // Add/Sub/Coalesce; Apply argument in lhs

  static TermPtr var(std::string n) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Var; t->name = std::move(n);
    return t;
  }
  static TermPtr apply(std::string n, int mapping_index, TermPtr arg) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Apply; t->name = std::move(n);
    t->mapping = mapping_index; t->lhs = std::move(arg);
    return t;
  }
  static TermPtr int_lit(std::int64_t v) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::IntLit; t->int_value = v;
    return t;
  }
  static TermPtr str_lit(std::string v) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::StrLit; t->str_value = std::move(v);
    return t;
  }
  static TermPtr binary(Kind k, TermPtr a, TermPtr b) {
    auto t = std::make_shared<Term>();
    t->kind = k; t->lhs = std::move(a); t->rhs = std::move(b);
    return t;
  }
  static TermPtr current_year() {
    auto t = std::make_shared<Term>();
    t->kind = Kind::CurrentYear;
    return t;
  }
};

/// Closed first-order constraint formula over one scheme.
struct Formula {
  enum class Kind { Forall, Exists, And, Or, Not, Implies, Compare, IsNull };

  Kind kind = Kind::Compare;
  std::vector<std::string> vars;  // quantifiers
  std::string set_name;           // quantified object set
  int set_index = -1;
  FormulaPtr left, right, body;
  CompareOp op = CompareOp::Eq;
  TermPtr tl, tr;                 // Compare sides; IsNull subject in tl
  bool null_positive = true;      // IsNull: true = "is null"

  static FormulaPtr quantifier(Kind k, std::vector<std::string> vars, std::string set,
                               int set_index, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = k; f->vars = std::move(vars); f->set_name = std::move(set);
    f->set_index = set_index; f->body = std::move(body);
    return f;
  }
  static FormulaPtr binary(Kind k, FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = k; f->left = std::move(a); f->right = std::move(b);
    return f;
  }
  static FormulaPtr negation(FormulaPtr a) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Not; f->body = std::move(a);
    return f;
  }
  static FormulaPtr compare(CompareOp op, TermPtr a, TermPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Compare; f->op = op; f->tl = std::move(a); f->tr = std::move(b);
    return f;
  }
  static FormulaPtr is_null(TermPtr t, bool positive) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::IsNull; f->tl = std::move(t); f->null_positive = positive;
    return f;
  }
};

// ---- structural equality (spans and mapping indices compare by spelling) ----

inline bool term_equal(const TermPtr &a, const TermPtr &b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var: return a->name == b->name;
    case Term::Kind::Apply: return a->name == b->name && term_equal(a->lhs, b->lhs);
    case Term::Kind::IntLit: return a->int_value == b->int_value;
    case Term::Kind::StrLit: return a->str_value == b->str_value;
    case Term::Kind::CurrentYear: return true;
    default: return term_equal(a->lhs, b->lhs) && term_equal(a->rhs, b->rhs);
  }
}

inline bool formula_equal(const FormulaPtr &a, const FormulaPtr &b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return a->vars == b->vars && a->set_name == b->set_name &&
             formula_equal(a->body, b->body);
    case Formula::Kind::Not:
      return formula_equal(a->body, b->body);
    case Formula::Kind::Compare:
      return a->op == b->op && term_equal(a->tl, b->tl) && term_equal(a->tr, b->tr);
    case Formula::Kind::IsNull:
      return a->null_positive == b->null_positive && term_equal(a->tl, b->tl);
    default:
      return formula_equal(a->left, b->left) && formula_equal(a->right, b->right);
  }
}

// ---- printing (round-trips through the formula parser) ----

inline std::string term_to_string(const TermPtr &t) {
  if (!t) return "?";
  std::ostringstream os;
  switch (t->kind) {
    case Term::Kind::Var: os << t->name; break;
    case Term::Kind::Apply: os << t->name << "(" << term_to_string(t->lhs) << ")"; break;
    case Term::Kind::IntLit: os << t->int_value; break;
    case Term::Kind::StrLit: os << "'" << t->str_value << "'"; break;
    case Term::Kind::Add:
      os << term_to_string(t->lhs) << " + " << term_to_string(t->rhs); break;
    case Term::Kind::Sub: {
      os << term_to_string(t->lhs) << " - ";
      bool paren = t->rhs && (t->rhs->kind == Term::Kind::Add || t->rhs->kind == Term::Kind::Sub);
      os << (paren ? "(" : "") << term_to_string(t->rhs) << (paren ? ")" : "");
      break;
    }
    case Term::Kind::Coalesce:
      os << "isNull(" << term_to_string(t->lhs) << ", " << term_to_string(t->rhs) << ")"; break;
    case Term::Kind::CurrentYear: os << "currentYear()"; break;
  }
  return os.str();
}

namespace detail {
inline int formula_prec(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Implies: return 1;
    case Formula::Kind::Or: return 2;
    case Formula::Kind::And: return 3;
    case Formula::Kind::Not: return 4;
    default: return 5;
  }
}
}  // namespace detail

inline std::string formula_to_string(const FormulaPtr &f) {
  if (!f) return "?";
  auto wrap = [&](const FormulaPtr &child, bool strict) {
    std::string s = formula_to_string(child);
    // A quantifier body extends maximally to the right; parenthesize whenever
    // one appears under a connective so the text reparses to the same tree.
    if (child->kind == Formula::Kind::Forall || child->kind == Formula::Kind::Exists)
      return "(" + s + ")";
    int pc = detail::formula_prec(child->kind), pf = detail::formula_prec(f->kind);
    if (pc < pf || (strict && pc == pf)) return "(" + s + ")";
    return s;
  };
  std::ostringstream os;
  switch (f->kind) {
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      os << (f->kind == Formula::Kind::Forall ? "forall " : "exists ");
      for (std::size_t i = 0; i < f->vars.size(); ++i) os << (i ? ", " : "") << f->vars[i];
      os << " in " << f->set_name << ": " << formula_to_string(f->body);
      break;
    }
    case Formula::Kind::And:
      os << wrap(f->left, false) << " and " << wrap(f->right, true); break;
    case Formula::Kind::Or:
      os << wrap(f->left, false) << " or " << wrap(f->right, true); break;
    case Formula::Kind::Implies:
      // right-associative
      os << wrap(f->left, true) << " implies " << wrap(f->right, false); break;
    case Formula::Kind::Not:
      os << "not " << wrap(f->body, false); break;
    case Formula::Kind::Compare:
      os << term_to_string(f->tl) << " " << to_string(f->op) << " " << term_to_string(f->tr);
      break;
    case Formula::Kind::IsNull:
      os << term_to_string(f->tl) << (f->null_positive ? " is null" : " is not null");
      break;
  }
  // quantifiers always parenthesized when nested, handled by callers via prec 5
  return os.str();
}

}  // namespace mdmc
