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

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mdmc/diagnostics.hpp"
#include "mdmc/scheme.hpp"

namespace mdmc {

/// What a term denotes while type checking.
struct TermType {
  enum class Kind { Int, Str, Set, Invalid };
  Kind kind = Kind::Invalid;
  int set_index = -1;

  static TermType integer() { return {Kind::Int, -1}; }
  static TermType text() { return {Kind::Str, -1}; }
  static TermType object(int si) { return {Kind::Set, si}; }
  static TermType invalid() { return {Kind::Invalid, -1}; }

  bool same_category(const TermType &o) const {
    return kind == o.kind && (kind != Kind::Set || set_index == o.set_index);
  }
};

inline TermType value_type_category(const ValueType &vt) {
  switch (vt.kind) {
    case ValueType::Kind::Text:
    case ValueType::Kind::EnumLiterals:
      return TermType::text();
    default:
      return TermType::integer();
  }
}

/// Resolves Apply nodes and reports the term's type. `env` binds quantified
/// variable names to set indices. Errors are appended to `out`.
inline TermType typecheck_term(const MdmScheme &scheme, const TermPtr &t,
                               const std::map<std::string, int> &env,
                               std::vector<Diagnostic> &out,
                               const SourceSpan &span = {}) {
  auto err = [&](const std::string &msg) {
    out.push_back({Severity::Error, msg, span});
    return TermType::invalid();
  };
  if (!t) return err("missing term");
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = env.find(t->name);
      if (it == env.end()) return err("unbound variable '" + t->name + "'");
      return TermType::object(it->second);
    }
    case Term::Kind::IntLit: return TermType::integer();
    case Term::Kind::StrLit: return TermType::text();
    case Term::Kind::CurrentYear: return TermType::integer();
    case Term::Kind::Apply: {
      TermType arg = typecheck_term(scheme, t->lhs, env, out, span);
      if (arg.kind == TermType::Kind::Invalid) return arg;
      if (arg.kind != TermType::Kind::Set)
        return err("'" + t->name + "' applied to a non-object term");
      int mi = t->mapping;
      if (mi < 0) mi = scheme.find_mapping(t->name, arg.set_index);
      if (mi < 0)
        return err("no function '" + t->name + "' on " + scheme.sets[arg.set_index].name);
      const Mapping &m = scheme.mappings[mi];
      if (m.domain != arg.set_index)
        return err("'" + t->name + "' expects " + scheme.sets[m.domain].name +
                   " but was applied to " + scheme.sets[arg.set_index].name);
      if (m.kind == Mapping::Kind::ObjectIdentifier)
        return err("object identifier x may not be applied as a function");
      if (m.has_set_codomain()) return TermType::object(m.codomain_set);
      return value_type_category(m.codomain_type);
    }
    case Term::Kind::Add:
    case Term::Kind::Sub: {
      TermType a = typecheck_term(scheme, t->lhs, env, out, span);
      TermType b = typecheck_term(scheme, t->rhs, env, out, span);
      if (a.kind == TermType::Kind::Invalid || b.kind == TermType::Kind::Invalid)
        return TermType::invalid();
      if (a.kind != TermType::Kind::Int || b.kind != TermType::Kind::Int)
        return err("arithmetic requires integer operands");
      return TermType::integer();
    }
    case Term::Kind::Coalesce: {
      TermType a = typecheck_term(scheme, t->lhs, env, out, span);
      TermType b = typecheck_term(scheme, t->rhs, env, out, span);
      if (a.kind == TermType::Kind::Invalid || b.kind == TermType::Kind::Invalid)
        return TermType::invalid();
      if (!a.same_category(b)) return err("isNull(a, b) requires same-typed arguments");
      return a;
    }
  }
  return TermType::invalid();
}

/// Type checks a formula; quantified sets must be materializable (no views,
/// no static value sets).
inline void typecheck_formula(const MdmScheme &scheme, const FormulaPtr &f,
                              std::map<std::string, int> env,
                              std::vector<Diagnostic> &out,
                              const SourceSpan &span = {}) {
  auto err = [&](const std::string &msg) { out.push_back({Severity::Error, msg, span}); };
  if (!f) { err("missing formula"); return; }
  switch (f->kind) {
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      int si = f->set_index >= 0 ? f->set_index : scheme.find_set(f->set_name);
      if (si < 0) { err("unknown set '" + f->set_name + "'"); return; }
      const ObjectSet &s = scheme.sets[si];
      if (s.kind == ObjectSet::Kind::ComputedView || s.kind == ObjectSet::Kind::StaticEnum) {
        err("cannot quantify over " + s.name);
        return;
      }
      for (const auto &v : f->vars) env[v] = si;
      typecheck_formula(scheme, f->body, env, out, span);
      return;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      typecheck_formula(scheme, f->left, env, out, span);
      typecheck_formula(scheme, f->right, env, out, span);
      return;
    case Formula::Kind::Not:
      typecheck_formula(scheme, f->body, env, out, span);
      return;
    case Formula::Kind::IsNull:
      typecheck_term(scheme, f->tl, env, out, span);
      return;
    case Formula::Kind::Compare: {
      TermType a = typecheck_term(scheme, f->tl, env, out, span);
      TermType b = typecheck_term(scheme, f->tr, env, out, span);
      if (a.kind == TermType::Kind::Invalid || b.kind == TermType::Kind::Invalid) return;
      if (!a.same_category(b)) {
        err("comparison of incompatible operands");
        return;
      }
      bool ordering = f->op != CompareOp::Eq && f->op != CompareOp::Ne;
      if (ordering && a.kind != TermType::Kind::Int)
        err("ordering comparison requires integer operands");
      return;
    }
  }
}

inline void collect_term_mappings(const TermPtr &t, std::vector<int> &out) {
  if (!t) return;
  if (t->kind == Term::Kind::Apply && t->mapping >= 0) out.push_back(t->mapping);
  collect_term_mappings(t->lhs, out);
  collect_term_mappings(t->rhs, out);
}

inline void collect_formula_mappings(const FormulaPtr &f, std::vector<int> &out) {
  if (!f) return;
  collect_term_mappings(f->tl, out);
  collect_term_mappings(f->tr, out);
  collect_formula_mappings(f->left, out);
  collect_formula_mappings(f->right, out);
  collect_formula_mappings(f->body, out);
}

/// All mapping indices a constraint depends on, formulas expanded.
inline std::vector<int> constraint_mappings(const MdmScheme &scheme, const Constraint &c) {
  std::vector<int> out;
  switch (c.kind) {
    case Constraint::Kind::Totality:
    case Constraint::Kind::Range:
    case Constraint::Kind::Default:
    case Constraint::Kind::ForeignKeyRef:
      if (c.mapping >= 0) out.push_back(c.mapping);
      break;
    case Constraint::Kind::Acyclic:
      if (c.mapping >= 0) out.push_back(c.mapping);
      break;
    case Constraint::Kind::Key:
      out = c.product;
      break;
    case Constraint::Kind::NullReflexive:
      out = {c.inner, c.outer};
      break;
    case Constraint::Kind::Existence:
      out = {c.if_mapping, c.then_mapping};
      break;
    case Constraint::Kind::NoOverlap:
      out = c.group;
      out.push_back(c.distinct_on);
      out.push_back(c.lo);
      if (c.hi >= 0) out.push_back(c.hi);
      break;
    case Constraint::Kind::Tuple:
    case Constraint::Kind::ObjectFormula:
      collect_formula_mappings(c.formula, out);
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  (void)scheme;
  return out;
}

/// Sets a constraint quantifies over (for formulas) plus hosts of every
/// mapping it touches.
inline std::vector<int> constraint_sets(const MdmScheme &scheme, const Constraint &c) {
  std::vector<int> out;
  auto add = [&](int si) { if (si >= 0) out.push_back(si); };
  std::function<void(const FormulaPtr &)> walk_quant = [&](const FormulaPtr &f) {
    if (!f) return;
    if (f->kind == Formula::Kind::Forall || f->kind == Formula::Kind::Exists)
      add(f->set_index >= 0 ? f->set_index : scheme.find_set(f->set_name));
    walk_quant(f->left);
    walk_quant(f->right);
    walk_quant(f->body);
  };
  walk_quant(c.formula);
  add(c.host_set);
  for (int mi : constraint_mappings(scheme, c)) add(scheme.mappings[mi].domain);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Scheme well-formedness. Empty result means every structural invariant
/// holds; diagnostics never throw.
inline std::vector<Diagnostic> validate_scheme(const MdmScheme &scheme) {
  std::vector<Diagnostic> out;
  auto by_set = mappings_by_set(scheme);
  auto err = [&](const std::string &msg, const SourceSpan &sp = {}) {
    out.push_back({Severity::Error, msg, sp});
  };

  // unique names
  {
    std::set<std::string> seen;
    for (const auto &s : scheme.sets)
      if (!seen.insert(s.name).second) err("duplicate set '" + s.name + "'");
    std::set<std::pair<int, std::string>> fseen;
    for (const auto &m : scheme.mappings)
      if (!fseen.insert({m.domain, m.name}).second)
        err("duplicate function '" + m.name + "' on " + scheme.sets[m.domain].name);
    std::set<std::string> cseen;
    for (const auto &c : scheme.constraints)
      if (!c.label.empty() && !cseen.insert(c.label).second)
        err("duplicate constraint label '" + c.label + "'");
  }

  // sets
  for (std::size_t si = 0; si < scheme.sets.size(); ++si) {
    const ObjectSet &s = scheme.sets[si];
    for (const auto &sup : s.supersets)
      if (scheme.find_set(sup) < 0) err("unknown superset '" + sup + "' of " + s.name);
    if (s.kind == ObjectSet::Kind::StaticEnum) {
      if (s.members.empty()) err("static set " + s.name + " has no members");
      std::set<std::string> ms(s.members.begin(), s.members.end());
      if (ms.size() != s.members.size()) err("static set " + s.name + " repeats a member");
      if (!by_set[si].empty())
        err("static set " + s.name + " may not carry functions");
      if (s.is_subset()) err("static set " + s.name + " may not be a subset");
    } else if (s.kind == ObjectSet::Kind::ComputedView) {
      if (!by_set[si].empty())
        err("computed set " + s.name + " may not carry functions");
      if (s.view_body.empty()) err("computed set " + s.name + " has no view body");
    } else {
      if (!s.is_subset() && s.card_exponent < 1)
        err("set " + s.name + " needs a cardinality exponent of at least 1");
      if (object_identifier_in(scheme, by_set[si]) < 0)
        err("set " + s.name + " lacks its object identifier");
    }
  }

  // superset graph acyclic (DFS over the inclusion edges)
  {
    enum { White, Grey, Black };
    std::vector<int> color(scheme.sets.size(), White);
    std::function<bool(int)> dfs = [&](int si) {
      color[si] = Grey;
      for (const auto &sup : scheme.sets[si].supersets) {
        int ti = scheme.find_set(sup);
        if (ti < 0) continue;
        if (color[ti] == Grey) return false;
        if (color[ti] == White && !dfs(ti)) return false;
      }
      color[si] = Black;
      return true;
    };
    for (std::size_t si = 0; si < scheme.sets.size(); ++si)
      if (color[si] == White && !dfs(static_cast<int>(si))) {
        err("superset cycle involving " + scheme.sets[si].name);
        break;
      }
  }

  // mappings
  for (std::size_t mi = 0; mi < scheme.mappings.size(); ++mi) {
    const Mapping &m = scheme.mappings[mi];
    if (m.domain < 0 || m.domain >= static_cast<int>(scheme.sets.size())) {
      err("function '" + m.name + "' has no domain");
      continue;
    }
    const ObjectSet &dom = scheme.sets[m.domain];
    switch (m.kind) {
      case Mapping::Kind::ObjectIdentifier:
        if (m.name != "x") err("object identifier of " + dom.name + " must be named x");
        break;
      case Mapping::Kind::CanonicalProjection:
        if (dom.kind != ObjectSet::Kind::Relationship)
          err("projection '" + m.name + "' on non-relationship set " + dom.name);
        if (!m.total) err("projection '" + m.name + "' must be total");
        [[fallthrough]];
      case Mapping::Kind::Structural:
      case Mapping::Kind::CanonicalInclusion: {
        if (!m.has_set_codomain()) {
          err("function '" + m.name + "' needs an object set codomain");
          break;
        }
        const ObjectSet &cod = scheme.sets[m.codomain_set];
        if (cod.kind == ObjectSet::Kind::ComputedView)
          err("function '" + m.name + "' may not target computed set " + cod.name);
        break;
      }
      case Mapping::Kind::Attribute:
      case Mapping::Kind::ComputedAttribute: {
        if (m.has_set_codomain()) {
          err("attribute '" + m.name + "' needs a value type codomain");
          break;
        }
        const ValueType &vt = m.codomain_type;
        if (vt.kind == ValueType::Kind::IntegerRange && !vt.lo.is_current_year &&
            !vt.hi.is_current_year && vt.lo.value > vt.hi.value)
          err("empty range on attribute '" + m.name + "'");
        if (vt.kind == ValueType::Kind::EnumLiterals) {
          if (vt.literals.empty()) err("empty literal set on attribute '" + m.name + "'");
          std::set<std::string> ls(vt.literals.begin(), vt.literals.end());
          if (ls.size() != vt.literals.size())
            err("repeated literal on attribute '" + m.name + "'");
        }
        if (m.kind == Mapping::Kind::ComputedAttribute) {
          if (!m.compute_expr) {
            err("computed attribute '" + m.name + "' has no expression");
            break;
          }
          std::vector<int> used;
          collect_term_mappings(m.compute_expr, used);
          for (int u : used)
            if (scheme.mappings[u].kind == Mapping::Kind::ComputedAttribute)
              err("computed attribute '" + m.name + "' may not use another computed attribute");
          std::map<std::string, int> env{{"x", m.domain}};
          TermType tt = typecheck_term(scheme, m.compute_expr, env, out);
          if (tt.kind != TermType::Kind::Invalid &&
              !tt.same_category(value_type_category(m.codomain_type)))
            err("computed attribute '" + m.name + "' expression does not match its type");
        }
        break;
      }
    }
  }

  // relationship sets need at least two roles
  for (std::size_t si = 0; si < scheme.sets.size(); ++si) {
    const ObjectSet &s = scheme.sets[si];
    if (s.kind != ObjectSet::Kind::Relationship) continue;
    int roles = 0;
    for (int mi : by_set[si])
      if (scheme.mappings[mi].kind == Mapping::Kind::CanonicalProjection) ++roles;
    if (roles < 2)
      err("relationship set " + s.name + " needs at least 2 canonical projections");
  }

  // constraints
  for (const Constraint &c : scheme.constraints) {
    auto mapping_ok = [&](int mi) {
      return mi >= 0 && mi < static_cast<int>(scheme.mappings.size());
    };
    switch (c.kind) {
      case Constraint::Kind::Totality:
      case Constraint::Kind::Default:
        if (!mapping_ok(c.mapping)) err(c.label + ": unknown function");
        break;
      case Constraint::Kind::Range:
        if (!mapping_ok(c.mapping))
          err(c.label + ": unknown function");
        else if (!scheme.mappings[c.mapping].is_attribute_like())
          err(c.label + ": range applies to attributes only");
        break;
      case Constraint::Kind::ForeignKeyRef:
        if (!mapping_ok(c.mapping)) err(c.label + ": unknown function");
        break;
      case Constraint::Kind::Key: {
        if (c.product.empty()) { err(c.label + ": empty key"); break; }
        int host = -1;
        for (int mi : c.product) {
          if (!mapping_ok(mi)) { host = -2; break; }
          if (host == -1) host = scheme.mappings[mi].domain;
          else if (host != scheme.mappings[mi].domain) host = -2;
        }
        if (host == -2) err(c.label + ": key functions must share one set");
        break;
      }
      case Constraint::Kind::Tuple: {
        if (c.host_set < 0) { err(c.label + ": unknown host set"); break; }
        if (!c.formula || c.formula->kind != Formula::Kind::Forall ||
            c.formula->vars.size() != 1) {
          err(c.label + ": tuple constraint needs one universally quantified variable");
          break;
        }
        typecheck_formula(scheme, c.formula, {}, out);
        break;
      }
      case Constraint::Kind::NullReflexive: {
        if (!mapping_ok(c.inner) || !mapping_ok(c.outer)) {
          err(c.label + ": unknown function");
          break;
        }
        const Mapping &in = scheme.mappings[c.inner], &ou = scheme.mappings[c.outer];
        if (!in.has_set_codomain() || !ou.has_set_codomain() ||
            in.codomain_set != ou.domain || ou.codomain_set != in.domain)
          err(c.label + ": composition must map the inner domain to itself");
        break;
      }
      case Constraint::Kind::Acyclic: {
        if (!mapping_ok(c.mapping)) { err(c.label + ": unknown function"); break; }
        const Mapping &m = scheme.mappings[c.mapping];
        if (!m.has_set_codomain() || m.codomain_set != m.domain)
          err(c.label + ": acyclicity needs a self-mapping");
        break;
      }
      case Constraint::Kind::Existence: {
        if (!mapping_ok(c.if_mapping) || !mapping_ok(c.then_mapping)) {
          err(c.label + ": unknown function");
          break;
        }
        if (scheme.mappings[c.if_mapping].domain != scheme.mappings[c.then_mapping].domain)
          err(c.label + ": existence functions must share a domain");
        break;
      }
      case Constraint::Kind::NoOverlap: {
        std::vector<int> all = c.group;
        all.push_back(c.distinct_on);
        all.push_back(c.lo);
        if (c.hi >= 0) all.push_back(c.hi);
        int host = c.host_set;
        bool ok = true;
        for (int mi : all) {
          if (!mapping_ok(mi)) { ok = false; break; }
          if (scheme.mappings[mi].domain != host) ok = false;
        }
        if (!ok) { err(c.label + ": no-overlap functions must live on the host set"); break; }
        if (!scheme.mappings[c.lo].total)
          err(c.label + ": interval start must be total");
        break;
      }
      case Constraint::Kind::ObjectFormula:
        if (!c.formula) { err(c.label + ": missing formula"); break; }
        typecheck_formula(scheme, c.formula, {}, out);
        break;
    }
  }

  return out;
}

}  // namespace mdmc
