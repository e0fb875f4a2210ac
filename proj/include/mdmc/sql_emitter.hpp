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
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdmc/relational.hpp"

namespace mdmc {

/// What a target engine can enforce declaratively. Constraints the profile
/// cannot carry are demoted to the enforcement plan instead of being
/// silently dropped.
struct DialectProfile {
  std::string name;
  bool nulls_distinct_unique = true;    // unique keys tolerate repeated nulls
  bool dynamic_check_expr = true;       // checks may call current-date functions
  bool persisted_nondeterministic_computed = true;
  bool conditional_check_expr = true;   // checks may contain implications

  static DialectProfile ansi() {
    return {"ansi", true, true, true, true};
  }
  /// Models the restrictive engine family: single-null unique indexes, no
  /// non-deterministic expressions in persisted columns or checks.
  static DialectProfile strict() {
    return {"strict", false, false, false, false};
  }
  static DialectProfile by_name(const std::string &n) {
    if (n == "ansi") return ansi();
    if (n == "strict") return strict();
    throw std::invalid_argument("unknown dialect profile '" + n + "'");
  }
};

struct Demotion {
  enum class Kind { UniqueKeyNullable, DynamicRangeCheck, NondeterministicComputed,
                    ConditionalCheck };
  Kind kind;
  std::string table;
  std::vector<std::string> columns;
  std::string description;
  std::string reason;
  std::string target_strategy;  // handed to the enforcement planner
};

struct EmitResult {
  std::string sql;
  std::vector<Demotion> demotions;
};

namespace detail {

inline bool needs_bigint(std::int64_t hi) { return hi > 2147483647LL; }

inline std::string sql_base_type(const ValueType &t) {
  switch (t.kind) {
    case ValueType::Kind::Text:
      return "VARCHAR(" + std::to_string(t.max_len) + ")";
    case ValueType::Kind::EnumLiterals: {
      std::size_t len = 1;
      for (const auto &l : t.literals) len = std::max(len, l.size());
      return "VARCHAR(" + std::to_string(len) + ")";
    }
    case ValueType::Kind::Natural:
      return needs_bigint(pow10_i64(t.max_digits) - 1) ? "BIGINT" : "INTEGER";
    case ValueType::Kind::Autonumber:
      return needs_bigint(t.autonumber_max()) ? "BIGINT" : "INTEGER";
    case ValueType::Kind::IntegerRange: {
      std::int64_t m = std::max(std::llabs(t.lo.value), std::llabs(t.hi.value));
      return needs_bigint(m) ? "BIGINT" : "INTEGER";
    }
  }
  return "INTEGER";
}

inline std::string sql_current_year() { return "EXTRACT(YEAR FROM CURRENT_DATE)"; }

inline std::string sql_bound(const Bound &b) {
  return b.is_current_year ? sql_current_year() : std::to_string(b.value);
}

inline std::string sql_term(const TermPtr &t) {
  if (!t) return "NULL";
  switch (t->kind) {
    case Term::Kind::Var: return "?";  // row variable never surfaces in DDL
    case Term::Kind::Apply: return t->name;
    case Term::Kind::IntLit: return std::to_string(t->int_value);
    case Term::Kind::StrLit: return "'" + t->str_value + "'";
    case Term::Kind::Add: return sql_term(t->lhs) + " + " + sql_term(t->rhs);
    case Term::Kind::Sub: {
      bool paren = t->rhs && (t->rhs->kind == Term::Kind::Add ||
                              t->rhs->kind == Term::Kind::Sub);
      return sql_term(t->lhs) + " - " + (paren ? "(" : "") + sql_term(t->rhs) +
             (paren ? ")" : "");
    }
    case Term::Kind::Coalesce:
      return "COALESCE(" + sql_term(t->lhs) + ", " + sql_term(t->rhs) + ")";
    case Term::Kind::CurrentYear: return sql_current_year();
  }
  return "NULL";
}

inline bool term_uses_current_year(const TermPtr &t) {
  if (!t) return false;
  if (t->kind == Term::Kind::CurrentYear) return true;
  return term_uses_current_year(t->lhs) || term_uses_current_year(t->rhs);
}

struct CheckShape {
  bool uses_current_year = false;
  bool conditional = false;
};

inline void inspect(const FormulaPtr &f, CheckShape &shape) {
  if (!f) return;
  if (f->kind == Formula::Kind::Implies || f->kind == Formula::Kind::Not)
    shape.conditional = true;
  shape.uses_current_year |= term_uses_current_year(f->tl);
  shape.uses_current_year |= term_uses_current_year(f->tr);
  inspect(f->left, shape);
  inspect(f->right, shape);
  inspect(f->body, shape);
}

inline std::string sql_check_expr(const FormulaPtr &f) {
  if (!f) return "TRUE";
  switch (f->kind) {
    case Formula::Kind::And:
      return "(" + sql_check_expr(f->left) + " AND " + sql_check_expr(f->right) + ")";
    case Formula::Kind::Or:
      return "(" + sql_check_expr(f->left) + " OR " + sql_check_expr(f->right) + ")";
    case Formula::Kind::Implies:
      return "(NOT " + sql_check_expr(f->left) + " OR " + sql_check_expr(f->right) + ")";
    case Formula::Kind::Not:
      return "(NOT " + sql_check_expr(f->body) + ")";
    case Formula::Kind::IsNull:
      return sql_term(f->tl) + (f->null_positive ? " IS NULL" : " IS NOT NULL");
    case Formula::Kind::Compare: {
      const char *op = f->op == CompareOp::Eq ? "=" : f->op == CompareOp::Ne ? "<>"
                       : f->op == CompareOp::Lt ? "<" : f->op == CompareOp::Le ? "<="
                       : f->op == CompareOp::Gt ? ">" : ">=";
      return sql_term(f->tl) + " " + op + " " + sql_term(f->tr);
    }
    default:
      return "TRUE";  // quantifiers never reach check rendering
  }
}

inline std::string join(const std::vector<std::string> &parts, const std::string &sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

}  // namespace detail

/// Deterministic DDL: phase 1 creates the tables in translation order with
/// primary keys, not-nulls, column checks, and the foreign keys whose target
/// already exists; phase 2 alters tables to add deferred foreign keys and
/// unique keys; views close the script. Anything the profile cannot express
/// is returned as a demotion instead.
inline EmitResult emit_ddl(const RelationalSchema &schema, const DialectProfile &profile) {
  EmitResult res;
  std::ostringstream sql;
  sql << "-- relational schema, dialect profile: " << profile.name << "\n";

  for (const Table &t : schema.tables) {
    sql << "\nCREATE TABLE " << t.name << " (\n";
    std::vector<std::string> lines;

    for (const Column &c : t.columns) {
      std::ostringstream line;
      line << "  " << c.name << " " << detail::sql_base_type(c.type);
      if (c.name == t.primary_key && t.pk_max.has_value())
        line << " GENERATED BY DEFAULT AS IDENTITY";
      if (c.computed_expr) {
        bool nondet = detail::term_uses_current_year(c.computed_expr);
        if (nondet && !profile.persisted_nondeterministic_computed) {
          res.demotions.push_back({Demotion::Kind::NondeterministicComputed, t.name,
                                   {c.name},
                                   t.name + "." + c.name + " computed column",
                                   "non-deterministic computed expression",
                                   "recompute"});
        } else {
          line << " GENERATED ALWAYS AS (" << detail::sql_term(c.computed_expr) << ")";
        }
      }
      if (!c.default_literal.empty()) line << " DEFAULT " << c.default_literal;
      if (t.not_null.count(c.name) && c.name != t.primary_key) line << " NOT NULL";
      lines.push_back(line.str());
    }

    lines.push_back("  CONSTRAINT pk_" + t.name + " PRIMARY KEY (" + t.primary_key + ")");
    if (t.pk_max.has_value())
      lines.push_back("  CONSTRAINT ck_" + t.name + "_x CHECK (x BETWEEN 1 AND " +
                      std::to_string(*t.pk_max) + ")");

    for (const Column &c : t.columns) {
      if (c.name == t.primary_key) continue;
      std::string check;
      switch (c.type.kind) {
        case ValueType::Kind::Natural:
          check = c.name + " BETWEEN 0 AND " +
                  std::to_string(pow10_i64(c.type.max_digits) - 1);
          break;
        case ValueType::Kind::IntegerRange: {
          if (c.coded_domain) {
            check = c.name + " BETWEEN 1 AND " + std::to_string(c.coded_max);
            break;
          }
          if (c.type.uses_current_year() && !profile.dynamic_check_expr) {
            res.demotions.push_back({Demotion::Kind::DynamicRangeCheck, t.name,
                                     {c.name},
                                     t.name + "." + c.name + " range check",
                                     "check calls currentYear()", "reject-check"});
            break;
          }
          check = c.name + " >= " + detail::sql_bound(c.type.lo) + " AND " + c.name +
                  " <= " + detail::sql_bound(c.type.hi);
          break;
        }
        case ValueType::Kind::EnumLiterals: {
          std::vector<std::string> quoted;
          for (const auto &l : c.type.literals) quoted.push_back("'" + l + "'");
          check = c.name + " IN (" + detail::join(quoted, ", ") + ")";
          break;
        }
        case ValueType::Kind::Autonumber:
        case ValueType::Kind::Text:
          break;  // bounds live in the reference / the type
      }
      if (!check.empty())
        lines.push_back("  CONSTRAINT ck_" + t.name + "_" + c.name + " CHECK (" +
                        check + ")");
      for (std::size_t ri = 0; ri < c.restrictions.size(); ++ri) {
        const ValueType &vt = c.restrictions[ri];
        if (vt.uses_current_year() && !profile.dynamic_check_expr) {
          res.demotions.push_back({Demotion::Kind::DynamicRangeCheck, t.name,
                                   {c.name},
                                   t.name + "." + c.name + " declared range",
                                   "check calls currentYear()", "reject-check"});
          continue;
        }
        lines.push_back("  CONSTRAINT ck_" + t.name + "_" + c.name + "_r" +
                        std::to_string(ri) + " CHECK (" + c.name + " >= " +
                        detail::sql_bound(vt.lo) + " AND " + c.name + " <= " +
                        detail::sql_bound(vt.hi) + ")");
      }
    }

    for (const CheckConstraint &ck : t.checks) {
      detail::CheckShape shape;
      detail::inspect(ck.body->body, shape);
      if (shape.uses_current_year && !profile.dynamic_check_expr) {
        res.demotions.push_back({Demotion::Kind::DynamicRangeCheck, t.name, {},
                                 t.name + " check " + ck.label,
                                 "check calls currentYear()", "reject-check"});
        continue;
      }
      if (shape.conditional && !profile.conditional_check_expr) {
        res.demotions.push_back({Demotion::Kind::ConditionalCheck, t.name, {},
                                 t.name + " check " + ck.label,
                                 "conditional check expression", "reject-check"});
        continue;
      }
      lines.push_back("  CONSTRAINT ck_" + t.name + "_" + ck.label + " CHECK (" +
                      detail::sql_check_expr(ck.body->body) + ")");
    }

    for (const ForeignKey &fk : t.foreign_keys) {
      if (fk.deferred) continue;
      lines.push_back("  CONSTRAINT fk_" + t.name + "_" + fk.column +
                      " FOREIGN KEY (" + fk.column + ") REFERENCES " + fk.ref_table +
                      " (x)");
    }

    sql << detail::join(lines, ",\n") << "\n);\n";
  }

  // phase 2: deferred foreign keys, then unique keys
  bool any_deferred = false;
  for (const Table &t : schema.tables)
    for (const ForeignKey &fk : t.foreign_keys)
      if (fk.deferred) any_deferred = true;
  if (any_deferred) {
    sql << "\n";
    for (const Table &t : schema.tables)
      for (const ForeignKey &fk : t.foreign_keys) {
        if (!fk.deferred) continue;
        sql << "ALTER TABLE " << t.name << " ADD CONSTRAINT fk_" << t.name << "_"
            << fk.column << " FOREIGN KEY (" << fk.column << ") REFERENCES "
            << fk.ref_table << " (x);\n";
      }
  }

  bool any_unique = false;
  for (const Table &t : schema.tables) {
    for (const UniqueKey &uq : t.unique_keys) {
      bool nullable = false;
      for (const auto &col : uq.columns)
        if (!t.not_null.count(col)) nullable = true;
      if (nullable && !profile.nulls_distinct_unique) {
        res.demotions.push_back({Demotion::Kind::UniqueKeyNullable, t.name, uq.columns,
                                 t.name + " unique key (" +
                                     detail::join(uq.columns, ", ") + ")",
                                 "unique key over nullable columns",
                                 "unique-nulls-distinct"});
        continue;
      }
      if (!any_unique) {
        sql << "\n";
        any_unique = true;
      }
      sql << "ALTER TABLE " << t.name << " ADD CONSTRAINT uq_" << t.name << "_"
          << detail::join(uq.columns, "_") << " UNIQUE ("
          << detail::join(uq.columns, ", ") << ");\n";
    }
  }

  if (!schema.views.empty()) {
    sql << "\n";
    for (const auto &[name, body] : schema.views)
      sql << "CREATE VIEW " << name << " AS " << body << ";\n";
  }

  res.sql = sql.str();
  return res;
}

}  // namespace mdmc
