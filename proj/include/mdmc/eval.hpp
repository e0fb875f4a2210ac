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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdmc/instance.hpp"
#include "mdmc/translator.hpp"

namespace mdmc {

/// Variable bindings: quantified variable -> (table, x).
struct Binding {
  std::string table;
  std::int64_t x = 0;
};
using Bindings = std::map<std::string, Binding>;

/// Three-valued evaluator over one instance. Function application on a null
/// or dangling argument yields null; comparisons with null yield UNKNOWN;
/// null tests are always two-valued.
class Evaluator {
 public:
  Evaluator(const MdmScheme &scheme, const TranslationResult &tr, const Instance &inst)
      : scheme_(scheme), tr_(tr), inst_(inst) {}

  Value eval_term(const TermPtr &t, const Bindings &env) const {
    if (!t) return {};
    switch (t->kind) {
      case Term::Kind::Var: {
        auto it = env.find(t->name);
        if (it == env.end()) return {};
        return Value{it->second.x};
      }
      case Term::Kind::IntLit: return Value{t->int_value};
      case Term::Kind::StrLit: return Value{t->str_value};
      case Term::Kind::CurrentYear: return Value{static_cast<std::int64_t>(inst_.current_year)};
      case Term::Kind::Apply: {
        Value arg = eval_term(t->lhs, env);
        if (is_null(arg) || !is_int(arg)) return {};
        return mapping_value(t->mapping, as_int(arg));
      }
      case Term::Kind::Add:
      case Term::Kind::Sub: {
        Value a = eval_term(t->lhs, env), b = eval_term(t->rhs, env);
        if (is_null(a) || is_null(b) || !is_int(a) || !is_int(b)) return {};
        return Value{t->kind == Term::Kind::Add ? as_int(a) + as_int(b)
                                                : as_int(a) - as_int(b)};
      }
      case Term::Kind::Coalesce: {
        Value a = eval_term(t->lhs, env);
        if (!is_null(a)) return a;
        return eval_term(t->rhs, env);
      }
    }
    return {};
  }

  Verdict eval_formula(const FormulaPtr &f, Bindings env = {}) const {
    if (!f) return Verdict::Unknown;
    switch (f->kind) {
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        bool universal = f->kind == Formula::Kind::Forall;
        Verdict acc = universal ? Verdict::True : Verdict::False;
        const std::string table = scheme_.sets[f->set_index].name;
        auto rows = inst_.tables.find(table);
        if (rows == inst_.tables.end()) return acc;
        return quantify(f, env, rows->second, 0, universal);
      }
      case Formula::Kind::And:
        return v_and(eval_formula(f->left, env), eval_formula(f->right, env));
      case Formula::Kind::Or:
        return v_or(eval_formula(f->left, env), eval_formula(f->right, env));
      case Formula::Kind::Implies:
        return v_implies(eval_formula(f->left, env), eval_formula(f->right, env));
      case Formula::Kind::Not:
        return v_not(eval_formula(f->body, env));
      case Formula::Kind::IsNull: {
        Value v = eval_term(f->tl, env);
        return (is_null(v) == f->null_positive) ? Verdict::True : Verdict::False;
      }
      case Formula::Kind::Compare: {
        Value a = eval_term(f->tl, env), b = eval_term(f->tr, env);
        if (is_null(a) || is_null(b)) return Verdict::Unknown;
        int c;
        if (is_int(a) && is_int(b))
          c = as_int(a) < as_int(b) ? -1 : as_int(a) > as_int(b) ? 1 : 0;
        else if (is_text(a) && is_text(b))
          c = as_text(a).compare(as_text(b)) < 0   ? -1
              : as_text(a).compare(as_text(b)) > 0 ? 1
                                                   : 0;
        else
          return Verdict::Unknown;
        bool r = false;
        switch (f->op) {
          case CompareOp::Eq: r = c == 0; break;
          case CompareOp::Ne: r = c != 0; break;
          case CompareOp::Lt: r = c < 0; break;
          case CompareOp::Le: r = c <= 0; break;
          case CompareOp::Gt: r = c > 0; break;
          case CompareOp::Ge: r = c >= 0; break;
        }
        return r ? Verdict::True : Verdict::False;
      }
    }
    return Verdict::Unknown;
  }

  /// Stored cell of `mapping` at row x of its host table; dangling rows and
  /// absent cells are null.
  Value mapping_value(int mapping, std::int64_t x) const {
    auto it = tr_.mapping_columns.find(mapping);
    if (it == tr_.mapping_columns.end()) return {};
    const auto &[table, column] = it->second;
    const Instance::Row *row = inst_.find_row(table, x);
    if (!row) return {};
    const Table *t = tr_.schema.find_table(table);
    int ci = t ? t->column_index(column) : -1;
    if (ci < 0 || ci >= static_cast<int>(row->size())) return {};
    return (*row)[ci];
  }

  const Instance &instance() const { return inst_; }

 private:
  const MdmScheme &scheme_;
  const TranslationResult &tr_;
  const Instance &inst_;

  Verdict quantify(const FormulaPtr &f, Bindings env,
                   const std::map<std::int64_t, Instance::Row> &rows, std::size_t vi,
                   bool universal) const {
    if (vi == f->vars.size()) return eval_formula(f->body, env);
    Verdict acc = universal ? Verdict::True : Verdict::False;
    const std::string &table = scheme_.sets[f->set_index].name;
    for (const auto &[x, row] : rows) {
      env[f->vars[vi]] = {table, x};
      Verdict v = quantify(f, env, rows, vi + 1, universal);
      acc = universal ? v_and(acc, v) : v_or(acc, v);
      if (universal && acc == Verdict::False) return acc;
      if (!universal && acc == Verdict::True) return acc;
    }
    return acc;
  }
};

/// Follows a self-mapping chain from start; returns the cycle when the walk
/// revisits a row, null-terminated walks return nothing. Terminates within
/// rows+1 steps.
inline std::optional<std::vector<std::int64_t>> detect_cycle(
    const MdmScheme &scheme, const TranslationResult &tr, const Instance &inst,
    int mapping, std::int64_t start) {
  Evaluator ev(scheme, tr, inst);
  std::vector<std::int64_t> path;
  std::map<std::int64_t, std::size_t> seen;
  std::int64_t cur = start;
  std::size_t limit = 1;
  auto it = inst.tables.find(tr.mapping_columns.at(mapping).first);
  if (it != inst.tables.end()) limit = it->second.size() + 1;
  for (std::size_t step = 0; step <= limit; ++step) {
    auto pos = seen.find(cur);
    if (pos != seen.end()) {
      // cycle = suffix of the path from the first occurrence
      std::vector<std::int64_t> cycle(path.begin() + static_cast<long>(pos->second),
                                      path.end());
      return cycle;
    }
    seen[cur] = path.size();
    path.push_back(cur);
    Value next = ev.mapping_value(mapping, cur);
    if (is_null(next) || !is_int(next)) return std::nullopt;
    cur = as_int(next);
  }
  return std::nullopt;
}

/// The first-order reading of a no-overlap constraint, built once for
/// evaluation and planning:
///   forall x, y in S: x <> y and group-equal and intervals-overlap
///     implies distinct(x) <> distinct(y)
inline FormulaPtr expand_no_overlap(const MdmScheme &scheme, const Constraint &c) {
  auto var = [](const char *n) { return Term::var(n); };
  auto app = [&](int mi, TermPtr a) {
    return Term::apply(scheme.mappings[mi].name, mi, std::move(a));
  };
  auto hi_or_now = [&](TermPtr a) {
    return Term::binary(Term::Kind::Coalesce, app(c.hi, std::move(a)),
                        Term::current_year());
  };

  FormulaPtr guard = Formula::compare(CompareOp::Ne, var("x"), var("y"));
  for (int gi : c.group)
    guard = Formula::binary(Formula::Kind::And, guard,
                            Formula::compare(CompareOp::Eq, app(gi, var("x")),
                                             app(gi, var("y"))));
  FormulaPtr overlap_xy = Formula::binary(
      Formula::Kind::And,
      Formula::compare(CompareOp::Ge, app(c.lo, var("y")), app(c.lo, var("x"))),
      Formula::compare(CompareOp::Le, app(c.lo, var("y")), hi_or_now(var("x"))));
  FormulaPtr overlap_yx = Formula::binary(
      Formula::Kind::And,
      Formula::compare(CompareOp::Ge, app(c.lo, var("x")), app(c.lo, var("y"))),
      Formula::compare(CompareOp::Le, app(c.lo, var("x")), hi_or_now(var("y"))));
  guard = Formula::binary(Formula::Kind::And, guard,
                          Formula::binary(Formula::Kind::Or, overlap_xy, overlap_yx));
  FormulaPtr conclusion = Formula::compare(CompareOp::Ne, app(c.distinct_on, var("x")),
                                           app(c.distinct_on, var("y")));
  FormulaPtr body = Formula::binary(Formula::Kind::Implies, guard, conclusion);
  return Formula::quantifier(Formula::Kind::Forall, {"x", "y"},
                             scheme.sets[c.host_set].name, c.host_set, body);
}

inline void recompute_derived(const MdmScheme &scheme, const TranslationResult &tr,
                              Instance &inst) {
  Evaluator ev(scheme, tr, inst);
  // collect updates first so evaluation sees a consistent snapshot
  std::vector<std::tuple<std::string, std::int64_t, int, Value>> updates;
  for (const Table &t : tr.schema.tables) {
    auto rows = inst.tables.find(t.name);
    if (rows == inst.tables.end()) continue;
    for (std::size_t ci = 0; ci < t.columns.size(); ++ci) {
      const Column &col = t.columns[ci];
      if (!col.computed_expr) continue;
      for (const auto &[x, row] : rows->second) {
        Bindings env{{"x", {t.name, x}}};
        Value v = ev.eval_term(col.computed_expr, env);
        if (!(row[ci] == v))
          updates.emplace_back(t.name, x, static_cast<int>(ci), v);
      }
    }
  }
  for (auto &[table, x, ci, v] : updates) {
    Instance::Row *row = inst.find_row(table, x);
    if (row) (*row)[static_cast<std::size_t>(ci)] = v;
  }
}


/// Loads one CSV per table from `dir`. A missing file yields an empty table;
/// malformed CSV or untypeable cells throw. Dangling references are not
/// checked here: they surface as violations from check_all, never as load
/// failures.
inline Instance load_instance(const MdmScheme &scheme, const TranslationResult &tr,
                              const std::string &dir, int current_year) {
  Instance inst;
  inst.current_year = current_year;
  for (const Table &t : tr.schema.tables) {
    inst.tables[t.name];  // present even when empty
    std::filesystem::path path = std::filesystem::path(dir) / (t.name + ".csv");
    std::ifstream in(path, std::ios::binary);
    if (!in) continue;
    std::ostringstream ss;
    ss << in.rdbuf();
    auto rows = parse_csv(ss.str(), path.string());
    if (rows.empty()) continue;

    std::vector<std::string> expected;
    for (const Column &c : t.columns) expected.push_back(c.name);
    if (rows.front() != expected) {
      std::string want;
      for (std::size_t i = 0; i < expected.size(); ++i)
        want += (i ? "," : "") + expected[i];
      throw std::runtime_error(path.string() + ": header must be exactly: " + want);
    }

    for (std::size_t ri = 1; ri < rows.size(); ++ri) {
      const auto &cells = rows[ri];
      std::string where = path.string() + ":" + std::to_string(ri + 1);
      if (cells.size() != t.columns.size())
        throw std::runtime_error(where + ": expected " +
                                 std::to_string(t.columns.size()) + " cells, got " +
                                 std::to_string(cells.size()));
      Instance::Row row(t.columns.size());
      for (std::size_t ci = 0; ci < cells.size(); ++ci)
        row[ci] = detail::parse_cell(cells[ci], t.columns[ci].type, where);
      if (is_null(row[0]))
        throw std::runtime_error(where + ": x must not be empty");
      std::int64_t x = as_int(row[0]);
      if (!inst.tables[t.name].emplace(x, std::move(row)).second)
        throw std::runtime_error(where + ": duplicate x " + std::to_string(x));
    }
  }
  recompute_derived(scheme, tr, inst);
  return inst;
}

/// Writes the instance back as CSV files (used by tests and tooling).
inline void save_instance(const TranslationResult &tr, const Instance &inst,
                          const std::string &dir) {
  std::filesystem::create_directories(dir);
  for (const Table &t : tr.schema.tables) {
    std::ofstream out(std::filesystem::path(dir) / (t.name + ".csv"), std::ios::binary);
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      out << (i ? "," : "") << t.columns[i].name;
    out << "\n";
    auto it = inst.tables.find(t.name);
    if (it == inst.tables.end()) continue;
    for (const auto &[x, row] : it->second) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << csv_escape(value_to_string(row[i]));
      out << "\n";
    }
  }
}

}  // namespace mdmc

