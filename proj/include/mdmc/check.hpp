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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mdmc/eval.hpp"

namespace mdmc {

struct Violation {
  std::string constraint_id;
  std::string table;
  std::int64_t row_x = -1;
  std::int64_t row_y = -1;  // second row of a pair binding, -1 otherwise
  std::string message;
  Severity severity = Severity::Error;
};

/// Human-facing name of a row: the first non-null text attribute, falling
/// back to the surrogate.
inline std::string row_display(const TranslationResult &tr, const Instance &inst,
                               const std::string &table, std::int64_t x) {
  const Table *t = tr.schema.find_table(table);
  const Instance::Row *row = inst.find_row(table, x);
  if (t && row) {
    for (std::size_t ci = 0; ci < t->columns.size(); ++ci) {
      if (t->columns[ci].type.kind != ValueType::Kind::Text) continue;
      if (ci < row->size() && is_text((*row)[ci])) return as_text((*row)[ci]);
    }
  }
  return table + " x=" + std::to_string(x);
}

namespace detail {

inline std::string violation_message(const TranslationResult &tr, const Instance &inst,
                                     const Constraint &c, const std::string &table,
                                     std::int64_t x, std::int64_t y) {
  std::string msg = c.description.empty() ? std::string(to_string(c.kind)) + " constraint"
                                          : c.description;
  msg += " (" + c.label + ") violated for " + table + " row " +
         row_display(tr, inst, table, x);
  if (y >= 0) msg += " / " + row_display(tr, inst, table, y);
  return msg;
}

}  // namespace detail

/// Violations of one residual constraint over the whole instance. Pairs are
/// reported once, by their lexicographically smallest binding. Only FALSE
/// verdicts violate; UNKNOWN passes, mirroring check-constraint semantics.
inline void residual_violations(const MdmScheme &scheme, const TranslationResult &tr,
                                const Instance &inst, const Constraint &c,
                                std::vector<Violation> &out, bool stop_at_first = false) {
  Evaluator ev(scheme, tr, inst);

  auto formula_violations = [&](const FormulaPtr &f) {
    if (!f) return;
    if (f->kind != Formula::Kind::Forall) {
      if (ev.eval_formula(f) == Verdict::False)
        out.push_back({c.label, "", -1, -1,
                       detail::violation_message(tr, inst, c, "", -1, -1)});
      return;
    }
    const std::string table = scheme.sets[f->set_index].name;
    auto rows = inst.tables.find(table);
    if (rows == inst.tables.end()) return;
    if (f->vars.size() == 1) {
      for (const auto &[x, row] : rows->second) {
        Bindings env{{f->vars[0], {table, x}}};
        if (ev.eval_formula(f->body, env) == Verdict::False) {
          out.push_back({c.label, table, x, -1,
                         detail::violation_message(tr, inst, c, table, x, -1)});
          if (stop_at_first) return;
        }
      }
      return;
    }
    // two (or more) universal variables: canonicalize unordered pairs
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const auto &[x, rx] : rows->second) {
      for (const auto &[y, ry] : rows->second) {
        Bindings env{{f->vars[0], {table, x}}, {f->vars[1], {table, y}}};
        if (ev.eval_formula(f->body, env) != Verdict::False) continue;
        auto key = std::minmax(x, y);
        if (!seen.insert({key.first, key.second}).second) continue;
        out.push_back({c.label, table, key.first, key.second,
                       detail::violation_message(tr, inst, c, table, key.first,
                                                 key.second)});
        if (stop_at_first) return;
      }
    }
  };

  switch (c.kind) {
    case Constraint::Kind::ObjectFormula:
    case Constraint::Kind::Tuple:
      formula_violations(c.formula);
      break;
    case Constraint::Kind::NoOverlap:
      formula_violations(expand_no_overlap(scheme, c));
      break;
    case Constraint::Kind::NullReflexive: {
      const Mapping &inner = scheme.mappings[c.inner];
      const std::string table = scheme.sets[inner.domain].name;
      auto rows = inst.tables.find(table);
      if (rows == inst.tables.end()) break;
      for (const auto &[a, row] : rows->second) {
        Value b = ev.mapping_value(c.inner, a);
        if (is_null(b) || !is_int(b)) continue;
        Value back = ev.mapping_value(c.outer, as_int(b));
        if (is_null(back)) continue;  // unknown, not a violation
        if (!is_int(back) || as_int(back) != a) {
          out.push_back({c.label, table, a, -1,
                         detail::violation_message(tr, inst, c, table, a, -1)});
          if (stop_at_first) return;
        }
      }
      break;
    }
    case Constraint::Kind::Existence: {
      const Mapping &fi = scheme.mappings[c.if_mapping];
      const std::string table = scheme.sets[fi.domain].name;
      auto rows = inst.tables.find(table);
      if (rows == inst.tables.end()) break;
      for (const auto &[x, row] : rows->second) {
        if (is_null(ev.mapping_value(c.if_mapping, x))) continue;
        if (is_null(ev.mapping_value(c.then_mapping, x))) {
          out.push_back({c.label, table, x, -1,
                         detail::violation_message(tr, inst, c, table, x, -1)});
          if (stop_at_first) return;
        }
      }
      break;
    }
    case Constraint::Kind::Acyclic: {
      const Mapping &m = scheme.mappings[c.mapping];
      const std::string table = scheme.sets[m.domain].name;
      auto rows = inst.tables.find(table);
      if (rows == inst.tables.end()) break;
      std::set<std::int64_t> reported;  // smallest member of each found cycle
      for (const auto &[x, row] : rows->second) {
        auto cycle = detect_cycle(scheme, tr, inst, c.mapping, x);
        if (!cycle) continue;
        std::int64_t rep = *std::min_element(cycle->begin(), cycle->end());
        if (!reported.insert(rep).second) continue;
        std::string path;
        for (std::size_t i = 0; i < cycle->size(); ++i)
          path += (i ? " -> " : "") + std::to_string((*cycle)[i]);
        Violation v{c.label, table, rep, -1,
                    detail::violation_message(tr, inst, c, table, rep, -1)};
        v.message += " (cycle: " + path + ")";
        out.push_back(std::move(v));
        if (stop_at_first) return;
      }
      break;
    }
    default:
      break;  // relational kinds are checked from the schema
  }
}

/// Full evaluation of everything: the relational schema (domains, not-nulls,
/// unique keys with distinct nulls, references, tuple checks) plus the whole
/// residual set.
inline std::vector<Violation> check_all(const MdmScheme &scheme,
                                        const TranslationResult &tr,
                                        const Instance &inst) {
  std::vector<Violation> out;
  Evaluator ev(scheme, tr, inst);

  for (const Table &t : tr.schema.tables) {
    auto rows_it = inst.tables.find(t.name);
    if (rows_it == inst.tables.end()) continue;
    const auto &rows = rows_it->second;

    for (const auto &[x, row] : rows) {
      if (t.pk_max.has_value() && (x < 1 || x > *t.pk_max))
        out.push_back({"pk:" + t.name, t.name, x, -1,
                       t.name + ".x " + std::to_string(x) + " outside 1.." +
                           std::to_string(*t.pk_max)});
      for (std::size_t ci = 0; ci < t.columns.size(); ++ci) {
        const Column &col = t.columns[ci];
        const Value &v = row[ci];
        if (t.not_null.count(col.name) && is_null(v))
          out.push_back({"notnull:" + t.name + "." + col.name, t.name, x, -1,
                         t.name + "." + col.name + " must not be null (row " +
                             row_display(tr, inst, t.name, x) + ")"});
        bool domain_ok = col.type.admits(v, inst.current_year);
        for (const ValueType &r : col.restrictions)
          domain_ok = domain_ok && r.admits(v, inst.current_year);
        if (!domain_ok)
          out.push_back({"domain:" + t.name + "." + col.name, t.name, x, -1,
                         t.name + "." + col.name + " value '" + value_to_string(v) +
                             "' outside its domain (row " +
                             row_display(tr, inst, t.name, x) + ")"});
      }
      for (const ForeignKey &fk : t.foreign_keys) {
        int ci = t.column_index(fk.column);
        const Value &v = row[static_cast<std::size_t>(ci)];
        if (is_null(v) || !is_int(v)) continue;
        if (!inst.find_row(fk.ref_table, as_int(v)))
          out.push_back({"fk:" + t.name + "." + fk.column, t.name, x, -1,
                         t.name + "." + fk.column + " references missing " +
                             fk.ref_table + " x=" + value_to_string(v)});
      }
      for (const CheckConstraint &ck : t.checks) {
        Bindings env{{ck.body->vars[0], {t.name, x}}};
        if (ev.eval_formula(ck.body->body, env) == Verdict::False)
          out.push_back({ck.label, t.name, x, -1,
                         ck.description + " (" + ck.label + ") violated for " + t.name +
                             " row " + row_display(tr, inst, t.name, x)});
      }
    }

    // unique keys, nulls distinct: rows with any null in the key are exempt
    for (const UniqueKey &uq : t.unique_keys) {
      std::vector<int> idx;
      for (const auto &cn : uq.columns) idx.push_back(t.column_index(cn));
      std::map<std::vector<Value>, std::int64_t> first_seen;
      for (const auto &[x, row] : rows) {
        std::vector<Value> key;
        bool has_null = false;
        for (int ci : idx) {
          const Value &v = row[static_cast<std::size_t>(ci)];
          if (is_null(v)) { has_null = true; break; }
          key.push_back(v);
        }
        if (has_null) continue;
        auto [it, fresh] = first_seen.emplace(key, x);
        if (!fresh)
          out.push_back({uq.label, t.name, it->second, x,
                         "unique key (" + uq.label + ") duplicated by " + t.name +
                             " rows " + std::to_string(it->second) + " and " +
                             std::to_string(x)});
      }
    }
  }

  for (const auto &entry : tr.residual.entries)
    residual_violations(scheme, tr, inst, entry.constraint, out);
  return out;
}

}  // namespace mdmc
