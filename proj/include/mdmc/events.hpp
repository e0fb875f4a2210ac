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
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdmc/check.hpp"
#include "mdmc/planner.hpp"

namespace mdmc {

struct Event {
  enum class Op { Insert, Update, Delete };
  Op op = Op::Update;
  std::string table;
  std::int64_t x = 0;  // <= 0 on insert: pick the next free surrogate
  std::map<std::string, Value> values;
};

struct Mutation {
  std::string table;
  std::int64_t x = 0;
  std::string column;
  Value value;
};

struct ApplyResult {
  bool accepted = false;
  std::vector<std::string> messages;   // rejection reason or warnings/notes
  std::vector<Mutation> mutations;     // plan-driven changes beyond the event
};

/// Parses one line-delimited JSON event:
///   {"op":"update","table":"CITIES","x":1,"values":{"Country":2}}
inline Event parse_event(const std::string &line) {
  auto j = nlohmann::json::parse(line);
  Event e;
  std::string op = j.at("op").get<std::string>();
  if (op == "insert") e.op = Event::Op::Insert;
  else if (op == "update") e.op = Event::Op::Update;
  else if (op == "delete") e.op = Event::Op::Delete;
  else throw std::runtime_error("unknown event op '" + op + "'");
  e.table = j.at("table").get<std::string>();
  if (j.contains("x")) e.x = j.at("x").get<std::int64_t>();
  if (j.contains("values")) {
    for (auto &[k, v] : j.at("values").items()) {
      if (v.is_null()) e.values[k] = Value{};
      else if (v.is_number_integer()) e.values[k] = Value{v.get<std::int64_t>()};
      else if (v.is_string()) e.values[k] = Value{v.get<std::string>()};
      else throw std::runtime_error("unsupported value for column " + k);
    }
  }
  return e;
}

namespace detail {

inline std::string substitute(std::string tmpl,
                              const std::map<std::string, std::string> &vars) {
  for (const auto &[k, v] : vars) {
    std::string key = "{" + k + "}";
    for (std::size_t p = tmpl.find(key); p != std::string::npos; p = tmpl.find(key))
      tmpl.replace(p, key.size(), v);
  }
  return tmpl;
}

inline const Constraint *find_residual(const NonRelationalOutput &residual,
                                       const std::string &label) {
  for (const auto &e : residual.entries)
    if (e.constraint.label == label) return &e.constraint;
  return nullptr;
}

}  // namespace detail

/// Plays one event against the instance under the enforcement plan.
///
/// Order of business mirrors the enforcement guidelines: not-null and domain
/// checks come first, then references, unique keys and tuple checks, then
/// the plan entries for the touched table and columns, all evaluated against
/// the hypothetical post-state. A rejection leaves the instance untouched.
/// After acceptance, after-update entries may nullify columns (with a
/// warning) or propagate values; derived columns are recomputed last.
inline ApplyResult apply_event(const MdmScheme &scheme, const TranslationResult &tr,
                               const EnforcementPlan &plan, Instance &inst,
                               const Event &event, int depth = 0) {
  ApplyResult res;
  auto reject = [&](const std::string &msg) {
    res.accepted = false;
    res.messages.push_back(msg);
    return res;
  };

  const Table *t = tr.schema.find_table(event.table);
  if (!t) return reject("unknown table " + event.table);

  std::int64_t x = event.x;
  if (event.op == Event::Op::Insert) {
    if (x <= 0) {
      x = 1;
      auto it = inst.tables.find(t->name);
      if (it != inst.tables.end() && !it->second.empty())
        x = it->second.rbegin()->first + 1;
    }
    if (inst.find_row(t->name, x))
      return reject(t->name + " x=" + std::to_string(x) + " already exists");
  } else {
    if (!inst.find_row(t->name, x))
      return reject("unknown row " + t->name + " x=" + std::to_string(x));
  }
  for (const auto &[col, v] : event.values) {
    const Column *c = t->find_column(col);
    if (!c) return reject("unknown column " + t->name + "." + col);
    if (col == t->primary_key) return reject("the surrogate x cannot be assigned");
    if (c->computed_expr) return reject(t->name + "." + col + " is computed");
  }

  // hypothetical post-state
  Instance next = inst;
  if (event.op == Event::Op::Delete) {
    next.tables[t->name].erase(x);
  } else {
    if (event.op == Event::Op::Insert) {
      Instance::Row fresh(t->columns.size());
      fresh[0] = Value{x};
      // engine-side defaults fill the omitted columns
      for (std::size_t ci = 1; ci < t->columns.size(); ++ci) {
        const Column &c = t->columns[ci];
        if (c.default_literal.empty() || event.values.count(c.name)) continue;
        if (c.default_literal.front() == '\'')
          fresh[ci] = Value{c.default_literal.substr(1, c.default_literal.size() - 2)};
        else
          fresh[ci] = Value{static_cast<std::int64_t>(std::stoll(c.default_literal))};
      }
      next.tables[t->name][x] = std::move(fresh);
    }
    Instance::Row *row = next.find_row(t->name, x);
    for (const auto &[col, v] : event.values)
      (*row)[static_cast<std::size_t>(t->column_index(col))] = v;
  }
  recompute_derived(scheme, tr, next);

  // effective changed-column set: explicit values plus derived columns
  std::set<std::string> changed;
  for (const auto &[col, v] : event.values) changed.insert(col);
  for (const Column &c : t->columns)
    if (c.computed_expr) changed.insert(c.name);

  // the state used for message rendering: hypothetical before commit, the
  // live instance afterwards
  const Instance *view = &next;
  auto entry_message = [&](const PlanEntry &e, const Violation &v) {
    std::map<std::string, std::string> vars;
    vars["constraint"] = e.constraint_id;
    vars["table"] = v.table.empty() ? e.table : v.table;
    vars["row"] = v.row_x >= 0 ? row_display(tr, *view, v.table, v.row_x)
                               : row_display(tr, inst, t->name, x);
    vars["value"] = event.op == Event::Op::Delete
                        ? row_display(tr, inst, t->name, x)
                        : row_display(tr, *view, t->name, x);
    std::string cols;
    for (std::size_t i = 0; i < e.action_columns.size(); ++i)
      cols += (i ? ", " : "") + e.action_columns[i];
    vars["columns"] = cols;
    return detail::substitute(e.message_template, vars);
  };

  Evaluator ev_next(scheme, tr, next);

  if (event.op == Event::Op::Delete) {
    // engine default referential action: restrict
    for (const Table &other : tr.schema.tables) {
      for (const ForeignKey &fk : other.foreign_keys) {
        if (fk.ref_table != t->name) continue;
        auto rows = next.tables.find(other.name);
        if (rows == next.tables.end()) continue;
        int ci = other.column_index(fk.column);
        for (const auto &[ox, orow] : rows->second) {
          const Value &v = orow[static_cast<std::size_t>(ci)];
          if (!is_null(v) && is_int(v) && as_int(v) == x)
            return reject("delete denied: " + other.name + " x=" +
                          std::to_string(ox) + " still references " + t->name +
                          " x=" + std::to_string(x) + " via " + fk.column);
        }
      }
    }
    for (const PlanEntry *e : plan.entries_for(t->name)) {
      if (e->event != PlanEvent::BeforeDelete) continue;
      const Constraint *c = detail::find_residual(tr.residual, e->constraint_id);
      if (!c) continue;
      std::vector<Violation> vs;
      residual_violations(scheme, tr, next, *c, vs, true);
      if (!vs.empty()) return reject(entry_message(*e, vs.front()));
    }
    inst = std::move(next);
    res.accepted = true;
    return res;
  }

  // relational layer first: not-null, domains, references, keys, checks
  const Instance::Row &row = *next.find_row(t->name, x);
  for (std::size_t ci = 0; ci < t->columns.size(); ++ci) {
    const Column &col = t->columns[ci];
    const Value &v = row[ci];
    if (t->not_null.count(col.name) && is_null(v))
      return reject(t->name + "." + col.name + " must not be null");
    bool domain_ok = col.type.admits(v, next.current_year);
    for (const ValueType &r : col.restrictions)
      domain_ok = domain_ok && r.admits(v, next.current_year);
    if (!domain_ok)
      return reject(t->name + "." + col.name + " value '" + value_to_string(v) +
                    "' outside its domain");
  }
  for (const ForeignKey &fk : t->foreign_keys) {
    const Value &v = row[static_cast<std::size_t>(t->column_index(fk.column))];
    if (!is_null(v) && is_int(v) && !next.find_row(fk.ref_table, as_int(v)))
      return reject(t->name + "." + fk.column + " references missing " + fk.ref_table +
                    " x=" + value_to_string(v));
  }
  for (const UniqueKey &uq : t->unique_keys) {
    std::vector<Value> key;
    bool has_null = false;
    for (const auto &cn : uq.columns) {
      const Value &v = row[static_cast<std::size_t>(t->column_index(cn))];
      if (is_null(v)) { has_null = true; break; }
      key.push_back(v);
    }
    if (has_null) continue;
    for (const auto &[ox, orow] : next.tables[t->name]) {
      if (ox == x) continue;
      bool same = true;
      for (std::size_t i = 0; i < uq.columns.size(); ++i) {
        const Value &ov = orow[static_cast<std::size_t>(t->column_index(uq.columns[i]))];
        if (is_null(ov) || !(ov == key[i])) { same = false; break; }
      }
      if (same)
        return reject("unique key (" + uq.label + ") would be duplicated by rows " +
                      std::to_string(ox) + " and " + std::to_string(x));
    }
  }
  for (const CheckConstraint &ck : t->checks) {
    Bindings env{{ck.body->vars[0], {t->name, x}}};
    if (ev_next.eval_formula(ck.body->body, env) == Verdict::False)
      return reject(ck.description + " (" + ck.label + ") violated for " + t->name +
                    " row " + row_display(tr, next, t->name, x));
  }

  // plan entries, before phase
  for (const PlanEntry *e : plan.entries_for(t->name)) {
    bool matches = false;
    switch (e->event) {
      case PlanEvent::ColumnBeforeUpdate:
        matches = changed.count(e->event_column) > 0;
        break;
      case PlanEvent::RowBeforeUpdate:
        for (const auto &cn : e->tracked_columns)
          if (changed.count(cn)) matches = true;
        break;
      case PlanEvent::RowCurrent:
        if (e->strategy == PlanStrategy::FilterDomain)
          matches = changed.count(e->event_column) > 0;
        else
          for (const auto &cn : e->tracked_columns)
            if (changed.count(cn)) matches = true;
        break;
      default:
        break;  // after-phase and delete entries
    }
    if (!matches) continue;
    if (e->new_row_exempt && event.op == Event::Op::Insert) continue;
    if (e->constraint_id.rfind("demoted:", 0) == 0) continue;  // relational layer covers these

    const Constraint *c = detail::find_residual(tr.residual, e->constraint_id);
    if (!c) continue;

    if (e->strategy == PlanStrategy::LockColumns) {
      auto shape = detail::match_lock_shape(scheme, *c);
      if (!shape.matches) continue;
      const Mapping &guard_col = scheme.mappings[shape.guard_mapping];
      if (changed.count(guard_col.name)) continue;  // the nullifier owns guard flips
      Evaluator ev_pre(scheme, tr, inst);
      if (event.op == Event::Op::Insert) continue;  // no pre-state row
      Bindings env{{c->formula->vars[0], {t->name, x}}};
      if (ev_pre.eval_formula(c->formula->body->left, env) != Verdict::True) continue;
      for (const auto &cn : e->action_columns) {
        auto it = event.values.find(cn);
        if (it != event.values.end() && !is_null(it->second))
          return reject(entry_message(
              *e, Violation{e->constraint_id, t->name, x, -1, ""}));
      }
      continue;
    }
    if (e->strategy == PlanStrategy::CycleCheck) {
      auto cycle = detect_cycle(scheme, tr, next, c->mapping, x);
      if (cycle) {
        std::string path;
        for (std::size_t i = 0; i < cycle->size(); ++i)
          path += (i ? " -> " : "") + std::to_string((*cycle)[i]);
        return reject(entry_message(*e, Violation{e->constraint_id, t->name, x, -1, ""}) +
                      " (cycle: " + path + ")");
      }
      continue;
    }
    // reject-style strategies evaluate the full constraint on the post-state
    std::vector<Violation> vs;
    residual_violations(scheme, tr, next, *c, vs, true);
    if (!vs.empty()) return reject(entry_message(*e, vs.front()));
  }

  // committed
  inst = std::move(next);
  view = &inst;
  res.accepted = true;

  // after phase: nullify-and-warn, propagate-update
  for (const PlanEntry *e : plan.entries_for(t->name)) {
    bool matches = false;
    if (e->event == PlanEvent::ColumnAfterUpdate)
      matches = changed.count(e->event_column) > 0;
    else if (e->event == PlanEvent::RowAfterUpdate)
      for (const auto &cn : e->tracked_columns)
        if (changed.count(cn)) matches = true;
    if (!matches) continue;
    if (e->constraint_id.rfind("demoted:", 0) == 0) continue;  // recompute is built in

    const Constraint *c = detail::find_residual(tr.residual, e->constraint_id);
    if (!c) continue;

    if (e->strategy == PlanStrategy::NullifyAndWarn) {
      auto shape = detail::match_lock_shape(scheme, *c);
      if (!shape.matches) continue;
      Evaluator ev_now(scheme, tr, inst);
      Bindings env{{c->formula->vars[0], {t->name, x}}};
      if (ev_now.eval_formula(c->formula->body->left, env) != Verdict::True) continue;
      Instance::Row *row_now = inst.find_row(t->name, x);
      for (const auto &cn : e->action_columns) {
        (*row_now)[static_cast<std::size_t>(t->column_index(cn))] = Value{};
        res.mutations.push_back({t->name, x, cn, Value{}});
      }
      res.messages.push_back("warning: " +
                             entry_message(*e, Violation{e->constraint_id, t->name, x,
                                                         -1, ""}));
    } else if (e->strategy == PlanStrategy::PropagateUpdate &&
               c->kind == Constraint::Kind::NullReflexive && depth < 3) {
      // choosing a target without a back reference adopts it (advisory)
      const Mapping &inner = scheme.mappings[c->inner];
      const Mapping &outer = scheme.mappings[c->outer];
      Instance::Row *row_now = inst.find_row(t->name, x);
      const Value &chosen = (*row_now)[static_cast<std::size_t>(
          t->column_index(tr.mapping_columns.at(c->inner).second))];
      if (is_null(chosen) || !is_int(chosen)) continue;
      Evaluator ev_now(scheme, tr, inst);
      if (!is_null(ev_now.mapping_value(c->outer, as_int(chosen)))) continue;
      Event sub;
      sub.op = Event::Op::Update;
      sub.table = scheme.sets[outer.domain].name;
      sub.x = as_int(chosen);
      sub.values[tr.mapping_columns.at(c->outer).second] = Value{x};
      ApplyResult sr = apply_event(scheme, tr, plan, inst, sub, depth + 1);
      if (sr.accepted) {
        res.mutations.push_back({sub.table, sub.x,
                                 tr.mapping_columns.at(c->outer).second, Value{x}});
        for (auto &m : sr.mutations) res.mutations.push_back(m);
        res.messages.push_back("note: " + outer.name + " of " + sub.table + " x=" +
                               std::to_string(sub.x) + " set to " + std::to_string(x) +
                               " (" + e->constraint_id + ")");
      } else {
        res.messages.push_back("note: " + e->constraint_id +
                               " propagation skipped: " +
                               (sr.messages.empty() ? "rejected" : sr.messages.front()));
      }
      (void)inner;
    }
  }

  recompute_derived(scheme, tr, inst);
  return res;
}

}  // namespace mdmc
