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

#include <nlohmann/json.hpp>

#include "mdmc/relational.hpp"
#include "mdmc/scheme.hpp"
#include "mdmc/sql_emitter.hpp"
#include "mdmc/translator.hpp"
#include "mdmc/validate.hpp"

namespace mdmc {

/// Events a plan entry can hook. The vocabulary deliberately contains no
/// keystroke events: constraints fire when a row is saved, touched, or
/// deleted, never while the user is typing.
enum class PlanEvent {
  RowCurrent,
  ColumnBeforeUpdate,
  RowBeforeUpdate,
  ColumnAfterUpdate,
  RowAfterUpdate,
  BeforeDelete,
};

enum class PlanStrategy {
  FilterDomain,
  RejectCheck,
  LockColumns,
  NullifyAndWarn,
  PropagateUpdate,
  CycleCheck,
  ExistenceCheck,
  CrossRowCheck,
  UniqueNullsDistinct,
};

inline const char *to_string(PlanEvent e) {
  switch (e) {
    case PlanEvent::RowCurrent: return "row-current";
    case PlanEvent::ColumnBeforeUpdate: return "column-before-update";
    case PlanEvent::RowBeforeUpdate: return "row-before-update";
    case PlanEvent::ColumnAfterUpdate: return "column-after-update";
    case PlanEvent::RowAfterUpdate: return "row-after-update";
    case PlanEvent::BeforeDelete: return "before-delete";
  }
  return "?";
}
inline const char *to_string(PlanStrategy s) {
  switch (s) {
    case PlanStrategy::FilterDomain: return "filter-domain";
    case PlanStrategy::RejectCheck: return "reject-check";
    case PlanStrategy::LockColumns: return "lock-columns";
    case PlanStrategy::NullifyAndWarn: return "nullify-and-warn";
    case PlanStrategy::PropagateUpdate: return "propagate-update";
    case PlanStrategy::CycleCheck: return "cycle-check";
    case PlanStrategy::ExistenceCheck: return "existence-check";
    case PlanStrategy::CrossRowCheck: return "cross-row-check";
    case PlanStrategy::UniqueNullsDistinct: return "unique-nulls-distinct";
  }
  return "?";
}

struct PlanEntry {
  std::string constraint_id;
  std::string table;
  PlanEvent event = PlanEvent::RowBeforeUpdate;
  std::string event_column;             // column-scoped events
  PlanStrategy strategy = PlanStrategy::RejectCheck;
  std::vector<std::string> tracked_columns;
  std::vector<std::string> action_columns;  // lock/nullify/propagate targets
  std::string guard;                    // rendered guard for lock/nullify
  std::string predicate;                // filter-domain predicate sketch
  std::string message_template;         // {row}/{value}/{constraint} placeholders
  bool new_row_exempt = false;
  bool advisory = false;

  std::string event_string() const {
    std::string s = to_string(event);
    if (!event_column.empty()) s += "(" + event_column + ")";
    return s;
  }
};

struct EnforcementPlan {
  std::vector<PlanEntry> entries;                       // stable order
  std::map<std::string, std::vector<int>> coverage;     // constraint -> entry idx
  std::vector<std::string> warnings;                    // unclassifiable notes

  std::vector<const PlanEntry *> entries_for(const std::string &table) const {
    std::vector<const PlanEntry *> out;
    for (const auto &e : entries)
      if (e.table == table) out.push_back(&e);
    return out;
  }
};

namespace detail {

inline std::string default_message(const Constraint &c) {
  std::string d = c.description.empty() ? std::string(to_string(c.kind)) + " constraint"
                                        : c.description;
  return d + " ({constraint}) violated for {table} row {row}";
}

/// Columns of the constraint's functions that live on one set, computed
/// attributes widened to their stored inputs.
inline std::vector<std::string> tracked_on(const MdmScheme &scheme, const Constraint &c,
                                           int set_index) {
  std::set<std::string> cols;
  std::vector<int> ms = constraint_mappings(scheme, c);
  std::vector<int> widened;
  for (int mi : ms) {
    widened.push_back(mi);
    const Mapping &m = scheme.mappings[mi];
    if (m.kind == Mapping::Kind::ComputedAttribute && m.compute_expr) {
      std::vector<int> inputs;
      collect_term_mappings(m.compute_expr, inputs);
      widened.insert(widened.end(), inputs.begin(), inputs.end());
    }
  }
  for (int mi : widened) {
    const Mapping &m = scheme.mappings[mi];
    if (m.domain == set_index && m.kind != Mapping::Kind::ObjectIdentifier)
      cols.insert(m.name);
  }
  return {cols.begin(), cols.end()};
}

/// Shape test for the combo-filter rule: forall x in T: P(f(x)) where f is a
/// structural function and P restricts one attribute of f's codomain.
struct FilterShape {
  bool matches = false;
  int fk_mapping = -1;
  int attr_mapping = -1;
  std::string predicate;
};

inline FilterShape match_filter_shape(const MdmScheme &scheme, const Constraint &c) {
  FilterShape out;
  if (c.kind != Constraint::Kind::ObjectFormula || !c.formula) return out;
  const Formula &f = *c.formula;
  if (f.kind != Formula::Kind::Forall || f.vars.size() != 1) return out;
  const FormulaPtr &body = f.body;
  if (!body || body->kind != Formula::Kind::Compare) return out;
  // one side Apply(attr, Apply(fk, var)), other side a literal
  const TermPtr &lhs = body->tl;
  const TermPtr &rhs = body->tr;
  if (!lhs || !rhs) return out;
  if (lhs->kind != Term::Kind::Apply || rhs->kind == Term::Kind::Apply) {
    // literal on the left is not produced by the surface syntax in practice
    return out;
  }
  const TermPtr &inner = lhs->lhs;
  if (!inner || inner->kind != Term::Kind::Apply || !inner->lhs ||
      inner->lhs->kind != Term::Kind::Var)
    return out;
  const Mapping &attr = scheme.mappings[lhs->mapping];
  const Mapping &fk = scheme.mappings[inner->mapping];
  if (!fk.is_structural_like() || !attr.is_attribute_like()) return out;
  out.matches = true;
  out.fk_mapping = inner->mapping;
  out.attr_mapping = lhs->mapping;
  out.predicate = attr.name + " " + std::string(to_string(body->op)) + " " +
                  term_to_string(rhs);
  return out;
}

/// Shape test for the lock/nullify rule: forall x: guard(x) => conjunction of
/// "f(x) is null" conclusions, guard over one attribute.
struct LockShape {
  bool matches = false;
  int guard_mapping = -1;
  std::string guard;
  std::vector<int> nulled;
};

inline LockShape match_lock_shape(const MdmScheme &scheme, const Constraint &c) {
  (void)scheme;  // shape analysis is purely syntactic
  LockShape out;
  if (c.kind != Constraint::Kind::ObjectFormula || !c.formula) return out;
  const Formula &f = *c.formula;
  if (f.kind != Formula::Kind::Forall || f.vars.size() != 1) return out;
  if (!f.body || f.body->kind != Formula::Kind::Implies) return out;
  const FormulaPtr &guard = f.body->left;
  if (!guard || guard->kind != Formula::Kind::Compare) return out;
  if (!guard->tl || guard->tl->kind != Term::Kind::Apply || !guard->tl->lhs ||
      guard->tl->lhs->kind != Term::Kind::Var)
    return out;
  // collect conjunction of IsNull(Apply(g, var))
  std::vector<int> nulled;
  std::function<bool(const FormulaPtr &)> collect = [&](const FormulaPtr &p) {
    if (!p) return false;
    if (p->kind == Formula::Kind::And) return collect(p->left) && collect(p->right);
    if (p->kind == Formula::Kind::IsNull && p->null_positive && p->tl &&
        p->tl->kind == Term::Kind::Apply && p->tl->lhs &&
        p->tl->lhs->kind == Term::Kind::Var) {
      nulled.push_back(p->tl->mapping);
      return true;
    }
    return false;
  };
  if (!collect(f.body->right)) return out;
  out.matches = true;
  out.guard_mapping = guard->tl->mapping;
  out.guard = formula_to_string(guard);
  out.nulled = nulled;
  return out;
}

struct QuantShape {
  int forall_vars = 0;
  std::vector<int> exists_sets;
};

inline void quantifier_shape(const FormulaPtr &f, QuantShape &q) {
  if (!f) return;
  if (f->kind == Formula::Kind::Forall) q.forall_vars += static_cast<int>(f->vars.size());
  if (f->kind == Formula::Kind::Exists) q.exists_sets.push_back(f->set_index);
  quantifier_shape(f->left, q);
  quantifier_shape(f->right, q);
  quantifier_shape(f->body, q);
}

}  // namespace detail

/// Compiles the residual and demoted constraints into a declarative
/// enforcement plan. Classification rules are tried in a fixed order and the
/// first match decides the primary entries; every other set hosting one of
/// the constraint's functions still receives a tracking entry so that no
/// value change escapes unchecked.
inline EnforcementPlan plan(const MdmScheme &scheme, const NonRelationalOutput &residual,
                            const std::vector<Demotion> &demotions,
                            const RelationalSchema &schema) {
  EnforcementPlan out;

  auto add = [&](PlanEntry e) {
    out.coverage[e.constraint_id].push_back(static_cast<int>(out.entries.size()));
    out.entries.push_back(std::move(e));
  };
  auto table_name = [&](int set_index) { return scheme.sets[set_index].name; };

  for (const auto &res : residual.entries) {
    const Constraint &c = res.constraint;
    std::string message = detail::default_message(c);

    switch (c.kind) {
      case Constraint::Kind::NullReflexive: {
        // filter the inner choice to rows that already point back, reject
        // outer changes in the codomain table, never check brand-new rows
        const Mapping &inner = scheme.mappings[c.inner];
        const Mapping &outer = scheme.mappings[c.outer];
        PlanEntry filt;
        filt.constraint_id = c.label;
        filt.table = table_name(inner.domain);
        filt.event = PlanEvent::RowCurrent;
        filt.strategy = PlanStrategy::FilterDomain;
        filt.event_column = inner.name;
        filt.tracked_columns = {inner.name};
        filt.predicate = "SELECT x FROM " + table_name(outer.domain) + " WHERE " +
                         outer.name + " = {row} OR " + outer.name + " IS NULL";
        filt.message_template = message;
        add(filt);

        PlanEntry rej;
        rej.constraint_id = c.label;
        rej.table = table_name(outer.domain);
        rej.event = PlanEvent::ColumnBeforeUpdate;
        rej.event_column = outer.name;
        rej.strategy = PlanStrategy::RejectCheck;
        rej.tracked_columns = {outer.name};
        rej.new_row_exempt = true;
        rej.message_template = "Request denied: {value} is referenced by {row}; "
                               "changing " + outer.name + " would break {constraint}";
        add(rej);

        PlanEntry prop;
        prop.constraint_id = c.label;
        prop.table = table_name(inner.domain);
        prop.event = PlanEvent::ColumnAfterUpdate;
        prop.event_column = inner.name;
        prop.strategy = PlanStrategy::PropagateUpdate;
        prop.tracked_columns = {inner.name};
        prop.action_columns = {outer.name};
        prop.advisory = true;
        prop.message_template = outer.name + " of {value} set to {row} to keep {constraint}";
        add(prop);
        break;
      }
      case Constraint::Kind::Acyclic: {
        const Mapping &m = scheme.mappings[c.mapping];
        PlanEntry e;
        e.constraint_id = c.label;
        e.table = table_name(m.domain);
        e.event = PlanEvent::ColumnBeforeUpdate;
        e.event_column = m.name;
        e.strategy = PlanStrategy::CycleCheck;
        e.tracked_columns = {m.name};
        e.message_template = message;
        add(e);
        break;
      }
      case Constraint::Kind::Existence: {
        const Mapping &fi = scheme.mappings[c.if_mapping];
        const Mapping &gi = scheme.mappings[c.then_mapping];
        PlanEntry e;
        e.constraint_id = c.label;
        e.table = table_name(fi.domain);
        e.event = PlanEvent::RowBeforeUpdate;
        e.strategy = PlanStrategy::ExistenceCheck;
        e.tracked_columns = {fi.name, gi.name};
        e.message_template = message;
        add(e);
        break;
      }
      case Constraint::Kind::NoOverlap: {
        PlanEntry e;
        e.constraint_id = c.label;
        e.table = table_name(c.host_set);
        e.event = PlanEvent::RowBeforeUpdate;
        e.strategy = PlanStrategy::CrossRowCheck;
        e.tracked_columns = detail::tracked_on(scheme, c, c.host_set);
        e.message_template = message;
        add(e);
        break;
      }
      case Constraint::Kind::Tuple: {
        PlanEntry e;
        e.constraint_id = c.label;
        e.table = table_name(c.host_set);
        e.event = PlanEvent::RowBeforeUpdate;
        e.strategy = PlanStrategy::RejectCheck;
        e.tracked_columns = detail::tracked_on(scheme, c, c.host_set);
        e.message_template = message;
        add(e);
        break;
      }
      case Constraint::Kind::ObjectFormula: {
        detail::FilterShape filter = detail::match_filter_shape(scheme, c);
        detail::LockShape lock = detail::match_lock_shape(scheme, c);
        detail::QuantShape quant;
        detail::quantifier_shape(c.formula, quant);
        int host = c.formula && c.formula->kind == Formula::Kind::Forall
                       ? c.formula->set_index
                       : c.host_set;

        if (filter.matches) {
          const Mapping &fk = scheme.mappings[filter.fk_mapping];
          PlanEntry filt;
          filt.constraint_id = c.label;
          filt.table = table_name(fk.domain);
          filt.event = PlanEvent::RowCurrent;
          filt.strategy = PlanStrategy::FilterDomain;
          filt.event_column = fk.name;
          filt.tracked_columns = {fk.name};
          filt.predicate = "SELECT x FROM " +
                           table_name(scheme.mappings[filter.fk_mapping].codomain_set) +
                           " WHERE " + filter.predicate;
          filt.message_template = message;
          add(filt);
          PlanEntry rej;
          rej.constraint_id = c.label;
          rej.table = table_name(fk.domain);
          rej.event = PlanEvent::ColumnBeforeUpdate;
          rej.event_column = fk.name;
          rej.strategy = PlanStrategy::RejectCheck;
          rej.tracked_columns = {fk.name};
          rej.message_template = message;
          add(rej);
        } else if (lock.matches) {
          const Mapping &guard_col = scheme.mappings[lock.guard_mapping];
          PlanEntry lk;
          lk.constraint_id = c.label;
          lk.table = table_name(guard_col.domain);
          lk.event = PlanEvent::RowCurrent;
          lk.strategy = PlanStrategy::LockColumns;
          lk.guard = lock.guard;
          for (int mi : lock.nulled)
            lk.action_columns.push_back(scheme.mappings[mi].name);
          lk.tracked_columns = lk.action_columns;
          lk.message_template = message;
          add(lk);
          PlanEntry nf;
          nf.constraint_id = c.label;
          nf.table = table_name(guard_col.domain);
          nf.event = PlanEvent::ColumnAfterUpdate;
          nf.event_column = guard_col.name;
          nf.strategy = PlanStrategy::NullifyAndWarn;
          nf.guard = lock.guard;
          nf.action_columns = lk.action_columns;
          nf.tracked_columns = {guard_col.name};
          nf.message_template =
              c.description + ": {columns} cleared for {table} row {row}";
          add(nf);
        } else if (quant.forall_vars >= 2) {
          PlanEntry e;
          e.constraint_id = c.label;
          e.table = table_name(host);
          e.event = PlanEvent::RowBeforeUpdate;
          e.strategy = PlanStrategy::CrossRowCheck;
          e.tracked_columns = detail::tracked_on(scheme, c, host);
          e.message_template = message;
          add(e);
        } else if (host >= 0) {
          auto cols = detail::tracked_on(scheme, c, host);
          PlanEntry e;
          e.constraint_id = c.label;
          e.table = table_name(host);
          e.strategy = PlanStrategy::RejectCheck;
          e.tracked_columns = cols;
          if (cols.size() == 1) {
            e.event = PlanEvent::ColumnBeforeUpdate;
            e.event_column = cols.front();
          } else {
            e.event = PlanEvent::RowBeforeUpdate;
          }
          e.message_template = message;
          add(e);
        } else {
          out.warnings.push_back(c.label + ": unclassifiable constraint, generic cross-row check");
        }

        // deletion guards for existentially quantified sets
        for (int si : quant.exists_sets) {
          PlanEntry del;
          del.constraint_id = c.label;
          del.table = table_name(si);
          del.event = PlanEvent::BeforeDelete;
          del.strategy = PlanStrategy::CrossRowCheck;
          del.tracked_columns = detail::tracked_on(scheme, c, si);
          del.message_template = message;
          add(del);
        }
        break;
      }
      default: {
        out.warnings.push_back(c.label + ": unclassifiable constraint, generic cross-row check");
        PlanEntry e;
        e.constraint_id = c.label;
        e.table = res.host_sets.empty() ? "" : res.host_sets.front();
        e.event = PlanEvent::RowBeforeUpdate;
        e.strategy = PlanStrategy::CrossRowCheck;
        e.message_template = message;
        add(e);
        break;
      }
    }

    // Tracking entries for whatever updates the primary entries do not
    // already watch: every set hosting one of the constraint's functions
    // must re-evaluate the constraint when a tracked column changes.
    // Deletion guards do not count as update coverage.
    for (int si : constraint_sets(scheme, c)) {
      std::set<std::string> covered_cols;
      for (const auto &e : out.entries) {
        if (e.constraint_id != c.label || e.table != table_name(si)) continue;
        if (e.event == PlanEvent::BeforeDelete) continue;
        covered_cols.insert(e.tracked_columns.begin(), e.tracked_columns.end());
      }
      std::vector<std::string> missing;
      for (const auto &col : detail::tracked_on(scheme, c, si))
        if (!covered_cols.count(col)) missing.push_back(col);
      if (missing.empty()) continue;
      PlanEntry e;
      e.constraint_id = c.label;
      e.table = table_name(si);
      e.strategy = PlanStrategy::CrossRowCheck;
      e.tracked_columns = missing;
      if (missing.size() == 1) {
        e.event = PlanEvent::ColumnBeforeUpdate;
        e.event_column = missing.front();
      } else {
        e.event = PlanEvent::RowBeforeUpdate;
      }
      e.message_template = message;
      add(e);
    }
  }

  // demoted relational constraints
  for (const Demotion &d : demotions) {
    PlanEntry e;
    e.table = d.table;
    e.message_template = d.description + " ({constraint}) violated for {table} row {row}";
    switch (d.kind) {
      case Demotion::Kind::UniqueKeyNullable: {
        e.constraint_id = "demoted:uq:" + d.table + ":" + detail::join(d.columns, ".");
        e.event = PlanEvent::RowBeforeUpdate;
        e.strategy = PlanStrategy::UniqueNullsDistinct;
        e.tracked_columns = d.columns;
        e.action_columns = d.columns;
        break;
      }
      case Demotion::Kind::DynamicRangeCheck:
      case Demotion::Kind::ConditionalCheck: {
        e.constraint_id = "demoted:ck:" + d.table +
                          (d.columns.empty() ? "" : ":" + d.columns.front());
        e.strategy = PlanStrategy::RejectCheck;
        e.tracked_columns = d.columns;
        if (d.columns.size() == 1) {
          e.event = PlanEvent::ColumnBeforeUpdate;
          e.event_column = d.columns.front();
        } else {
          e.event = PlanEvent::RowBeforeUpdate;
        }
        break;
      }
      case Demotion::Kind::NondeterministicComputed: {
        e.constraint_id = "demoted:computed:" + d.table + ":" +
                          (d.columns.empty() ? "" : d.columns.front());
        e.event = PlanEvent::RowAfterUpdate;
        e.strategy = PlanStrategy::PropagateUpdate;
        e.action_columns = d.columns;
        // recompute depends on the stored inputs of the expression
        const Table *t = schema.find_table(d.table);
        if (t && !d.columns.empty()) {
          const Column *col = t->find_column(d.columns.front());
          if (col && col->computed_expr) {
            std::vector<int> inputs;
            collect_term_mappings(col->computed_expr, inputs);
            std::set<std::string> names;
            for (int mi : inputs) names.insert(scheme.mappings[mi].name);
            e.tracked_columns.assign(names.begin(), names.end());
          }
        }
        e.message_template = d.table + "." +
                             (d.columns.empty() ? "" : d.columns.front()) +
                             " recomputed for row {row}";
        break;
      }
    }
    add(e);
  }

  return out;
}

/// Machine form of the plan; stable key order, versioned.
inline std::string render_plan_json(const EnforcementPlan &p,
                                    const NonRelationalOutput &residual) {
  nlohmann::ordered_json doc;
  doc["planVersion"] = 1;
  doc["constraints"] = nlohmann::ordered_json::array();

  std::map<std::string, std::string> descriptions;
  for (const auto &e : residual.entries)
    descriptions[e.constraint.label] = e.constraint.description;

  // group by constraint id in first-appearance order
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto &e : p.entries)
    if (seen.insert(e.constraint_id).second) ids.push_back(e.constraint_id);

  for (const auto &id : ids) {
    nlohmann::ordered_json cj;
    cj["id"] = id;
    cj["description"] = descriptions.count(id) ? descriptions[id] : "";
    cj["entries"] = nlohmann::ordered_json::array();
    for (const auto &e : p.entries) {
      if (e.constraint_id != id) continue;
      nlohmann::ordered_json ej;
      ej["table"] = e.table;
      ej["event"] = e.event_string();
      ej["strategy"] = to_string(e.strategy);
      ej["columns"] = e.tracked_columns;
      ej["predicate"] = e.predicate;
      ej["message"] = e.message_template;
      if (!e.action_columns.empty()) ej["actionColumns"] = e.action_columns;
      if (!e.guard.empty()) ej["guard"] = e.guard;
      if (e.new_row_exempt) ej["newRowExempt"] = true;
      if (e.advisory) ej["advisory"] = true;
      cj["entries"].push_back(ej);
    }
    doc["constraints"].push_back(cj);
  }
  return doc.dump(2) + "\n";
}

/// Per-table human outline.
inline std::string render_plan_human(const EnforcementPlan &p) {
  std::ostringstream os;
  std::set<std::string> tables;
  for (const auto &e : p.entries) tables.insert(e.table);
  for (const auto &t : tables) {
    os << t << "\n";
    for (const auto &e : p.entries) {
      if (e.table != t) continue;
      os << "  " << e.event_string() << " -> " << to_string(e.strategy) << " ["
         << e.constraint_id << "]";
      if (!e.tracked_columns.empty()) {
        os << " tracks ";
        for (std::size_t i = 0; i < e.tracked_columns.size(); ++i)
          os << (i ? ", " : "") << e.tracked_columns[i];
      }
      if (e.new_row_exempt) os << " (new rows exempt)";
      if (e.advisory) os << " (advisory)";
      os << "\n";
    }
  }
  for (const auto &w : p.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace mdmc
