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
#include <set>
#include <string>
#include <vector>

#include "mdmc/relational.hpp"
#include "mdmc/scheme.hpp"
#include "mdmc/translator.hpp"

namespace mdmc {

/// Record of unique keys removed because a residual constraint already
/// enforces them, plus advisory notes about checks that are only partially
/// implied and therefore kept.
struct ImplicationReport {
  struct Pruned {
    std::string table;
    std::vector<std::string> key_columns;
    std::string implied_by;  // constraint label
    std::string rule;        // "R1" or "R2"
  };
  std::vector<Pruned> pruned;
  std::vector<std::string> kept_implied;
};

namespace detail {

inline bool erase_key(Table &t, const std::vector<std::string> &cols) {
  UniqueKey probe;
  probe.columns = cols;
  for (std::size_t i = 0; i < t.unique_keys.size(); ++i) {
    if (t.unique_keys[i].same_columns(probe)) {
      t.unique_keys.erase(t.unique_keys.begin() + static_cast<long>(i));
      return true;
    }
  }
  return false;
}

/// R2 is sound only when intervals are well formed: the host table must
/// check hi >= lo, and rows with open ends must have lo bounded by the
/// current year (or hi must be total). Without these, two rows may share
/// group, discriminator, and lo while never "overlapping".
inline bool no_overlap_preconditions_hold(const MdmScheme &scheme, const Table &host,
                                          const Constraint &c) {
  const Mapping &lo = scheme.mappings[c.lo];
  const Mapping &hi = scheme.mappings[c.hi];
  if (!lo.total) return false;

  bool interval_checked = false;
  for (const CheckConstraint &ck : host.checks) {
    // accept either spelling of the interval sanity check
    const FormulaPtr &body = ck.body ? ck.body->body : nullptr;
    if (!body || body->kind != Formula::Kind::Compare) continue;
    auto applies = [](const TermPtr &t, const std::string &name) {
      return t && t->kind == Term::Kind::Apply && t->name == name;
    };
    bool hi_ge_lo = body->op == CompareOp::Ge && applies(body->tl, hi.name) &&
                    applies(body->tr, lo.name);
    bool lo_le_hi = body->op == CompareOp::Le && applies(body->tl, lo.name) &&
                    applies(body->tr, hi.name);
    if (hi_ge_lo || lo_le_hi) interval_checked = true;
  }
  if (!interval_checked) return false;

  if (hi.total) return true;
  return lo.codomain_type.kind == ValueType::Kind::IntegerRange &&
         lo.codomain_type.hi.is_current_year;
}

}  // namespace detail

/// Prunes unique keys provably implied by residual constraints.
///
///   R1  a null-reflexive composition implies the single-column key on its
///       inner function: two rows sharing the inner value would have to be
///       the same row.
///   R2  an interval no-overlap constraint implies the keys
///       group+{distinct, lo} and group+{distinct, hi}.
///
/// Only unique keys are touched; primary keys, foreign keys, not-nulls and
/// checks always stay.
inline ImplicationReport analyze(const MdmScheme &scheme, RelationalSchema &schema,
                                 const NonRelationalOutput &residual) {
  ImplicationReport report;

  for (const auto &entry : residual.entries) {
    const Constraint &c = entry.constraint;
    if (c.kind == Constraint::Kind::NullReflexive) {
      const Mapping &inner = scheme.mappings[c.inner];
      Table *host = schema.find_table(scheme.sets[inner.domain].name);
      if (!host) continue;
      if (detail::erase_key(*host, {inner.name}))
        report.pruned.push_back({host->name, {inner.name}, c.label, "R1"});
    } else if (c.kind == Constraint::Kind::NoOverlap) {
      Table *host = schema.find_table(scheme.sets[c.host_set].name);
      if (!host) continue;
      if (!detail::no_overlap_preconditions_hold(scheme, *host, c)) continue;
      std::vector<std::string> base;
      for (int gi : c.group) base.push_back(scheme.mappings[gi].name);
      base.push_back(scheme.mappings[c.distinct_on].name);
      std::vector<std::string> with_lo = base, with_hi = base;
      with_lo.push_back(scheme.mappings[c.lo].name);
      with_hi.push_back(scheme.mappings[c.hi].name);
      if (detail::erase_key(*host, with_lo))
        report.pruned.push_back({host->name, with_lo, c.label, "R2"});
      if (detail::erase_key(*host, with_hi))
        report.pruned.push_back({host->name, with_hi, c.label, "R2"});
    }
  }

  // Advisory: a guarded non-negativity bound on a column computed as
  // coalesce(b, currentYear()) - a implies the plain tuple check a <= b for
  // rows passing the guard; the check stays because of the guard.
  for (const auto &entry : residual.entries) {
    const Constraint &c = entry.constraint;
    if (c.kind != Constraint::Kind::ObjectFormula || !c.formula) continue;
    std::vector<int> used;
    collect_formula_mappings(c.formula, used);
    for (int mi : used) {
      const Mapping &m = scheme.mappings[mi];
      if (m.kind != Mapping::Kind::ComputedAttribute || !m.compute_expr) continue;
      const TermPtr &e = m.compute_expr;
      if (e->kind != Term::Kind::Sub || !e->lhs || e->lhs->kind != Term::Kind::Coalesce)
        continue;
      const TermPtr &fallback = e->lhs->rhs;
      if (!fallback || fallback->kind != Term::Kind::CurrentYear) continue;
      const TermPtr &b = e->lhs->lhs;  // coalesce(b, currentYear()) - a
      const TermPtr &a = e->rhs;
      if (!a || !b || a->kind != Term::Kind::Apply || b->kind != Term::Kind::Apply)
        continue;
      Table *host = schema.find_table(scheme.sets[m.domain].name);
      if (!host) continue;
      for (const CheckConstraint &ck : host->checks) {
        const FormulaPtr &body = ck.body ? ck.body->body : nullptr;
        if (!body || body->kind != Formula::Kind::Compare) continue;
        bool matches = (body->op == CompareOp::Le && term_equal(body->tl, a) &&
                        term_equal(body->tr, b)) ||
                       (body->op == CompareOp::Ge && term_equal(body->tl, b) &&
                        term_equal(body->tr, a));
        if (matches)
          report.kept_implied.push_back(
              c.label + " implies check " + ck.label + " (" +
              formula_to_string(body) + ") on " + host->name +
              " for rows passing its guard; the check is kept");
      }
    }
  }

  std::sort(report.kept_implied.begin(), report.kept_implied.end());
  report.kept_implied.erase(
      std::unique(report.kept_implied.begin(), report.kept_implied.end()),
      report.kept_implied.end());
  return report;
}

}  // namespace mdmc
