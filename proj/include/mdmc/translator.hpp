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
#include <stdexcept>
#include <string>
#include <vector>

#include "mdmc/relational.hpp"
#include "mdmc/scheme.hpp"
#include "mdmc/validate.hpp"

namespace mdmc {

/// Bottom-up processing order of the object sets: a topological order of the
/// strongly connected components of the structural-reference graph.
/// Components are scheduled referenced-first; among simultaneously ready
/// components, sets that reference nothing at all go first, then declaration
/// order decides. Components larger than one set force deferred foreign keys.
struct SetOrder {
  std::vector<int> order;                 // set indices
  std::vector<std::vector<int>> scc_groups;  // components of size > 1

  int position(int set_index) const {
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] == set_index) return static_cast<int>(i);
    return -1;
  }
};

inline SetOrder order_sets(const MdmScheme &scheme) {
  const int n = static_cast<int>(scheme.sets.size());
  std::vector<std::set<int>> refs(n);  // i references j
  for (const Mapping &m : scheme.mappings)
    if (m.is_structural_like() && m.has_set_codomain())
      refs[m.domain].insert(m.codomain_set);

  // Tarjan for components.
  std::vector<int> comp(n, -1), low(n, 0), idx(n, -1), stack;
  std::vector<bool> on_stack(n, false);
  int counter = 0, ncomp = 0;
  std::vector<std::vector<int>> members;
  std::function<void(int)> strongconnect = [&](int v) {
    idx[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : refs[v]) {
      if (idx[w] < 0) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], idx[w]);
      }
    }
    if (low[v] == idx[v]) {
      std::vector<int> group;
      for (;;) {
        int w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
        group.push_back(w);
        if (w == v) break;
      }
      std::sort(group.begin(), group.end());  // declaration order inside
      members.push_back(std::move(group));
      ++ncomp;
    }
  };
  for (int v = 0; v < n; ++v)
    if (idx[v] < 0) strongconnect(v);

  // Condensation edges: component -> components it references.
  std::vector<std::set<int>> cedges(ncomp);
  std::vector<int> indeg(ncomp, 0);
  for (int v = 0; v < n; ++v)
    for (int w : refs[v])
      if (comp[v] != comp[w]) cedges[comp[v]].insert(comp[w]);
  // schedule referenced-first: an edge a->b means b must precede a
  std::vector<std::set<int>> waiters(ncomp);
  for (int a = 0; a < ncomp; ++a)
    for (int b : cedges[a]) {
      waiters[b].insert(a);
      ++indeg[a];
    }

  auto references_nothing = [&](int ci) {
    for (int v : members[ci])
      if (!refs[v].empty()) return false;
    return true;
  };
  auto rank = [&](int ci) {
    return std::make_pair(references_nothing(ci) ? 0 : 1, members[ci].front());
  };

  SetOrder out;
  std::set<std::pair<std::pair<int, int>, int>> ready;
  for (int ci = 0; ci < ncomp; ++ci)
    if (indeg[ci] == 0) ready.insert({rank(ci), ci});
  while (!ready.empty()) {
    int ci = ready.begin()->second;
    ready.erase(ready.begin());
    for (int v : members[ci]) out.order.push_back(v);
    if (members[ci].size() > 1) out.scc_groups.push_back(members[ci]);
    for (int a : waiters[ci])
      if (--indeg[a] == 0) ready.insert({rank(a), a});
  }
  return out;
}

/// Residual constraints the relational schema cannot carry.
struct NonRelationalOutput {
  struct Entry {
    Constraint constraint;
    std::vector<std::string> host_sets;
    std::string provenance;  // constraint label
  };
  std::vector<Entry> entries;
};

struct TranslationResult {
  RelationalSchema schema;
  NonRelationalOutput residual;
  TranslationReport report;
  SetOrder order;
  std::vector<Constraint> expanded;         // the partitioned constraint list
  std::map<int, std::pair<std::string, std::string>> mapping_columns;  // mapping -> (table, column)
};

namespace detail {

/// True when a set materializes as a table (entity/relationship sets do;
/// static value sets become coded domains; computed sets become views).
inline bool materializes(const ObjectSet &s) {
  return s.kind == ObjectSet::Kind::Entity || s.kind == ObjectSet::Kind::Relationship;
}

/// Subset sets share the surrogate space of their root superset.
inline int effective_card_exponent(const MdmScheme &scheme, int si) {
  int guard = static_cast<int>(scheme.sets.size()) + 1;
  while (scheme.sets[si].is_subset() && guard-- > 0) {
    int parent = scheme.find_set(scheme.sets[si].supersets.front());
    if (parent < 0) break;
    si = parent;
  }
  return scheme.sets[si].card_exponent;
}

/// A declared tuple constraint stays in the table schema only when it reads
/// plain stored columns of its host: every function applied directly to the
/// row variable, none computed, no nesting. Anything else joins the residual
/// set.
inline bool tuple_is_relational(const MdmScheme &scheme, const Constraint &c) {
  if (!c.formula || c.formula->kind != Formula::Kind::Forall) return false;
  bool ok = true;
  std::function<void(const TermPtr &)> walk_term = [&](const TermPtr &t) {
    if (!t || !ok) return;
    if (t->kind == Term::Kind::Apply) {
      if (t->mapping < 0 || !t->lhs || t->lhs->kind != Term::Kind::Var) {
        ok = false;
        return;
      }
      const Mapping &m = scheme.mappings[t->mapping];
      if (m.domain != c.host_set || m.kind == Mapping::Kind::ComputedAttribute) ok = false;
      return;
    }
    walk_term(t->lhs);
    walk_term(t->rhs);
  };
  std::function<void(const FormulaPtr &)> walk = [&](const FormulaPtr &f) {
    if (!f || !ok) return;
    if (f->kind == Formula::Kind::Forall || f->kind == Formula::Kind::Exists) {
      if (f != c.formula) { ok = false; return; }
      walk(f->body);
      return;
    }
    walk_term(f->tl);
    walk_term(f->tr);
    walk(f->left);
    walk(f->right);
    walk(f->body);
  };
  walk(c.formula);
  return ok;
}

inline ValueType fk_column_type(const MdmScheme &scheme, int target_si) {
  return ValueType::autonumber(effective_card_exponent(scheme, target_si));
}

}  // namespace detail

/// Algorithm M-R. Walks the object sets bottom-up, creates one table per
/// materializable set and one view per computed set, spreads the expanded
/// constraint list over the table schemas, and routes whatever the schema
/// cannot express into the residual set. Counts every set, function, and
/// constraint exactly once.
inline TranslationResult translate(const MdmScheme &scheme) {
  {
    auto diags = validate_scheme(scheme);
    if (has_errors(diags))
      throw std::invalid_argument("translate: scheme fails validation: " +
                                  diags.front().message);
  }

  TranslationResult res;
  res.order = order_sets(scheme);
  res.expanded = expand_constraints(scheme);
  auto by_set = mappings_by_set(scheme);

  TranslationReport &rep = res.report;
  for (const ObjectSet &s : scheme.sets) {
    if (s.kind == ObjectSet::Kind::Relationship) ++rep.relationship_sets;
    else ++rep.entity_sets;
  }
  for (const Mapping &m : scheme.mappings) {
    if (m.is_attribute_like()) ++rep.attributes;
    else ++rep.structural;
  }

  // entity-kind sets first, then relationship sets, both in dependency order
  std::vector<int> processing;
  for (int si : res.order.order)
    if (scheme.sets[si].kind == ObjectSet::Kind::Entity ||
        scheme.sets[si].kind == ObjectSet::Kind::ComputedView)
      processing.push_back(si);
  for (int si : res.order.order)
    if (scheme.sets[si].kind == ObjectSet::Kind::Relationship) processing.push_back(si);

  // creation position decides which foreign keys must wait for phase 2
  std::map<int, int> table_pos;
  {
    int pos = 0;
    for (int si : processing)
      if (detail::materializes(scheme.sets[si])) table_pos[si] = pos++;
  }

  auto &per_table = rep.per_table;

  for (int si : processing) {
    const ObjectSet &set = scheme.sets[si];
    if (set.kind == ObjectSet::Kind::ComputedView) {
      res.schema.views.emplace_back(set.name, set.view_body);
      continue;
    }

    Table t;
    t.name = set.name;
    t.set_index = si;

    Column x;
    x.name = "x";
    x.mapping = object_identifier_in(scheme, by_set[static_cast<std::size_t>(si)]);
    x.type = ValueType::autonumber(detail::effective_card_exponent(scheme, si));
    t.columns.push_back(x);
    t.not_null.insert("x");
    if (!set.is_subset()) t.pk_max = x.type.autonumber_max();

    int inclusions_seen = 0;
    for (int mi : by_set[static_cast<std::size_t>(si)]) {
      const Mapping &m = scheme.mappings[mi];
      switch (m.kind) {
        case Mapping::Kind::ObjectIdentifier:
          res.mapping_columns[mi] = {set.name, "x"};
          break;
        case Mapping::Kind::CanonicalInclusion: {
          const ObjectSet &target = scheme.sets[m.codomain_set];
          std::string col = inclusions_seen == 0 ? "x" : m.name;
          if (inclusions_seen > 0) {
            Column c;
            c.name = col;
            c.mapping = mi;
            c.type = detail::fk_column_type(scheme, m.codomain_set);
            t.columns.push_back(c);
          }
          ForeignKey fk;
          fk.column = col;
          fk.ref_table = target.name;
          fk.max_value = detail::fk_column_type(scheme, m.codomain_set).autonumber_max();
          fk.mapping = mi;
          fk.deferred = table_pos.count(m.codomain_set) &&
                        table_pos[m.codomain_set] >= table_pos[si];
          t.foreign_keys.push_back(fk);
          res.mapping_columns[mi] = {set.name, col};
          ++inclusions_seen;
          break;
        }
        case Mapping::Kind::Structural:
        case Mapping::Kind::CanonicalProjection: {
          // addForeignKey: numeric column; reference when the target is a
          // table, otherwise code the static target's members 1..n
          const ObjectSet &target = scheme.sets[m.codomain_set];
          Column c;
          c.name = m.name;
          c.mapping = mi;
          if (detail::materializes(target)) {
            c.type = detail::fk_column_type(scheme, m.codomain_set);
            t.columns.push_back(c);
            ForeignKey fk;
            fk.column = m.name;
            fk.ref_table = target.name;
            fk.max_value = detail::fk_column_type(scheme, m.codomain_set).autonumber_max();
            fk.mapping = mi;
            fk.deferred = table_pos.count(m.codomain_set) &&
                          table_pos[m.codomain_set] >= table_pos[si];
            t.foreign_keys.push_back(fk);
          } else {
            c.coded_domain = true;
            c.coded_max = static_cast<int>(target.members.size());
            c.type = ValueType::integer_range(Bound::fixed(1),
                                              Bound::fixed(c.coded_max));
            t.columns.push_back(c);
          }
          res.mapping_columns[mi] = {set.name, m.name};
          break;
        }
        case Mapping::Kind::Attribute:
        case Mapping::Kind::ComputedAttribute: {
          // addColumn: domain constraint from the codomain, computation kept
          Column c;
          c.name = m.name;
          c.mapping = mi;
          c.type = m.codomain_type;
          c.computed_expr = m.compute_expr;
          t.columns.push_back(c);
          res.mapping_columns[mi] = {set.name, m.name};
          break;
        }
      }
    }
    res.schema.tables.push_back(std::move(t));
  }

  // Partition the expanded constraint list.
  std::map<std::string, std::size_t> table_index;
  for (std::size_t ti = 0; ti < res.schema.tables.size(); ++ti)
    table_index[res.schema.tables[ti].name] = ti;
  auto table_by_name = [&](const std::string &n) -> Table * {
    auto it = table_index.find(n);
    return it == table_index.end() ? nullptr : &res.schema.tables[it->second];
  };
  for (const Constraint &c : res.expanded) {
    auto host_table = [&](int mi) -> Table * {
      auto it = res.mapping_columns.find(mi);
      if (it == res.mapping_columns.end()) return nullptr;
      return table_by_name(it->second.first);
    };
    bool relational = false;
    switch (c.kind) {
      case Constraint::Kind::Key: {
        Table *t = host_table(c.product.front());
        if (!t) break;
        if (c.primary) {
          ++rep.pks;
          ++per_table[t->name].pk;
        } else {
          UniqueKey uq;
          uq.label = c.label;
          for (int mi : c.product) uq.columns.push_back(res.mapping_columns[mi].second);
          t->unique_keys.push_back(std::move(uq));
          ++rep.uniques;
          ++per_table[t->name].unique;
        }
        relational = true;
        break;
      }
      case Constraint::Kind::Totality: {
        Table *t = host_table(c.mapping);
        if (!t) break;
        const std::string &col = res.mapping_columns[c.mapping].second;
        t->not_null.insert(col);
        if (scheme.mappings[c.mapping].kind == Mapping::Kind::ObjectIdentifier) {
          ++rep.pk_not_nulls;
        } else {
          ++rep.not_nulls;
          ++per_table[t->name].not_null;
        }
        relational = true;
        break;
      }
      case Constraint::Kind::Range: {
        Table *t = host_table(c.mapping);
        if (!t) break;
        if (scheme.mappings[c.mapping].kind == Mapping::Kind::ObjectIdentifier) {
          ++rep.pk_domains;
        } else {
          ++rep.domains;
          ++per_table[t->name].domain;
        }
        // declared narrowings ride on the column next to its base type
        if (!c.synthesized) {
          int ci = t->column_index(res.mapping_columns[c.mapping].second);
          if (ci >= 0) t->columns[static_cast<std::size_t>(ci)].restrictions.push_back(c.range);
        }
        relational = true;
        break;
      }
      case Constraint::Kind::Default: {
        Table *t = host_table(c.mapping);
        if (!t) break;
        int ci = t->column_index(res.mapping_columns[c.mapping].second);
        if (ci >= 0) t->columns[static_cast<std::size_t>(ci)].default_literal = c.default_literal;
        ++rep.defaults;
        ++per_table[t->name].dflt;
        relational = true;
        break;
      }
      case Constraint::Kind::ForeignKeyRef: {
        Table *t = host_table(c.mapping);
        if (!t) break;
        const Mapping &m = scheme.mappings[c.mapping];
        if (detail::materializes(scheme.sets[m.codomain_set])) {
          ++rep.fks;
          ++per_table[t->name].fk;
        } else {
          // coded domain restriction instead of a reference
          ++rep.domains;
          ++per_table[t->name].domain;
        }
        relational = true;
        break;
      }
      case Constraint::Kind::Tuple: {
        if (detail::tuple_is_relational(scheme, c)) {
          Table *t = table_by_name(scheme.sets[c.host_set].name);
          if (!t) break;
          t->checks.push_back({c.label, c.formula, c.description});
          ++rep.tuple_checks;
          ++per_table[t->name].check;
          relational = true;
        }
        break;
      }
      default:
        break;
    }
    if (!relational) {
      NonRelationalOutput::Entry e;
      e.constraint = c;
      e.provenance = c.label;
      for (int si : constraint_sets(scheme, c)) e.host_sets.push_back(scheme.sets[si].name);
      res.residual.entries.push_back(std::move(e));
      ++rep.non_relational;
    } else {
      ++rep.relational;
    }
  }

  rep.steps = static_cast<long long>(rep.entity_sets) + rep.relationship_sets +
              rep.attributes + rep.structural + rep.relational + rep.non_relational;
  return res;
}

}  // namespace mdmc
