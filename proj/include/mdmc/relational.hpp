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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdmc/formula.hpp"
#include "mdmc/value.hpp"

namespace mdmc {

struct Column {
  std::string name;
  ValueType type;
  TermPtr computed_expr;     // non-null for derived columns
  int mapping = -1;          // back-reference into MdmScheme::mappings
  bool coded_domain = false; // references a non-materialized static set
  int coded_max = 0;         // 1..coded_max when coded_domain
  std::vector<ValueType> restrictions;  // declared range narrowings
  std::string default_literal;          // empty = no default
};

struct ForeignKey {
  std::string column;
  std::string ref_table;            // referenced column is always x
  std::int64_t max_value = 0;       // from the target's cardinality restriction
  bool deferred = false;            // emitted as a post-creation alteration
  int mapping = -1;
};

struct CheckConstraint {
  std::string label;
  FormulaPtr body;                  // closed, one universal variable
  std::string description;
};

struct UniqueKey {
  std::vector<std::string> columns;
  std::string label;

  bool same_columns(const UniqueKey &o) const {
    if (columns.size() != o.columns.size()) return false;
    std::set<std::string> a(columns.begin(), columns.end());
    std::set<std::string> b(o.columns.begin(), o.columns.end());
    return a == b;
  }
};

struct Table {
  std::string name;
  int set_index = -1;
  std::vector<Column> columns;
  std::string primary_key = "x";
  std::optional<std::int64_t> pk_max;   // autonumber bound; absent for subset tables
  std::vector<UniqueKey> unique_keys;
  std::vector<ForeignKey> foreign_keys;
  std::vector<CheckConstraint> checks;
  std::set<std::string> not_null;

  const Column *find_column(const std::string &n) const {
    for (const auto &c : columns)
      if (c.name == n) return &c;
    return nullptr;
  }
  int column_index(const std::string &n) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].name == n) return static_cast<int>(i);
    return -1;
  }
};

struct RelationalSchema {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, std::string>> views;  // name, body

  const Table *find_table(const std::string &n) const {
    for (const auto &t : tables)
      if (t.name == n) return &t;
    return nullptr;
  }
  Table *find_table(const std::string &n) {
    for (auto &t : tables)
      if (t.name == n) return &t;
    return nullptr;
  }
};

/// Step accounting of one translation run. The step identity
/// steps = e + r + a + f + rc + nrc holds by construction.
struct TranslationReport {
  int entity_sets = 0;        // e (computed sets included)
  int relationship_sets = 0;  // r
  int attributes = 0;         // a (object identifiers included)
  int structural = 0;         // f (projections and inclusions included)
  int relational = 0;         // rc
  int non_relational = 0;     // nrc
  long long steps = 0;

  // rc by category
  int pks = 0;
  int pk_domains = 0;
  int pk_not_nulls = 0;
  int not_nulls = 0;
  int domains = 0;
  int fks = 0;
  int uniques = 0;
  int tuple_checks = 0;
  int defaults = 0;

  struct PerTable {
    int pk = 0, not_null = 0, domain = 0, fk = 0, unique = 0, check = 0, dflt = 0;
  };
  std::map<std::string, PerTable> per_table;
};

}  // namespace mdmc
