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
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdmc/csv.hpp"
#include "mdmc/translator.hpp"

namespace mdmc {

/// Tabular instance data: per table, rows keyed by the surrogate x, cells in
/// schema column order. currentYear is pinned configuration, never the wall
/// clock, so checking runs are reproducible.
struct Instance {
  using Row = std::vector<Value>;
  std::map<std::string, std::map<std::int64_t, Row>> tables;
  int current_year = 2026;

  const Row *find_row(const std::string &table, std::int64_t x) const {
    auto t = tables.find(table);
    if (t == tables.end()) return nullptr;
    auto r = t->second.find(x);
    return r == t->second.end() ? nullptr : &r->second;
  }
  Row *find_row(const std::string &table, std::int64_t x) {
    auto t = tables.find(table);
    if (t == tables.end()) return nullptr;
    auto r = t->second.find(x);
    return r == t->second.end() ? nullptr : &r->second;
  }

  bool operator==(const Instance &o) const {
    return current_year == o.current_year && tables == o.tables;
  }
};

namespace detail {

inline Value parse_cell(const std::string &cell, const ValueType &type,
                        const std::string &where) {
  if (cell.empty()) return Value{};
  if (type.kind == ValueType::Kind::Text || type.kind == ValueType::Kind::EnumLiterals)
    return Value{cell};
  try {
    std::size_t used = 0;
    std::int64_t v = std::stoll(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return Value{v};
  } catch (const std::exception &) {
    throw std::runtime_error(where + ": cannot parse '" + cell + "' as an integer");
  }
}

}  // namespace detail

}  // namespace mdmc
