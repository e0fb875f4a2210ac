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

#include <sstream>
#include <string>

#include "mdmc/scheme.hpp"

namespace mdmc {

namespace detail {
inline std::string escape_dq(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '"') out += '\\';
    out += c;
  }
  return out;
}
}  // namespace detail

/// Writes a scheme back to source text. Synthesized functions (object
/// identifiers, inclusion witnesses) are omitted; reparsing restores them.
inline std::string serialize_scheme(const MdmScheme &s) {
  std::ostringstream os;

  for (const ObjectSet &set : s.sets) {
    os << "set " << set.name << " ";
    switch (set.kind) {
      case ObjectSet::Kind::Entity: os << "entity"; break;
      case ObjectSet::Kind::Relationship: os << "relationship"; break;
      case ObjectSet::Kind::StaticEnum: os << "static"; break;
      case ObjectSet::Kind::ComputedView: os << "computed"; break;
    }
    if (set.card_exponent > 0 && !set.is_subset() &&
        set.kind != ObjectSet::Kind::StaticEnum &&
        set.kind != ObjectSet::Kind::ComputedView)
      os << " card " << set.card_exponent;
    if (set.is_subset()) {
      os << " subset-of ";
      for (std::size_t i = 0; i < set.supersets.size(); ++i)
        os << (i ? ", " : "") << set.supersets[i];
    }
    if (!set.members.empty()) {
      os << " { ";
      for (std::size_t i = 0; i < set.members.size(); ++i)
        os << (i ? ", " : "") << "'" << set.members[i] << "'";
      os << " }";
    }
    if (!set.view_body.empty()) os << " view \"" << detail::escape_dq(set.view_body) << "\"";
    os << ";\n";
  }
  if (!s.sets.empty()) os << "\n";

  for (const Mapping &m : s.mappings) {
    if (m.kind == Mapping::Kind::ObjectIdentifier ||
        m.kind == Mapping::Kind::CanonicalInclusion)
      continue;
    os << "fun " << m.name << " : " << s.sets[m.domain].name << " -> ";
    if (m.has_set_codomain()) os << s.sets[m.codomain_set].name;
    else os << m.codomain_type.to_string();
    if (m.total && m.kind != Mapping::Kind::CanonicalProjection) os << " total";
    if (m.kind == Mapping::Kind::ComputedAttribute)
      os << " computed \"" << detail::escape_dq(term_to_string(m.compute_expr)) << "\"";
    os << ";\n";
  }
  if (!s.mappings.empty()) os << "\n";

  for (const Constraint &c : s.constraints) {
    switch (c.kind) {
      case Constraint::Kind::Key: {
        os << "key " << s.sets[s.mappings[c.product.front()].domain].name << "(";
        for (std::size_t i = 0; i < c.product.size(); ++i)
          os << (i ? " . " : "") << s.mappings[c.product[i]].name;
        os << ");\n";
        break;
      }
      case Constraint::Kind::Range: {
        os << "range " << s.mapping_display(c.mapping) << " ["
           << (c.range.lo.is_current_year ? "currentYear()"
                                          : std::to_string(c.range.lo.value))
           << ", "
           << (c.range.hi.is_current_year ? "currentYear()"
                                          : std::to_string(c.range.hi.value))
           << "];\n";
        break;
      }
      case Constraint::Kind::Default:
        os << "default " << s.mapping_display(c.mapping) << " " << c.default_literal
           << ";\n";
        break;
      case Constraint::Kind::Tuple:
        os << "constraint " << c.label << " tuple " << s.sets[c.host_set].name << " \""
           << detail::escape_dq(formula_to_string(c.formula->body)) << "\" \""
           << detail::escape_dq(c.description) << "\";\n";
        break;
      case Constraint::Kind::NullReflexive:
        os << "constraint " << c.label << " null-reflexive " << s.mappings[c.outer].name
           << " o " << s.mapping_display(c.inner) << " \""
           << detail::escape_dq(c.description) << "\";\n";
        break;
      case Constraint::Kind::Acyclic:
        os << "constraint " << c.label << " acyclic " << s.mapping_display(c.mapping)
           << " \"" << detail::escape_dq(c.description) << "\";\n";
        break;
      case Constraint::Kind::Existence:
        os << "constraint " << c.label << " existence "
           << s.mapping_display(c.if_mapping) << " -> "
           << s.mappings[c.then_mapping].name << " \""
           << detail::escape_dq(c.description) << "\";\n";
        break;
      case Constraint::Kind::NoOverlap: {
        os << "constraint " << c.label << " no-overlap " << s.sets[c.host_set].name
           << " distinct " << s.mappings[c.distinct_on].name;
        if (!c.group.empty()) {
          os << " group ";
          for (std::size_t i = 0; i < c.group.size(); ++i)
            os << (i ? ", " : "") << s.mappings[c.group[i]].name;
        }
        os << " interval " << s.mappings[c.lo].name << ", " << s.mappings[c.hi].name
           << " \"" << detail::escape_dq(c.description) << "\";\n";
        break;
      }
      case Constraint::Kind::ObjectFormula:
        os << "constraint " << c.label << " object \""
           << detail::escape_dq(formula_to_string(c.formula)) << "\" \""
           << detail::escape_dq(c.description) << "\";\n";
        break;
      default:
        break;  // synthesized kinds never sit in scheme.constraints
    }
  }
  return os.str();
}

inline bool mapping_equal(const MdmScheme &sa, const Mapping &a, const MdmScheme &sb,
                          const Mapping &b) {
  if (a.name != b.name || a.kind != b.kind || a.total != b.total) return false;
  if (sa.sets[a.domain].name != sb.sets[b.domain].name) return false;
  if (a.has_set_codomain() != b.has_set_codomain()) return false;
  if (a.has_set_codomain()) {
    if (sa.sets[a.codomain_set].name != sb.sets[b.codomain_set].name) return false;
  } else if (!(a.codomain_type == b.codomain_type)) {
    return false;
  }
  return term_equal(a.compute_expr, b.compute_expr);
}

/// Structural scheme equality (order-sensitive, spans ignored).
inline bool scheme_equal(const MdmScheme &a, const MdmScheme &b) {
  if (a.sets.size() != b.sets.size() || a.mappings.size() != b.mappings.size() ||
      a.constraints.size() != b.constraints.size())
    return false;
  for (std::size_t i = 0; i < a.sets.size(); ++i) {
    const ObjectSet &x = a.sets[i], &y = b.sets[i];
    if (x.name != y.name || x.kind != y.kind || x.card_exponent != y.card_exponent ||
        x.supersets != y.supersets || x.view_body != y.view_body ||
        x.members != y.members)
      return false;
  }
  for (std::size_t i = 0; i < a.mappings.size(); ++i)
    if (!mapping_equal(a, a.mappings[i], b, b.mappings[i])) return false;
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    const Constraint &x = a.constraints[i], &y = b.constraints[i];
    if (x.kind != y.kind || x.label != y.label || x.description != y.description)
      return false;
    auto mname = [](const MdmScheme &s, int mi) {
      return mi < 0 ? std::string() : s.mapping_display(mi);
    };
    if (mname(a, x.mapping) != mname(b, y.mapping)) return false;
    if (x.product.size() != y.product.size()) return false;
    for (std::size_t j = 0; j < x.product.size(); ++j)
      if (mname(a, x.product[j]) != mname(b, y.product[j])) return false;
    if (!(x.range == y.range) || x.default_literal != y.default_literal) return false;
    if (mname(a, x.outer) != mname(b, y.outer) || mname(a, x.inner) != mname(b, y.inner))
      return false;
    if (mname(a, x.if_mapping) != mname(b, y.if_mapping) ||
        mname(a, x.then_mapping) != mname(b, y.then_mapping))
      return false;
    if (mname(a, x.distinct_on) != mname(b, y.distinct_on) ||
        mname(a, x.lo) != mname(b, y.lo) || mname(a, x.hi) != mname(b, y.hi))
      return false;
    if (x.group.size() != y.group.size()) return false;
    for (std::size_t j = 0; j < x.group.size(); ++j)
      if (mname(a, x.group[j]) != mname(b, y.group[j])) return false;
    if (!formula_equal(x.formula, y.formula)) return false;
  }
  return true;
}

}  // namespace mdmc
