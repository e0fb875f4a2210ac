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
#include <string>
#include <vector>

#include "mdmc/formula.hpp"
#include "mdmc/value.hpp"

namespace mdmc {

/// An object set of the data model: entity, relationship, static value set,
/// or computed (view) set.
struct ObjectSet {
  enum class Kind { Entity, Relationship, StaticEnum, ComputedView };

  std::string name;
  Kind kind = Kind::Entity;
  int card_exponent = 0;                  // auto(k); 0 when not applicable
  std::vector<std::string> supersets;     // set inclusions, declaration order
  std::string view_body;                  // ComputedView only
  std::vector<std::string> members;       // StaticEnum only, declaration order

  bool is_subset() const { return !supersets.empty(); }
};

/// A function of the scheme. The object identifier x of each non-view set is
/// synthesized, never written in source.
struct Mapping {
  enum class Kind {
    ObjectIdentifier,
    Attribute,
    Structural,
    CanonicalProjection,
    CanonicalInclusion,
    ComputedAttribute,
  };

  std::string name;
  int domain = -1;                 // index into MdmScheme::sets
  int codomain_set = -1;           // set index, or -1 when codomain is a value type
  ValueType codomain_type;         // valid when codomain_set < 0
  Kind kind = Kind::Attribute;
  bool total = false;
  TermPtr compute_expr;            // ComputedAttribute only, one free variable x

  bool has_set_codomain() const { return codomain_set >= 0; }
  bool is_structural_like() const {
    return kind == Kind::Structural || kind == Kind::CanonicalProjection ||
           kind == Kind::CanonicalInclusion;
  }
  bool is_attribute_like() const {
    return kind == Kind::Attribute || kind == Kind::ComputedAttribute ||
           kind == Kind::ObjectIdentifier;
  }
};

/// One constraint, declared or synthesized by expansion. A single struct
/// with kind-dependent fields keeps the taxonomy flat and printable.
struct Constraint {
  enum class Kind {
    Totality,       // mapping must be non-null
    Key,            // product of mappings unique (nulls distinct)
    Range,          // mapping values restricted to `range`
    Default,        // default literal for mapping
    ForeignKeyRef,  // synthesized: structural mapping references target's x
    Tuple,          // row-local check on host set, one universal variable
    NullReflexive,  // outer(inner(a)) = a wherever inner(a) is non-null
    Acyclic,        // self-mapping chain has no cycles
    Existence,      // if_mapping non-null forces then_mapping non-null
    NoOverlap,      // interval-exclusive uniqueness macro
    ObjectFormula,  // general closed formula
  };

  std::string label;
  Kind kind = Kind::ObjectFormula;
  std::string description;
  bool synthesized = false;

  int mapping = -1;                // Totality/Range/Default/ForeignKeyRef/Acyclic
  std::vector<int> product;        // Key
  bool primary = false;            // Key synthesized for x
  ValueType range;                 // Range
  std::string default_literal;     // Default
  int host_set = -1;               // Tuple/NoOverlap, and quantified set of simple formulas
  FormulaPtr formula;              // Tuple (closed forall) / ObjectFormula
  int outer = -1, inner = -1;      // NullReflexive
  int if_mapping = -1, then_mapping = -1;  // Existence
  int distinct_on = -1;            // NoOverlap
  std::vector<int> group;          // NoOverlap
  int lo = -1, hi = -1;            // NoOverlap

  bool is_relational_kind() const {
    switch (kind) {
      case Kind::Totality:
      case Kind::Key:
      case Kind::Range:
      case Kind::Default:
      case Kind::ForeignKeyRef:
      case Kind::Tuple:
        return true;
      default:
        return false;
    }
  }
};

inline const char *to_string(Constraint::Kind k) {
  switch (k) {
    case Constraint::Kind::Totality: return "totality";
    case Constraint::Kind::Key: return "key";
    case Constraint::Kind::Range: return "range";
    case Constraint::Kind::Default: return "default";
    case Constraint::Kind::ForeignKeyRef: return "foreign-key";
    case Constraint::Kind::Tuple: return "tuple";
    case Constraint::Kind::NullReflexive: return "null-reflexive";
    case Constraint::Kind::Acyclic: return "acyclic";
    case Constraint::Kind::Existence: return "existence";
    case Constraint::Kind::NoOverlap: return "no-overlap";
    case Constraint::Kind::ObjectFormula: return "object";
  }
  return "?";
}

/// A whole scheme: sets, mappings (including synthesized identifiers), and
/// declared constraints, all in declaration order.
struct MdmScheme {
  std::vector<ObjectSet> sets;
  std::vector<Mapping> mappings;
  std::vector<Constraint> constraints;

  int find_set(const std::string &name) const {
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (sets[i].name == name) return static_cast<int>(i);
    return -1;
  }

  /// Mapping by (name, domain set); domain < 0 matches any domain but the
  /// name must then be unambiguous (returns -2 on ambiguity).
  int find_mapping(const std::string &name, int domain = -1) const {
    int found = -1;
    for (std::size_t i = 0; i < mappings.size(); ++i) {
      if (mappings[i].name != name) continue;
      if (domain >= 0) {
        if (mappings[i].domain == domain) return static_cast<int>(i);
        continue;
      }
      if (found >= 0) return -2;
      found = static_cast<int>(i);
    }
    return found;
  }

  std::vector<int> mappings_on(int set_index) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < mappings.size(); ++i)
      if (mappings[i].domain == set_index) out.push_back(static_cast<int>(i));
    return out;
  }

  int object_identifier_of(int set_index) const {
    for (std::size_t i = 0; i < mappings.size(); ++i)
      if (mappings[i].domain == set_index &&
          mappings[i].kind == Mapping::Kind::ObjectIdentifier)
        return static_cast<int>(i);
    return -1;
  }

  const ObjectSet &set_of_mapping(int mi) const { return sets[mappings[mi].domain]; }

  std::string mapping_display(int mi) const {
    const Mapping &m = mappings[mi];
    return sets[m.domain].name + "." + m.name;
  }
};

/// Per-set mapping indices in declaration order, computed once; the
/// per-call scans in MdmScheme are fine interactively but quadratic when a
/// whole scheme is walked.
inline std::vector<std::vector<int>> mappings_by_set(const MdmScheme &scheme) {
  std::vector<std::vector<int>> by_set(scheme.sets.size());
  for (std::size_t i = 0; i < scheme.mappings.size(); ++i) {
    int d = scheme.mappings[i].domain;
    if (d >= 0 && d < static_cast<int>(by_set.size()))
      by_set[static_cast<std::size_t>(d)].push_back(static_cast<int>(i));
  }
  return by_set;
}

inline int object_identifier_in(const MdmScheme &scheme, const std::vector<int> &ms) {
  for (int mi : ms)
    if (scheme.mappings[mi].kind == Mapping::Kind::ObjectIdentifier) return mi;
  return -1;
}

/// Expands a scheme's implicit structure into countable constraints: per
/// non-view set a primary key, its surrogate-domain restriction and its
/// totality; per attribute a domain restriction; per structural function a
/// foreign-key reference; per `total` flag a totality. Declared constraints
/// follow in declaration order. The translator partitions exactly this list
/// into in-schema constraints and the residual set.
inline std::vector<Constraint> expand_constraints(const MdmScheme &scheme) {
  std::vector<Constraint> out;
  auto by_set = mappings_by_set(scheme);

  auto synth = [&](Constraint c, std::string label) {
    c.label = std::move(label);
    c.synthesized = true;
    out.push_back(std::move(c));
  };

  for (std::size_t si = 0; si < scheme.sets.size(); ++si) {
    const ObjectSet &set = scheme.sets[si];
    if (set.kind == ObjectSet::Kind::ComputedView ||
        set.kind == ObjectSet::Kind::StaticEnum)
      continue;
    int xi = object_identifier_in(scheme, by_set[si]);
    if (xi < 0) continue;

    Constraint pk;
    pk.kind = Constraint::Kind::Key;
    pk.product = {xi};
    pk.primary = true;
    pk.host_set = static_cast<int>(si);
    synth(pk, set.name + ".x:key");

    // Subset sets draw their identifier domain from the superset's image;
    // that restriction is the inclusion foreign key, emitted below.
    if (!set.is_subset()) {
      Constraint dom;
      dom.kind = Constraint::Kind::Range;
      dom.mapping = xi;
      dom.range = ValueType::autonumber(set.card_exponent);
      synth(dom, set.name + ".x:domain");
    }

    Constraint nn;
    nn.kind = Constraint::Kind::Totality;
    nn.mapping = xi;
    synth(nn, set.name + ".x:notnull");

    int inclusions_seen = 0;
    for (int mi : by_set[si]) {
      const Mapping &m = scheme.mappings[mi];
      switch (m.kind) {
        case Mapping::Kind::ObjectIdentifier:
          break;
        case Mapping::Kind::Attribute:
        case Mapping::Kind::ComputedAttribute: {
          Constraint dom;
          dom.kind = Constraint::Kind::Range;
          dom.mapping = mi;
          dom.range = m.codomain_type;
          synth(dom, set.name + "." + m.name + ":domain");
          break;
        }
        case Mapping::Kind::Structural:
        case Mapping::Kind::CanonicalProjection:
        case Mapping::Kind::CanonicalInclusion: {
          Constraint fk;
          fk.kind = Constraint::Kind::ForeignKeyRef;
          fk.mapping = mi;
          synth(fk, set.name + "." + m.name + ":fk");
          // Beyond the first inclusion (carried by column x itself), each
          // superset witness column is mandatory and unique.
          if (m.kind == Mapping::Kind::CanonicalInclusion && inclusions_seen++ > 0) {
            Constraint nn2;
            nn2.kind = Constraint::Kind::Totality;
            nn2.mapping = mi;
            synth(nn2, set.name + "." + m.name + ":notnull");
            Constraint uq;
            uq.kind = Constraint::Kind::Key;
            uq.product = {mi};
            uq.host_set = static_cast<int>(si);
            synth(uq, set.name + "." + m.name + ":unique");
          }
          break;
        }
      }
      if (m.total && m.kind != Mapping::Kind::ObjectIdentifier &&
          m.kind != Mapping::Kind::CanonicalInclusion) {
        Constraint nn2;
        nn2.kind = Constraint::Kind::Totality;
        nn2.mapping = mi;
        synth(nn2, set.name + "." + m.name + ":notnull");
      }
    }
  }

  for (const Constraint &c : scheme.constraints) out.push_back(c);
  return out;
}

}  // namespace mdmc
