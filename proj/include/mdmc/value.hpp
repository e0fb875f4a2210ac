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
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace mdmc {

/// A runtime cell value: null, integer, or text.
using Value = std::variant<std::monostate, std::int64_t, std::string>;

inline bool is_null(const Value &v) { return std::holds_alternative<std::monostate>(v); }
inline bool is_int(const Value &v) { return std::holds_alternative<std::int64_t>(v); }
inline bool is_text(const Value &v) { return std::holds_alternative<std::string>(v); }
inline std::int64_t as_int(const Value &v) { return std::get<std::int64_t>(v); }
inline const std::string &as_text(const Value &v) { return std::get<std::string>(v); }

inline std::string value_to_string(const Value &v) {
  if (is_null(v)) return "";
  if (is_int(v)) return std::to_string(as_int(v));
  return as_text(v);
}

/// 10^k, saturating inside int64 (k <= 18).
inline std::int64_t pow10_i64(int k) {
  std::int64_t r = 1;
  for (int i = 0; i < k && i < 19; ++i) r *= 10;
  return r;
}

/// A numeric bound that may be the dynamic symbol currentYear().
struct Bound {
  std::int64_t value = 0;
  bool is_current_year = false;

  static Bound fixed(std::int64_t v) { return Bound{v, false}; }
  static Bound current_year() { return Bound{0, true}; }

  std::int64_t resolve(int current_year) const {
    return is_current_year ? current_year : value;
  }
  bool operator==(const Bound &) const = default;
};

/// Codomain value types of the scheme language.
struct ValueType {
  enum class Kind { Text, Natural, IntegerRange, EnumLiterals, Autonumber };

  Kind kind = Kind::Text;
  int max_len = 0;                     // Text
  int max_digits = 0;                  // Natural
  Bound lo, hi;                        // IntegerRange
  std::vector<std::string> literals;   // EnumLiterals
  int card_exponent = 0;               // Autonumber

  static ValueType text(int n) {
    ValueType t; t.kind = Kind::Text; t.max_len = n; return t;
  }
  static ValueType natural(int digits) {
    ValueType t; t.kind = Kind::Natural; t.max_digits = digits; return t;
  }
  static ValueType integer_range(Bound lo, Bound hi) {
    ValueType t; t.kind = Kind::IntegerRange; t.lo = lo; t.hi = hi; return t;
  }
  static ValueType enum_literals(std::vector<std::string> lits) {
    ValueType t; t.kind = Kind::EnumLiterals; t.literals = std::move(lits); return t;
  }
  static ValueType autonumber(int card_exp) {
    ValueType t; t.kind = Kind::Autonumber; t.card_exponent = card_exp; return t;
  }

  bool is_numeric() const { return kind != Kind::Text && kind != Kind::EnumLiterals; }

  /// Largest surrogate value allowed by auto(k): 10^k - 1.
  std::int64_t autonumber_max() const { return pow10_i64(card_exponent) - 1; }

  bool uses_current_year() const {
    return kind == Kind::IntegerRange && (lo.is_current_year || hi.is_current_year);
  }

  /// True when a (non-null) value lies inside this type.
  bool admits(const Value &v, int current_year) const {
    if (is_null(v)) return true;
    switch (kind) {
      case Kind::Text:
        return is_text(v) && static_cast<int>(as_text(v).size()) <= max_len;
      case Kind::Natural:
        return is_int(v) && as_int(v) >= 0 && as_int(v) <= pow10_i64(max_digits) - 1;
      case Kind::IntegerRange:
        return is_int(v) && as_int(v) >= lo.resolve(current_year) &&
               as_int(v) <= hi.resolve(current_year);
      case Kind::EnumLiterals: {
        if (!is_text(v)) return false;
        for (const auto &l : literals)
          if (l == as_text(v)) return true;
        return false;
      }
      case Kind::Autonumber:
        return is_int(v) && as_int(v) >= 1 && as_int(v) <= autonumber_max();
    }
    return false;
  }

  std::string to_string() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::Text: os << "ascii(" << max_len << ")"; break;
      case Kind::Natural: os << "nat(" << max_digits << ")"; break;
      case Kind::IntegerRange:
        os << "int[" << (lo.is_current_year ? "currentYear()" : std::to_string(lo.value))
           << ", " << (hi.is_current_year ? "currentYear()" : std::to_string(hi.value)) << "]";
        break;
      case Kind::EnumLiterals: {
        os << "{ ";
        for (std::size_t i = 0; i < literals.size(); ++i)
          os << (i ? ", " : "") << "'" << literals[i] << "'";
        os << " }";
        break;
      }
      case Kind::Autonumber: os << "auto(" << card_exponent << ")"; break;
    }
    return os.str();
  }

  bool operator==(const ValueType &) const = default;
};

/// Three-valued truth (Kleene strong connectives).
enum class Verdict { True, False, Unknown };

inline Verdict v_not(Verdict a) {
  if (a == Verdict::True) return Verdict::False;
  if (a == Verdict::False) return Verdict::True;
  return Verdict::Unknown;
}
inline Verdict v_and(Verdict a, Verdict b) {
  if (a == Verdict::False || b == Verdict::False) return Verdict::False;
  if (a == Verdict::Unknown || b == Verdict::Unknown) return Verdict::Unknown;
  return Verdict::True;
}
inline Verdict v_or(Verdict a, Verdict b) {
  if (a == Verdict::True || b == Verdict::True) return Verdict::True;
  if (a == Verdict::Unknown || b == Verdict::Unknown) return Verdict::Unknown;
  return Verdict::False;
}
inline Verdict v_implies(Verdict a, Verdict b) { return v_or(v_not(a), b); }

inline const char *to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "TRUE";
    case Verdict::False: return "FALSE";
    default: return "UNKNOWN";
  }
}

}  // namespace mdmc
