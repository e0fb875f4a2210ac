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

#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "mdmc/check.hpp"
#include "mdmc/implication.hpp"

using namespace mdmc;

namespace {

struct Pipeline {
  MdmScheme scheme;
  TranslationResult tr;
  Instance inst;
};

Pipeline load_fixture(int current_year = 2026) {
  Pipeline p;
  p.scheme = testutil::genealogy();
  p.tr = translate(p.scheme);
  analyze(p.scheme, p.tr.schema, p.tr.residual);
  p.inst = load_instance(p.scheme, p.tr, testutil::genealogy_instance_dir(), current_year);
  return p;
}

void set_cell(Pipeline &p, const std::string &table, std::int64_t x,
              const std::string &column, Value v) {
  const Table *t = p.tr.schema.find_table(table);
  REQUIRE(t);
  Instance::Row *row = p.inst.find_row(table, x);
  REQUIRE(row);
  (*row)[static_cast<std::size_t>(t->column_index(column))] = std::move(v);
  recompute_derived(p.scheme, p.tr, p.inst);
}

}  // namespace

TEST_CASE("fixture instance loads with the documented row counts") {
  Pipeline p = load_fixture();
  CHECK(p.inst.tables.at("COUNTRIES").size() == 3);
  CHECK(p.inst.tables.at("CITIES").size() == 5);
  CHECK(p.inst.tables.at("DYNASTIES").size() == 1);
  CHECK(p.inst.tables.at("TITLES").size() == 5);
  CHECK(p.inst.tables.at("RULERS").size() == 8);
  CHECK(p.inst.tables.at("MARRIAGES").size() == 5);
  CHECK(p.inst.tables.at("REIGNS").size() == 2);
}

TEST_CASE("empty directory loads as an empty instance") {
  MdmScheme s = testutil::genealogy();
  auto tr = translate(s);
  auto tmp = std::filesystem::temp_directory_path() / "mdmc_empty_instance";
  std::filesystem::create_directories(tmp);
  Instance inst = load_instance(s, tr, tmp.string(), 2026);
  for (const auto &[name, rows] : inst.tables) CHECK(rows.empty());
}

TEST_CASE("derived ages recompute from the configured year") {
  Pipeline p = load_fixture(2026);
  const Table *rulers = p.tr.schema.find_table("RULERS");
  int age_idx = rulers->column_index("Age");
  std::vector<std::int64_t> expected{78, 36, 44, 42, 44, 45, 79, 87};
  for (std::int64_t x = 1; x <= 8; ++x) {
    const Value &v = (*p.inst.find_row("RULERS", x))[static_cast<std::size_t>(age_idx)];
    REQUIRE(is_int(v));
    CHECK(as_int(v) == expected[static_cast<std::size_t>(x - 1)]);
  }

  // null birth year propagates to a null age
  set_cell(p, "RULERS", 8, "BirthYear", Value{});
  CHECK(is_null((*p.inst.find_row("RULERS", 8))[static_cast<std::size_t>(age_idx)]));

  // recomputing twice changes nothing
  Instance snapshot = p.inst;
  recompute_derived(p.scheme, p.tr, p.inst);
  CHECK(snapshot == p.inst);
}

TEST_CASE("formula evaluation follows the three-valued rules") {
  Pipeline p = load_fixture();
  Evaluator ev(p.scheme, p.tr, p.inst);

  auto eval_at = [&](const std::string &text, const std::string &table, std::int64_t x) {
    auto fr = parse_formula(p.scheme, text);
    REQUIRE(fr.ok());
    Bindings env{{fr.formula->vars[0], {table, x}}};
    return ev.eval_formula(fr.formula->body, env);
  };

  // age bound holds at Diana's row
  CHECK(eval_at("forall x in RULERS: Sex(x) <> 'N' implies 0 <= Age(x) and Age(x) <= 140",
                "RULERS", 2) == Verdict::True);
  // wives' sex holds at the William/Catherine marriage
  CHECK(eval_at("forall x in MARRIAGES: Sex(Wife(x)) = 'F'", "MARRIAGES", 3) ==
        Verdict::True);
  // null guard makes the killer rule vacuous
  CHECK(eval_at("forall x in RULERS: KilledBy(x) is not null and "
                "BirthYear(KilledBy(x)) is not null and Sex(x) <> 'N' implies "
                "BirthYear(KilledBy(x)) <= PassedAwayYear(x)",
                "RULERS", 1) == Verdict::True);
  // comparisons against null are UNKNOWN, never violations
  CHECK(eval_at("forall x in RULERS: PassedAwayYear(x) > 1900", "RULERS", 1) ==
        Verdict::Unknown);
  // function application over a null link yields UNKNOWN too
  CHECK(eval_at("forall x in RULERS: Sex(Mother(x)) = 'F'", "RULERS", 1) ==
        Verdict::Unknown);
  CHECK(eval_at("forall x in RULERS: Sex(Mother(x)) = 'F'", "RULERS", 3) ==
        Verdict::True);
}

TEST_CASE("guarded and unguarded null handling differ observably") {
  Pipeline p = load_fixture();
  // Craft: William's mother known but her birth year unknown.
  set_cell(p, "RULERS", 2, "BirthYear", Value{});
  Evaluator ev(p.scheme, p.tr, p.inst);

  auto guarded = parse_formula(
      p.scheme,
      "forall x in RULERS: BirthYear(x) is not null and Mother(x) is not null and "
      "BirthYear(Mother(x)) is not null and Sex(x) <> 'N' implies "
      "5 <= BirthYear(x) - BirthYear(Mother(x))");
  auto unguarded = parse_formula(
      p.scheme, "forall x in RULERS: 5 <= BirthYear(x) - BirthYear(Mother(x))");
  REQUIRE(guarded.ok());
  REQUIRE(unguarded.ok());
  Bindings env{{"x", {"RULERS", 3}}};
  CHECK(ev.eval_formula(guarded.formula->body, env) == Verdict::True);
  CHECK(ev.eval_formula(unguarded.formula->body, env) == Verdict::Unknown);
}

TEST_CASE("the fixture instance checks clean at the pinned year") {
  Pipeline p = load_fixture(2026);
  auto violations = check_all(p.scheme, p.tr, p.inst);
  for (const auto &v : violations) INFO(v.constraint_id << ": " << v.message);
  CHECK(violations.empty());
}

TEST_CASE("single-cell mutations produce exactly the targeted violation") {
  struct Case {
    std::string name;
    std::string table;
    std::int64_t x;
    std::string column;
    Value value;
    std::string expect;
  };
  // Each case flips one cell of the fixture and must surface exactly one
  // violation, verified against a full re-check.
  std::vector<Case> cases{
      {"C2 capital moved abroad", "CITIES", 1, "Country", Value{std::int64_t{2}}, "C2"},
      {"C6 age above 140", "RULERS", 8, "BirthYear", Value{std::int64_t{1700}}, "C6"},
      {"C12 born after mother's death", "RULERS", 3, "BirthYear",
       Value{std::int64_t{2010}}, "C12"},
      {"C18 male wife", "MARRIAGES", 2, "Wife", Value{std::int64_t{1}}, "C18"},
      {"C29 killing without death year", "RULERS", 3, "KilledBy",
       Value{std::int64_t{1}}, "C29"},
      {"C33 same ruler same period", "REIGNS", 2, "Ruler", Value{std::int64_t{1}},
       "C33"},
      {"dangling dynasty reference", "RULERS", 8, "Dynasty", Value{std::int64_t{9}},
       "fk:RULERS.Dynasty"},
      {"duplicate country name", "COUNTRIES", 3, "Country", Value{std::string{"U.K."}},
       "key:COUNTRIES(Country)"},
  };

  for (const auto &c : cases) {
    DYNAMIC_SECTION(c.name) {
      Pipeline p = load_fixture();
      set_cell(p, c.table, c.x, c.column, c.value);
      auto violations = check_all(p.scheme, p.tr, p.inst);
      for (const auto &v : violations) INFO(v.constraint_id << ": " << v.message);
      REQUIRE(violations.size() == 1);
      CHECK(violations[0].constraint_id == c.expect);
    }
  }
}

TEST_CASE("C9 fires alone on a spouse-free non-person") {
  Pipeline p = load_fixture();
  // No fixture ruler can change sex without breaking a marriage constraint,
  // so stage a fresh non-person row first.
  const Table *rulers = p.tr.schema.find_table("RULERS");
  Instance::Row row(rulers->columns.size());
  row[0] = Value{std::int64_t{9}};
  row[static_cast<std::size_t>(rulers->column_index("Name"))] = Value{std::string{"Crown"}};
  row[static_cast<std::size_t>(rulers->column_index("Sex"))] = Value{std::string{"N"}};
  p.inst.tables["RULERS"][9] = row;
  recompute_derived(p.scheme, p.tr, p.inst);
  REQUIRE(check_all(p.scheme, p.tr, p.inst).empty());

  set_cell(p, "RULERS", 9, "Mother", Value{std::int64_t{2}});
  auto violations = check_all(p.scheme, p.tr, p.inst);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].constraint_id == "C9");
}

TEST_CASE("C27 fires alone on a crafted maternal cycle") {
  Pipeline p = load_fixture();
  // A female ruler whose mother is Diana; pointing Diana back creates a
  // two-step cycle violating only the maternal acyclicity.
  const Table *rulers = p.tr.schema.find_table("RULERS");
  Instance::Row row(rulers->columns.size());
  row[0] = Value{std::int64_t{10}};
  row[static_cast<std::size_t>(rulers->column_index("Name"))] =
      Value{std::string{"Frances"}};
  row[static_cast<std::size_t>(rulers->column_index("Sex"))] = Value{std::string{"F"}};
  row[static_cast<std::size_t>(rulers->column_index("Mother"))] = Value{std::int64_t{2}};
  p.inst.tables["RULERS"][10] = row;
  recompute_derived(p.scheme, p.tr, p.inst);
  REQUIRE(check_all(p.scheme, p.tr, p.inst).empty());

  set_cell(p, "RULERS", 2, "Mother", Value{std::int64_t{10}});
  auto violations = check_all(p.scheme, p.tr, p.inst);
  for (const auto &v : violations) INFO(v.constraint_id << ": " << v.message);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].constraint_id == "C27");
}

TEST_CASE("two-variable violations are reported once per pair") {
  Pipeline p = load_fixture();
  set_cell(p, "REIGNS", 2, "Ruler", Value{std::int64_t{1}});
  auto violations = check_all(p.scheme, p.tr, p.inst);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].row_x == 1);
  CHECK(violations[0].row_y == 2);
}

TEST_CASE("dangling references are violations, not load failures") {
  Pipeline p = load_fixture();
  auto dir = std::filesystem::temp_directory_path() / "mdmc_dangling";
  save_instance(p.tr, p.inst, dir.string());
  {
    // rewrite one dynasty reference to a missing row
    auto path = dir / "RULERS.csv";
    std::string text = testutil::read_file(path.string());
    auto pos = text.find(",1,1,1,1,,en.wikipedia.org/wiki/Charles_III");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 2, ",9");
    std::ofstream(path, std::ios::binary) << text;
  }
  Instance inst = load_instance(p.scheme, p.tr, dir.string(), 2026);
  auto violations = check_all(p.scheme, p.tr, inst);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].constraint_id == "fk:RULERS.Dynasty");
}

TEST_CASE("malformed cells fail loading loudly") {
  Pipeline p = load_fixture();
  auto dir = std::filesystem::temp_directory_path() / "mdmc_badcell";
  save_instance(p.tr, p.inst, dir.string());
  {
    auto path = dir / "REIGNS.csv";
    std::ofstream(path, std::ios::binary)
        << "x,FromY,ToY,Ruler,Country,Title\n1,soon,,1,1,1\n";
  }
  CHECK_THROWS(load_instance(p.scheme, p.tr, dir.string(), 2026));
}

TEST_CASE("cycle detection terminates and reports paths") {
  Pipeline p = load_fixture();
  int mother = p.scheme.find_mapping("Mother", p.scheme.find_set("RULERS"));
  REQUIRE(mother >= 0);

  // fixture chain: William -> Diana -> null
  CHECK_FALSE(detect_cycle(p.scheme, p.tr, p.inst, mother, 3).has_value());

  // self loop
  set_cell(p, "RULERS", 2, "Mother", Value{std::int64_t{2}});
  auto self_cycle = detect_cycle(p.scheme, p.tr, p.inst, mother, 2);
  REQUIRE(self_cycle.has_value());
  CHECK(self_cycle->size() == 1);

  // three-step cycle on synthetic rows
  set_cell(p, "RULERS", 2, "Mother", Value{std::int64_t{5}});
  set_cell(p, "RULERS", 5, "Mother", Value{std::int64_t{6}});
  set_cell(p, "RULERS", 6, "Mother", Value{std::int64_t{2}});
  auto three = detect_cycle(p.scheme, p.tr, p.inst, mother, 2);
  REQUIRE(three.has_value());
  CHECK(three->size() == 3);
  // entering the cycle from outside still finds it
  set_cell(p, "RULERS", 3, "Mother", Value{std::int64_t{2}});
  auto from_outside = detect_cycle(p.scheme, p.tr, p.inst, mother, 3);
  REQUIRE(from_outside.has_value());
  CHECK(from_outside->size() == 3);
}
