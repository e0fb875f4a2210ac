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
#include "mdmc/events.hpp"
#include "mdmc/implication.hpp"

using namespace mdmc;

namespace {

struct Sim {
  MdmScheme scheme;
  TranslationResult tr;
  EnforcementPlan p;
  Instance inst;
};

Sim make_sim(int current_year = 2026) {
  Sim s;
  s.scheme = testutil::genealogy();
  s.tr = translate(s.scheme);
  analyze(s.scheme, s.tr.schema, s.tr.residual);
  s.p = plan(s.scheme, s.tr.residual, {}, s.tr.schema);
  s.inst = load_instance(s.scheme, s.tr, testutil::genealogy_instance_dir(), current_year);
  return s;
}

Event ev(Event::Op op, const std::string &table, std::int64_t x,
         std::map<std::string, Value> values = {}) {
  Event e;
  e.op = op;
  e.table = table;
  e.x = x;
  e.values = std::move(values);
  return e;
}

Value iv(std::int64_t v) { return Value{v}; }
Value sv(std::string v) { return Value{std::move(v)}; }

std::string all_messages(const ApplyResult &r) {
  std::string out;
  for (const auto &m : r.messages) out += m + "\n";
  return out;
}

}  // namespace

TEST_CASE("moving a capital's city abroad is rejected with both names") {
  Sim s = make_sim();
  auto r = apply_event(s.scheme, s.tr, s.p, s.inst,
                       ev(Event::Op::Update, "CITIES", 1, {{"Country", iv(2)}}));
  CHECK_FALSE(r.accepted);
  std::string msg = all_messages(r);
  CHECK(msg.find("London") != std::string::npos);
  CHECK(msg.find("U.K.") != std::string::npos);
  CHECK(msg.find("C2") != std::string::npos);
}

TEST_CASE("rejected events leave the instance bit-identical") {
  Sim s = make_sim();
  Instance before = s.inst;
  auto r = apply_event(s.scheme, s.tr, s.p, s.inst,
                       ev(Event::Op::Update, "CITIES", 1, {{"Country", iv(2)}}));
  REQUIRE_FALSE(r.accepted);
  CHECK(before == s.inst);
}

TEST_CASE("new cities skip the capital rule") {
  Sim s = make_sim();
  auto r = apply_event(
      s.scheme, s.tr, s.p, s.inst,
      ev(Event::Op::Insert, "CITIES", 6, {{"City", sv("Cardiff")}, {"Country", iv(2)}}));
  CHECK(r.accepted);
  CHECK(all_messages(r).find("C2") == std::string::npos);
  CHECK(s.inst.find_row("CITIES", 6) != nullptr);
  CHECK(check_all(s.scheme, s.tr, s.inst).empty());
}

TEST_CASE("the new-row exemption really bypasses the reference check") {
  // Stage a dangling capital, then insert the missing city under the wrong
  // country: the exemption accepts it even though a full check would object.
  Sim s = make_sim();
  Instance::Row *uk = s.inst.find_row("COUNTRIES", 3);
  const Table *countries = s.tr.schema.find_table("COUNTRIES");
  (*uk)[static_cast<std::size_t>(countries->column_index("Capital"))] = iv(9);
  auto r = apply_event(
      s.scheme, s.tr, s.p, s.inst,
      ev(Event::Op::Insert, "CITIES", 9, {{"City", sv("Boston")}, {"Country", iv(1)}}));
  CHECK(r.accepted);  // C2 untested on brand-new rows
  CHECK_FALSE(check_all(s.scheme, s.tr, s.inst).empty());
}

TEST_CASE("turning a fresh spouse-free ruler into a non-person nullifies and warns") {
  Sim s = make_sim();
  auto ins = apply_event(s.scheme, s.tr, s.p, s.inst,
                         ev(Event::Op::Insert, "RULERS", 9,
                            {{"Name", sv("Edmund")},
                             {"Sex", sv("M")},
                             {"BirthYear", iv(1990)},
                             {"Mother", iv(2)},
                             {"Father", iv(1)},
                             {"Dynasty", iv(1)}}));
  REQUIRE(ins.accepted);
  REQUIRE(check_all(s.scheme, s.tr, s.inst).empty());

  auto r = apply_event(s.scheme, s.tr, s.p, s.inst,
                       ev(Event::Op::Update, "RULERS", 9, {{"Sex", sv("N")}}));
  REQUIRE(r.accepted);

  // the four dependent columns are cleared, with exactly one warning
  REQUIRE(r.mutations.size() == 4);
  std::set<std::string> cleared;
  for (const auto &m : r.mutations) {
    CHECK(m.table == "RULERS");
    CHECK(m.x == 9);
    CHECK(is_null(m.value));
    cleared.insert(m.column);
  }
  CHECK(cleared == std::set<std::string>{"Mother", "Father", "Dynasty", "KilledBy"});
  int warnings = 0;
  for (const auto &m : r.messages)
    if (m.rfind("warning:", 0) == 0) ++warnings;
  CHECK(warnings == 1);

  const Table *rulers = s.tr.schema.find_table("RULERS");
  const Instance::Row *row = s.inst.find_row("RULERS", 9);
  CHECK(is_null((*row)[static_cast<std::size_t>(rulers->column_index("Mother"))]));
  CHECK(is_null((*row)[static_cast<std::size_t>(rulers->column_index("Dynasty"))]));
  CHECK(check_all(s.scheme, s.tr, s.inst).empty());
}

TEST_CASE("a married ruler cannot become a non-person") {
  // Every fixture ruler appears in some marriage, so flipping any Sex to 'N' breaks
  // the husbands' or wives' sex rule and must be rejected.
  Sim s = make_sim();
  auto r = apply_event(s.scheme, s.tr, s.p, s.inst,
                       ev(Event::Op::Update, "RULERS", 8, {{"Sex", sv("N")}}));
  CHECK_FALSE(r.accepted);
  CHECK(all_messages(r).find("C19") != std::string::npos);
  CHECK(check_all(s.scheme, s.tr, s.inst).empty());
}

TEST_CASE("locked columns reject edits while the guard holds") {
  Sim s = make_sim();
  REQUIRE(apply_event(s.scheme, s.tr, s.p, s.inst,
                      ev(Event::Op::Insert, "RULERS", 9,
                         {{"Name", sv("Crown")}, {"Sex", sv("N")}}))
              .accepted);

  // setting a guarded column on a non-person is refused
  auto r = apply_event(s.scheme, s.tr, s.p, s.inst,
                       ev(Event::Op::Update, "RULERS", 9, {{"Mother", iv(2)}}));
  CHECK_FALSE(r.accepted);
  CHECK(all_messages(r).find("C9") != std::string::npos);

  // clearing one is always allowed
  auto r2 = apply_event(s.scheme, s.tr, s.p, s.inst,
                        ev(Event::Op::Update, "RULERS", 9, {{"Mother", Value{}}}));
  CHECK(r2.accepted);

  // changing the guard and the column together is fine: the person rule no
  // longer applies afterwards
  auto r3 = apply_event(
      s.scheme, s.tr, s.p, s.inst,
      ev(Event::Op::Update, "RULERS", 9, {{"Sex", sv("M")}, {"Father", iv(1)}, {"BirthYear", iv(1990)}}));
  CHECK(r3.accepted);
  CHECK(check_all(s.scheme, s.tr, s.inst).empty());
}

TEST_CASE("choosing a founder without a dynasty adopts the founder") {
  Sim s = make_sim();
  auto r = apply_event(s.scheme, s.tr, s.p, s.inst,
                       ev(Event::Op::Update, "DYNASTIES", 1, {{"Founder", iv(5)}}));
  REQUIRE(r.accepted);
  bool propagated = false;
  for (const auto &m : r.mutations)
    if (m.table == "RULERS" && m.x == 5 && m.column == "Dynasty" && is_int(m.value) &&
        as_int(m.value) == 1)
      propagated = true;
  CHECK(propagated);
  CHECK(check_all(s.scheme, s.tr, s.inst).empty());

  // choosing a founder from another dynasty is refused outright
  auto r2 = apply_event(s.scheme, s.tr, s.p, s.inst,
                        ev(Event::Op::Insert, "DYNASTIES", 2,
                           {{"Dynasty", sv("Tudor")}, {"Country", iv(1)},
                            {"Founder", iv(5)}}));
  CHECK_FALSE(r2.accepted);  // Catherine now belongs to Windsor
  CHECK(all_messages(r2).find("C4") != std::string::npos);
}

TEST_CASE("deleting a marriage that licenses a shared reign is rejected") {
  Sim s = make_sim();
  // Two fresh rulers with fully known, distinct parents; their marriage is
  // the only thing allowing their overlapping reigns over France.
  REQUIRE(apply_event(s.scheme, s.tr, s.p, s.inst,
                      ev(Event::Op::Insert, "RULERS", 11,
                         {{"Name", sv("Arthur")}, {"Sex", sv("M")},
                          {"BirthYear", iv(2000)}, {"Mother", iv(5)},
                          {"Father", iv(3)}}))
              .accepted);
  REQUIRE(apply_event(s.scheme, s.tr, s.p, s.inst,
                      ev(Event::Op::Insert, "RULERS", 12,
                         {{"Name", sv("Lili")}, {"Sex", sv("F")},
                          {"BirthYear", iv(2001)}, {"Mother", iv(6)},
                          {"Father", iv(4)}}))
              .accepted);
  REQUIRE(apply_event(s.scheme, s.tr, s.p, s.inst,
                      ev(Event::Op::Insert, "MARRIAGES", 6,
                         {{"Husband", iv(11)}, {"Wife", iv(12)},
                          {"MarriageYear", iv(2020)}}))
              .accepted);
  REQUIRE(apply_event(s.scheme, s.tr, s.p, s.inst,
                      ev(Event::Op::Insert, "REIGNS", 3,
                         {{"Ruler", iv(11)}, {"Country", iv(2)}, {"FromY", iv(2021)}}))
              .accepted);
  REQUIRE(apply_event(s.scheme, s.tr, s.p, s.inst,
                      ev(Event::Op::Insert, "REIGNS", 4,
                         {{"Ruler", iv(12)}, {"Country", iv(2)}, {"FromY", iv(2022)}}))
              .accepted);
  REQUIRE(check_all(s.scheme, s.tr, s.inst).empty());

  auto del = apply_event(s.scheme, s.tr, s.p, s.inst,
                         ev(Event::Op::Delete, "MARRIAGES", 6));
  CHECK_FALSE(del.accepted);
  CHECK(all_messages(del).find("C26") != std::string::npos);
  CHECK(s.inst.find_row("MARRIAGES", 6) != nullptr);

  // ending one reign first makes the deletion legal
  REQUIRE(apply_event(s.scheme, s.tr, s.p, s.inst,
                      ev(Event::Op::Update, "REIGNS", 3, {{"ToY", iv(2021)}}))
              .accepted);
  auto del2 = apply_event(s.scheme, s.tr, s.p, s.inst,
                          ev(Event::Op::Delete, "MARRIAGES", 6));
  CHECK(del2.accepted);
  CHECK(check_all(s.scheme, s.tr, s.inst).empty());
}

TEST_CASE("deleting a referenced row is restricted") {
  Sim s = make_sim();
  auto r = apply_event(s.scheme, s.tr, s.p, s.inst,
                       ev(Event::Op::Delete, "RULERS", 1));
  CHECK_FALSE(r.accepted);
  CHECK(all_messages(r).find("references") != std::string::npos);
}

TEST_CASE("maternal cycles are caught before commit") {
  Sim s = make_sim();
  REQUIRE(apply_event(s.scheme, s.tr, s.p, s.inst,
                      ev(Event::Op::Insert, "RULERS", 10,
                         {{"Name", sv("Frances")}, {"Sex", sv("F")},
                          {"Mother", iv(2)}}))
              .accepted);
  auto r = apply_event(s.scheme, s.tr, s.p, s.inst,
                       ev(Event::Op::Update, "RULERS", 2, {{"Mother", iv(10)}}));
  CHECK_FALSE(r.accepted);
  CHECK(all_messages(r).find("C27") != std::string::npos);
  CHECK(all_messages(r).find("cycle") != std::string::npos);
}

TEST_CASE("relational safeguards fire before plan entries") {
  Sim s = make_sim();

  // not-null first
  auto r1 = apply_event(s.scheme, s.tr, s.p, s.inst,
                        ev(Event::Op::Insert, "MARRIAGES", 7, {{"MarriageYear", iv(2000)}}));
  CHECK_FALSE(r1.accepted);
  CHECK(all_messages(r1).find("must not be null") != std::string::npos);

  // domain
  auto r2 = apply_event(s.scheme, s.tr, s.p, s.inst,
                        ev(Event::Op::Update, "RULERS", 1, {{"Sex", sv("Q")}}));
  CHECK_FALSE(r2.accepted);
  CHECK(all_messages(r2).find("domain") != std::string::npos);

  // dangling reference
  auto r3 = apply_event(s.scheme, s.tr, s.p, s.inst,
                        ev(Event::Op::Update, "RULERS", 1, {{"Dynasty", iv(9)}}));
  CHECK_FALSE(r3.accepted);

  // duplicate unique key
  auto r4 = apply_event(s.scheme, s.tr, s.p, s.inst,
                        ev(Event::Op::Update, "COUNTRIES", 3, {{"Country", sv("U.K.")}}));
  CHECK_FALSE(r4.accepted);

  // tuple check
  auto r5 = apply_event(s.scheme, s.tr, s.p, s.inst,
                        ev(Event::Op::Update, "RULERS", 2, {{"PassedAwayYear", iv(1900)}}));
  CHECK_FALSE(r5.accepted);

  CHECK(check_all(s.scheme, s.tr, s.inst).empty());
}

TEST_CASE("event lines parse from JSON") {
  Event e = parse_event(
      R"({"op":"update","table":"CITIES","x":1,"values":{"Country":2,"City":"LDN"}})");
  CHECK(e.op == Event::Op::Update);
  CHECK(e.table == "CITIES");
  CHECK(e.x == 1);
  REQUIRE(e.values.size() == 2);
  CHECK(as_int(e.values.at("Country")) == 2);
  CHECK(as_text(e.values.at("City")) == "LDN");

  Event d = parse_event(R"({"op":"delete","table":"REIGNS","x":2})");
  CHECK(d.op == Event::Op::Delete);
  CHECK_THROWS(parse_event(R"({"op":"upsert","table":"REIGNS"})"));
}

TEST_CASE("surrogates are assigned when inserts omit x") {
  Sim s = make_sim();
  auto r = apply_event(
      s.scheme, s.tr, s.p, s.inst,
      ev(Event::Op::Insert, "CITIES", 0, {{"City", sv("York")}, {"Country", iv(1)}}));
  REQUIRE(r.accepted);
  CHECK(s.inst.find_row("CITIES", 6) != nullptr);

  // x itself is never assignable
  auto r2 = apply_event(s.scheme, s.tr, s.p, s.inst,
                        ev(Event::Op::Update, "CITIES", 6, {{"x", iv(99)}}));
  CHECK_FALSE(r2.accepted);
}

TEST_CASE("inserts honor declared defaults and narrowed ranges") {
  auto res = parse_scheme(
      "set A entity card 1;\n"
      "fun Name : A -> ascii(8) total;\n"
      "fun Score : A -> int[0, 100];\n"
      "range Score [10, 90];\n"
      "default Score 50;\n");
  REQUIRE(res.ok());
  auto tr = translate(res.scheme);
  auto p = plan(res.scheme, tr.residual, {}, tr.schema);
  Instance inst;
  inst.current_year = 2026;
  inst.tables["A"];

  auto r = apply_event(res.scheme, tr, p, inst,
                       ev(Event::Op::Insert, "A", 0, {{"Name", sv("one")}}));
  REQUIRE(r.accepted);
  const Table *a = tr.schema.find_table("A");
  const Value &score = (*inst.find_row("A", 1))[static_cast<std::size_t>(
      a->column_index("Score"))];
  REQUIRE(is_int(score));
  CHECK(as_int(score) == 50);

  // inside the base domain but outside the declared narrowing
  auto r2 = apply_event(res.scheme, tr, p, inst,
                        ev(Event::Op::Update, "A", 1, {{"Score", iv(95)}}));
  CHECK_FALSE(r2.accepted);
  CHECK(check_all(res.scheme, tr, inst).empty());
}
