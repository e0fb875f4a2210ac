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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "mdmc/mdmc.hpp"

using namespace mdmc;
using Clock = std::chrono::steady_clock;

namespace {

struct Harness {
  int failed = 0;

  void run(int number, const std::string &title, const std::function<void()> &body) {
    try {
      body();
      std::cout << "[PASS] criterion " << number << ": " << title << "\n";
    } catch (const std::exception &e) {
      ++failed;
      std::cout << "[FAIL] criterion " << number << ": " << title << " -- " << e.what()
                << "\n";
    }
  }
};

[[noreturn]] void fail(const std::string &msg) { throw std::runtime_error(msg); }

void expect(bool cond, const std::string &msg) {
  if (!cond) fail(msg);
}

template <typename A, typename B>
void expect_eq(const A &a, const B &b, const std::string &what) {
  if (!(a == static_cast<A>(b))) {
    std::ostringstream os;
    os << what << ": got " << a << ", want " << b;
    fail(os.str());
  }
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kFixtures = MDMC_FIXTURE_DIR;

MdmScheme load_genealogy() {
  auto res = parse_scheme(read_file(kFixtures + "/genealogy/genealogy.mdm"),
                          "genealogy.mdm");
  if (!res.ok()) {
    std::string msg = "fixture parse failed";
    for (const auto &d : res.errors) msg += "; " + d.to_string();
    fail(msg);
  }
  return res.scheme;
}

struct Stack {
  MdmScheme scheme;
  TranslationResult tr;
  EnforcementPlan p;
  Instance inst;
};

Stack full_stack(int year = 2026) {
  Stack s;
  s.scheme = load_genealogy();
  s.tr = translate(s.scheme);
  analyze(s.scheme, s.tr.schema, s.tr.residual);
  s.p = plan(s.scheme, s.tr.residual, {}, s.tr.schema);
  s.inst = load_instance(s.scheme, s.tr, kFixtures + "/genealogy/instance", year);
  return s;
}

int relational_after_prune(const TranslationResult &tr) {
  int n = 0;
  for (const auto &t : tr.schema.tables) {
    n += 1;  // primary key
    if (t.pk_max.has_value()) n += 1;
    n += static_cast<int>(t.not_null.size());
    n += static_cast<int>(t.unique_keys.size());
    n += static_cast<int>(t.foreign_keys.size());
    n += static_cast<int>(t.checks.size());
  }
  n += tr.report.domains;
  return n;
}

// --- three-valued helpers for the brute-force oracles -----------------------

enum class V3 { T, F, U };
V3 v3_and(V3 a, V3 b) {
  if (a == V3::F || b == V3::F) return V3::F;
  if (a == V3::U || b == V3::U) return V3::U;
  return V3::T;
}
V3 v3_or(V3 a, V3 b) {
  if (a == V3::T || b == V3::T) return V3::T;
  if (a == V3::U || b == V3::U) return V3::U;
  return V3::F;
}
V3 v3_implies(V3 a, V3 b) {
  return v3_or(a == V3::T ? V3::F : a == V3::F ? V3::T : V3::U, b);
}
V3 cmp3(int a, int b, const std::function<bool(int, int)> &op) {
  if (a == 0 || b == 0) return V3::U;
  return op(a, b) ? V3::T : V3::F;
}

long long oracle_r1_counterexamples() {
  long long bad = 0;
  int inner[3], outer[3];
  for (int i0 = 0; i0 <= 3; ++i0)
    for (int i1 = 0; i1 <= 3; ++i1)
      for (int i2 = 0; i2 <= 3; ++i2)
        for (int o0 = 0; o0 <= 3; ++o0)
          for (int o1 = 0; o1 <= 3; ++o1)
            for (int o2 = 0; o2 <= 3; ++o2) {
              inner[0] = i0; inner[1] = i1; inner[2] = i2;
              outer[0] = o0; outer[1] = o1; outer[2] = o2;
              bool satisfied = true;
              for (int a = 1; a <= 3 && satisfied; ++a) {
                int b = inner[a - 1];
                V3 guard = b == 0 ? V3::F : V3::T;
                V3 concl = b == 0 ? V3::U
                                  : cmp3(outer[b - 1], a,
                                         [](int p, int q) { return p == q; });
                if (v3_implies(guard, concl) != V3::T) satisfied = false;
              }
              if (!satisfied) continue;
              for (int a1 = 1; a1 <= 3; ++a1)
                for (int a2 = a1 + 1; a2 <= 3; ++a2)
                  if (inner[a1 - 1] != 0 && inner[a1 - 1] == inner[a2 - 1]) ++bad;
            }
  return bad;
}

long long oracle_r2_counterexamples() {
  const int CY = 3;
  auto le = [](int a, int b) { return a <= b; };
  auto ge = [](int a, int b) { return a >= b; };
  auto eq = [](int a, int b) { return a == b; };
  auto ne = [](int a, int b) { return a != b; };
  long long bad = 0;
  int g[3], d[3], lo[3], hi[3];
  for (int g0 = 1; g0 <= 3; ++g0) for (int g1 = 1; g1 <= 3; ++g1) for (int g2 = 1; g2 <= 3; ++g2)
  for (int d0 = 0; d0 <= 3; ++d0) for (int d1 = 0; d1 <= 3; ++d1) for (int d2 = 0; d2 <= 3; ++d2)
  for (int l0 = 1; l0 <= 3; ++l0) for (int l1 = 1; l1 <= 3; ++l1) for (int l2 = 1; l2 <= 3; ++l2)
  for (int h0 = 0; h0 <= 3; ++h0) for (int h1 = 0; h1 <= 3; ++h1) for (int h2 = 0; h2 <= 3; ++h2) {
    g[0] = g0; g[1] = g1; g[2] = g2;
    d[0] = d0; d[1] = d1; d[2] = d2;
    lo[0] = l0; lo[1] = l1; lo[2] = l2;
    hi[0] = h0; hi[1] = h1; hi[2] = h2;
    bool intervals_ok = true;
    for (int r = 0; r < 3; ++r)
      if (hi[r] != 0 && hi[r] < lo[r]) intervals_ok = false;
    if (!intervals_ok) continue;

    bool satisfied = true;
    for (int x = 0; x < 3 && satisfied; ++x)
      for (int y = 0; y < 3 && satisfied; ++y) {
        if (x == y) continue;
        V3 guard = v3_and(
            cmp3(g[x], g[y], eq),
            v3_or(v3_and(cmp3(lo[y], lo[x], ge),
                         cmp3(lo[y], hi[x] == 0 ? CY : hi[x], le)),
                  v3_and(cmp3(lo[x], lo[y], ge),
                         cmp3(lo[x], hi[y] == 0 ? CY : hi[y], le))));
        if (v3_implies(guard, cmp3(d[x], d[y], ne)) != V3::T) satisfied = false;
      }
    if (!satisfied) continue;

    for (int x = 0; x < 3; ++x)
      for (int y = x + 1; y < 3; ++y) {
        if (d[x] != 0 && g[x] == g[y] && d[x] == d[y] && lo[x] == lo[y]) ++bad;
        if (d[x] != 0 && hi[x] != 0 && g[x] == g[y] && d[x] == d[y] && hi[x] == hi[y])
          ++bad;
      }
  }
  return bad;
}

// --- synthetic schemes for the linearity fit --------------------------------

MdmScheme chain_scheme(int units) {
  MdmScheme s;
  auto add_x = [&](int si, int card) {
    Mapping x;
    x.name = "x";
    x.domain = si;
    x.kind = Mapping::Kind::ObjectIdentifier;
    x.total = true;
    x.codomain_type = ValueType::autonumber(card);
    s.mappings.push_back(x);
    return static_cast<int>(s.mappings.size()) - 1;
  };
  for (int u = 0; u < units; ++u) {
    std::string su = std::to_string(u);
    int a = static_cast<int>(s.sets.size());
    s.sets.push_back({"A" + su, ObjectSet::Kind::Entity, 3, {}, "", {}});
    add_x(a, 3);
    Mapping name;
    name.name = "Name";
    name.domain = a;
    name.kind = Mapping::Kind::Attribute;
    name.total = true;
    name.codomain_type = ValueType::text(16);
    s.mappings.push_back(name);
    int name_i = static_cast<int>(s.mappings.size()) - 1;
    Mapping v;
    v.name = "V";
    v.domain = a;
    v.kind = Mapping::Kind::Attribute;
    v.codomain_type = ValueType::integer_range(Bound::fixed(0), Bound::fixed(100));
    s.mappings.push_back(v);
    int v_i = static_cast<int>(s.mappings.size()) - 1;

    int b = static_cast<int>(s.sets.size());
    s.sets.push_back({"B" + su, ObjectSet::Kind::Entity, 3, {}, "", {}});
    add_x(b, 3);
    Mapping f;
    f.name = "ToA";
    f.domain = b;
    f.kind = Mapping::Kind::Structural;
    f.codomain_set = a;
    f.total = true;
    s.mappings.push_back(f);
    Mapping w;
    w.name = "W";
    w.domain = b;
    w.kind = Mapping::Kind::Attribute;
    w.codomain_type = ValueType::integer_range(Bound::fixed(0), Bound::fixed(100));
    s.mappings.push_back(w);
    int w_i = static_cast<int>(s.mappings.size()) - 1;

    Constraint key;
    key.label = "K" + su;
    key.kind = Constraint::Kind::Key;
    key.product = {name_i};
    key.host_set = a;
    s.constraints.push_back(key);

    Constraint tup;
    tup.label = "T" + su;
    tup.kind = Constraint::Kind::Tuple;
    tup.host_set = a;
    tup.description = "bounded";
    tup.formula = Formula::quantifier(
        Formula::Kind::Forall, {"x"}, "A" + su, a,
        Formula::compare(CompareOp::Le, Term::apply("V", v_i, Term::var("x")),
                         Term::int_lit(100)));
    s.constraints.push_back(tup);

    Constraint obj;
    obj.label = "O" + su;
    obj.kind = Constraint::Kind::ObjectFormula;
    obj.host_set = b;
    obj.description = "non-negative";
    obj.formula = Formula::quantifier(
        Formula::Kind::Forall, {"x"}, "B" + su, b,
        Formula::compare(CompareOp::Ge, Term::apply("W", w_i, Term::var("x")),
                         Term::int_lit(0)));
    s.constraints.push_back(obj);
  }
  return s;
}

double time_translate(const MdmScheme &s, int reps) {
  double best = 1e18;
  for (int i = 0; i < reps; ++i) {
    auto start = Clock::now();
    auto tr = translate(s);
    auto ns = std::chrono::duration<double, std::nano>(Clock::now() - start).count();
    if (tr.report.steps <= 0) fail("translate produced no steps");
    best = std::min(best, ns);
  }
  return best;
}

// --- random event streams for the incremental/oracle equivalence ------------

struct StreamGen {
  std::mt19937 rng;
  const MdmScheme &scheme;
  const TranslationResult &tr;

  StreamGen(unsigned seed, const MdmScheme &s, const TranslationResult &t)
      : rng(seed), scheme(s), tr(t) {}

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  std::int64_t random_existing(const Instance &inst, const std::string &table) {
    auto it = inst.tables.find(table);
    if (it == inst.tables.end() || it->second.empty()) return -1;
    int n = pick(0, static_cast<int>(it->second.size()) - 1);
    auto r = it->second.begin();
    std::advance(r, n);
    return r->first;
  }

  Value random_value(const Instance &inst, const Table &t, const Column &c) {
    if (pick(0, 4) == 0) return Value{};  // null
    switch (c.type.kind) {
      case ValueType::Kind::EnumLiterals: {
        if (pick(0, 9) == 0) return Value{std::string{"Z"}};  // outside the domain
        return Value{c.type.literals[static_cast<std::size_t>(
            pick(0, static_cast<int>(c.type.literals.size()) - 1))]};
      }
      case ValueType::Kind::Text: {
        static const char *pool[] = {"Alba", "Brin", "Cora", "Dane", "Elio",
                                     "Fern", "Gwen", "Hale"};
        return Value{std::string(pool[pick(0, 7)]) + std::to_string(pick(0, 99))};
      }
      default: {
        // references get mostly valid targets, numbers mostly plausible years
        for (const ForeignKey &fk : t.foreign_keys) {
          if (fk.column != c.name) continue;
          if (pick(0, 9) == 0) return Value{std::int64_t{999}};  // dangling
          std::int64_t x = random_existing(inst, fk.ref_table);
          return x < 0 ? Value{} : Value{x};
        }
        return Value{std::int64_t{pick(1850, 2040)}};
      }
    }
  }

  Event next(const Instance &inst) {
    const auto &tables = tr.schema.tables;
    const Table &t = tables[static_cast<std::size_t>(
        pick(0, static_cast<int>(tables.size()) - 1))];
    int kind = pick(0, 99);
    Event e;
    e.table = t.name;
    if (kind < 55) {
      e.op = Event::Op::Update;
      e.x = random_existing(inst, t.name);
      if (e.x < 0) return next(inst);
      int tries = pick(1, 2);
      for (int i = 0; i < tries; ++i) {
        const Column &c = t.columns[static_cast<std::size_t>(
            pick(1, static_cast<int>(t.columns.size()) - 1))];
        if (c.computed_expr) continue;
        e.values[c.name] = random_value(inst, t, c);
      }
      if (e.values.empty()) return next(inst);
    } else if (kind < 80) {
      e.op = Event::Op::Insert;
      auto rows = inst.tables.find(t.name);
      e.x = rows != inst.tables.end() && !rows->second.empty()
                ? rows->second.rbegin()->first + 1
                : 1;
      for (std::size_t ci = 1; ci < t.columns.size(); ++ci) {
        const Column &c = t.columns[ci];
        if (c.computed_expr) continue;
        bool required = t.not_null.count(c.name) > 0;
        if (required || pick(0, 2) > 0) e.values[c.name] = random_value(inst, t, c);
      }
    } else {
      e.op = Event::Op::Delete;
      e.x = random_existing(inst, t.name);
      if (e.x < 0) return next(inst);
    }
    return e;
  }
};

/// Blind application of an event, no checks: what the instance would look
/// like if the engine were absent.
void blind_apply(const MdmScheme &scheme, const TranslationResult &tr, Instance &inst,
                 const Event &e) {
  const Table *t = tr.schema.find_table(e.table);
  if (!t) return;
  if (e.op == Event::Op::Delete) {
    inst.tables[t->name].erase(e.x);
  } else {
    if (e.op == Event::Op::Insert) {
      Instance::Row fresh(t->columns.size());
      fresh[0] = Value{e.x};
      inst.tables[t->name][e.x] = std::move(fresh);
    }
    Instance::Row *row = inst.find_row(t->name, e.x);
    if (!row) return;
    for (const auto &[col, v] : e.values) {
      int ci = t->column_index(col);
      if (ci >= 0) (*row)[static_cast<std::size_t>(ci)] = v;
    }
  }
  recompute_derived(scheme, tr, inst);
}

}  // namespace

int main() {
  Harness h;

  h.run(1, "fixture translation counts match the published arithmetic", [] {
    MdmScheme s = load_genealogy();
    auto start = Clock::now();
    auto tr = translate(s);
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    const auto &r = tr.report;
    expect_eq(r.entity_sets, 7, "e");
    expect_eq(r.relationship_sets, 0, "r");
    expect_eq(r.attributes, 21, "a");
    expect_eq(r.structural, 17, "f");
    expect_eq(r.relational, 82, "rc");
    expect_eq(r.non_relational, 23, "nrc");
    expect_eq(r.steps, 150LL, "steps");
    expect(ms < 1000.0, "translation took " + std::to_string(ms) + " ms");
  });

  h.run(2, "relational constraints decompose as 21+13+14+17+14+3", [] {
    auto tr = translate(load_genealogy());
    const auto &r = tr.report;
    expect_eq(r.pks, 7, "primary keys");
    expect_eq(r.pk_domains, 7, "pk domains");
    expect_eq(r.pk_not_nulls, 7, "pk not-nulls");
    expect_eq(r.not_nulls, 13, "further not-nulls");
    expect_eq(r.domains, 14, "attribute domains");
    expect_eq(r.fks, 17, "foreign keys");
    expect_eq(r.uniques, 14, "unique keys");
    expect_eq(r.tuple_checks, 3, "tuple checks");
  });

  h.run(3, "analyzer prunes the four implied keys soundly (82 -> 78)", [] {
    MdmScheme s = load_genealogy();
    auto tr = translate(s);
    auto report = analyze(s, tr.schema, tr.residual);
    std::set<std::string> pruned;
    for (const auto &p : report.pruned) {
      std::string key = p.table + "(";
      for (std::size_t i = 0; i < p.key_columns.size(); ++i)
        key += (i ? "." : "") + p.key_columns[i];
      pruned.insert(key + ")");
    }
    std::set<std::string> want{"COUNTRIES(Capital)", "DYNASTIES(Founder)",
                               "REIGNS(Country.Ruler.FromY)",
                               "REIGNS(Country.Ruler.ToY)"};
    if (pruned != want) {
      std::string got;
      for (const auto &k : pruned) got += k + " ";
      fail("pruned set mismatch: " + got);
    }
    expect_eq(relational_after_prune(tr), 78, "relational constraints to enforce");

    auto start = Clock::now();
    long long r1 = oracle_r1_counterexamples();
    long long r2 = oracle_r2_counterexamples();
    double sec = std::chrono::duration<double>(Clock::now() - start).count();
    expect_eq(r1, 0LL, "R1 oracle counterexamples");
    expect_eq(r2, 0LL, "R2 oracle counterexamples");
    expect(sec < 30.0, "oracle took " + std::to_string(sec) + " s");
  });

  h.run(4, "strict dialect demotes exactly the nine nullable unique keys", [] {
    auto tr = translate(load_genealogy());  // analyzer off
    auto out = emit_ddl(tr.schema, DialectProfile::strict());
    std::set<std::string> demoted;
    for (const auto &d : out.demotions) {
      if (d.kind != Demotion::Kind::UniqueKeyNullable) continue;
      std::string key = d.table + "(";
      for (std::size_t i = 0; i < d.columns.size(); ++i)
        key += (i ? "." : "") + d.columns[i];
      demoted.insert(key + ")");
    }
    std::set<std::string> want{
        "COUNTRIES(Capital)", "DYNASTIES(Founder)", "RULERS(URL)",
        "RULERS(Name.Dynasty.BirthYear)", "RULERS(Mother.Name)",
        "RULERS(Father.Name)", "MARRIAGES(Husband.Wife.MarriageYear)",
        "MARRIAGES(Husband.Wife.DivorceYear)", "REIGNS(Ruler.Country.ToY)"};
    if (demoted != want) {
      std::string got;
      for (const auto &k : demoted) got += k + " ";
      fail("demoted set mismatch: " + got);
    }
  });

  h.run(5, "every residual constraint is planned; the shared-reign rule spans three tables", [] {
    Stack s = full_stack();
    expect_eq(s.tr.residual.entries.size(), std::size_t{23}, "residual count");
    for (const auto &e : s.tr.residual.entries) {
      auto it = s.p.coverage.find(e.constraint.label);
      expect(it != s.p.coverage.end() && !it->second.empty(),
             e.constraint.label + " has no plan entry");
    }
    std::set<std::string> tables;
    bool before_delete = false;
    for (const auto &e : s.p.entries) {
      if (e.constraint_id != "C26") continue;
      tables.insert(e.table);
      if (e.table == "MARRIAGES" && e.event == PlanEvent::BeforeDelete)
        before_delete = true;
    }
    expect(tables == std::set<std::string>{"REIGNS", "RULERS", "MARRIAGES"},
           "C26 tables mismatch");
    expect(before_delete, "C26 lacks a before-delete entry on MARRIAGES");
  });

  h.run(6, "the fixture instance checks clean and the ages match", [] {
    Stack s = full_stack(2026);
    auto violations = check_all(s.scheme, s.tr, s.inst);
    if (!violations.empty())
      fail("unexpected violation: " + violations.front().constraint_id + " " +
           violations.front().message);
    const Table *rulers = s.tr.schema.find_table("RULERS");
    int age = rulers->column_index("Age");
    std::vector<std::int64_t> want{78, 36, 44, 42, 44, 45, 79, 87};
    for (std::int64_t x = 1; x <= 8; ++x) {
      const Value &v = (*s.inst.find_row("RULERS", x))[static_cast<std::size_t>(age)];
      expect(is_int(v) && as_int(v) == want[static_cast<std::size_t>(x - 1)],
             "Age of ruler " + std::to_string(x));
    }
  });

  h.run(7, "ten single-cell mutations each produce exactly their violation", [] {
    struct Case {
      std::string table;
      std::int64_t x;
      std::string column;
      Value value;
      std::string expect_id;
      // optional staging row appended to RULERS before mutating
      bool stage = false;
      std::string stage_name, stage_sex;
      std::int64_t stage_mother = 0;
    };
    std::vector<Case> cases{
        {"CITIES", 1, "Country", Value{std::int64_t{2}}, "C2", false, "", "", 0},
        {"RULERS", 8, "BirthYear", Value{std::int64_t{1700}}, "C6", false, "", "", 0},
        {"RULERS", 9, "Mother", Value{std::int64_t{2}}, "C9", true, "Crown", "N", 0},
        {"RULERS", 3, "BirthYear", Value{std::int64_t{2010}}, "C12", false, "", "", 0},
        {"MARRIAGES", 2, "Wife", Value{std::int64_t{1}}, "C18", false, "", "", 0},
        {"RULERS", 2, "Mother", Value{std::int64_t{10}}, "C27", true, "Frances", "F", 2},
        {"RULERS", 3, "KilledBy", Value{std::int64_t{1}}, "C29", false, "", "", 0},
        {"REIGNS", 2, "Ruler", Value{std::int64_t{1}}, "C33", false, "", "", 0},
        {"RULERS", 8, "Dynasty", Value{std::int64_t{9}}, "fk:RULERS.Dynasty", false, "",
         "", 0},
        {"COUNTRIES", 3, "Country", Value{std::string{"U.K."}},
         "key:COUNTRIES(Country)", false, "", "", 0},
    };
    for (const auto &c : cases) {
      Stack s = full_stack(2026);
      if (c.stage) {
        const Table *rulers = s.tr.schema.find_table("RULERS");
        Instance::Row row(rulers->columns.size());
        std::int64_t nx = c.stage_name == "Crown" ? 9 : 10;
        row[0] = Value{nx};
        row[static_cast<std::size_t>(rulers->column_index("Name"))] =
            Value{c.stage_name};
        row[static_cast<std::size_t>(rulers->column_index("Sex"))] = Value{c.stage_sex};
        if (c.stage_mother > 0)
          row[static_cast<std::size_t>(rulers->column_index("Mother"))] =
              Value{c.stage_mother};
        s.inst.tables["RULERS"][nx] = row;
        recompute_derived(s.scheme, s.tr, s.inst);
        if (!check_all(s.scheme, s.tr, s.inst).empty())
          fail("staging row broke the instance for " + c.expect_id);
      }
      const Table *t = s.tr.schema.find_table(c.table);
      Instance::Row *row = s.inst.find_row(c.table, c.x);
      (*row)[static_cast<std::size_t>(t->column_index(c.column))] = c.value;
      recompute_derived(s.scheme, s.tr, s.inst);
      auto violations = check_all(s.scheme, s.tr, s.inst);
      if (violations.size() != 1)
        fail(c.expect_id + ": expected exactly 1 violation, got " +
             std::to_string(violations.size()));
      expect(violations.front().constraint_id == c.expect_id,
             c.expect_id + ": got " + violations.front().constraint_id);
    }
  });

  h.run(8, "event replay reproduces the documented behaviours", [] {
    // capital-city change rejected, naming both the city and the country
    {
      Stack s = full_stack();
      auto e = parse_event(read_file(kFixtures + "/genealogy/events/capital-change.jsonl"));
      auto r = apply_event(s.scheme, s.tr, s.p, s.inst, e);
      expect(!r.accepted, "capital-city change unexpectedly accepted");
      std::string all;
      for (const auto &m : r.messages) all += m;
      expect(all.find("London") != std::string::npos, "message lacks the city name");
      expect(all.find("U.K.") != std::string::npos, "message lacks the country name");
    }
    // sex change to non-person nullifies the four columns with one warning
    {
      Stack s = full_stack();
      std::istringstream lines(read_file(kFixtures + "/genealogy/events/nonperson.jsonl"));
      std::string line;
      std::getline(lines, line);
      auto r1 = apply_event(s.scheme, s.tr, s.p, s.inst, parse_event(line));
      expect(r1.accepted, "insert of the staged ruler rejected");
      std::getline(lines, line);
      auto r2 = apply_event(s.scheme, s.tr, s.p, s.inst, parse_event(line));
      expect(r2.accepted, "sex change rejected");
      std::set<std::string> cleared;
      for (const auto &m : r2.mutations)
        if (is_null(m.value)) cleared.insert(m.column);
      expect(cleared == std::set<std::string>{"Mother", "Father", "Dynasty", "KilledBy"},
             "nullified columns mismatch");
      int warnings = 0;
      for (const auto &m : r2.messages)
        if (m.rfind("warning:", 0) == 0) ++warnings;
      expect_eq(warnings, 1, "warning count");
      expect(check_all(s.scheme, s.tr, s.inst).empty(), "instance dirty after nullify");
    }
    // a brand-new city is never checked against the capital rule
    {
      Stack s = full_stack();
      auto e = parse_event(read_file(kFixtures + "/genealogy/events/newcity.jsonl"));
      auto r = apply_event(s.scheme, s.tr, s.p, s.inst, e);
      expect(r.accepted, "new-city insert rejected");
      for (const auto &m : r.messages)
        expect(m.find("C2") == std::string::npos, "C2 was evaluated for a new row");
    }
  });

  h.run(9, "incremental acceptance matches the full-recheck oracle on 100 streams", [] {
    auto start = Clock::now();
    long long divergences = 0, events_total = 0, accepted_total = 0;
    for (unsigned stream = 0; stream < 100; ++stream) {
      Stack s = full_stack(2026);
      StreamGen gen(20260810u + stream, s.scheme, s.tr);
      int len = 1 + static_cast<int>(stream % 50);
      for (int i = 0; i < len; ++i) {
        Event e = gen.next(s.inst);
        Instance before = s.inst;
        auto r = apply_event(s.scheme, s.tr, s.p, s.inst, e);
        ++events_total;
        if (r.accepted) {
          ++accepted_total;
          if (!check_all(s.scheme, s.tr, s.inst).empty()) ++divergences;
        } else {
          if (!(before == s.inst)) ++divergences;
          Instance blind = before;
          blind_apply(s.scheme, s.tr, blind, e);
          if (check_all(s.scheme, s.tr, blind).empty()) ++divergences;
        }
      }
    }
    double sec = std::chrono::duration<double>(Clock::now() - start).count();
    expect_eq(divergences, 0LL, "divergences");
    expect(accepted_total > 0 && accepted_total < events_total,
           "stream generator produced a one-sided workload");
    expect(sec < 60.0, "replay took " + std::to_string(sec) + " s");
  });

  h.run(10, "translation time fits a linear model over x1/x10/x100", [] {
    const int base = 8;
    std::vector<double> sizes, times;
    for (int scale : {1, 10, 100}) {
      MdmScheme s = chain_scheme(base * scale);
      double n = static_cast<double>(s.sets.size() + s.mappings.size()) +
                 static_cast<double>(expand_constraints(s).size());
      sizes.push_back(n);
      times.push_back(time_translate(s, scale == 100 ? 3 : 7));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < 3; ++i) { mx += sizes[i]; my += times[i]; }
    mx /= 3; my /= 3;
    double sxy = 0, sxx = 0, sst = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      sxy += (sizes[i] - mx) * (times[i] - my);
      sxx += (sizes[i] - mx) * (sizes[i] - mx);
      sst += (times[i] - my) * (times[i] - my);
    }
    double slope = sxy / sxx, intercept = my - slope * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      double r = times[i] - (intercept + slope * sizes[i]);
      ssr += r * r;
    }
    double r2 = sst == 0 ? 1.0 : 1.0 - ssr / sst;
    std::ostringstream os;
    os << "fit R^2 = " << r2 << " over sizes " << sizes[0] << "/" << sizes[1] << "/"
       << sizes[2] << " (ns: " << times[0] << "/" << times[1] << "/" << times[2] << ")";
    expect(r2 >= 0.95, os.str());
    std::cout << "       " << os.str() << "\n";
  });

  if (h.failed) {
    std::cout << h.failed << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
