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

// Command-line front end: validate scheme sources, translate them to
// relational schemas plus residual constraint sets, emit SQL DDL under a
// dialect profile, compile enforcement plans, and check or simulate
// instances.

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mdmc/mdmc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitUsage = 2;

int system_year() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  return tm.tm_year + 1900;
}

struct Options {
  std::string scheme_path;
  std::string instance_dir;
  std::string events_path;
  std::string dialect = "ansi";
  int current_year = system_year();
  std::string analyzer = "on";
  std::string out_dir = ".";
  std::string format = "human";
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct LoadedScheme {
  mdmc::MdmScheme scheme;
  bool ok = false;
};

LoadedScheme load_scheme(const Options &opt) {
  LoadedScheme out;
  std::string text;
  try {
    text = read_file(opt.scheme_path);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return out;
  }
  auto res = mdmc::parse_scheme(text, opt.scheme_path);
  if (!res.ok()) {
    for (const auto &d : res.errors) std::cerr << d.to_string() << "\n";
    return out;
  }
  out.scheme = std::move(res.scheme);
  out.ok = true;
  return out;
}

std::string scheme_stem(const std::string &path) {
  return std::filesystem::path(path).stem().string();
}

nlohmann::ordered_json report_json(const mdmc::TranslationReport &r) {
  nlohmann::ordered_json j;
  j["e"] = r.entity_sets;
  j["r"] = r.relationship_sets;
  j["a"] = r.attributes;
  j["f"] = r.structural;
  j["rc"] = r.relational;
  j["nrc"] = r.non_relational;
  j["steps"] = r.steps;
  j["rcBreakdown"] = {{"pk", r.pks},           {"pkDomain", r.pk_domains},
                      {"pkNotNull", r.pk_not_nulls}, {"notNull", r.not_nulls},
                      {"domain", r.domains},   {"fk", r.fks},
                      {"unique", r.uniques},   {"check", r.tuple_checks},
                      {"default", r.defaults}};
  return j;
}

int cmd_validate(const Options &opt) {
  auto bundle = load_scheme(opt);
  if (!bundle.ok) return kExitUsage;
  std::cout << "scheme ok: " << bundle.scheme.sets.size() << " sets, "
            << bundle.scheme.mappings.size() << " functions, "
            << bundle.scheme.constraints.size() << " declared constraints\n";
  return kExitOk;
}

int cmd_translate(const Options &opt) {
  auto bundle = load_scheme(opt);
  if (!bundle.ok) return kExitUsage;
  auto tr = mdmc::translate(bundle.scheme);
  mdmc::ImplicationReport impl;
  if (opt.analyzer == "on") impl = mdmc::analyze(bundle.scheme, tr.schema, tr.residual);

  if (opt.format == "json") {
    nlohmann::ordered_json j;
    j["report"] = report_json(tr.report);
    j["tables"] = nlohmann::ordered_json::array();
    for (const auto &t : tr.schema.tables) j["tables"].push_back(t.name);
    j["residual"] = nlohmann::ordered_json::array();
    for (const auto &e : tr.residual.entries) {
      nlohmann::ordered_json c;
      c["id"] = e.constraint.label;
      c["kind"] = to_string(e.constraint.kind);
      c["sets"] = e.host_sets;
      c["description"] = e.constraint.description;
      j["residual"].push_back(c);
    }
    j["pruned"] = nlohmann::ordered_json::array();
    for (const auto &p : impl.pruned) {
      nlohmann::ordered_json pj;
      pj["table"] = p.table;
      pj["columns"] = p.key_columns;
      pj["impliedBy"] = p.implied_by;
      pj["rule"] = p.rule;
      j["pruned"].push_back(pj);
    }
    j["keptImplied"] = impl.kept_implied;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }

  const auto &r = tr.report;
  std::cout << "translated " << opt.scheme_path << "\n";
  std::cout << "e=" << r.entity_sets << " r=" << r.relationship_sets
            << " a=" << r.attributes << " f=" << r.structural << "\n";
  std::cout << "steps=" << r.steps << " rc=" << r.relational << " nrc=" << r.non_relational
            << "\n";
  std::cout << "rc = " << r.pks << " pk + " << r.pk_domains << " pk-domain + "
            << r.pk_not_nulls << " pk-notnull + " << r.not_nulls << " notnull + "
            << r.domains << " domain + " << r.fks << " fk + " << r.uniques
            << " unique + " << r.tuple_checks << " check";
  if (r.defaults) std::cout << " + " << r.defaults << " default";
  std::cout << "\n";

  if (opt.analyzer == "on") {
    int remaining = r.relational - static_cast<int>(impl.pruned.size());
    for (const auto &p : impl.pruned) {
      std::cout << "pruned unique key " << p.table << "(";
      for (std::size_t i = 0; i < p.key_columns.size(); ++i)
        std::cout << (i ? " . " : "") << p.key_columns[i];
      std::cout << ") implied by " << p.implied_by << " [" << p.rule << "]\n";
    }
    for (const auto &k : impl.kept_implied) std::cout << "kept: " << k << "\n";
    std::cout << "relational constraints to enforce: " << remaining << "\n";
  }

  std::cout << "residual constraints (" << tr.residual.entries.size() << "):\n";
  for (const auto &e : tr.residual.entries) {
    std::cout << "  " << e.constraint.label << " [" << to_string(e.constraint.kind)
              << "] on";
    for (const auto &h : e.host_sets) std::cout << " " << h;
    std::cout << ": " << e.constraint.description << "\n";
  }
  return kExitOk;
}

int cmd_emit_sql(const Options &opt) {
  auto bundle = load_scheme(opt);
  if (!bundle.ok) return kExitUsage;
  auto tr = mdmc::translate(bundle.scheme);
  if (opt.analyzer == "on") mdmc::analyze(bundle.scheme, tr.schema, tr.residual);
  auto profile = mdmc::DialectProfile::by_name(opt.dialect);
  auto out = mdmc::emit_ddl(tr.schema, profile);

  std::filesystem::create_directories(opt.out_dir);
  auto path = std::filesystem::path(opt.out_dir) /
              (scheme_stem(opt.scheme_path) + "." + profile.name + ".sql");
  std::ofstream(path, std::ios::binary) << out.sql;

  if (opt.format == "json") {
    nlohmann::ordered_json j;
    j["file"] = path.string();
    j["demotions"] = nlohmann::ordered_json::array();
    for (const auto &d : out.demotions) {
      nlohmann::ordered_json dj;
      dj["table"] = d.table;
      dj["columns"] = d.columns;
      dj["description"] = d.description;
      dj["reason"] = d.reason;
      dj["strategy"] = d.target_strategy;
      j["demotions"].push_back(dj);
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "wrote " << path.string() << "\n";
    for (const auto &d : out.demotions)
      std::cout << "demoted: " << d.description << " (" << d.reason << ") -> "
                << d.target_strategy << "\n";
  }
  return kExitOk;
}

int cmd_plan(const Options &opt) {
  auto bundle = load_scheme(opt);
  if (!bundle.ok) return kExitUsage;
  auto tr = mdmc::translate(bundle.scheme);
  if (opt.analyzer == "on") mdmc::analyze(bundle.scheme, tr.schema, tr.residual);
  auto profile = mdmc::DialectProfile::by_name(opt.dialect);
  auto ddl = mdmc::emit_ddl(tr.schema, profile);
  auto p = mdmc::plan(bundle.scheme, tr.residual, ddl.demotions, tr.schema);

  std::string json = mdmc::render_plan_json(p, tr.residual);
  std::filesystem::create_directories(opt.out_dir);
  auto path = std::filesystem::path(opt.out_dir) /
              (scheme_stem(opt.scheme_path) + ".plan.json");
  std::ofstream(path, std::ios::binary) << json;

  if (opt.format == "json") {
    std::cout << json;
  } else {
    std::cout << "wrote " << path.string() << "\n" << mdmc::render_plan_human(p);
  }
  return kExitOk;
}

int cmd_check(const Options &opt) {
  auto bundle = load_scheme(opt);
  if (!bundle.ok) return kExitUsage;
  auto tr = mdmc::translate(bundle.scheme);
  if (opt.analyzer == "on") mdmc::analyze(bundle.scheme, tr.schema, tr.residual);
  mdmc::Instance inst;
  try {
    inst = mdmc::load_instance(bundle.scheme, tr, opt.instance_dir, opt.current_year);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  auto violations = mdmc::check_all(bundle.scheme, tr, inst);

  if (opt.format == "json") {
    for (const auto &v : violations) {
      nlohmann::ordered_json j;
      j["constraint"] = v.constraint_id;
      j["table"] = v.table;
      j["x"] = v.row_x;
      if (v.row_y >= 0) j["y"] = v.row_y;
      j["severity"] = v.severity == mdmc::Severity::Error ? "error" : "warning";
      j["message"] = v.message;
      std::cout << j.dump() << "\n";
    }
  } else {
    for (const auto &v : violations) std::cout << v.message << "\n";
    std::cout << "violations: " << violations.size() << "\n";
  }
  return violations.empty() ? kExitOk : kExitViolations;
}

int cmd_simulate(const Options &opt) {
  auto bundle = load_scheme(opt);
  if (!bundle.ok) return kExitUsage;
  auto tr = mdmc::translate(bundle.scheme);
  if (opt.analyzer == "on") mdmc::analyze(bundle.scheme, tr.schema, tr.residual);
  auto profile = mdmc::DialectProfile::by_name(opt.dialect);
  auto ddl = mdmc::emit_ddl(tr.schema, profile);
  auto p = mdmc::plan(bundle.scheme, tr.residual, ddl.demotions, tr.schema);

  mdmc::Instance inst;
  std::string events_text;
  try {
    inst = mdmc::load_instance(bundle.scheme, tr, opt.instance_dir, opt.current_year);
    events_text = read_file(opt.events_path);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  int rejected = 0, line_no = 0;
  std::istringstream lines(events_text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++line_no;
    mdmc::Event ev;
    try {
      ev = mdmc::parse_event(line);
    } catch (const std::exception &e) {
      std::cerr << "error: event " << line_no << ": " << e.what() << "\n";
      return kExitUsage;
    }
    auto res = mdmc::apply_event(bundle.scheme, tr, p, inst, ev);
    if (!res.accepted) ++rejected;

    if (opt.format == "json") {
      nlohmann::ordered_json j;
      j["event"] = line_no;
      j["accepted"] = res.accepted;
      j["messages"] = res.messages;
      j["mutations"] = nlohmann::ordered_json::array();
      for (const auto &m : res.mutations) {
        nlohmann::ordered_json mj;
        mj["table"] = m.table;
        mj["x"] = m.x;
        mj["column"] = m.column;
        if (mdmc::is_null(m.value)) mj["value"] = nullptr;
        else if (mdmc::is_int(m.value)) mj["value"] = mdmc::as_int(m.value);
        else mj["value"] = mdmc::as_text(m.value);
        j["mutations"].push_back(mj);
      }
      std::cout << j.dump() << "\n";
    } else {
      std::cout << "event " << line_no << ": "
                << (res.accepted ? "accepted" : "rejected") << "\n";
      for (const auto &m : res.messages) std::cout << "  " << m << "\n";
      for (const auto &m : res.mutations)
        std::cout << "  set " << m.table << "[" << m.x << "]." << m.column << " = "
                  << (mdmc::is_null(m.value) ? "null" : mdmc::value_to_string(m.value))
                  << "\n";
    }
  }
  if (opt.format != "json")
    std::cout << "events: " << line_no << ", rejected: " << rejected << "\n";
  return rejected == 0 ? kExitOk : kExitViolations;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"mdmc - compiles mathematical data-model schemes into relational "
               "schemas, SQL DDL, and constraint-enforcement plans"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App *cmd, bool wants_instance, bool wants_events) {
    cmd->add_option("scheme", opt.scheme_path, "scheme source file (.mdm)")->required();
    cmd->add_option("--current-year", opt.current_year,
                    "pinned currentYear() value (default: system year)");
    cmd->add_option("--analyzer", opt.analyzer, "implication analyzer: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--out-dir", opt.out_dir, "output directory");
    cmd->add_option("--format", opt.format, "output format: human|json")
        ->check(CLI::IsMember({"human", "json"}));
    cmd->add_option("--dialect", opt.dialect, "SQL dialect profile: ansi|strict")
        ->check(CLI::IsMember({"ansi", "strict"}));
    if (wants_instance)
      cmd->add_option("--instance", opt.instance_dir, "instance CSV directory")
          ->required();
    if (wants_events)
      cmd->add_option("--events", opt.events_path, "line-delimited JSON event stream")
          ->required();
  };

  auto *validate = app.add_subcommand("validate", "parse and validate a scheme");
  add_common(validate, false, false);
  auto *translate = app.add_subcommand("translate", "translate a scheme and report");
  add_common(translate, false, false);
  auto *emit = app.add_subcommand("emit-sql", "emit SQL DDL under a dialect profile");
  add_common(emit, false, false);
  auto *planc = app.add_subcommand("plan", "compile the constraint-enforcement plan");
  add_common(planc, false, false);
  auto *check = app.add_subcommand("check", "check an instance against all constraints");
  add_common(check, true, false);
  auto *simulate = app.add_subcommand("simulate", "replay an event stream");
  add_common(simulate, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(opt);
    if (translate->parsed()) return cmd_translate(opt);
    if (emit->parsed()) return cmd_emit_sql(opt);
    if (planc->parsed()) return cmd_plan(opt);
    if (check->parsed()) return cmd_check(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
