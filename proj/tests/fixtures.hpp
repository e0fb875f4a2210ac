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

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mdmc/parser.hpp"

namespace testutil {

inline std::string fixture_dir() { return MDMC_FIXTURE_DIR; }

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline mdmc::MdmScheme genealogy() {
  static mdmc::MdmScheme cached = [] {
    auto res = mdmc::parse_scheme(read_file(fixture_dir() + "/genealogy/genealogy.mdm"),
                                  "genealogy.mdm");
    if (!res.ok()) {
      std::string msg = "genealogy fixture fails to parse:";
      for (const auto &d : res.errors) msg += "\n  " + d.to_string();
      throw std::runtime_error(msg);
    }
    return res.scheme;
  }();
  return cached;
}

inline std::string genealogy_instance_dir() {
  return fixture_dir() + "/genealogy/instance";
}

}  // namespace testutil
