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
#include <vector>

namespace mdmc {

/// 1-based source range; start <= end.
struct SourceSpan {
  std::string file;
  int line_start = 1, col_start = 1;
  int line_end = 1, col_end = 1;

  std::string to_string() const {
    std::ostringstream os;
    os << (file.empty() ? "<input>" : file) << ":" << line_start << ":" << col_start;
    return os.str();
  }
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;

  std::string to_string() const {
    return span.to_string() + ": " +
           (severity == Severity::Error ? "error: " : "warning: ") + message;
  }
};

inline bool has_errors(const std::vector<Diagnostic> &ds) {
  for (const auto &d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

}  // namespace mdmc
