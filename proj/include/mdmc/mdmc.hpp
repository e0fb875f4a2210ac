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

#include "mdmc/check.hpp"
#include "mdmc/diagnostics.hpp"
#include "mdmc/eval.hpp"
#include "mdmc/events.hpp"
#include "mdmc/formula.hpp"
#include "mdmc/implication.hpp"
#include "mdmc/instance.hpp"
#include "mdmc/parser.hpp"
#include "mdmc/planner.hpp"
#include "mdmc/relational.hpp"
#include "mdmc/scheme.hpp"
#include "mdmc/serializer.hpp"
#include "mdmc/sql_emitter.hpp"
#include "mdmc/translator.hpp"
#include "mdmc/validate.hpp"
#include "mdmc/value.hpp"
