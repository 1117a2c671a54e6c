// Copyright 2026 The pact Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "pact/activity.hpp"
#include "pact/bench.hpp"
#include "pact/byte_io.hpp"
#include "pact/classifier.hpp"
#include "pact/dual.hpp"
#include "pact/error.hpp"
#include "pact/eval.hpp"
#include "pact/features.hpp"
#include "pact/fixed_pipeline.hpp"
#include "pact/fixed_point.hpp"
#include "pact/formats.hpp"
#include "pact/ingest.hpp"
#include "pact/smoother.hpp"
#include "pact/synth.hpp"
#include "pact/tree.hpp"
#include "pact/tree_io.hpp"
