// Copyright 2026 The Loop2Mesh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "loop2mesh/checkpoint.hpp"
#include "loop2mesh/error.hpp"
#include "loop2mesh/eval.hpp"
#include "loop2mesh/geometry.hpp"
#include "loop2mesh/ingest.hpp"
#include "loop2mesh/loss.hpp"
#include "loop2mesh/net.hpp"
#include "loop2mesh/svg.hpp"
#include "loop2mesh/synth.hpp"
#include "loop2mesh/train.hpp"
