// Copyright 2026 The srake Authors
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

#ifndef SRAKE_SRAKE_HPP
#define SRAKE_SRAKE_HPP

#include "srake/ga.hpp"
#include "srake/model.hpp"
#include "srake/qp.hpp"
#include "srake/report.hpp"
#include "srake/rng.hpp"
#include "srake/run_config.hpp"
#include "srake/selectors.hpp"
#include "srake/sim.hpp"
#include "srake/sinr.hpp"

#endif  // SRAKE_SRAKE_HPP
