/*
 * Copyright 2026 The lptslearn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "lpts/active.hpp"
#include "lpts/adversarial.hpp"
#include "lpts/agr.hpp"
#include "lpts/cex_format.hpp"
#include "lpts/compose.hpp"
#include "lpts/dist_leq.hpp"
#include "lpts/error.hpp"
#include "lpts/format.hpp"
#include "lpts/learn.hpp"
#include "lpts/model.hpp"
#include "lpts/partition.hpp"
#include "lpts/random.hpp"
#include "lpts/rational.hpp"
#include "lpts/relation.hpp"
#include "lpts/samples.hpp"
#include "lpts/simulation.hpp"
#include "lpts/smt/decode.hpp"
#include "lpts/smt/encode.hpp"
#include "lpts/smt/script.hpp"
#include "lpts/smt/sexpr.hpp"
#include "lpts/smt/solver.hpp"
#include "lpts/stochastic_partition.hpp"
