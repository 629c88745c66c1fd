// Copyright 2026 The resp Authors
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

#include "resp/admissible.hpp"
#include "resp/contfrac.hpp"
#include "resp/errors.hpp"
#include "resp/fourier.hpp"
#include "resp/json_io.hpp"
#include "resp/model.hpp"
#include "resp/picard_oracle.hpp"
#include "resp/simulate.hpp"
#include "resp/solver.hpp"
#include "resp/trees.hpp"
