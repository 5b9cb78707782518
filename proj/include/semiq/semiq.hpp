// Copyright 2026 The semiq Authors
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

// Umbrella header for the semiq engine: Gaussian quadrature algebra,
// circuit elements, the partial-transfer protocol, figures of merit, the
// shot-level sampling oracle and the serializable run configuration.

#include "semiq/basis.hpp"        // IWYU pragma: export
#include "semiq/mode_expr.hpp"    // IWYU pragma: export
#include "semiq/elements.hpp"     // IWYU pragma: export
#include "semiq/protocol.hpp"     // IWYU pragma: export
#include "semiq/metrics.hpp"      // IWYU pragma: export
#include "semiq/monte_carlo.hpp"  // IWYU pragma: export
#include "semiq/run_config.hpp"   // IWYU pragma: export
