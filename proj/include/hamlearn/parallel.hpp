// Copyright 2026 The hamlearn Authors
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

#include <cstddef>
#include <functional>

namespace hamlearn {

/// Worker count used by parallel_for; 1 runs everything inline.
void set_worker_threads(int threads);
int worker_threads();

/// Calls body(i) for every i in [0, count). Each index must write only its
/// own output slot; results are then independent of the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hamlearn
