// Copyright 2026 The UniInst Engine Authors.
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

#include <functional>

namespace uniinst {

/// Worker cap taken from the UNIINST_THREADS environment variable;
/// 0 or unset means one worker per hardware thread.
int effective_threads();

/// Runs fn(i) for i in [0, n) across effective_threads() workers using a
/// static partition. Callers keep results deterministic by writing into
/// per-index slots; the partition itself never influences output order.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace uniinst
