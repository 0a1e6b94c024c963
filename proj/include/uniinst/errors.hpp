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

#include <stdexcept>
#include <string>

namespace uniinst {

// Error taxonomy. Every throwing code path in the library raises one of
// these so callers (and tests) can discriminate failure modes.

struct ShapeMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyMaskError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MalformedRleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidMatrixError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct OracleTooLargeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidCategoryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidLossError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SceneFormatError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace uniinst
