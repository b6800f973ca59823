// Copyright 2026 The fourphoton Authors
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

#ifndef FOURPHOTON_EXEC_H_
#define FOURPHOTON_EXEC_H_

#include <cstdint>

namespace fourphoton {

/// Selects between the OpenMP kernel and the serial reference it is tested
/// against. Both produce identical results for identical inputs.
enum class Exec : uint8_t { kSerial, kParallel };

}  // namespace fourphoton

#endif
