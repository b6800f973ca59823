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

#ifndef FOURPHOTON_FIT_H_
#define FOURPHOTON_FIT_H_

#include <span>
#include <stdexcept>

namespace fourphoton {

struct ScanPoint {
    double phase = 0;
    double value = 0;
    double sigma = 0;
};

/// E(phi) = A cos(phi - delta) + C with visibility |A|.
struct ScanFit {
    double visibility = 0;
    double phase_offset = 0;
    double offset = 0;
    double visibility_error = 0;
    double phase_offset_error = 0;
    double offset_error = 0;
};

struct UnderdeterminedFitError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Linear least squares on {cos phi, sin phi, 1}. Points are weighted by
/// 1/sigma^2 when every sigma is positive, otherwise unweighted with errors
/// scaled by the residual variance. Needs three abscissae distinct modulo 2 pi.
ScanFit fit_scan(std::span<const ScanPoint> points);

}  // namespace fourphoton

#endif
