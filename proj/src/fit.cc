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

#include "fourphoton/fit.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "fourphoton/correlation.h"

namespace fourphoton {

ScanFit fit_scan(std::span<const ScanPoint> points) {
    std::vector<double> wrapped;
    for (const auto &p : points) {
        wrapped.push_back(wrap_phase(p.phase));
    }
    std::sort(wrapped.begin(), wrapped.end());
    size_t distinct = 0;
    for (size_t i = 0; i < wrapped.size(); i++) {
        if (i == 0 || wrapped[i] - wrapped[i - 1] > 1e-12) {
            distinct++;
        }
    }
    if (distinct >= 2 && wrapped.back() - wrapped.front() > 2 * kPi - 1e-12) {
        distinct--;
    }
    if (distinct < 3) {
        throw UnderdeterminedFitError("sinusoidal fit needs at least 3 distinct phases, got " +
                                      std::to_string(distinct));
    }

    bool weighted = std::all_of(points.begin(), points.end(), [](const ScanPoint &p) { return p.sigma > 0; });
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; i++) {
        const auto &p = points[static_cast<size_t>(i)];
        x(i, 0) = std::cos(p.phase);
        x(i, 1) = std::sin(p.phase);
        x(i, 2) = 1;
        y(i) = p.value;
        w(i) = weighted ? 1 / (p.sigma * p.sigma) : 1;
    }
    Eigen::Matrix3d normal = x.transpose() * w.asDiagonal() * x;
    Eigen::Vector3d rhs = x.transpose() * w.asDiagonal() * y;
    Eigen::Vector3d beta = normal.ldlt().solve(rhs);
    Eigen::Matrix3d cov = normal.inverse();
    if (!weighted) {
        double rss = (y - x * beta).squaredNorm();
        cov *= n > 3 ? rss / static_cast<double>(n - 3) : 0.0;
    }

    ScanFit fit;
    double ac = beta(0);
    double as = beta(1);
    fit.visibility = std::hypot(ac, as);
    fit.phase_offset = std::atan2(as, ac);
    fit.offset = beta(2);
    fit.offset_error = std::sqrt(std::max(cov(2, 2), 0.0));
    double v2 = fit.visibility * fit.visibility;
    if (v2 > 0) {
        double var_v = (ac * ac * cov(0, 0) + as * as * cov(1, 1) + 2 * ac * as * cov(0, 1)) / v2;
        double var_d = (as * as * cov(0, 0) + ac * ac * cov(1, 1) - 2 * ac * as * cov(0, 1)) / (v2 * v2);
        fit.visibility_error = std::sqrt(std::max(var_v, 0.0));
        fit.phase_offset_error = std::sqrt(std::max(var_d, 0.0));
    } else {
        fit.visibility_error = std::sqrt(std::max(0.5 * (cov(0, 0) + cov(1, 1)), 0.0));
        fit.phase_offset_error = kPi;
    }
    return fit;
}

}  // namespace fourphoton
