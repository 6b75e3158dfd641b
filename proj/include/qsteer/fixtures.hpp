// Copyright 2026 The Qsteer Authors
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

#pragma once

#include <array>

#include "qsteer/covariance.hpp"

namespace qsteer {

/// Reconstructed two-mode covariance matrices measured after 0.002, 0.5, 1,
/// and 2 km of fiber. These are the reference fixtures shipped with the
/// project (see fixtures/ for the CSV form).
enum class FixtureLength { Km0p002 = 0, Km0p5 = 1, Km1 = 2, Km2 = 3 };

inline constexpr std::array<double, 4> fixture_length_km = {0.002, 0.5, 1.0, 2.0};

inline Mat4 fixture_cm(FixtureLength which) {
    struct Entries {
        double qa, pa, qb, pb, cq, cp;
    };
    static constexpr Entries table[] = {
        {1.35, 1.36, 1.38, 1.33, 0.77, -0.79},
        {1.32, 1.35, 1.35, 1.33, 0.73, -0.76},
        {1.32, 1.34, 1.35, 1.32, 0.73, -0.74},
        {1.30, 1.31, 1.33, 1.30, 0.69, -0.68},
    };
    const Entries& e = table[static_cast<int>(which)];
    Mat4 cm = Mat4::Zero();
    cm(0, 0) = e.qa;
    cm(1, 1) = e.pa;
    cm(2, 2) = e.qb;
    cm(3, 3) = e.pb;
    cm(0, 2) = cm(2, 0) = e.cq;
    cm(1, 3) = cm(3, 1) = e.cp;
    return cm;
}

inline std::array<Mat4, 4> all_fixture_cms() {
    return {fixture_cm(FixtureLength::Km0p002), fixture_cm(FixtureLength::Km0p5),
            fixture_cm(FixtureLength::Km1), fixture_cm(FixtureLength::Km2)};
}

}  // namespace qsteer
