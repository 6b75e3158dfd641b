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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qsteer/covariance.hpp"

namespace qsteer {

/// Which quadrature each party measures during a session.
struct SessionSetting {
    Quadrature alice = Quadrature::Q;
    Quadrature bob = Quadrature::Q;

    bool operator==(const SessionSetting&) const = default;
};

/// One simulated homodyne run: N calibrated sample pairs (Alice, Bob) in
/// shot-noise units.
struct Session {
    SessionSetting setting;
    Eigen::Matrix<double, Eigen::Dynamic, 2> samples;
    std::uint64_t seed = 0;
    std::string sample_rate_tag;  // metadata only
};

/// Draws N i.i.d. pairs from the bivariate marginal of the CM picked out by
/// the setting. Bitwise deterministic for a fixed seed.
Session sample_session(const Mat4& cm, SessionSetting setting, std::size_t count,
                       std::uint64_t seed);

struct ReconstructionResult {
    Mat4 cm = Mat4::Zero();
    Mat4 standard_errors = Mat4::Zero();
    CmDiagnostic diagnostic;
    bool physical = false;  // warning flag only; boundary CMs are returned as-is
};

/// Paper-style estimators: cross-correlations from sum/difference variances.
double cross_from_sum_variance(double var_sum, double var_x, double var_y);
double cross_from_diff_variance(double var_diff, double var_x, double var_y);

/// Rebuilds the CM from sessions covering the four variances and the
/// (q_A,q_B), (p_A,p_B) pairs. Diagonals from sample variances; cross terms
/// from the average of the sum- and difference-based estimators; q-p cross
/// blocks fixed to zero. Standard errors via jackknife over 100 sub-blocks.
ReconstructionResult reconstruct_cm(const std::vector<Session>& sessions);

/// Session files: raw little-endian float64 pairs plus a JSON sidecar.
/// base path gets ".bin" and ".json" suffixes.
void save_session(const Session& session, const std::filesystem::path& base_path);
Session load_session(const std::filesystem::path& base_path);

}  // namespace qsteer
