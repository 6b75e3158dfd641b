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

#include <Eigen/Dense>

namespace qsteer {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Vec2 = Eigen::Vector2d;

// Two-mode covariance matrices are plain 4x4 symmetric matrices in
// shot-noise units (vacuum quadrature variance = 1), row order
// (q_A, p_A, q_B, p_B). All operations below are free functions on them.

/// One of the two quadratures measured by homodyne detection.
enum class Quadrature : int { Q = 0, P = 1 };

inline const char* to_string(Quadrature y) { return y == Quadrature::Q ? "q" : "p"; }

/// Fiber channel description. Transmittance follows eta0 * 10^(-alpha L / 10).
struct ChannelParams {
    double eta0 = 0.9;
    double alpha_db_per_km = 0.2;
    double length_km = 0.0;
    double delta = 0.01;  // excess noise, shot-noise units

    double transmittance() const;
    void validate() const;
};

/// Gaussian conditioning of Alice's mode on a homodyne outcome z at Bob.
/// Conditional mean is mean_slope * z; the conditional covariance does not
/// depend on z.
struct ConditionalGaussian {
    Mat2 cm;
    Vec2 mean_slope;
    double outcome_variance = 0.0;
};

/// Result of the physicality diagnostic.
struct CmDiagnostic {
    double symmetry_defect = 0.0;
    double min_uncertainty_eigenvalue = 0.0;  // min eig of sigma + i*Omega
    bool physical = false;
};

/// Two-mode symplectic form for row order (q_A, p_A, q_B, p_B).
Mat4 symplectic_form();

Mat2 block_alice(const Mat4& cm);
Mat2 block_bob(const Mat4& cm);
Mat2 block_cross(const Mat4& cm);  // upper-right 2x2

/// Symmetry defect and minimum eigenvalue of sigma + i*Omega; physical at
/// tolerance 1e-9. Never throws.
CmDiagnostic validate_cm(const Mat4& cm);

/// Throws ValidationError when validate_cm fails.
void require_physical_cm(const Mat4& cm, const char* context);

/// EPR source: two phase-squeezed states (dB values, negative = squeezed)
/// mixed on a balanced beam splitter with pi/2 phase offset, followed by a
/// uniform detection-efficiency loss map.
Mat4 epr_source_cm(double sq1_db, double asq1_db, double sq2_db, double asq2_db,
                   double eta_det);

/// Applies the lossy, noisy fiber to mode B only:
/// sigma_B -> eta sigma_B + (1-eta)(1+delta) I, C -> sqrt(eta) C.
Mat4 apply_fiber_channel(const Mat4& cm, const ChannelParams& params);

/// Gaussian B->A steerability, max{0, (1/2) ln(det sigma_B / det sigma)}.
double gaussian_steering(const Mat4& cm);

/// Conditions Alice's mode on Bob's homodyne measurement of quadrature y.
ConditionalGaussian condition_on_quadrature(const Mat4& cm, Quadrature y);

}  // namespace qsteer
