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

#include "qsteer/covariance.hpp"

#include <cmath>
#include <sstream>

#include "qsteer/errors.hpp"

namespace qsteer {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPhysicalTol = 1e-9;
constexpr double kPinvRelTol = 1e-12;

double db_to_variance(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

double ChannelParams::transmittance() const {
    return eta0 * std::pow(10.0, -alpha_db_per_km * length_km / 10.0);
}

void ChannelParams::validate() const {
    if (!(eta0 > 0.0 && eta0 <= 1.0)) throw ValidationError("channel: eta0 must be in (0, 1]");
    if (alpha_db_per_km < 0.0) throw ValidationError("channel: alpha must be >= 0");
    if (length_km < 0.0) throw ValidationError("channel: length must be >= 0");
    if (delta < 0.0) throw ValidationError("channel: excess noise delta must be >= 0");
}

Mat4 symplectic_form() {
    Mat4 omega = Mat4::Zero();
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;
    return omega;
}

Mat2 block_alice(const Mat4& cm) { return cm.topLeftCorner<2, 2>(); }
Mat2 block_bob(const Mat4& cm) { return cm.bottomRightCorner<2, 2>(); }
Mat2 block_cross(const Mat4& cm) { return cm.topRightCorner<2, 2>(); }

CmDiagnostic validate_cm(const Mat4& cm) {
    CmDiagnostic diag;
    diag.symmetry_defect = (cm - cm.transpose()).cwiseAbs().maxCoeff();

    Eigen::Matrix4cd heisenberg = cm.cast<std::complex<double>>() +
                                  std::complex<double>(0.0, 1.0) * symplectic_form().cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(heisenberg, Eigen::EigenvaluesOnly);
    diag.min_uncertainty_eigenvalue = eig.eigenvalues().minCoeff();

    diag.physical = diag.symmetry_defect <= kSymmetryTol &&
                    diag.min_uncertainty_eigenvalue >= -kPhysicalTol;
    return diag;
}

void require_physical_cm(const Mat4& cm, const char* context) {
    CmDiagnostic diag = validate_cm(cm);
    if (!diag.physical) {
        std::ostringstream msg;
        msg << context << ": covariance matrix is not physical (symmetry defect "
            << diag.symmetry_defect << ", min eigenvalue of sigma + i*Omega "
            << diag.min_uncertainty_eigenvalue << ")";
        throw ValidationError(msg.str());
    }
}

Mat4 epr_source_cm(double sq1_db, double asq1_db, double sq2_db, double asq2_db,
                   double eta_det) {
    if (!(eta_det > 0.0 && eta_det <= 1.0))
        throw ValidationError("epr_source_cm: detection efficiency must be in (0, 1]");

    const double vs1 = db_to_variance(sq1_db);
    const double va1 = db_to_variance(asq1_db);
    const double vs2 = db_to_variance(sq2_db);
    const double va2 = db_to_variance(asq2_db);

    const double diag_q = 0.5 * (va1 + vs2);
    const double diag_p = 0.5 * (vs1 + va2);
    const double corr_q = 0.5 * (va1 - vs2);
    const double corr_p = -0.5 * (va2 - vs1);

    Mat4 cm = Mat4::Zero();
    cm(0, 0) = cm(2, 2) = diag_q;
    cm(1, 1) = cm(3, 3) = diag_p;
    cm(0, 2) = cm(2, 0) = corr_q;
    cm(1, 3) = cm(3, 1) = corr_p;

    require_physical_cm(cm, "epr_source_cm (squeezing/antisqueezing combination)");

    // Uniform detection-efficiency map: V -> eta V + (1 - eta) on the state.
    cm = eta_det * cm + (1.0 - eta_det) * Mat4::Identity();
    return cm;
}

Mat4 apply_fiber_channel(const Mat4& cm, const ChannelParams& params) {
    params.validate();
    require_physical_cm(cm, "apply_fiber_channel");

    const double eta = params.transmittance();
    const double sqrt_eta = std::sqrt(eta);

    Mat4 out = cm;
    out.bottomRightCorner<2, 2>() =
        eta * block_bob(cm) + (1.0 - eta) * (1.0 + params.delta) * Mat2::Identity();
    out.topRightCorner<2, 2>() = sqrt_eta * block_cross(cm);
    out.bottomLeftCorner<2, 2>() = out.topRightCorner<2, 2>().transpose();
    return out;
}

double gaussian_steering(const Mat4& cm) {
    require_physical_cm(cm, "gaussian_steering");
    const double det_b = block_bob(cm).determinant();
    const double det_ab = cm.determinant();
    if (det_ab <= 0.0)
        throw ValidationError("gaussian_steering: singular two-mode covariance matrix");
    return std::max(0.0, 0.5 * std::log(det_b / det_ab));
}

ConditionalGaussian condition_on_quadrature(const Mat4& cm, Quadrature y) {
    require_physical_cm(cm, "condition_on_quadrature");

    const int idx = static_cast<int>(y);
    const Mat2 alice = block_alice(cm);
    const Mat2 bob = block_bob(cm);
    const Mat2 cross = block_cross(cm);

    const double b_yy = bob(idx, idx);
    if (b_yy <= 0.0)
        throw ValidationError("condition_on_quadrature: measured quadrature has non-positive variance");

    ConditionalGaussian cond;
    cond.outcome_variance = b_yy;
    // Pi B Pi is rank one; its pseudoinverse is e e^T / B_yy unless B_yy is
    // negligible relative to the block scale.
    if (b_yy < kPinvRelTol * bob.cwiseAbs().maxCoeff()) {
        cond.cm = alice;
        cond.mean_slope = Vec2::Zero();
        return cond;
    }
    const Vec2 col = cross.col(idx);
    cond.cm = alice - (col * col.transpose()) / b_yy;
    cond.mean_slope = col / b_yy;
    return cond;
}

}  // namespace qsteer
