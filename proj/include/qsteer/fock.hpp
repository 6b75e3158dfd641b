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
#include <complex>
#include <vector>

#include "qsteer/covariance.hpp"

namespace qsteer {

using CMat = Eigen::MatrixXcd;

/// Truncated, possibly sub-normalized single-mode state in the Fock basis.
/// trace_weight is the retained trace; truncation_deficit the probability
/// mass lost to the cutoff.
struct FockState {
    CMat matrix;
    double trace_weight = 0.0;
    double truncation_deficit = 0.0;

    int dim() const { return static_cast<int>(matrix.rows()); }
};

/// Quadrature-interval POVM element at homodyne angle theta.
struct PovmElement {
    CMat matrix;
    double angle = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct FockOptions {
    double deficit_tolerance = 1e-6;
    int min_padding = 10;
};

/// psi_n(z): quadrature eigenfunction overlap <z|n> in the convention where
/// |psi_0|^2 is the standard normal density (vacuum variance 1).
double quadrature_wavefunction(int n, double z);

/// Fills out[n] = psi_n(z) for n = 0..out.size()-1 via the stable three-term
/// recurrence.
void quadrature_wavefunctions(double z, Eigen::Ref<Eigen::VectorXd> out);

/// Truncated annihilation operator.
CMat ladder_annihilation(int dim);

/// Quadrature operators built from truncated ladder operators.
CMat quadrature_q(int dim);
CMat quadrature_p(int dim);

/// Density matrix of the Gaussian state with the given 2x2 covariance and
/// mean (q, p), built by Williamson decomposition followed by squeeze,
/// rotation, and displacement exponentials in a padded dimension, then
/// cropped to dim.
FockState gaussian_to_fock(const Mat2& cm, const Vec2& mean, int dim,
                           const FockOptions& opts = {});

/// Precomputed machinery for the displaced family rho(z) with fixed
/// covariance and mean = slope * z. Shares the Williamson base state and the
/// eigendecomposition of the displacement generator across evaluations.
class GaussianFockFactory {
  public:
    /// max_abs_z bounds |z| over future at() calls; it sizes the padding.
    GaussianFockFactory(const Mat2& cm, const Vec2& slope, int dim, double max_abs_z,
                        const FockOptions& opts = {});

    /// Displaced state at outcome z, cropped to the target dimension.
    /// Positivity clipping is left to the caller (integrals of these states
    /// are clipped once at the end).
    FockState at(double z) const;

    int padded_dim() const { return padded_dim_; }

  private:
    int dim_;
    int padded_dim_;
    FockOptions opts_;
    CMat base_;                  // squeezed/rotated thermal state, padded
    Eigen::MatrixXcd disp_vecs_; // eigenvectors of the displacement generator
    Eigen::VectorXd disp_freqs_; // i * eigenvalues (real)
};

/// POVM element of the interval [lo, hi) for the quadrature at angle theta:
/// M_mn = exp(i (m-n) theta) * integral of psi_m psi_n over the interval.
/// Bounds may be +-infinity.
PovmElement quadrature_interval_povm(double theta, double lo, double hi, int dim,
                                     double abs_tol = 1e-10);

/// Alice's binning: `outcomes - 1` equal bins covering [-range, range] plus
/// one overflow element, computed as identity minus the interior sum.
std::vector<PovmElement> alice_interval_povms(double theta, double range, int outcomes,
                                              int dim, double abs_tol = 1e-10);

/// Clips eigenvalues in (-floor_tol, 0) to zero and rescales back to the
/// original trace. Throws NumericalError for negativity below -floor_tol.
void clip_to_psd(CMat& hermitian, double floor_tol = 1e-8, const char* context = "clip_to_psd");

/// Trace distance (1/2)||a - b||_1 between Hermitian matrices.
double trace_distance(const CMat& a, const CMat& b);

}  // namespace qsteer
