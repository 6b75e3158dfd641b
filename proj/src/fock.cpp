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

#include "qsteer/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <sstream>

#include "qsteer/errors.hpp"
#include "qsteer/numerics.hpp"

namespace qsteer {

namespace {

using Complex = std::complex<double>;
const Complex kI(0.0, 1.0);

// Integration edge beyond which every psi_m psi_n with m, n < dim is
// negligible at double precision.
double wavefunction_edge(int dim) { return 2.0 * std::sqrt(2.0 * dim + 1.0) + 10.0; }

}  // namespace

double quadrature_wavefunction(int n, double z) {
    if (n < 0) throw ValidationError("quadrature_wavefunction: n must be >= 0");
    Eigen::VectorXd buf(n + 1);
    quadrature_wavefunctions(z, buf);
    return buf(n);
}

void quadrature_wavefunctions(double z, Eigen::Ref<Eigen::VectorXd> out) {
    const int d = static_cast<int>(out.size());
    if (d == 0) return;
    const double psi0 = std::pow(2.0 * M_PI, -0.25) * std::exp(-z * z / 4.0);
    out(0) = psi0;
    if (d == 1) return;
    out(1) = z * psi0;
    for (int n = 1; n + 1 < d; ++n) {
        out(n + 1) = (z * out(n) - std::sqrt(static_cast<double>(n)) * out(n - 1)) /
                     std::sqrt(static_cast<double>(n + 1));
    }
}

CMat ladder_annihilation(int dim) {
    CMat a = CMat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

CMat quadrature_q(int dim) {
    CMat a = ladder_annihilation(dim);
    return a + a.adjoint();
}

CMat quadrature_p(int dim) {
    CMat a = ladder_annihilation(dim);
    return kI * (a.adjoint() - a);
}

void clip_to_psd(CMat& hermitian, double floor_tol, const char* context) {
    Eigen::SelfAdjointEigenSolver<CMat> eig(hermitian);
    const Eigen::VectorXd& vals = eig.eigenvalues();
    double min_val = vals.minCoeff();
    if (min_val >= 0.0) return;
    if (min_val < -floor_tol) {
        std::ostringstream msg;
        msg << context << ": eigenvalue " << min_val << " below clip floor " << -floor_tol;
        throw NumericalError(msg.str());
    }
    double trace_before = hermitian.real().trace();
    Eigen::VectorXd clipped = vals.cwiseMax(0.0);
    hermitian = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
    double trace_after = hermitian.real().trace();
    if (trace_after > 0.0 && trace_before > 0.0) hermitian *= trace_before / trace_after;
}

double trace_distance(const CMat& a, const CMat& b) {
    CMat diff = a - b;
    diff = 0.5 * (diff + diff.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<CMat> eig(diff, Eigen::EigenvaluesOnly);
    return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

namespace {

// Squeezed and rotated thermal state reproducing the 2x2 covariance, in the
// padded dimension. Displacement is applied separately.
CMat build_base_state(const Mat2& cm, int dim_pad) {
    if ((cm - cm.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw ValidationError("gaussian_to_fock: covariance must be symmetric");
    const double det = cm.determinant();
    if (det < 1.0 - 1e-6)
        throw ValidationError("gaussian_to_fock: det below 1, not a physical single-mode state");

    Eigen::SelfAdjointEigenSolver<Mat2> eig(cm);
    Eigen::Vector2d lambda = eig.eigenvalues();
    Mat2 vecs = eig.eigenvectors();
    if (vecs.determinant() < 0.0) vecs.col(1) *= -1.0;
    const double phi = std::atan2(vecs(1, 0), vecs(0, 0));

    const double nu = std::sqrt(std::max(det, 1.0));
    const double nbar = std::max(0.0, (nu - 1.0) / 2.0);
    const double r = 0.5 * std::log(nu / lambda(0));  // lambda(0) is the smaller

    // Thermal occupation probabilities.
    CMat rho = CMat::Zero(dim_pad, dim_pad);
    if (nbar < 1e-15) {
        rho(0, 0) = 1.0;
    } else {
        const double ratio = nbar / (nbar + 1.0);
        double pk = 1.0 / (nbar + 1.0);
        for (int k = 0; k < dim_pad; ++k) {
            rho(k, k) = pk;
            pk *= ratio;
        }
    }

    if (std::abs(r) > 1e-15) {
        CMat a = ladder_annihilation(dim_pad);
        CMat gen = 0.5 * r * (a * a - (a.adjoint() * a.adjoint()).eval());
        CMat squeeze = gen.exp();
        rho = squeeze * rho * squeeze.adjoint();
    }

    if (std::abs(phi) > 1e-15) {
        Eigen::VectorXcd phases(dim_pad);
        for (int k = 0; k < dim_pad; ++k) phases(k) = std::exp(kI * (phi * k));
        rho = phases.asDiagonal() * rho * phases.conjugate().asDiagonal();
    }

    return rho;
}

int padded_dimension(int dim, double max_abs_alpha, const FockOptions& opts) {
    const double a = max_abs_alpha;
    int pad = std::max(opts.min_padding, static_cast<int>(std::ceil(a * a + 4.0 * a)));
    return dim + pad;
}

FockState crop_state(const CMat& padded, int dim) {
    FockState out;
    out.matrix = padded.topLeftCorner(dim, dim);
    out.matrix = 0.5 * (out.matrix + out.matrix.adjoint().eval());
    out.trace_weight = out.matrix.real().trace();
    out.truncation_deficit = 1.0 - out.trace_weight;
    return out;
}

}  // namespace

FockState gaussian_to_fock(const Mat2& cm, const Vec2& mean, int dim, const FockOptions& opts) {
    if (dim < 2) throw ValidationError("gaussian_to_fock: dimension must be >= 2");
    const Complex alpha(0.5 * mean(0), 0.5 * mean(1));
    const int dim_pad = padded_dimension(dim, std::abs(alpha), opts);

    CMat rho = build_base_state(cm, dim_pad);

    if (std::abs(alpha) > 1e-15) {
        CMat a = ladder_annihilation(dim_pad);
        CMat gen = alpha * a.adjoint() - std::conj(alpha) * a;
        CMat disp = gen.exp();
        rho = disp * rho * disp.adjoint();
    }

    FockState out = crop_state(rho, dim);
    if (out.truncation_deficit > opts.deficit_tolerance) {
        std::ostringstream msg;
        msg << "gaussian_to_fock: truncation deficit " << out.truncation_deficit
            << " exceeds tolerance " << opts.deficit_tolerance
            << "; increase the Fock dimension";
        throw NumericalError(msg.str());
    }
    clip_to_psd(out.matrix, 1e-8, "gaussian_to_fock");
    return out;
}

GaussianFockFactory::GaussianFockFactory(const Mat2& cm, const Vec2& slope, int dim,
                                         double max_abs_z, const FockOptions& opts)
    : dim_(dim), opts_(opts) {
    if (dim < 2) throw ValidationError("GaussianFockFactory: dimension must be >= 2");
    const Complex beta(0.5 * slope(0), 0.5 * slope(1));
    padded_dim_ = padded_dimension(dim, std::abs(beta) * std::abs(max_abs_z), opts);

    base_ = build_base_state(cm, padded_dim_);

    // Displacement generator for unit z: G = beta a^dag - conj(beta) a is
    // anti-Hermitian, so iG is Hermitian and exp(zG) = W e^{-i z w} W^dag.
    CMat a = ladder_annihilation(padded_dim_);
    CMat herm = kI * (beta * a.adjoint() - std::conj(beta) * a).eval();
    Eigen::SelfAdjointEigenSolver<CMat> eig(herm);
    disp_vecs_ = eig.eigenvectors();
    disp_freqs_ = eig.eigenvalues();
}

FockState GaussianFockFactory::at(double z) const {
    Eigen::VectorXcd phases(padded_dim_);
    for (int k = 0; k < padded_dim_; ++k) phases(k) = std::exp(-kI * (z * disp_freqs_(k)));
    CMat disp = disp_vecs_ * phases.asDiagonal() * disp_vecs_.adjoint();
    CMat rho = disp * base_ * disp.adjoint();
    return crop_state(rho, dim_);
}

namespace {

// Gram matrix of wavefunction products over [lo, hi] with panel-doubling
// refinement against the absolute tolerance.
Eigen::MatrixXd wavefunction_gram(double lo, double hi, int dim, double abs_tol) {
    auto integrate = [&](int panels) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd psi(dim);
        const auto& rule = gauss_legendre(32);
        const double width = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p) {
            const double a = lo + p * width;
            const double mid = a + 0.5 * width;
            for (int i = 0; i < rule.nodes.size(); ++i) {
                const double z = mid + 0.5 * width * rule.nodes[i];
                quadrature_wavefunctions(z, psi);
                gram.selfadjointView<Eigen::Lower>().rankUpdate(psi, 0.5 * width * rule.weights[i]);
            }
        }
        return Eigen::MatrixXd(gram.selfadjointView<Eigen::Lower>());
    };

    int panels = std::max(4, static_cast<int>(std::ceil((hi - lo) / 0.5)));
    Eigen::MatrixXd coarse = integrate(panels);
    for (int round = 0; round < 8; ++round) {
        Eigen::MatrixXd fine = integrate(2 * panels);
        if ((fine - coarse).cwiseAbs().maxCoeff() <= abs_tol) return fine;
        coarse = std::move(fine);
        panels *= 2;
    }
    throw NumericalError("quadrature_interval_povm: interval quadrature did not converge");
}

}  // namespace

PovmElement quadrature_interval_povm(double theta, double lo, double hi, int dim,
                                     double abs_tol) {
    if (!(lo < hi)) throw ValidationError("quadrature_interval_povm: need lo < hi");
    if (dim < 1) throw ValidationError("quadrature_interval_povm: dimension must be >= 1");

    const double edge = wavefunction_edge(dim);
    const double a = std::isinf(lo) ? -edge : lo;
    const double b = std::isinf(hi) ? edge : hi;

    PovmElement el;
    el.angle = theta;
    el.lower = lo;
    el.upper = hi;
    el.matrix = CMat::Zero(dim, dim);
    if (a < b) {
        Eigen::MatrixXd gram = wavefunction_gram(a, b, dim, abs_tol);
        for (int m = 0; m < dim; ++m)
            for (int n = 0; n < dim; ++n)
                el.matrix(m, n) = std::exp(kI * (theta * (m - n))) * gram(m, n);
    }
    return el;
}

std::vector<PovmElement> alice_interval_povms(double theta, double range, int outcomes,
                                              int dim, double abs_tol) {
    if (outcomes < 2) throw ValidationError("alice_interval_povms: need at least 2 outcomes");
    if (!(range > 0.0)) throw ValidationError("alice_interval_povms: range must be positive");

    std::vector<PovmElement> povms;
    povms.reserve(outcomes);
    const int interior = outcomes - 1;
    const double width = 2.0 * range / interior;
    CMat interior_sum = CMat::Zero(dim, dim);
    for (int bin = 0; bin < interior; ++bin) {
        double lo = -range + bin * width;
        double hi = (bin == interior - 1) ? range : lo + width;
        povms.push_back(quadrature_interval_povm(theta, lo, hi, dim, abs_tol));
        interior_sum += povms.back().matrix;
    }

    // Overflow element: complement of the interior sum, exactly complete.
    PovmElement overflow;
    overflow.angle = theta;
    overflow.lower = range;  // descriptor: |z| >= range
    overflow.upper = std::numeric_limits<double>::infinity();
    overflow.matrix = CMat::Identity(dim, dim) - interior_sum;
    overflow.matrix = 0.5 * (overflow.matrix + overflow.matrix.adjoint().eval());
    clip_to_psd(overflow.matrix, 1e-8, "alice_interval_povms overflow");
    povms.push_back(std::move(overflow));
    return povms;
}

}  // namespace qsteer
