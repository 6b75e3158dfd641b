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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qsteer/errors.hpp"
#include "qsteer/fock.hpp"
#include "qsteer/numerics.hpp"

using namespace qsteer;
using Complex = std::complex<double>;

namespace {

// Quadrature oracle independent of the library integration path: plain
// composite Gauss-Legendre with fixed fine panels.
double oracle_integral(int m, int n, double lo, double hi) {
    const auto& rule = gauss_legendre(24);
    const int panels = 400;
    const double width = (hi - lo) / panels;
    const int dim = std::max(m, n) + 1;
    Eigen::VectorXd psi(dim);
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        double mid = lo + (p + 0.5) * width;
        for (int i = 0; i < rule.nodes.size(); ++i) {
            double z = mid + 0.5 * width * rule.nodes[i];
            quadrature_wavefunctions(z, psi);
            sum += 0.5 * width * rule.weights[i] * psi(m) * psi(n);
        }
    }
    return sum;
}

}  // namespace

TEST_CASE("wavefunction values and parity") {
    CHECK(quadrature_wavefunction(0, 0.0) ==
          doctest::Approx(0.6316187777460647).epsilon(1e-13));
    CHECK(quadrature_wavefunction(1, 0.0) == doctest::Approx(0.0));
    // |psi_0|^2 is the standard normal density.
    for (double z : {-1.7, 0.3, 2.5}) {
        double psi0 = quadrature_wavefunction(0, z);
        CHECK(psi0 * psi0 == doctest::Approx(normal_pdf(z)).epsilon(1e-12));
    }
}

TEST_CASE("wavefunction orthonormality up to n = 20") {
    for (int m = 0; m <= 20; m += 5) {
        for (int n = m; n <= 20; n += 5) {
            double overlap = oracle_integral(m, n, -14.0, 14.0);
            CHECK(overlap == doctest::Approx(m == n ? 1.0 : 0.0).epsilon(1e-8).scale(1.0));
        }
    }
}

TEST_CASE("gaussian_to_fock basics") {
    SUBCASE("vacuum") {
        FockState vac = gaussian_to_fock(Mat2::Identity(), Vec2::Zero(), 8);
        CHECK(std::abs(vac.matrix(0, 0) - 1.0) < 1e-12);
        CHECK(vac.matrix.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(vac.truncation_deficit < 1e-12);
    }
    SUBCASE("coherent state amplitude 1") {
        FockState coh = gaussian_to_fock(Mat2::Identity(), Vec2(2.0, 0.0), 20);
        CHECK(coh.matrix(0, 0).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
        // Poisson photon statistics with unit mean.
        for (int k : {1, 2, 5}) {
            double expected = std::exp(-1.0) / std::tgamma(k + 1.0);
            CHECK(coh.matrix(k, k).real() == doctest::Approx(expected).epsilon(1e-8));
        }
        CHECK(coh.truncation_deficit < 1e-10);
    }
    SUBCASE("pure squeezed vacuum purity") {
        const double r = 0.3;
        Mat2 cm = Mat2::Zero();
        cm(0, 0) = std::exp(-2.0 * r);
        cm(1, 1) = std::exp(2.0 * r);
        FockState sq = gaussian_to_fock(cm, Vec2::Zero(), 20);
        double purity = (sq.matrix * sq.matrix).trace().real();
        CHECK(purity == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("unphysical covariance rejected") {
        Mat2 bad = 0.5 * Mat2::Identity();
        CHECK_THROWS_AS(gaussian_to_fock(bad, Vec2::Zero(), 8), ValidationError);
    }
    SUBCASE("deficit error advises larger dimension") {
        // Large displacement into a tiny truncated space.
        CHECK_THROWS_AS(gaussian_to_fock(Mat2::Identity(), Vec2(8.0, 0.0), 2), NumericalError);
    }
}

TEST_CASE("gaussian_to_fock reproduces first and second moments") {
    Mat2 cm;
    cm << 1.4, 0.2, 0.2, 1.1;
    Vec2 mean(0.7, -0.4);
    const int dim = 26;
    FockState rho = gaussian_to_fock(cm, mean, dim);
    REQUIRE(rho.truncation_deficit < 1e-8);

    CMat q = quadrature_q(dim);
    CMat p = quadrature_p(dim);
    double mq = (rho.matrix * q).trace().real();
    double mp = (rho.matrix * p).trace().real();
    CHECK(mq == doctest::Approx(mean(0)).epsilon(1e-6));
    CHECK(mp == doctest::Approx(mean(1)).epsilon(1e-6));

    double vq = (rho.matrix * q * q).trace().real() - mq * mq;
    double vp = (rho.matrix * p * p).trace().real() - mp * mp;
    CMat qp_sym = 0.5 * (q * p + p * q);
    double cqp = (rho.matrix * qp_sym).trace().real() - mq * mp;
    CHECK(vq == doctest::Approx(cm(0, 0)).epsilon(1e-6));
    CHECK(vp == doctest::Approx(cm(1, 1)).epsilon(1e-6));
    CHECK(cqp == doctest::Approx(cm(0, 1)).epsilon(1e-5));

    // Hermiticity and positivity per the type invariants.
    CHECK((rho.matrix - rho.matrix.adjoint()).norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<CMat> eig(rho.matrix, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() > -1e-8);
}

TEST_CASE("displaced-family factory matches the one-shot construction") {
    Mat2 cm;
    cm << 1.2, 0.0, 0.0, 1.05;
    Vec2 slope(0.5, -0.2);
    GaussianFockFactory factory(cm, slope, 12, 6.0);
    FockOptions loose;
    loose.deficit_tolerance = 1e-2;  // tail states are allowed to leak here
    for (double z : {-5.5, -1.0, 0.0, 0.25, 4.0}) {
        FockState from_factory = factory.at(z);
        FockState direct = gaussian_to_fock(cm, slope * z, 12, loose);
        CHECK((from_factory.matrix - direct.matrix).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("interval POVM analytic values") {
    SUBCASE("full line gives identity") {
        const double inf = std::numeric_limits<double>::infinity();
        PovmElement full = quadrature_interval_povm(0.0, -inf, inf, 10);
        CHECK((full.matrix - CMat::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("half line, dimension 2") {
        const double inf = std::numeric_limits<double>::infinity();
        PovmElement half = quadrature_interval_povm(0.0, 0.0, inf, 2);
        CHECK(half.matrix(0, 0).real() == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(half.matrix(1, 1).real() == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(half.matrix(0, 1).real() ==
              doctest::Approx(0.3989422804014327).epsilon(1e-9));
        CHECK(std::abs(half.matrix(0, 1).imag()) < 1e-12);
        // Cross-check against the independent quadrature oracle.
        CHECK(half.matrix(0, 1).real() ==
              doctest::Approx(oracle_integral(0, 1, 0.0, 14.0)).epsilon(1e-9));
    }
    SUBCASE("rotated half line carries the phase rule") {
        const double inf = std::numeric_limits<double>::infinity();
        PovmElement rot = quadrature_interval_povm(M_PI_2, 0.0, inf, 2);
        Complex expected = std::exp(Complex(0.0, -M_PI_2)) * 0.3989422804014327;
        CHECK(std::abs(rot.matrix(0, 1) - expected) < 1e-9);
        CHECK(rot.matrix(0, 0).real() == doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("POVM partition sums to identity") {
    const double inf = std::numeric_limits<double>::infinity();
    const int dim = 24;
    double cuts[] = {-2.0, -0.5, 1.0, 3.0};
    CMat sum = quadrature_interval_povm(0.3, -inf, cuts[0], dim).matrix;
    for (int i = 0; i + 1 < 4; ++i)
        sum += quadrature_interval_povm(0.3, cuts[i], cuts[i + 1], dim).matrix;
    sum += quadrature_interval_povm(0.3, cuts[3], inf, dim).matrix;
    CHECK((sum - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("alice bins are positive, bounded, and complete") {
    const int dim = 14;
    auto povms = alice_interval_povms(M_PI / 4.0, 5.0, 8, dim);
    REQUIRE(povms.size() == 8);
    CMat sum = CMat::Zero(dim, dim);
    for (const auto& el : povms) {
        Eigen::SelfAdjointEigenSolver<CMat> eig(el.matrix, Eigen::EigenvaluesOnly);
        CHECK(eig.eigenvalues().minCoeff() > -1e-8);
        CHECK(eig.eigenvalues().maxCoeff() < 1.0 + 1e-8);
        sum += el.matrix;
    }
    CHECK((sum - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-8);
}
