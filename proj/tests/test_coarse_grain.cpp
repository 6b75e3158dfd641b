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

#include "qsteer/coarse_grain.hpp"
#include "qsteer/errors.hpp"
#include "qsteer/fixtures.hpp"
#include "qsteer/numerics.hpp"

using namespace qsteer;

TEST_CASE("periodic mask conventions") {
    CHECK(periodic_mask(0.0, 4.0, 4, 0));
    CHECK(periodic_mask(-0.5, 4.0, 4, 3));  // -0.5 mod 4 = 3.5
    CHECK(periodic_mask(4.0, 4.0, 4, 0));   // wraps to 0
    CHECK_FALSE(periodic_mask(0.5, 4.0, 4, 1));

    // Partition: exactly one bin per sample.
    GaussianSampler g(99);
    for (int i = 0; i < 2000; ++i) {
        double z = 10.0 * g();
        int hits = 0;
        for (int b = 0; b < 5; ++b) hits += periodic_mask(z, 3.0, 5, b) ? 1 : 0;
        CHECK(hits == 1);
    }
}

TEST_CASE("bob bin probability") {
    SUBCASE("single outcome covers everything") {
        CHECK(bob_bin_probability(1.7, 2.0, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("two outcomes split evenly by symmetry") {
        for (double v : {0.5, 1.0, 2.3}) {
            for (double t : {1.0, 3.0, 7.0}) {
                CHECK(bob_bin_probability(v, t, 2, 0) == doctest::Approx(0.5).epsilon(1e-10));
                CHECK(bob_bin_probability(v, t, 2, 1) == doctest::Approx(0.5).epsilon(1e-10));
            }
        }
    }
    SUBCASE("frozen value from the density-integration oracle") {
        // Oracle: adaptive quadrature of the normal density over the bin set.
        double oracle = 0.0;
        for (int k = -4; k <= 4; ++k) {
            oracle += adaptive_gauss_legendre([](double z) { return normal_pdf(z); },
                                              k * 4.0, k * 4.0 + 1.0, 1e-13);
        }
        CHECK(oracle == doctest::Approx(0.3426943574498810).epsilon(1e-10));
        CHECK(bob_bin_probability(1.0, 4.0, 4, 0) == doctest::Approx(oracle).epsilon(1e-11));
    }
    SUBCASE("normalization over bins") {
        for (double v : {0.6, 1.3}) {
            for (double t : {1.5, 4.0, 8.0}) {
                for (int ob : {2, 3, 5}) {
                    double sum = 0.0;
                    for (int b = 0; b < ob; ++b) sum += bob_bin_probability(v, t, ob, b);
                    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
                }
            }
        }
    }
}

TEST_CASE("joint bin probability") {
    BinningScheme scheme;
    scheme.period = 4.0;
    scheme.bob_outcomes = 4;
    scheme.alice_outcomes = 4;
    scheme.alice_range = 5.0;

    SUBCASE("independence when the cross block vanishes") {
        Mat4 cm = Mat4::Identity() * 1.2;
        for (int a = 0; a < scheme.alice_outcomes; ++a) {
            for (int b = 0; b < scheme.bob_outcomes; ++b) {
                double joint = joint_bin_probability(cm, 0.0, a, Quadrature::Q, b, scheme);
                double bob = bob_bin_probability(1.2, scheme.period, scheme.bob_outcomes, b);
                double alice;
                double sd = std::sqrt(1.2);
                if (a < scheme.alice_outcomes - 1) {
                    auto [lo, hi] = alice_bin_bounds(scheme, a);
                    alice = normal_cdf(hi / sd) - normal_cdf(lo / sd);
                } else {
                    alice = 2.0 * normal_cdf(-scheme.alice_range / sd);
                }
                CHECK(joint == doctest::Approx(alice * bob).epsilon(1e-8).scale(1.0));
            }
        }
    }

    SUBCASE("normalization over all bins") {
        Mat4 cm = fixture_cm(FixtureLength::Km2);
        for (double theta : {0.0, M_PI / 4.0}) {
            double sum = 0.0;
            for (int a = 0; a < scheme.alice_outcomes; ++a)
                for (int b = 0; b < scheme.bob_outcomes; ++b)
                    sum += joint_bin_probability(cm, theta, a, Quadrature::P, b, scheme);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    SUBCASE("Monte Carlo oracle on the 2 km CM") {
        Mat4 cm = fixture_cm(FixtureLength::Km2);
        // Alice measures q_A (theta = 0); joint marginal with q_B.
        const double va = cm(0, 0), vb = cm(2, 2), c = cm(0, 2);
        // Cholesky of the 2x2 marginal.
        const double l11 = std::sqrt(va);
        const double l21 = c / l11;
        const double l22 = std::sqrt(vb - l21 * l21);
        GaussianSampler g(31337);
        const int n = 10000000;
        const int alice_bin = 2;  // [5/3, 5)
        auto [alo, ahi] = alice_bin_bounds(scheme, alice_bin);
        long hits = 0;
        for (int i = 0; i < n; ++i) {
            double u1 = g(), u2 = g();
            double za = l11 * u1;
            double zb = l21 * u1 + l22 * u2;
            if (za >= alo && za < ahi &&
                periodic_bin_index(zb, scheme.period, scheme.bob_outcomes) == 0)
                ++hits;
        }
        double mc = static_cast<double>(hits) / n;
        double se = std::sqrt(mc * (1.0 - mc) / n);
        double exact = joint_bin_probability(cm, 0.0, alice_bin, Quadrature::Q, 0, scheme);
        CHECK(std::abs(exact - mc) < 3.0 * se);
    }

    SUBCASE("degenerate correlation rejected") {
        Mat4 cm = Mat4::Identity();
        cm(0, 2) = cm(2, 0) = 1.0;  // perfectly correlated, also unphysical
        CHECK_THROWS(joint_bin_probability(cm, 0.0, 0, Quadrature::Q, 0, scheme));
    }
}

TEST_CASE("joint table matches single-entry evaluation") {
    BinningScheme scheme;
    scheme.period = 3.0;
    scheme.bob_outcomes = 3;
    scheme.alice_outcomes = 4;
    Mat4 cm = fixture_cm(FixtureLength::Km0p5);
    std::vector<double> angles = {M_PI_2, M_PI_4, -M_PI_4, 0.0};
    auto table = joint_probability_table(cm, angles, scheme);
    for (int x = 0; x < 4; ++x) {
        CHECK(table.page_sum(x, Quadrature::Q) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(table.page_sum(x, Quadrature::P) == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(table.at(1, 2, Quadrature::P, 1) ==
          doctest::Approx(joint_bin_probability(cm, M_PI_4, 2, Quadrature::P, 1, scheme))
              .epsilon(1e-10));
}

namespace {

BinningScheme small_scheme(double period, int bob_outcomes) {
    BinningScheme s;
    s.period = period;
    s.bob_outcomes = bob_outcomes;
    s.alice_outcomes = 6;
    s.alice_range = 5.0;
    return s;
}

Mat4 tmsv_cm(double n, double c) {
    Mat4 cm = n * Mat4::Identity();
    cm(0, 2) = cm(2, 0) = c;
    cm(1, 3) = cm(3, 1) = -c;
    return cm;
}

}  // namespace

TEST_CASE("conditional assemblage properties") {
    SUBCASE("no steering: every conditional state is the reduced state") {
        Mat4 cm = Mat4::Identity() * 1.3;
        auto states = conditional_assemblage(cm, Quadrature::Q, small_scheme(4.0, 3), 10);
        FockState reduced = gaussian_to_fock(1.3 * Mat2::Identity(), Vec2::Zero(), 10);
        for (const auto& st : states) {
            REQUIRE(st.trace_weight > 0.0);
            CMat normalized = st.matrix / st.trace_weight;
            CHECK(trace_distance(normalized, reduced.matrix) < 1e-7);
        }
    }

    SUBCASE("trace normalization and no-signaling sum") {
        Mat4 cm = tmsv_cm(1.25, 0.75);
        for (Quadrature y : {Quadrature::Q, Quadrature::P}) {
            auto states = conditional_assemblage(cm, y, small_scheme(4.0, 2), 12);
            double total = 0.0;
            CMat sum = CMat::Zero(12, 12);
            for (const auto& st : states) {
                total += st.trace_weight;
                sum += st.matrix;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
            FockState reduced = gaussian_to_fock(1.25 * Mat2::Identity(), Vec2::Zero(), 12);
            CHECK(trace_distance(sum, reduced.matrix) < 1e-6);
        }
    }

    SUBCASE("steering shows up as distinguishable conditional states") {
        Mat4 cm = tmsv_cm(1.25, 0.75);
        auto states = conditional_assemblage(cm, Quadrature::Q, small_scheme(4.0, 2), 12);
        REQUIRE(states.size() == 2);
        // Opposite mean displacements: <q> differs in sign.
        CMat q = quadrature_q(12);
        double m0 = (states[0].matrix * q).trace().real() / states[0].trace_weight;
        double m1 = (states[1].matrix * q).trace().real() / states[1].trace_weight;
        CHECK(m0 * m1 < 0.0);
        double overlap = (states[0].matrix * states[1].matrix).trace().real() /
                         (states[0].trace_weight * states[1].trace_weight);
        double purity0 = (states[0].matrix * states[0].matrix).trace().real() /
                         (states[0].trace_weight * states[0].trace_weight);
        CHECK(overlap < purity0);
    }

    SUBCASE("bin traces match the Gaussian bin masses") {
        Mat4 cm = fixture_cm(FixtureLength::Km2);
        BinningScheme scheme = small_scheme(4.0, 4);
        auto states = conditional_assemblage(cm, Quadrature::Q, scheme, 12);
        for (int b = 0; b < scheme.bob_outcomes; ++b) {
            double expected = bob_bin_probability(cm(2, 2), scheme.period, scheme.bob_outcomes, b);
            CHECK(states[b].trace_weight == doctest::Approx(expected).epsilon(1e-7));
        }
    }
}

TEST_CASE("assemblage-probability consistency ties the three layers together") {
    // Tr[M_{a|x} sigma_{b|y}] must equal the bivariate Gaussian bin mass.
    Mat4 cm = fixture_cm(FixtureLength::Km0p5);
    BinningScheme scheme = small_scheme(4.0, 3);
    const int dim = 18;
    AssemblageOptions opts;
    opts.deficit_tolerance = 1e-7;

    std::vector<double> angles = {M_PI_2, M_PI_4, -M_PI_4, 0.0};
    auto table = joint_probability_table(cm, angles, scheme);

    for (Quadrature y : {Quadrature::Q, Quadrature::P}) {
        auto states = conditional_assemblage(cm, y, scheme, dim, opts);
        for (int x = 0; x < static_cast<int>(angles.size()); ++x) {
            auto povms = alice_interval_povms(angles[x], scheme.alice_range,
                                              scheme.alice_outcomes, dim);
            for (int a = 0; a < scheme.alice_outcomes; ++a) {
                for (int b = 0; b < scheme.bob_outcomes; ++b) {
                    double lhs = (povms[a].matrix * states[b].matrix).trace().real();
                    double rhs = table.at(x, a, y, b);
                    CHECK(lhs == doctest::Approx(rhs).epsilon(2e-6).scale(1.0));
                }
            }
        }
    }
}
