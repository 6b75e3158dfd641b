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

#include "qsteer/numerics.hpp"

using namespace qsteer;

TEST_CASE("normal cdf matches erfc identities") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(normal_cdf(-6.5) == doctest::Approx(4.016000583859118e-11).epsilon(1e-6));
}

TEST_CASE("regularized gamma Q against closed forms") {
    // Q(1, x) = exp(-x)
    for (double x : {0.1, 1.0, 3.5, 10.0}) {
        CHECK(regularized_gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    }
    // Q(1/2, x) = erfc(sqrt(x))
    for (double x : {0.2, 1.0, 4.0, 16.0}) {
        CHECK(regularized_gamma_q(0.5, x) ==
              doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-11));
    }
    // Q(2, x) = (1 + x) exp(-x)
    CHECK(regularized_gamma_q(2.0, 3.0) == doctest::Approx(4.0 * std::exp(-3.0)).epsilon(1e-12));
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const auto& rule = gauss_legendre(8);
    // degree-15 polynomial on [-1, 1]: integral of x^14 is 2/15
    double sum = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * std::pow(rule.nodes[i], 14);
    }
    CHECK(sum == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
    CHECK(rule.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature hits a Gaussian integral") {
    double integral = adaptive_gauss_legendre([](double z) { return normal_pdf(z); }, -8.0, 8.0, 1e-12);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gaussian sampler is deterministic with sane moments") {
    GaussianSampler g1(12345), g2(12345);
    for (int i = 0; i < 100; ++i) CHECK(g1() == g2());

    GaussianSampler g(777);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = g();
        sum += z;
        sumsq += z * z;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}
