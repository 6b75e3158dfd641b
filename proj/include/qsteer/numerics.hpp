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
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace qsteer {

/// Standard normal density.
inline double normal_pdf(double x) {
    static const double kInvSqrt2Pi = 0.3989422804014326779;
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// Standard normal CDF via erfc (accurate in both tails).
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
/// Series for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

/// Gauss-Legendre rule on [-1, 1]. Results are cached per order.
struct GaussLegendre {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};
const GaussLegendre& gauss_legendre(int order);

/// Integrates f over [lo, hi] with adaptive panel bisection, Gauss-Legendre
/// order 16 vs 32 as the error estimate. Absolute tolerance.
double adaptive_gauss_legendre(const std::function<double(double)>& f, double lo,
                               double hi, double abs_tol, int max_depth = 24);

/// Deterministic standard-normal stream: xoshiro256++ + Box-Muller.
/// std::normal_distribution is implementation-defined, this is not.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) {
        // xoshiro256++ state seeded via splitmix64
        std::uint64_t x = seed;
        for (auto& s : state_) s = splitmix(x);
    }

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        double u2 = next_unit();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Uniform in (0, 1], never zero (log-safe).
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
    }

    std::uint64_t next_u64() {
        // xoshiro256++
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

  private:
    static std::uint64_t splitmix(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4] = {};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qsteer
