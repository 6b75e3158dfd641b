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

#include "qsteer/coarse_grain.hpp"

#include <cmath>
#include <sstream>

#include "qsteer/errors.hpp"
#include "qsteer/numerics.hpp"

namespace qsteer {

void BinningScheme::validate() const {
    if (!(period > 0.0)) throw ValidationError("binning: period must be positive");
    if (bob_outcomes < 2) throw ValidationError("binning: need at least 2 Bob outcomes");
    if (alice_outcomes < 2) throw ValidationError("binning: need at least 2 Alice outcomes");
    if (!(alice_range > 0.0)) throw ValidationError("binning: alice_range must be positive");
}

double periodic_mod(double z, double period) {
    double m = std::fmod(z, period);
    if (m < 0.0) m += period;
    if (m >= period) m = 0.0;  // fmod roundoff at the seam wraps to 0
    return m;
}

int periodic_bin_index(double z, double period, int outcomes) {
    const double m = periodic_mod(z, period);
    const double s = period / outcomes;
    int idx = static_cast<int>(m / s);
    return idx >= outcomes ? outcomes - 1 : idx;
}

bool periodic_mask(double z, double period, int outcomes, int bin) {
    if (bin < 0 || bin >= outcomes) throw ValidationError("periodic_mask: bin out of range");
    return periodic_bin_index(z, period, outcomes) == bin;
}

double bob_bin_probability(double variance, double period, int outcomes, int bin) {
    if (!(variance > 0.0)) throw ValidationError("bob_bin_probability: variance must be positive");
    if (!(period > 0.0)) throw ValidationError("bob_bin_probability: period must be positive");
    if (bin < 0 || bin >= outcomes) throw ValidationError("bob_bin_probability: bin out of range");

    const double sigma = std::sqrt(variance);
    const double s = period / outcomes;
    // Everything beyond 9 sigma contributes less than 1e-12 in total.
    const int k_span = static_cast<int>(std::ceil(9.0 * sigma / period)) + 1;
    double sum = 0.0;
    for (int k = -k_span; k <= k_span; ++k) {
        const double lo = k * period + bin * s;
        const double hi = lo + s;
        sum += normal_cdf(hi / sigma) - normal_cdf(lo / sigma);
    }
    return sum;
}

std::pair<double, double> alice_bin_bounds(const BinningScheme& scheme, int bin) {
    if (bin < 0 || bin >= scheme.alice_outcomes - 1)
        throw ValidationError("alice_bin_bounds: not an interior bin");
    const double width = 2.0 * scheme.alice_range / (scheme.alice_outcomes - 1);
    const double lo = -scheme.alice_range + bin * width;
    return {lo, lo + width};
}

namespace {

struct BivariateMarginal {
    double var_alice;
    double var_bob;
    double cov;
    double cond_sigma;  // std dev of Bob given Alice
};

BivariateMarginal bivariate_marginal(const Mat4& cm, double alice_angle, Quadrature bob_y) {
    const Vec2 u(std::cos(alice_angle), std::sin(alice_angle));
    const int idx = static_cast<int>(bob_y);
    BivariateMarginal m;
    m.var_alice = u.dot(block_alice(cm) * u);
    m.var_bob = block_bob(cm)(idx, idx);
    m.cov = u.dot(block_cross(cm).col(idx));
    if (!(m.var_alice > 0.0 && m.var_bob > 0.0))
        throw ValidationError("joint_bin_probability: degenerate marginal variance");
    const double corr = m.cov / std::sqrt(m.var_alice * m.var_bob);
    if (std::abs(corr) >= 1.0 - 1e-12)
        throw ValidationError("joint_bin_probability: |correlation| too close to 1");
    m.cond_sigma = std::sqrt(m.var_bob - m.cov * m.cov / m.var_alice);
    return m;
}

// Mass of Bob's periodic bin for a Gaussian with the given mean and sigma.
double periodic_bin_mass(double mean, double sigma, double period, int outcomes, int bin) {
    const double s = period / outcomes;
    const int k_lo = static_cast<int>(std::floor((mean - 9.0 * sigma - bin * s) / period)) - 1;
    const int k_hi = static_cast<int>(std::ceil((mean + 9.0 * sigma - bin * s) / period)) + 1;
    double sum = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double lo = k * period + bin * s;
        const double hi = lo + s;
        sum += normal_cdf((hi - mean) / sigma) - normal_cdf((lo - mean) / sigma);
    }
    return sum;
}

double interior_joint_mass(const BivariateMarginal& m, double lo, double hi,
                           const BinningScheme& scheme, int bob_bin) {
    const double sd_alice = std::sqrt(m.var_alice);
    const double slope = m.cov / m.var_alice;
    auto integrand = [&](double z) {
        return normal_pdf(z / sd_alice) / sd_alice *
               periodic_bin_mass(slope * z, m.cond_sigma, scheme.period, scheme.bob_outcomes,
                                 bob_bin);
    };
    return adaptive_gauss_legendre(integrand, lo, hi, 1e-10);
}

}  // namespace

double joint_bin_probability(const Mat4& cm, double alice_angle, int alice_bin,
                             Quadrature bob_y, int bob_bin, const BinningScheme& scheme) {
    scheme.validate();
    require_physical_cm(cm, "joint_bin_probability");
    if (alice_bin < 0 || alice_bin >= scheme.alice_outcomes)
        throw ValidationError("joint_bin_probability: alice bin out of range");
    if (bob_bin < 0 || bob_bin >= scheme.bob_outcomes)
        throw ValidationError("joint_bin_probability: bob bin out of range");

    const BivariateMarginal m = bivariate_marginal(cm, alice_angle, bob_y);

    if (alice_bin == scheme.alice_outcomes - 1) {
        // Overflow: Bob marginal minus the interior contributions.
        double mass = bob_bin_probability(m.var_bob, scheme.period, scheme.bob_outcomes, bob_bin);
        for (int a = 0; a + 1 < scheme.alice_outcomes; ++a) {
            auto [lo, hi] = alice_bin_bounds(scheme, a);
            mass -= interior_joint_mass(m, lo, hi, scheme, bob_bin);
        }
        return std::max(0.0, mass);
    }
    auto [lo, hi] = alice_bin_bounds(scheme, alice_bin);
    return interior_joint_mass(m, lo, hi, scheme, bob_bin);
}

JointProbabilityTable::JointProbabilityTable(std::vector<double> angles,
                                             const BinningScheme& scheme)
    : angles_(std::move(angles)), scheme_(scheme) {
    data_.assign(angles_.size() * scheme_.alice_outcomes * 2 * scheme_.bob_outcomes, 0.0);
}

double& JointProbabilityTable::at(int x, int a, Quadrature y, int b) {
    const int yi = static_cast<int>(y);
    return data_[((static_cast<std::size_t>(x) * scheme_.alice_outcomes + a) * 2 + yi) *
                     scheme_.bob_outcomes +
                 b];
}

double JointProbabilityTable::at(int x, int a, Quadrature y, int b) const {
    return const_cast<JointProbabilityTable*>(this)->at(x, a, y, b);
}

double JointProbabilityTable::page_sum(int x, Quadrature y) const {
    double sum = 0.0;
    for (int a = 0; a < scheme_.alice_outcomes; ++a)
        for (int b = 0; b < scheme_.bob_outcomes; ++b) sum += at(x, a, y, b);
    return sum;
}

JointProbabilityTable joint_probability_table(const Mat4& cm, const std::vector<double>& angles,
                                              const BinningScheme& scheme) {
    scheme.validate();
    require_physical_cm(cm, "joint_probability_table");
    JointProbabilityTable table(angles, scheme);
    for (int x = 0; x < static_cast<int>(angles.size()); ++x) {
        for (Quadrature y : {Quadrature::Q, Quadrature::P}) {
            const BivariateMarginal m = bivariate_marginal(cm, angles[x], y);
            for (int b = 0; b < scheme.bob_outcomes; ++b) {
                double bob_mass =
                    bob_bin_probability(m.var_bob, scheme.period, scheme.bob_outcomes, b);
                double interior = 0.0;
                for (int a = 0; a + 1 < scheme.alice_outcomes; ++a) {
                    auto [lo, hi] = alice_bin_bounds(scheme, a);
                    double mass = interior_joint_mass(m, lo, hi, scheme, b);
                    table.at(x, a, y, b) = mass;
                    interior += mass;
                }
                table.at(x, scheme.alice_outcomes - 1, y, b) =
                    std::max(0.0, bob_mass - interior);
            }
        }
    }
    return table;
}

std::vector<FockState> conditional_assemblage(const Mat4& cm, Quadrature y,
                                              const BinningScheme& scheme, int dim,
                                              const AssemblageOptions& opts) {
    scheme.validate();
    const ConditionalGaussian cond = condition_on_quadrature(cm, y);
    const double sigma = std::sqrt(cond.outcome_variance);
    const double z_max = opts.z_max_sigmas * sigma;
    const double s = scheme.bin_width();

    GaussianFockFactory factory(cond.cm, cond.mean_slope, dim, z_max, opts.fock);
    const auto& rule = gauss_legendre(opts.nodes_per_segment);

    std::vector<FockState> states(scheme.bob_outcomes);
    double total_deficit = 0.0;
    for (int b = 0; b < scheme.bob_outcomes; ++b) {
        CMat acc = CMat::Zero(dim, dim);
        double deficit = 0.0;
        const int k_lo = static_cast<int>(std::floor((-z_max - b * s) / scheme.period)) - 1;
        const int k_hi = static_cast<int>(std::ceil((z_max - b * s) / scheme.period)) + 1;
        for (int k = k_lo; k <= k_hi; ++k) {
            const double lo = std::max(k * scheme.period + b * s, -z_max);
            const double hi = std::min(k * scheme.period + (b + 1) * s, z_max);
            if (!(lo < hi)) continue;
            const double mid = 0.5 * (lo + hi);
            const double half = 0.5 * (hi - lo);
            for (int i = 0; i < rule.nodes.size(); ++i) {
                const double z = mid + half * rule.nodes[i];
                const double w = half * rule.weights[i] * normal_pdf(z / sigma) / sigma;
                FockState rho_z = factory.at(z);
                acc += w * rho_z.matrix;
                deficit += w * rho_z.truncation_deficit;
            }
        }
        FockState& st = states[b];
        st.matrix = 0.5 * (acc + acc.adjoint().eval());
        clip_to_psd(st.matrix, 1e-8, "conditional_assemblage");
        st.trace_weight = st.matrix.real().trace();
        st.truncation_deficit = deficit;
        total_deficit += deficit;
    }

    if (total_deficit > opts.deficit_tolerance) {
        std::ostringstream msg;
        msg << "conditional_assemblage: integrated truncation deficit " << total_deficit
            << " exceeds tolerance " << opts.deficit_tolerance
            << "; increase the Fock dimension";
        throw NumericalError(msg.str());
    }
    return states;
}

}  // namespace qsteer
