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

#include <array>
#include <utility>
#include <vector>

#include "qsteer/covariance.hpp"
#include "qsteer/fock.hpp"

namespace qsteer {

/// Periodic coarse-graining of Bob's homodyne outcomes plus Alice's interval
/// binning. The same period is used for both of Bob's quadratures.
struct BinningScheme {
    double period = 4.0;
    int bob_outcomes = 4;
    int alice_outcomes = 32;
    double alice_range = 5.0;

    double bin_width() const { return period / bob_outcomes; }
    void validate() const;
};

/// z reduced into [0, period).
double periodic_mod(double z, double period);

/// Index of the periodic bin containing z.
int periodic_bin_index(double z, double period, int outcomes);

/// Indicator of Eq-style periodic bin membership: 1 iff
/// bin*s <= (z mod period) < (bin+1)*s with s = period / outcomes.
bool periodic_mask(double z, double period, int outcomes, int bin);

/// Mass of the periodic bin under a zero-mean Gaussian of given variance,
/// summed over repetitions until the residual tail is below 1e-12.
double bob_bin_probability(double variance, double period, int outcomes, int bin);

/// Bounds of Alice's interior bin (bin < alice_outcomes - 1). The last bin is
/// the overflow |z| >= alice_range and has no single interval.
std::pair<double, double> alice_bin_bounds(const BinningScheme& scheme, int bin);

/// Joint mass of (Alice bin at angle theta) x (Bob periodic bin) under the
/// bivariate Gaussian marginal of the CM. Overflow bins are computed as the
/// Bob-marginal complement of the interior bins.
double joint_bin_probability(const Mat4& cm, double alice_angle, int alice_bin,
                             Quadrature bob_y, int bob_bin, const BinningScheme& scheme);

/// Full table p(a b | x y) over Alice angles x and Bob quadratures y.
class JointProbabilityTable {
  public:
    JointProbabilityTable(std::vector<double> angles, const BinningScheme& scheme);

    double& at(int x, int a, Quadrature y, int b);
    double at(int x, int a, Quadrature y, int b) const;

    const std::vector<double>& angles() const { return angles_; }
    const BinningScheme& scheme() const { return scheme_; }
    int alice_outcomes() const { return scheme_.alice_outcomes; }
    int bob_outcomes() const { return scheme_.bob_outcomes; }

    /// Sum over (a, b) for one (x, y) page; 1 up to quadrature error.
    double page_sum(int x, Quadrature y) const;

  private:
    std::vector<double> angles_;
    BinningScheme scheme_;
    std::vector<double> data_;
};

JointProbabilityTable joint_probability_table(const Mat4& cm, const std::vector<double>& angles,
                                              const BinningScheme& scheme);

struct AssemblageOptions {
    double z_max_sigmas = 6.5;     // integration cutoff; tail mass < 1e-10
    int nodes_per_segment = 32;    // Gauss-Legendre nodes per bin segment
    double deficit_tolerance = 1e-6;  // integrated truncation deficit cap
    FockOptions fock;
};

/// Conditional states sigma_{b|y} of Alice for Bob's measurement y, as
/// sub-normalized Fock matrices: integral of f_b(z) p(z) rho_A(z) dz.
std::vector<FockState> conditional_assemblage(const Mat4& cm, Quadrature y,
                                              const BinningScheme& scheme, int dim,
                                              const AssemblageOptions& opts = {});

}  // namespace qsteer
