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

#include "qsteer/coarse_grain.hpp"
#include "qsteer/sdp.hpp"

namespace qsteer {

/// Which data feeds the guessing-probability program: the full conditional
/// states, or only the joint probabilities of a few Alice directions.
enum class CertVariant { FullAssemblage, JointProbability };

const char* to_string(CertVariant variant);

/// Sub-normalized conditional states sigma_{b|y} of Alice for both of Bob's
/// quadrature measurements.
struct Assemblage {
    int dim = 0;
    int outcomes = 0;
    std::array<std::vector<FockState>, 2> sides;  // indexed by Quadrature

    std::vector<FockState>& side(Quadrature y) { return sides[static_cast<int>(y)]; }
    const std::vector<FockState>& side(Quadrature y) const {
        return sides[static_cast<int>(y)];
    }

    /// Trace normalization per measurement and observed no-signaling.
    void validate(double trace_tol = 1e-6, double nosignaling_tol = 1e-5) const;
};

/// Assemblage of a two-mode CM under the periodic binning scheme.
Assemblage make_assemblage(const Mat4& cm, const BinningScheme& scheme, int dim,
                           const AssemblageOptions& opts = {});

/// Alice's four homodyne directions used by the joint-probability variant:
/// p, (p+q)/sqrt2, (p-q)/sqrt2, q.
std::vector<double> default_alice_angles();

/// Joint probabilities plus Alice's POVMs, the joint-probability variant's
/// input data.
struct ProbabilityData {
    JointProbabilityTable table;
    std::vector<std::vector<PovmElement>> alice_povms;  // [direction][bin]
    int dim = 0;
};

ProbabilityData make_probability_data(const Mat4& cm, const BinningScheme& scheme, int dim,
                                      const std::vector<double>& angles = default_alice_angles());

/// Eve-constrained decomposition program over blocks sigma^e_{b|y}:
/// maximize sum_e Tr[sigma^e_{b=e|y*}] subject to reproducing the observed
/// assemblage, no-signaling across y, and positivity.
SdpProblem build_assemblage_program(const Assemblage& assemblage, Quadrature y_star);

/// Variant with the assemblage equalities replaced by the scalar constraints
/// sum_e Tr[M_{a|x} sigma^e_{b|y}] = p(ab|xy).
SdpProblem build_probability_program(const ProbabilityData& data, Quadrature y_star,
                                     int bob_outcomes);

/// H_min = -log2(p_guess); requires 0 < p_guess <= 1.
double min_entropy(double p_guess);

struct CertifyOptions {
    SdpOptions sdp;
    AssemblageOptions assemblage;
    double certified_gap = 1e-6;
    std::vector<double> alice_angles = default_alice_angles();
    // Alice binning used when optimize_period builds schemes itself.
    int alice_outcomes = 32;
    double alice_range = 5.0;
};

struct CertificationResult {
    double p_guess_primal = 1.0;
    double p_guess_dual = 1.0;  // certified upper bound on P_g
    double h_min = 0.0;         // from the dual bound
    CertVariant variant = CertVariant::FullAssemblage;
    Quadrature y_star = Quadrature::Q;
    BinningScheme scheme;
    SdpStatus status = SdpStatus::MaxIterations;
    double gap = 0.0;
    int iterations = 0;
    bool certified = false;
};

/// Builds the requested program from the CM and solves it.
CertificationResult certify_cm(const Mat4& cm, const BinningScheme& scheme, int dim,
                               CertVariant variant, Quadrature y_star,
                               const CertifyOptions& opts = {});

/// Solves the full-assemblage program for an explicit assemblage (used by
/// fixtures that bypass the Gaussian layer).
CertificationResult certify_assemblage(const Assemblage& assemblage, Quadrature y_star,
                                       const CertifyOptions& opts = {},
                                       const BinningScheme& scheme_snapshot = {});

/// Grid search over the binning period (T_q = T_p); ties break toward the
/// smaller period. Returns the best period with its certification.
std::pair<double, CertificationResult> optimize_period(
    const Mat4& cm, int bob_outcomes, int dim, const std::vector<double>& period_grid,
    CertVariant variant, Quadrature y_star, const CertifyOptions& opts = {});

}  // namespace qsteer
