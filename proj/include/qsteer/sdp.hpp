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

#include <string>
#include <vector>

#include "qsteer/fock.hpp"

namespace qsteer {

/// One Hermitian coefficient acting on one PSD block.
struct SdpTerm {
    int block = 0;
    CMat coeff;
};

/// Linear equality  sum_j Tr[coeff_j X_{block_j}] = rhs.
struct SdpConstraint {
    std::vector<SdpTerm> terms;
    double rhs = 0.0;
};

/// Block-structured SDP in the maximize convention:
///   max sum_j Tr[C_j X_j]  s.t.  Tr-linear equalities,  X_j >= 0.
/// Complex Hermitian blocks are embedded into real symmetric blocks
/// internally; the interface speaks Hermitian throughout.
struct SdpProblem {
    std::vector<int> block_dims;
    std::vector<SdpTerm> objective;
    std::vector<SdpConstraint> constraints;

    void validate() const;
    int variable_dimension() const;  // sum of d_j^2 (real parameters)
};

enum class SdpStatus { Optimal, Infeasible, MaxIterations };

const char* to_string(SdpStatus status);

struct SdpOptions {
    double tolerance = 1e-7;             // relative complementarity gap
    double feasibility_tolerance = 1e-8;  // primal/dual residual (relative)
    int max_iterations = 200;
    double step_fraction = 0.98;  // fraction of the step to the boundary
    bool mehrotra = true;         // predictor-corrector (off: fixed centering)
    bool verbose = false;
};

/// Primal-dual pair. dual_value >= primal_value up to roundoff by weak
/// duality; dual_value is the certified upper bound used downstream.
struct SdpSolution {
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;  // dual_value - primal_value
    std::vector<CMat> blocks;
    Eigen::VectorXd dual_multipliers;
    SdpStatus status = SdpStatus::MaxIterations;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

/// Debug/oracle dump format: JSON with base64 matrix payloads.
std::string sdp_problem_to_json(const SdpProblem& problem);
SdpProblem sdp_problem_from_json(const std::string& text);
std::string sdp_solution_to_json(const SdpSolution& solution);

}  // namespace qsteer
