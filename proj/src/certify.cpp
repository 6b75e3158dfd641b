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

#include "qsteer/certify.hpp"

#include <cmath>
#include <sstream>

#include "qsteer/errors.hpp"

namespace qsteer {

namespace {

using Complex = std::complex<double>;

// Variable layout: block (e, y, b) at index (e * 2 + y) * outcomes + b.
int block_index(int guess, Quadrature y, int bin, int outcomes) {
    return (guess * 2 + static_cast<int>(y)) * outcomes + bin;
}

// Hermitian basis element reading Re X_rc (r <= c).
CMat basis_real(int dim, int r, int c) {
    CMat h = CMat::Zero(dim, dim);
    if (r == c) {
        h(r, r) = 1.0;
    } else {
        h(r, c) = 0.5;
        h(c, r) = 0.5;
    }
    return h;
}

// Hermitian basis element reading Im X_rc (r < c).
CMat basis_imag(int dim, int r, int c) {
    CMat h = CMat::Zero(dim, dim);
    h(r, c) = Complex(0.0, 0.5);
    h(c, r) = Complex(0.0, -0.5);
    return h;
}

// Per-bin weights proportional to trace, for distributing a marginal
// correction without disturbing positivity.
std::vector<double> trace_weights(const std::vector<FockState>& side) {
    double total = 0.0;
    for (const auto& st : side) total += std::max(st.trace_weight, 0.0);
    std::vector<double> w(side.size(), 1.0 / side.size());
    if (total > 0.0)
        for (std::size_t b = 0; b < side.size(); ++b)
            w[b] = std::max(side[b].trace_weight, 0.0) / total;
    return w;
}

// The q and p marginals of a quadrature-derived assemblage agree only up to
// integration error; the equality constraints require them to agree exactly.
// Split the (tiny) defect across bins, proportionally to trace.
Assemblage symmetrize_marginals(const Assemblage& in) {
    Assemblage out = in;
    const int dim = in.dim;
    CMat sum_q = CMat::Zero(dim, dim), sum_p = CMat::Zero(dim, dim);
    for (const auto& st : out.side(Quadrature::Q)) sum_q += st.matrix;
    for (const auto& st : out.side(Quadrature::P)) sum_p += st.matrix;
    const CMat target = 0.5 * (sum_q + sum_p);
    for (Quadrature y : {Quadrature::Q, Quadrature::P}) {
        const CMat defect = target - (y == Quadrature::Q ? sum_q : sum_p);
        auto w = trace_weights(out.side(y));
        auto& side = out.side(y);
        for (std::size_t b = 0; b < side.size(); ++b) {
            side[b].matrix += w[b] * defect;
            side[b].matrix = 0.5 * (side[b].matrix + side[b].matrix.adjoint().eval());
            side[b].trace_weight = side[b].matrix.real().trace();
        }
    }
    return out;
}

}  // namespace

const char* to_string(CertVariant variant) {
    return variant == CertVariant::FullAssemblage ? "full-assemblage" : "joint-probability";
}

void Assemblage::validate(double trace_tol, double nosignaling_tol) const {
    if (dim < 2) throw ValidationError("assemblage: dimension must be >= 2");
    if (outcomes < 2) throw ValidationError("assemblage: need at least 2 outcomes");
    for (Quadrature y : {Quadrature::Q, Quadrature::P}) {
        const auto& s = side(y);
        if (static_cast<int>(s.size()) != outcomes)
            throw ValidationError("assemblage: wrong number of conditional states");
        double total = 0.0;
        for (const auto& st : s) {
            if (st.matrix.rows() != dim || st.matrix.cols() != dim)
                throw ValidationError("assemblage: state dimension mismatch");
            total += st.trace_weight;
        }
        if (std::abs(total - 1.0) > trace_tol) {
            std::ostringstream msg;
            msg << "assemblage: traces for y=" << to_string(y) << " sum to " << total;
            throw ValidationError(msg.str());
        }
    }
    CMat sum_q = CMat::Zero(dim, dim), sum_p = CMat::Zero(dim, dim);
    for (const auto& st : side(Quadrature::Q)) sum_q += st.matrix;
    for (const auto& st : side(Quadrature::P)) sum_p += st.matrix;
    if (trace_distance(sum_q, sum_p) > nosignaling_tol)
        throw ValidationError("assemblage: observed no-signaling violated");
}

Assemblage make_assemblage(const Mat4& cm, const BinningScheme& scheme, int dim,
                           const AssemblageOptions& opts) {
    Assemblage a;
    a.dim = dim;
    a.outcomes = scheme.bob_outcomes;
    a.side(Quadrature::Q) = conditional_assemblage(cm, Quadrature::Q, scheme, dim, opts);
    a.side(Quadrature::P) = conditional_assemblage(cm, Quadrature::P, scheme, dim, opts);
    return a;
}

std::vector<double> default_alice_angles() { return {M_PI_2, M_PI_4, -M_PI_4, 0.0}; }

ProbabilityData make_probability_data(const Mat4& cm, const BinningScheme& scheme, int dim,
                                      const std::vector<double>& angles) {
    ProbabilityData data{joint_probability_table(cm, angles, scheme), {}, dim};
    data.alice_povms.reserve(angles.size());
    for (double theta : angles)
        data.alice_povms.push_back(
            alice_interval_povms(theta, scheme.alice_range, scheme.alice_outcomes, dim));
    return data;
}

SdpProblem build_assemblage_program(const Assemblage& in, Quadrature y_star) {
    in.validate();
    const Assemblage assemblage = symmetrize_marginals(in);
    const int dim = assemblage.dim;
    const int outcomes = assemblage.outcomes;

    SdpProblem problem;
    problem.block_dims.assign(static_cast<std::size_t>(outcomes) * 2 * outcomes, dim);

    // (3a) objective: the diagonal blocks where Eve's guess matches b.
    for (int e = 0; e < outcomes; ++e)
        problem.objective.push_back(
            {block_index(e, y_star, e, outcomes), CMat::Identity(dim, dim)});

    auto for_each_basis = [&](auto&& emit) {
        for (int r = 0; r < dim; ++r) {
            for (int c = r; c < dim; ++c) {
                emit(basis_real(dim, r, c), r, c, false);
                if (c > r) emit(basis_imag(dim, r, c), r, c, true);
            }
        }
    };

    // (3b): sum_e sigma^e_{b|y} = sigma^obs_{b|y}, as d^2 real equations each.
    for (Quadrature y : {Quadrature::Q, Quadrature::P}) {
        for (int b = 0; b < outcomes; ++b) {
            const CMat& obs = assemblage.side(y)[b].matrix;
            for_each_basis([&](const CMat& h, int r, int c, bool imag) {
                SdpConstraint con;
                con.rhs = imag ? obs(r, c).imag() : obs(r, c).real();
                con.terms.reserve(outcomes);
                for (int e = 0; e < outcomes; ++e)
                    con.terms.push_back({block_index(e, y, b, outcomes), h});
                problem.constraints.push_back(std::move(con));
            });
        }
    }

    // (3c): sum_b sigma^e_{b|q} = sum_b sigma^e_{b|p} for every guess e.
    for (int e = 0; e < outcomes; ++e) {
        for_each_basis([&](const CMat& h, int, int, bool) {
            SdpConstraint con;
            con.rhs = 0.0;
            con.terms.reserve(2 * outcomes);
            for (int b = 0; b < outcomes; ++b) {
                con.terms.push_back({block_index(e, Quadrature::Q, b, outcomes), h});
                con.terms.push_back({block_index(e, Quadrature::P, b, outcomes), CMat(-h)});
            }
            problem.constraints.push_back(std::move(con));
        });
    }

    return problem;
}

SdpProblem build_probability_program(const ProbabilityData& data, Quadrature y_star,
                                     int bob_outcomes) {
    const int dim = data.dim;
    const int outcomes = bob_outcomes;
    const auto& angles = data.table.angles();
    const int directions = static_cast<int>(angles.size());
    const int alice_outcomes = data.table.alice_outcomes();
    if (data.table.bob_outcomes() != outcomes)
        throw ValidationError("probability program: table does not match bob_outcomes");
    if (static_cast<int>(data.alice_povms.size()) != directions)
        throw ValidationError("probability program: POVM set does not match directions");

    // Row normalization check per (x, y) page.
    for (int x = 0; x < directions; ++x) {
        for (Quadrature y : {Quadrature::Q, Quadrature::P}) {
            double sum = data.table.page_sum(x, y);
            if (std::abs(sum - 1.0) > 1e-6) {
                std::ostringstream msg;
                msg << "probability program: p(ab|xy) page for x=" << x
                    << " y=" << to_string(y) << " sums to " << sum;
                throw ValidationError(msg.str());
            }
        }
    }

    // Condition the table so that dependent constraint rows are exactly
    // consistent: all directions must share identical Bob marginals.
    JointProbabilityTable table = data.table;
    for (Quadrature y : {Quadrature::Q, Quadrature::P}) {
        std::vector<double> bob_marginal(outcomes, 0.0);
        for (int b = 0; b < outcomes; ++b) {
            for (int x = 0; x < directions; ++x)
                for (int a = 0; a < alice_outcomes; ++a) bob_marginal[b] += table.at(x, a, y, b);
            bob_marginal[b] /= directions;
        }
        double total = 0.0;
        for (double v : bob_marginal) total += v;
        for (double& v : bob_marginal) v /= total;
        for (int x = 0; x < directions; ++x) {
            for (int b = 0; b < outcomes; ++b) {
                double group = 0.0;
                for (int a = 0; a < alice_outcomes; ++a) group += table.at(x, a, y, b);
                if (group <= 0.0) continue;
                const double scale = bob_marginal[b] / group;
                for (int a = 0; a < alice_outcomes; ++a) table.at(x, a, y, b) *= scale;
            }
        }
    }

    SdpProblem problem;
    problem.block_dims.assign(static_cast<std::size_t>(outcomes) * 2 * outcomes, dim);

    for (int e = 0; e < outcomes; ++e)
        problem.objective.push_back(
            {block_index(e, y_star, e, outcomes), CMat::Identity(dim, dim)});

    // (3b'): sum_e Tr[M_{a|x} sigma^e_{b|y}] = p(ab|xy).
    for (int x = 0; x < directions; ++x) {
        for (Quadrature y : {Quadrature::Q, Quadrature::P}) {
            for (int a = 0; a < alice_outcomes; ++a) {
                for (int b = 0; b < outcomes; ++b) {
                    SdpConstraint con;
                    con.rhs = table.at(x, a, y, b);
                    con.terms.reserve(outcomes);
                    for (int e = 0; e < outcomes; ++e)
                        con.terms.push_back(
                            {block_index(e, y, b, outcomes), data.alice_povms[x][a].matrix});
                    problem.constraints.push_back(std::move(con));
                }
            }
        }
    }

    // (3c) unchanged.
    const int dim_basis = dim;
    for (int e = 0; e < outcomes; ++e) {
        for (int r = 0; r < dim_basis; ++r) {
            for (int c = r; c < dim_basis; ++c) {
                for (int part = 0; part < (c > r ? 2 : 1); ++part) {
                    CMat h = part == 0 ? basis_real(dim, r, c) : basis_imag(dim, r, c);
                    SdpConstraint con;
                    con.rhs = 0.0;
                    for (int b = 0; b < outcomes; ++b) {
                        con.terms.push_back({block_index(e, Quadrature::Q, b, outcomes), h});
                        con.terms.push_back(
                            {block_index(e, Quadrature::P, b, outcomes), CMat(-h)});
                    }
                    problem.constraints.push_back(std::move(con));
                }
            }
        }
    }

    return problem;
}

double min_entropy(double p_guess) {
    if (!(p_guess > 0.0 && p_guess <= 1.0))
        throw ValidationError("min_entropy: p_guess must be in (0, 1]");
    return -std::log2(p_guess);
}

namespace {

CertificationResult wrap_solution(const SdpSolution& sol, CertVariant variant,
                                  Quadrature y_star, const BinningScheme& scheme,
                                  const CertifyOptions& opts) {
    CertificationResult result;
    result.variant = variant;
    result.y_star = y_star;
    result.scheme = scheme;
    result.status = sol.status;
    result.gap = sol.gap;
    result.iterations = sol.iterations;
    result.p_guess_primal = sol.primal_value;
    result.p_guess_dual = sol.dual_value;
    result.certified = sol.status == SdpStatus::Optimal && std::abs(sol.gap) <= opts.certified_gap;
    // The security-relevant bound: the dual certificate, clamped into (0, 1].
    const double p = std::min(1.0, std::max(sol.dual_value, 1e-300));
    result.h_min = std::max(0.0, -std::log2(p));
    return result;
}

}  // namespace

CertificationResult certify_assemblage(const Assemblage& assemblage, Quadrature y_star,
                                       const CertifyOptions& opts,
                                       const BinningScheme& scheme_snapshot) {
    SdpProblem problem = build_assemblage_program(assemblage, y_star);
    SdpSolution sol = solve_sdp(problem, opts.sdp);
    return wrap_solution(sol, CertVariant::FullAssemblage, y_star, scheme_snapshot, opts);
}

CertificationResult certify_cm(const Mat4& cm, const BinningScheme& scheme, int dim,
                               CertVariant variant, Quadrature y_star,
                               const CertifyOptions& opts) {
    if (variant == CertVariant::FullAssemblage) {
        Assemblage assemblage = make_assemblage(cm, scheme, dim, opts.assemblage);
        return certify_assemblage(assemblage, y_star, opts, scheme);
    }
    ProbabilityData data = make_probability_data(cm, scheme, dim, opts.alice_angles);
    SdpProblem problem = build_probability_program(data, y_star, scheme.bob_outcomes);
    SdpSolution sol = solve_sdp(problem, opts.sdp);
    return wrap_solution(sol, variant, y_star, scheme, opts);
}

std::pair<double, CertificationResult> optimize_period(
    const Mat4& cm, int bob_outcomes, int dim, const std::vector<double>& period_grid,
    CertVariant variant, Quadrature y_star, const CertifyOptions& opts) {
    if (period_grid.empty()) throw ValidationError("optimize_period: empty period grid");

    double best_period = 0.0;
    CertificationResult best;
    bool have = false;
    for (double period : period_grid) {
        BinningScheme scheme;
        scheme.period = period;
        scheme.bob_outcomes = bob_outcomes;
        scheme.alice_outcomes = opts.alice_outcomes;
        scheme.alice_range = opts.alice_range;
        CertificationResult result = certify_cm(cm, scheme, dim, variant, y_star, opts);
        if (!have || result.h_min > best.h_min) {
            best = result;
            best_period = period;
            have = true;
        }
    }
    return {best_period, best};
}

}  // namespace qsteer
