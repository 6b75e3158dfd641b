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

#include "qsteer/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "qsteer/errors.hpp"

namespace qsteer {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SdpProblem::validate() const {
    if (block_dims.empty()) throw ValidationError("sdp: no blocks");
    for (int d : block_dims)
        if (d < 1) throw ValidationError("sdp: block dimension must be >= 1");
    if (constraints.empty()) throw ValidationError("sdp: need at least one constraint");
    auto check_term = [&](const SdpTerm& t, const char* what) {
        if (t.block < 0 || t.block >= static_cast<int>(block_dims.size()))
            throw ValidationError(std::string("sdp: ") + what + " references an unknown block");
        const int d = block_dims[t.block];
        if (t.coeff.rows() != d || t.coeff.cols() != d)
            throw ValidationError(std::string("sdp: ") + what + " has mismatched dimensions");
        if ((t.coeff - t.coeff.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw ValidationError(std::string("sdp: ") + what + " is not Hermitian");
    };
    for (const auto& t : objective) check_term(t, "objective term");
    for (const auto& c : constraints)
        for (const auto& t : c.terms) check_term(t, "constraint term");
}

int SdpProblem::variable_dimension() const {
    int n = 0;
    for (int d : block_dims) n += d * d;
    return n;
}

const char* to_string(SdpStatus status) {
    switch (status) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::MaxIterations: return "max-iter";
    }
    return "unknown";
}

namespace {

// ----- real embedding ---------------------------------------------------

// Hermitian A -> (1/2) [[Re A, -Im A], [Im A, Re A]] so traces match:
// Tr[embed(A) embed_var(X)] = Tr[A X].
MatrixXd embed_coeff(const CMat& a) {
    const int d = static_cast<int>(a.rows());
    MatrixXd out(2 * d, 2 * d);
    out.topLeftCorner(d, d) = 0.5 * a.real();
    out.bottomRightCorner(d, d) = 0.5 * a.real();
    out.topRightCorner(d, d) = -0.5 * a.imag();
    out.bottomLeftCorner(d, d) = 0.5 * a.imag();
    return 0.5 * (out + out.transpose().eval());
}

CMat unembed_variable(const MatrixXd& x, int d) {
    CMat out(d, d);
    out.real() = 0.5 * (x.topLeftCorner(d, d) + x.bottomRightCorner(d, d));
    out.imag() = 0.5 * (x.bottomLeftCorner(d, d) - x.topRightCorner(d, d));
    out = 0.5 * (out + out.adjoint().eval());
    return out;
}

struct InternalTerm {
    int constraint = 0;
    MatrixXd coeff;
};

struct InternalProblem {
    std::vector<int> dims;           // real symmetric block sizes
    std::vector<bool> embedded;      // per block
    std::vector<MatrixXd> objective;  // C_j, dense per block
    // Per block: list of (constraint index, coefficient).
    std::vector<std::vector<InternalTerm>> block_terms;
    VectorXd rhs;
    int m = 0;
};

InternalProblem build_internal(const SdpProblem& p) {
    const int blocks = static_cast<int>(p.block_dims.size());
    std::vector<bool> complex_block(blocks, false);
    auto scan = [&](const SdpTerm& t) {
        if (t.coeff.imag().cwiseAbs().maxCoeff() > 1e-14) complex_block[t.block] = true;
    };
    for (const auto& t : p.objective) scan(t);
    for (const auto& c : p.constraints)
        for (const auto& t : c.terms) scan(t);

    InternalProblem ip;
    ip.embedded.assign(complex_block.begin(), complex_block.end());
    ip.dims.resize(blocks);
    for (int j = 0; j < blocks; ++j)
        ip.dims[j] = complex_block[j] ? 2 * p.block_dims[j] : p.block_dims[j];

    ip.objective.resize(blocks);
    for (int j = 0; j < blocks; ++j) ip.objective[j] = MatrixXd::Zero(ip.dims[j], ip.dims[j]);
    for (const auto& t : p.objective) {
        if (ip.embedded[t.block])
            ip.objective[t.block] += embed_coeff(t.coeff);
        else
            ip.objective[t.block] += 0.5 * (t.coeff.real() + t.coeff.real().transpose().eval());
    }

    ip.m = static_cast<int>(p.constraints.size());
    ip.rhs.resize(ip.m);
    ip.block_terms.resize(blocks);
    for (int i = 0; i < ip.m; ++i) {
        ip.rhs(i) = p.constraints[i].rhs;
        for (const auto& t : p.constraints[i].terms) {
            MatrixXd coeff = ip.embedded[t.block]
                                 ? embed_coeff(t.coeff)
                                 : MatrixXd(0.5 * (t.coeff.real() + t.coeff.real().transpose().eval()));
            // Merge repeated (constraint, block) pairs.
            auto& list = ip.block_terms[t.block];
            if (!list.empty() && list.back().constraint == i)
                list.back().coeff += coeff;
            else
                list.push_back({i, std::move(coeff)});
        }
    }
    return ip;
}

// ----- presolve: independent rows of the constraint map ------------------

struct Presolve {
    std::vector<int> keep;     // independent constraint indices, ascending
    bool inconsistent = false;  // dependent row with mismatched rhs
    int bad_row = -1;
};

MatrixXd constraint_gram(const InternalProblem& ip) {
    MatrixXd gram = MatrixXd::Zero(ip.m, ip.m);
    for (const auto& terms : ip.block_terms) {
        for (std::size_t a = 0; a < terms.size(); ++a) {
            for (std::size_t b = a; b < terms.size(); ++b) {
                double v = terms[a].coeff.cwiseProduct(terms[b].coeff).sum();
                gram(terms[a].constraint, terms[b].constraint) += v;
                if (a != b) gram(terms[b].constraint, terms[a].constraint) += v;
            }
        }
    }
    return gram;
}

Presolve presolve_rows(const InternalProblem& ip, double rhs_tol) {
    const int m = ip.m;
    MatrixXd g = constraint_gram(ip);
    const double thresh = 1e-12 * std::max(g.diagonal().maxCoeff(), 1e-30);

    // Diagonal-pivoted Cholesky of the Gram matrix; kept pivots span the
    // row space, factor rows expose each dropped row's dependency.
    MatrixXd factor = MatrixXd::Zero(m, m);
    std::vector<int> pivots;
    std::vector<char> used(m, 0);
    for (int step = 0; step < m; ++step) {
        int p = -1;
        double best = thresh;
        for (int i = 0; i < m; ++i) {
            if (!used[i] && g(i, i) > best) {
                best = g(i, i);
                p = i;
            }
        }
        if (p < 0) break;
        used[p] = 1;
        pivots.push_back(p);
        const double piv = std::sqrt(g(p, p));
        VectorXd col = g.col(p) / piv;
        factor.col(step) = col;
        g.noalias() -= col * col.transpose();
    }

    Presolve out;
    const int r = static_cast<int>(pivots.size());
    // Consistency of dropped rows: reconstruct rhs from the factor.
    VectorXd w(r);
    for (int k = 0; k < r; ++k) {
        double acc = ip.rhs(pivots[k]);
        for (int j = 0; j < k; ++j) acc -= factor(pivots[k], j) * w(j);
        w(k) = acc / factor(pivots[k], k);
    }
    for (int i = 0; i < m; ++i) {
        if (used[i]) continue;
        double rec = factor.row(i).head(r).dot(w);
        if (std::abs(ip.rhs(i) - rec) > rhs_tol * (1.0 + std::abs(ip.rhs(i)))) {
            out.inconsistent = true;
            out.bad_row = i;
            return out;
        }
    }
    out.keep = pivots;
    std::sort(out.keep.begin(), out.keep.end());
    return out;
}

void reduce_rows(InternalProblem& ip, const std::vector<int>& keep) {
    std::vector<int> remap(ip.m, -1);
    for (int k = 0; k < static_cast<int>(keep.size()); ++k) remap[keep[k]] = k;
    VectorXd rhs(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) rhs(k) = ip.rhs(keep[k]);
    ip.rhs = std::move(rhs);
    for (auto& terms : ip.block_terms) {
        std::vector<InternalTerm> kept;
        kept.reserve(terms.size());
        for (auto& t : terms) {
            if (remap[t.constraint] >= 0) {
                t.constraint = remap[t.constraint];
                kept.push_back(std::move(t));
            }
        }
        terms = std::move(kept);
    }
    ip.m = static_cast<int>(keep.size());
}

// ----- interior point machinery ------------------------------------------

struct BlockState {
    MatrixXd x, z;
    // NT scaling data, refreshed each iteration.
    MatrixXd r, r_inv, w;
    VectorXd lambda;
};

MatrixXd safe_cholesky(const MatrixXd& a) {
    Eigen::LLT<MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    // Round-off pushed an eigenvalue over the edge; clamp and retry.
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(a);
    VectorXd vals = eig.eigenvalues().cwiseMax(1e-14 * std::max(1.0, a.trace()));
    MatrixXd fixed = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
    Eigen::LLT<MatrixXd> retry(fixed);
    if (retry.info() != Eigen::Success) throw NumericalError("sdp: Cholesky failed");
    return retry.matrixL();
}

// Largest alpha with X + alpha dX >= 0, via L^{-1} dX L^{-T}.
double max_step(const MatrixXd& x, const MatrixXd& dx) {
    MatrixXd l = safe_cholesky(x);
    MatrixXd m = l.triangularView<Eigen::Lower>().solve(dx);
    m = l.triangularView<Eigen::Lower>().solve(m.transpose().eval());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (m + m.transpose().eval()),
                                                Eigen::EigenvaluesOnly);
    double lo = eig.eigenvalues().minCoeff();
    if (lo >= -1e-16) return std::numeric_limits<double>::infinity();
    return -1.0 / lo;
}

struct Residuals {
    VectorXd primal;                 // b - A(X)
    std::vector<MatrixXd> dual;      // C + Z - A*(y)
    double primal_norm = 0.0;
    double dual_norm = 0.0;
};

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
    problem.validate();
    InternalProblem ip = build_internal(problem);
    const int blocks = static_cast<int>(ip.dims.size());

    SdpSolution sol;
    sol.dual_multipliers = VectorXd::Zero(problem.constraints.size());

    Presolve pre = presolve_rows(ip, options.feasibility_tolerance);
    if (pre.inconsistent) {
        sol.status = SdpStatus::Infeasible;
        return sol;
    }
    const std::vector<int> kept_rows = pre.keep;
    if (static_cast<int>(kept_rows.size()) < ip.m) reduce_rows(ip, kept_rows);
    const int m = ip.m;

    // Scale-aware interior start.
    double b_scale = ip.rhs.size() ? ip.rhs.cwiseAbs().maxCoeff() : 0.0;
    double c_scale = 0.0;
    for (const auto& c : ip.objective) c_scale = std::max(c_scale, c.cwiseAbs().maxCoeff());
    const double tau_p = std::max(1.0, b_scale);
    const double tau_d = std::max(1.0, c_scale);

    std::vector<BlockState> st(blocks);
    double total_dim = 0.0;
    for (int j = 0; j < blocks; ++j) {
        st[j].x = tau_p * MatrixXd::Identity(ip.dims[j], ip.dims[j]);
        st[j].z = tau_d * MatrixXd::Identity(ip.dims[j], ip.dims[j]);
        total_dim += ip.dims[j];
    }
    VectorXd y = VectorXd::Zero(m);

    const double b_norm = 1.0 + ip.rhs.norm();
    double c_norm = 1.0;
    for (const auto& c : ip.objective) c_norm += c.squaredNorm();
    c_norm = std::sqrt(c_norm);

    auto apply_adjoint = [&](const VectorXd& vec, int j) {
        MatrixXd acc = MatrixXd::Zero(ip.dims[j], ip.dims[j]);
        for (const auto& t : ip.block_terms[j]) acc.noalias() += vec(t.constraint) * t.coeff;
        return acc;
    };

    auto compute_residuals = [&](const VectorXd& yv) {
        Residuals res;
        res.primal = ip.rhs;
        res.dual.resize(blocks);
        double dual_sq = 0.0;
        for (int j = 0; j < blocks; ++j) {
            for (const auto& t : ip.block_terms[j])
                res.primal(t.constraint) -= t.coeff.cwiseProduct(st[j].x).sum();
            res.dual[j] = ip.objective[j] + st[j].z - apply_adjoint(yv, j);
            dual_sq += res.dual[j].squaredNorm();
        }
        res.primal_norm = res.primal.norm() / b_norm;
        res.dual_norm = std::sqrt(dual_sq) / c_norm;
        return res;
    };

    double stall_best = std::numeric_limits<double>::infinity();
    int stall_count = 0;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        Residuals res = compute_residuals(y);

        double xz = 0.0;
        for (int j = 0; j < blocks; ++j) xz += st[j].x.cwiseProduct(st[j].z).sum();
        const double mu = xz / total_dim;

        double pobj = 0.0;
        for (int j = 0; j < blocks; ++j) pobj += ip.objective[j].cwiseProduct(st[j].x).sum();
        const double dobj = ip.rhs.dot(y);
        const double relgap = xz / (1.0 + std::abs(pobj) + std::abs(dobj));

        if (options.verbose) {
            std::cerr << "sdp iter " << iter << " mu " << mu << " gap " << relgap << " rp "
                      << res.primal_norm << " rd " << res.dual_norm << "\n";
        }

        sol.iterations = iter;
        sol.primal_residual = res.primal_norm;
        sol.dual_residual = res.dual_norm;
        const double true_relgap = std::abs(dobj - pobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        if (relgap <= options.tolerance && true_relgap <= 10.0 * options.tolerance &&
            res.primal_norm <= options.feasibility_tolerance &&
            res.dual_norm <= options.feasibility_tolerance) {
            sol.status = SdpStatus::Optimal;
            break;
        }

        // Stall-based infeasibility heuristic: complementarity collapsed but
        // the equalities refuse to close.
        double worst = std::max(res.primal_norm, res.dual_norm);
        if (worst < stall_best * 0.999) {
            stall_best = worst;
            stall_count = 0;
        } else if (++stall_count > 30 && mu < 1e-10 &&
                   worst > 1e3 * options.feasibility_tolerance) {
            sol.status = SdpStatus::Infeasible;
            return sol;
        }
        double x_scale = 0.0;
        for (int j = 0; j < blocks; ++j) x_scale = std::max(x_scale, st[j].x.norm());
        if (x_scale > 1e14) {
            sol.status = SdpStatus::Infeasible;
            return sol;
        }

        // Nesterov-Todd scaling per block.
        for (int j = 0; j < blocks; ++j) {
            MatrixXd lx = safe_cholesky(st[j].x);
            MatrixXd lz = safe_cholesky(st[j].z);
            Eigen::JacobiSVD<MatrixXd> svd(lz.transpose() * lx,
                                           Eigen::ComputeFullU | Eigen::ComputeFullV);
            VectorXd s = svd.singularValues().cwiseMax(1e-150);
            VectorXd s_inv_sqrt = s.cwiseSqrt().cwiseInverse();
            st[j].r.noalias() = lx * svd.matrixV() * s_inv_sqrt.asDiagonal();
            st[j].r_inv.noalias() =
                s_inv_sqrt.asDiagonal() * svd.matrixU().transpose() * lz.transpose();
            st[j].w.noalias() = st[j].r * st[j].r.transpose();
            st[j].lambda = s;
        }

        // Schur complement S_ik = sum_j <A_i, W A_k W> and its factorization.
        MatrixXd schur = MatrixXd::Zero(m, m);
        for (int j = 0; j < blocks; ++j) {
            const auto& terms = ip.block_terms[j];
            if (terms.empty()) continue;
            std::vector<MatrixXd> waw(terms.size());
            for (std::size_t a = 0; a < terms.size(); ++a)
                waw[a].noalias() = st[j].w * terms[a].coeff * st[j].w;
            for (std::size_t a = 0; a < terms.size(); ++a) {
                for (std::size_t b = a; b < terms.size(); ++b) {
                    double v = terms[a].coeff.cwiseProduct(waw[b]).sum();
                    schur(terms[a].constraint, terms[b].constraint) += v;
                    if (a != b) schur(terms[b].constraint, terms[a].constraint) += v;
                }
            }
        }
        Eigen::LLT<MatrixXd> schur_llt(schur);
        Eigen::LDLT<MatrixXd> schur_ldlt;
        bool use_ldlt = schur_llt.info() != Eigen::Success;
        if (use_ldlt) {
            schur_ldlt.compute(schur +
                               (1e-13 * std::max(1.0, schur.trace() / m)) *
                                   MatrixXd::Identity(m, m));
        }
        auto schur_solve = [&](const VectorXd& rhs_vec) {
            return use_ldlt ? VectorXd(schur_ldlt.solve(rhs_vec))
                            : VectorXd(schur_llt.solve(rhs_vec));
        };

        // One Newton direction for a given complementarity target E (scaled
        // space). Returns (dx, dy, dz).
        std::vector<MatrixXd> rer(blocks);
        auto newton = [&](const std::vector<MatrixXd>& e_mats, std::vector<MatrixXd>& dx,
                          VectorXd& dy, std::vector<MatrixXd>& dz) {
            VectorXd rhs_vec = -res.primal;
            for (int j = 0; j < blocks; ++j) {
                rer[j].noalias() = st[j].r * e_mats[j] * st[j].r.transpose();
                MatrixXd wrdw;
                wrdw.noalias() = st[j].w * res.dual[j] * st[j].w;
                MatrixXd combined = rer[j] + wrdw;
                for (const auto& t : ip.block_terms[j])
                    rhs_vec(t.constraint) += t.coeff.cwiseProduct(combined).sum();
            }
            dy = schur_solve(rhs_vec);
            dx.resize(blocks);
            dz.resize(blocks);
            for (int j = 0; j < blocks; ++j) {
                dz[j] = apply_adjoint(dy, j) - res.dual[j];
                dz[j] = 0.5 * (dz[j] + dz[j].transpose().eval());
                MatrixXd wdzw;
                wdzw.noalias() = st[j].w * dz[j] * st[j].w;
                dx[j] = rer[j] - wdzw;
                dx[j] = 0.5 * (dx[j] + dx[j].transpose().eval());
            }
        };

        // Predictor (affine direction): E = -diag(lambda).
        std::vector<MatrixXd> e_mats(blocks);
        std::vector<MatrixXd> dx_aff, dz_aff;
        VectorXd dy_aff;
        double sigma = 0.3;
        if (options.mehrotra) {
            for (int j = 0; j < blocks; ++j)
                e_mats[j] = MatrixXd((-st[j].lambda).asDiagonal());
            newton(e_mats, dx_aff, dy_aff, dz_aff);
            double ap = std::min(1.0, options.step_fraction * 1.0 *
                                          [&] {
                                              double a = std::numeric_limits<double>::infinity();
                                              for (int j = 0; j < blocks; ++j)
                                                  a = std::min(a, max_step(st[j].x, dx_aff[j]));
                                              return a;
                                          }());
            double ad = std::min(1.0, options.step_fraction * 1.0 *
                                          [&] {
                                              double a = std::numeric_limits<double>::infinity();
                                              for (int j = 0; j < blocks; ++j)
                                                  a = std::min(a, max_step(st[j].z, dz_aff[j]));
                                              return a;
                                          }());
            double xz_aff = 0.0;
            for (int j = 0; j < blocks; ++j)
                xz_aff += (st[j].x + ap * dx_aff[j]).cwiseProduct(st[j].z + ad * dz_aff[j]).sum();
            double mu_aff = std::max(xz_aff, 0.0) / total_dim;
            sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 1e-6, 1.0);
        }

        // Combined direction with centering sigma and (optionally) the
        // Mehrotra second-order term.
        for (int j = 0; j < blocks; ++j) {
            const int n = ip.dims[j];
            MatrixXd target = MatrixXd::Zero(n, n);
            target.diagonal().setConstant(sigma * mu);
            target.diagonal() -= st[j].lambda.cwiseProduct(st[j].lambda);
            if (options.mehrotra) {
                MatrixXd dxs = st[j].r_inv * dx_aff[j] * st[j].r_inv.transpose();
                MatrixXd dzs = st[j].r.transpose() * dz_aff[j] * st[j].r;
                target.noalias() -= 0.5 * (dxs * dzs + dzs * dxs);
            }
            MatrixXd e(n, n);
            for (int row = 0; row < n; ++row)
                for (int col = 0; col < n; ++col)
                    e(row, col) =
                        2.0 * target(row, col) / (st[j].lambda(row) + st[j].lambda(col));
            e_mats[j] = 0.5 * (e + e.transpose().eval());
        }
        std::vector<MatrixXd> dx, dz;
        VectorXd dy;
        newton(e_mats, dx, dy, dz);

        double ap = std::numeric_limits<double>::infinity();
        double ad = std::numeric_limits<double>::infinity();
        for (int j = 0; j < blocks; ++j) {
            ap = std::min(ap, max_step(st[j].x, dx[j]));
            ad = std::min(ad, max_step(st[j].z, dz[j]));
        }
        ap = std::min(1.0, options.step_fraction * ap);
        ad = std::min(1.0, options.step_fraction * ad);
        if (ap < 1e-8 && ad < 1e-8) break;  // step collapse, no further progress

        for (int j = 0; j < blocks; ++j) {
            st[j].x += ap * dx[j];
            st[j].z += ad * dz[j];
            st[j].x = 0.5 * (st[j].x + st[j].x.transpose().eval());
            st[j].z = 0.5 * (st[j].z + st[j].z.transpose().eval());
        }
        y += ad * dy;

        if (iter + 1 == options.max_iterations) sol.status = SdpStatus::MaxIterations;
    }

    // Extract the solution on the original (Hermitian) data.
    sol.blocks.resize(blocks);
    for (int j = 0; j < blocks; ++j) {
        if (ip.embedded[j])
            sol.blocks[j] = unembed_variable(st[j].x, problem.block_dims[j]);
        else
            sol.blocks[j] = st[j].x.cast<std::complex<double>>();
    }
    double pobj = 0.0;
    for (const auto& t : problem.objective)
        pobj += (t.coeff * sol.blocks[t.block]).trace().real();
    sol.primal_value = pobj;
    for (std::size_t k = 0; k < kept_rows.size(); ++k) sol.dual_multipliers(kept_rows[k]) = y(k);
    double dobj = 0.0;
    for (std::size_t i = 0; i < problem.constraints.size(); ++i)
        dobj += problem.constraints[i].rhs * sol.dual_multipliers(i);
    sol.dual_value = dobj;
    sol.gap = sol.dual_value - sol.primal_value;
    return sol;
}

// ----- JSON dump ----------------------------------------------------------

namespace {

std::string base64_encode(const unsigned char* data, std::size_t len) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        unsigned int chunk = data[i] << 16;
        if (i + 1 < len) chunk |= data[i + 1] << 8;
        if (i + 2 < len) chunk |= data[i + 2];
        out.push_back(alphabet[(chunk >> 18) & 0x3f]);
        out.push_back(alphabet[(chunk >> 12) & 0x3f]);
        out.push_back(i + 1 < len ? alphabet[(chunk >> 6) & 0x3f] : '=');
        out.push_back(i + 2 < len ? alphabet[chunk & 0x3f] : '=');
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<unsigned char> out;
    int buffer = 0, bits = 0;
    for (char c : text) {
        if (c == '=') break;
        int v = value(c);
        if (v < 0) continue;
        buffer = (buffer << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((buffer >> bits) & 0xff));
        }
    }
    return out;
}

nlohmann::json matrix_to_json(const CMat& mat) {
    const std::size_t n = mat.size();
    std::vector<double> payload(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        payload[2 * i] = mat.data()[i].real();
        payload[2 * i + 1] = mat.data()[i].imag();
    }
    return {{"rows", mat.rows()},
            {"cols", mat.cols()},
            {"data", base64_encode(reinterpret_cast<const unsigned char*>(payload.data()),
                                   payload.size() * sizeof(double))}};
}

CMat matrix_from_json(const nlohmann::json& node) {
    const Eigen::Index rows = node.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = node.at("cols").get<Eigen::Index>();
    std::vector<unsigned char> bytes = base64_decode(node.at("data").get<std::string>());
    if (bytes.size() != static_cast<std::size_t>(rows * cols) * 2 * sizeof(double))
        throw ValidationError("sdp json: matrix payload size mismatch");
    CMat mat(rows, cols);
    const double* payload = reinterpret_cast<const double*>(bytes.data());
    for (Eigen::Index i = 0; i < rows * cols; ++i)
        mat.data()[i] = std::complex<double>(payload[2 * i], payload[2 * i + 1]);
    return mat;
}

}  // namespace

std::string sdp_problem_to_json(const SdpProblem& problem) {
    nlohmann::json root;
    root["block_dims"] = problem.block_dims;
    auto terms_json = [](const std::vector<SdpTerm>& terms) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : terms)
            arr.push_back({{"block", t.block}, {"matrix", matrix_to_json(t.coeff)}});
        return arr;
    };
    root["objective"] = terms_json(problem.objective);
    root["constraints"] = nlohmann::json::array();
    for (const auto& c : problem.constraints)
        root["constraints"].push_back({{"rhs", c.rhs}, {"terms", terms_json(c.terms)}});
    return root.dump();
}

SdpProblem sdp_problem_from_json(const std::string& text) {
    nlohmann::json root = nlohmann::json::parse(text);
    SdpProblem problem;
    problem.block_dims = root.at("block_dims").get<std::vector<int>>();
    auto parse_terms = [](const nlohmann::json& arr) {
        std::vector<SdpTerm> terms;
        for (const auto& node : arr)
            terms.push_back({node.at("block").get<int>(), matrix_from_json(node.at("matrix"))});
        return terms;
    };
    problem.objective = parse_terms(root.at("objective"));
    for (const auto& node : root.at("constraints")) {
        SdpConstraint c;
        c.rhs = node.at("rhs").get<double>();
        c.terms = parse_terms(node.at("terms"));
        problem.constraints.push_back(std::move(c));
    }
    return problem;
}

std::string sdp_solution_to_json(const SdpSolution& solution) {
    nlohmann::json root;
    root["status"] = to_string(solution.status);
    root["primal_value"] = solution.primal_value;
    root["dual_value"] = solution.dual_value;
    root["gap"] = solution.gap;
    root["iterations"] = solution.iterations;
    root["primal_residual"] = solution.primal_residual;
    root["dual_residual"] = solution.dual_residual;
    root["dual_multipliers"] = std::vector<double>(
        solution.dual_multipliers.data(),
        solution.dual_multipliers.data() + solution.dual_multipliers.size());
    root["blocks"] = nlohmann::json::array();
    for (const auto& b : solution.blocks) root["blocks"].push_back(matrix_to_json(b));
    return root.dump();
}

}  // namespace qsteer
