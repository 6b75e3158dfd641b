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

#include "qsteer/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "qsteer/errors.hpp"
#include "qsteer/numerics.hpp"

namespace qsteer {

namespace {

constexpr int kJackknifeBlocks = 100;

int quad_row(Quadrature q, bool bob) { return static_cast<int>(q) + (bob ? 2 : 0); }

// Sufficient statistics of one jackknife block of paired samples.
struct BlockMoments {
    double n = 0.0;
    double sx = 0.0, sy = 0.0;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;

    BlockMoments& operator+=(const BlockMoments& o) {
        n += o.n;
        sx += o.sx;
        sy += o.sy;
        sxx += o.sxx;
        syy += o.syy;
        sxy += o.sxy;
        return *this;
    }
    BlockMoments minus(const BlockMoments& o) const {
        BlockMoments r = *this;
        r.n -= o.n;
        r.sx -= o.sx;
        r.sy -= o.sy;
        r.sxx -= o.sxx;
        r.syy -= o.syy;
        r.sxy -= o.sxy;
        return r;
    }
};

double var_x(const BlockMoments& m) { return (m.sxx - m.sx * m.sx / m.n) / (m.n - 1.0); }
double var_y(const BlockMoments& m) { return (m.syy - m.sy * m.sy / m.n) / (m.n - 1.0); }
double var_sum(const BlockMoments& m) {
    double s = m.sx + m.sy;
    return (m.sxx + 2.0 * m.sxy + m.syy - s * s / m.n) / (m.n - 1.0);
}
double var_diff(const BlockMoments& m) {
    double s = m.sx - m.sy;
    return (m.sxx - 2.0 * m.sxy + m.syy - s * s / m.n) / (m.n - 1.0);
}

// Averaged sum/difference cross estimator on the same moments.
double cross_avg(const BlockMoments& m) {
    double vx = var_x(m), vy = var_y(m);
    return 0.5 * (cross_from_sum_variance(var_sum(m), vx, vy) +
                  cross_from_diff_variance(var_diff(m), vx, vy));
}

// Jackknife standard error of a statistic over the pooled blocks.
template <class Fn>
double jackknife_se(const std::vector<BlockMoments>& blocks, const BlockMoments& total, Fn fn) {
    const int nb = static_cast<int>(blocks.size());
    if (nb < 2) return 0.0;
    std::vector<double> leave_out(nb);
    double mean = 0.0;
    for (int i = 0; i < nb; ++i) {
        leave_out[i] = fn(total.minus(blocks[i]));
        mean += leave_out[i];
    }
    mean /= nb;
    double ss = 0.0;
    for (double v : leave_out) ss += (v - mean) * (v - mean);
    return std::sqrt(ss * (nb - 1.0) / nb);
}

std::vector<BlockMoments> blockize(const Eigen::Matrix<double, Eigen::Dynamic, 2>& samples) {
    const Eigen::Index n = samples.rows();
    const Eigen::Index per = std::max<Eigen::Index>(1, n / kJackknifeBlocks);
    std::vector<BlockMoments> blocks;
    for (Eigen::Index start = 0; start + per <= n; start += per) {
        BlockMoments m;
        m.n = static_cast<double>(per);
        for (Eigen::Index i = start; i < start + per; ++i) {
            const double x = samples(i, 0), y = samples(i, 1);
            m.sx += x;
            m.sy += y;
            m.sxx += x * x;
            m.syy += y * y;
            m.sxy += x * y;
        }
        blocks.push_back(m);
        if (static_cast<int>(blocks.size()) == kJackknifeBlocks) break;
    }
    return blocks;
}

}  // namespace

double cross_from_sum_variance(double var_sum, double var_x, double var_y) {
    return 0.5 * (var_sum - var_x - var_y);
}

double cross_from_diff_variance(double var_diff, double var_x, double var_y) {
    return -0.5 * (var_diff - var_x - var_y);
}

Session sample_session(const Mat4& cm, SessionSetting setting, std::size_t count,
                       std::uint64_t seed) {
    if (count < 2) throw ValidationError("sample_session: need at least 2 samples");
    require_physical_cm(cm, "sample_session");

    const int ia = quad_row(setting.alice, false);
    const int ib = quad_row(setting.bob, true);
    const double vxx = cm(ia, ia), vyy = cm(ib, ib), vxy = cm(ia, ib);
    const double l11 = std::sqrt(vxx);
    const double l21 = vxy / l11;
    const double rem = vyy - l21 * l21;
    if (!(rem > 0.0)) throw ValidationError("sample_session: degenerate marginal");
    const double l22 = std::sqrt(rem);

    Session session;
    session.setting = setting;
    session.seed = seed;
    session.samples.resize(static_cast<Eigen::Index>(count), 2);
    GaussianSampler g(seed);
    for (Eigen::Index i = 0; i < session.samples.rows(); ++i) {
        const double u1 = g();
        const double u2 = g();
        session.samples(i, 0) = l11 * u1;
        session.samples(i, 1) = l21 * u1 + l22 * u2;
    }
    return session;
}

ReconstructionResult reconstruct_cm(const std::vector<Session>& sessions) {
    // Canonical order makes the result independent of caller ordering.
    std::vector<const Session*> ordered;
    ordered.reserve(sessions.size());
    for (const auto& s : sessions) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(), [](const Session* a, const Session* b) {
        auto key = [](const Session* s) {
            return std::tuple(static_cast<int>(s->setting.alice),
                              static_cast<int>(s->setting.bob), s->seed);
        };
        return key(a) < key(b);
    });

    // Pooled per-quadrature variance blocks and per-pair cross blocks.
    std::vector<BlockMoments> var_blocks[4];
    std::vector<BlockMoments> cross_blocks[2];  // 0: (q_A,q_B), 1: (p_A,p_B)
    for (const Session* s : ordered) {
        auto blocks = blockize(s->samples);
        const int ra = quad_row(s->setting.alice, false);
        const int rb = quad_row(s->setting.bob, true);
        for (const auto& m : blocks) {
            // Alice column contributes to her quadrature's variance; Bob's
            // column to his. Swapped roles for Bob-only pooling.
            BlockMoments alice_only{m.n, m.sx, 0, m.sxx, 0, 0};
            BlockMoments bob_only{m.n, m.sy, 0, m.syy, 0, 0};
            var_blocks[ra].push_back(alice_only);
            var_blocks[rb].push_back(bob_only);
        }
        if (s->setting.alice == s->setting.bob) {
            auto& dst = cross_blocks[static_cast<int>(s->setting.alice)];
            dst.insert(dst.end(), blocks.begin(), blocks.end());
        }
    }

    for (int r = 0; r < 4; ++r) {
        if (var_blocks[r].empty())
            throw ValidationError("reconstruct_cm: no session covers quadrature row " +
                                  std::to_string(r));
    }
    if (cross_blocks[0].empty() || cross_blocks[1].empty())
        throw ValidationError("reconstruct_cm: need (q_A,q_B) and (p_A,p_B) sessions");

    ReconstructionResult out;
    for (int r = 0; r < 4; ++r) {
        BlockMoments total;
        for (const auto& m : var_blocks[r]) total += m;
        out.cm(r, r) = var_x(total);
        out.standard_errors(r, r) = jackknife_se(var_blocks[r], total, var_x);
    }
    for (int pair = 0; pair < 2; ++pair) {
        BlockMoments total;
        for (const auto& m : cross_blocks[pair]) total += m;
        const double c = cross_avg(total);
        const double se = jackknife_se(cross_blocks[pair], total, cross_avg);
        const int ra = pair, rb = pair + 2;
        out.cm(ra, rb) = out.cm(rb, ra) = c;
        out.standard_errors(ra, rb) = out.standard_errors(rb, ra) = se;
    }

    out.diagnostic = validate_cm(out.cm);
    out.physical = out.diagnostic.physical;
    return out;
}

void save_session(const Session& session, const std::filesystem::path& base_path) {
    std::filesystem::path bin = base_path;
    bin += ".bin";
    std::ofstream f(bin, std::ios::binary);
    if (!f) throw ValidationError("save_session: cannot open " + bin.string());
    f.write(reinterpret_cast<const char*>(session.samples.data()),
            static_cast<std::streamsize>(sizeof(double) * session.samples.size()));
    // Eigen default storage is column-major; record the layout explicitly.
    nlohmann::json side = {
        {"alice", to_string(session.setting.alice)},
        {"bob", to_string(session.setting.bob)},
        {"count", session.samples.rows()},
        {"seed", session.seed},
        {"sample_rate", session.sample_rate_tag},
        {"layout", "column-major"},
    };
    std::filesystem::path meta = base_path;
    meta += ".json";
    std::ofstream mf(meta);
    mf << side.dump(2) << "\n";
}

Session load_session(const std::filesystem::path& base_path) {
    std::filesystem::path meta = base_path;
    meta += ".json";
    std::ifstream mf(meta);
    if (!mf) throw ValidationError("load_session: cannot open " + meta.string());
    nlohmann::json side = nlohmann::json::parse(mf);

    Session session;
    session.setting.alice = side.at("alice").get<std::string>() == "q" ? Quadrature::Q : Quadrature::P;
    session.setting.bob = side.at("bob").get<std::string>() == "q" ? Quadrature::Q : Quadrature::P;
    session.seed = side.at("seed").get<std::uint64_t>();
    session.sample_rate_tag = side.value("sample_rate", "");
    const Eigen::Index count = side.at("count").get<Eigen::Index>();

    std::filesystem::path bin = base_path;
    bin += ".bin";
    std::ifstream f(bin, std::ios::binary);
    if (!f) throw ValidationError("load_session: cannot open " + bin.string());
    session.samples.resize(count, 2);
    f.read(reinterpret_cast<char*>(session.samples.data()),
           static_cast<std::streamsize>(sizeof(double) * session.samples.size()));
    if (!f) throw ValidationError("load_session: truncated sample file " + bin.string());
    return session;
}

}  // namespace qsteer
