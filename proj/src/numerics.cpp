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

#include "qsteer/numerics.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include "qsteer/errors.hpp"

namespace qsteer {

namespace {

double gamma_q_series(double a, double x) {
    // 1 - P(a,x) with P from the standard power series.
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
}

double gamma_q_cf(double a, double x) {
    // Modified Lentz continued fraction for Q(a,x).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw ValidationError("regularized_gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return gamma_q_series(a, x);
    return gamma_q_cf(a, x);
}

const GaussLegendre& gauss_legendre(int order) {
    if (order < 1) throw ValidationError("gauss_legendre: order must be positive");
    static std::map<int, GaussLegendre> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    GaussLegendre rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int n = order;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration from the Chebyshev-based initial guess.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    auto [pos, inserted] = cache.emplace(order, std::move(rule));
    return pos->second;
}

namespace {

double gl_panel(const std::function<double(double)>& f, double lo, double hi, int order) {
    const GaussLegendre& rule = gauss_legendre(order);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return sum * half;
}

double adaptive_recurse(const std::function<double(double)>& f, double lo, double hi,
                        double abs_tol, int depth, int max_depth) {
    double coarse = gl_panel(f, lo, hi, 16);
    double fine = gl_panel(f, lo, hi, 32);
    if (std::abs(fine - coarse) <= abs_tol || depth >= max_depth) return fine;
    double mid = 0.5 * (lo + hi);
    return adaptive_recurse(f, lo, mid, abs_tol * 0.5, depth + 1, max_depth) +
           adaptive_recurse(f, mid, hi, abs_tol * 0.5, depth + 1, max_depth);
}

}  // namespace

double adaptive_gauss_legendre(const std::function<double(double)>& f, double lo, double hi,
                               double abs_tol, int max_depth) {
    if (!(hi >= lo)) throw ValidationError("adaptive_gauss_legendre: hi < lo");
    if (hi == lo) return 0.0;
    return adaptive_recurse(f, lo, hi, abs_tol, 0, max_depth);
}

}  // namespace qsteer
