#include "cascade/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cascade {

namespace {

std::string describe(double p, double eps, double beta) {
    std::ostringstream os;
    os.precision(17);
    os << " (p=" << p << ", eps=" << eps << ", beta=" << beta << ")";
    return os.str();
}

struct Weights {
    double eta_y;
    double eta_n;
};

Weights weights_at(double p, double eps, double beta) {
    const double a = p * (1.0 - beta) + eps * (1.0 - p);
    const double b = p * (1.0 - eps) + beta * (1.0 - p);
    const double log_alpha = std::log(p / (1.0 - p));
    return {std::log(a / (1.0 - b)) / log_alpha, std::log(b / (1.0 - a)) / log_alpha};
}

void check_p_beta(double p, double beta) {
    if (!(p > 0.5 && p < 1.0)) throw ParameterError("p must satisfy 1/2 < p < 1" + describe(p, 0, beta));
    if (!(beta >= 0.0 && beta < 1.0)) throw ParameterError("beta must satisfy 0 <= beta < 1" + describe(p, 0, beta));
}

}  // namespace

ModelParams::ModelParams(double p, double eps, double beta)
    : p_(p), eps_(eps), beta_(beta), fake_total_(eps + beta) {
    if (!(p > 0.5 && p < 1.0)) throw ParameterError("p must satisfy 1/2 < p < 1" + describe(p, eps, beta));
    if (!(eps >= 0.0)) throw ParameterError("eps must be >= 0" + describe(p, eps, beta));
    if (!(beta >= 0.0)) throw ParameterError("beta must be >= 0" + describe(p, eps, beta));
    if (!(eps + beta < 1.0)) throw ParameterError("eps + beta must be < 1" + describe(p, eps, beta));
}

DerivedModel derive(const ModelParams& params) {
    const double p = params.p();
    const double eps = params.eps();
    const double beta = params.beta();
    const double a = p * (1.0 - beta) + eps * (1.0 - p);
    const double b = p * (1.0 - eps) + beta * (1.0 - p);
    const Weights w = weights_at(p, eps, beta);
    return DerivedModel{
        .params = params,
        .a = a,
        .b = b,
        .alpha = p / (1.0 - p),
        .eta_y = w.eta_y,
        .eta_n = w.eta_n,
        .pf_g = a,
        .pf_b = 1.0 - b,
    };
}

double bayesian_threshold(double p, double beta, int r) {
    check_p_beta(p, beta);
    if (r < 1) throw ParameterError("threshold index r must be >= 1");
    const double alpha = p / (1.0 - p);
    const double root = std::pow(alpha, 1.0 / r);
    return (1.0 - beta) * (alpha - root) / (root * alpha - 1.0);
}

std::vector<ThresholdPoint> cascade_thresholds(double p, double beta, int r_max, int k_max) {
    check_p_beta(p, beta);
    if (r_max < 1) throw ParameterError("r_max must be >= 1");
    if (k_max < 0) throw ParameterError("k_max must be >= 0");

    std::vector<ThresholdPoint> out;
    for (int r = 1; r <= r_max; ++r) out.push_back({r, 0, bayesian_threshold(p, beta, r)});

    if (k_max >= 1) {
        // eta_y and eta_n both fall with eps, so r*eta_y - k*eta_n need not be
        // monotone: bracket every sign change on a grid, then bisect.
        constexpr int kGrid = 4000;
        const double top = 1.0 - beta;
        std::vector<double> grid(kGrid + 1);
        std::vector<Weights> w(kGrid + 1);
        for (int i = 0; i < kGrid; ++i) grid[i] = top * i / kGrid;
        grid[kGrid] = top * (1.0 - 1e-9);
        for (int i = 0; i <= kGrid; ++i) w[i] = weights_at(p, grid[i], beta);

        for (int k = 1; k <= k_max; ++k) {
            for (int r = 1; r <= r_max; ++r) {
                auto f = [&](const Weights& x) { return r * x.eta_y - k * x.eta_n - 1.0; };
                std::vector<double> roots;
                auto add = [&](double e) {
                    if (roots.empty() || std::abs(roots.back() - e) > 1e-10) roots.push_back(e);
                };
                for (int i = 0; i <= kGrid; ++i) {
                    const double fi = f(w[i]);
                    if (std::abs(fi) <= 1e-12) {
                        add(grid[i]);
                        continue;
                    }
                    if (i == kGrid) break;
                    const double fj = f(w[i + 1]);
                    if (std::abs(fj) <= 1e-12 || (fi > 0) == (fj > 0)) continue;
                    double lo = grid[i], hi = grid[i + 1];
                    const bool lo_positive = fi > 0;
                    while (hi - lo > kThresholdTolerance) {
                        const double mid = 0.5 * (lo + hi);
                        if ((f(weights_at(p, mid, beta)) > 0) == lo_positive) lo = mid;
                        else hi = mid;
                    }
                    add(0.5 * (lo + hi));
                }
                for (double e : roots) out.push_back({r, k, e});
            }
        }
    }

    std::stable_sort(out.begin(), out.end(),
                     [](const ThresholdPoint& x, const ThresholdPoint& y) { return x.eps_value < y.eps_value; });
    return out;
}

}  // namespace cascade
