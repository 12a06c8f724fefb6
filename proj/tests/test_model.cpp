#include <doctest.h>

#include <cmath>
#include <random>

#include "cascade/model.hpp"

using namespace cascade;

namespace {

// Independent root of r * eta_y(eps) = 1 by bisection on derive().
double eta_y_root(double p, double beta, int r) {
    double lo = 0.0, hi = (1.0 - beta) * (1.0 - 1e-12);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (r * derive(ModelParams(p, mid, beta)).eta_y > 1.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("derive: no fake agents is a plain binary symmetric channel") {
    const DerivedModel m = derive(ModelParams(0.7, 0.0, 0.0));
    CHECK(m.a == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(m.b == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(m.eta_y == 1.0);
    CHECK(m.eta_n == 1.0);
    CHECK(m.alpha == doctest::Approx(7.0 / 3.0));
}

TEST_CASE("derive: Y fakes only") {
    const DerivedModel m = derive(ModelParams(0.7, 0.3, 0.0));
    CHECK(std::abs(m.a - 0.79) < 1e-12);
    CHECK(std::abs(m.b - 0.49) < 1e-12);
    CHECK(std::abs(m.eta_n - 1.0) < 1e-12);
    CHECK(std::abs(m.eta_y - 0.5164915907408385) < 1e-12);
    CHECK(m.pf_g == m.a);
    CHECK(std::abs(m.pf_b - 0.51) < 1e-12);
}

TEST_CASE("derive: equal fake fractions give equal weights") {
    const DerivedModel m = derive(ModelParams(0.7, 0.1, 0.1));
    CHECK(std::abs(m.a - 0.66) < 1e-12);
    CHECK(m.a == m.b);
    CHECK(m.eta_y == m.eta_n);
    CHECK(std::abs(m.eta_y - 0.782834760266) < 1e-9);
}

TEST_CASE("ModelParams rejects out-of-domain values") {
    CHECK_THROWS_AS(ModelParams(0.5, 0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(ModelParams(0.4, 0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(ModelParams(1.0, 0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(ModelParams(0.7, 0.6, 0.4), ParameterError);
    CHECK_THROWS_AS(ModelParams(0.7, -0.1, 0.0), ParameterError);
    CHECK_THROWS_AS(ModelParams(0.7, 0.0, -0.1), ParameterError);
    CHECK_THROWS_AS(ModelParams(std::nan(""), 0.0, 0.0), ParameterError);
    const ModelParams ok(0.7, 0.25, 0.5);
    CHECK(ok.fake_total() == 0.75);
}

TEST_CASE("derive: weights stay in (0, 1] and swapping fake types mirrors the model") {
    std::mt19937_64 gen(20261018);
    std::uniform_real_distribution<double> up(0.5, 1.0), u01(0.0, 1.0);
    int checked = 0;
    while (checked < 100'000) {
        const double p = up(gen);
        const double eps = u01(gen), beta = u01(gen);
        if (p <= 0.5 || eps + beta >= 1.0) continue;
        const DerivedModel m = derive(ModelParams(p, eps, beta));
        REQUIRE(m.eta_y > 0.0);
        REQUIRE(m.eta_y <= 1.0 + 1e-12);
        REQUIRE(m.eta_n > 0.0);
        REQUIRE(m.eta_n <= 1.0 + 1e-12);
        const DerivedModel s = derive(ModelParams(p, beta, eps));
        REQUIRE(s.a == m.b);
        REQUIRE(s.b == m.a);
        REQUIRE(s.eta_y == m.eta_n);
        REQUIRE(s.eta_n == m.eta_y);
        ++checked;
    }
}

TEST_CASE("derive: unit weight exactly when the matching fake fraction vanishes") {
    for (double p : {0.55, 0.7, 0.9}) {
        for (double f : {0.0, 0.2, 0.6}) {
            const DerivedModel y_only = derive(ModelParams(p, f, 0.0));
            CHECK(std::abs(y_only.eta_n - 1.0) < 1e-12);
            const DerivedModel n_only = derive(ModelParams(p, 0.0, f));
            CHECK(std::abs(n_only.eta_y - 1.0) < 1e-12);
            if (f > 0) {
                CHECK(y_only.eta_y < 1.0 - 1e-6);
                CHECK(n_only.eta_n < 1.0 - 1e-6);
            }
        }
    }
}

TEST_CASE("bayesian_threshold: spot values") {
    CHECK(bayesian_threshold(0.7, 0.0, 1) == 0.0);
    CHECK(std::abs(bayesian_threshold(0.7, 0.0, 2) - 0.314250088) < 1e-8);
    CHECK(std::abs(bayesian_threshold(0.7, 0.1, 2) - 0.282825079) < 1e-8);
    CHECK(std::abs(bayesian_threshold(0.7, 0.0, 3) - 0.480699935) < 1e-8);
    CHECK_THROWS_AS(bayesian_threshold(0.7, 0.0, 0), ParameterError);
    CHECK_THROWS_AS(bayesian_threshold(0.45, 0.0, 2), ParameterError);
}

TEST_CASE("bayesian_threshold: closed form matches the weight equation") {
    for (double p : {0.55, 0.6, 0.7, 0.8, 0.95}) {
        for (double beta : {0.0, 0.1, 0.2, 0.5}) {
            double prev = -1.0;
            const double base2 = bayesian_threshold(p, 0.0, 2);
            for (int r = 1; r <= 12; ++r) {
                const double e = bayesian_threshold(p, beta, r);
                CHECK(e > prev);
                CHECK(e < 1.0 - beta);
                prev = e;
                if (r > 1) {
                    CHECK(std::abs(r * derive(ModelParams(p, e, beta)).eta_y - 1.0) < 1e-9);
                    CHECK(std::abs(e - eta_y_root(p, beta, r)) < 1e-10);
                }
            }
            CHECK(std::abs(bayesian_threshold(p, beta, 2) - (1.0 - beta) * base2) < 1e-15);
        }
    }
}

TEST_CASE("cascade_thresholds: k = 0 entries reproduce the closed form") {
    const auto pts = cascade_thresholds(0.7, 0.0, 3, 0);
    REQUIRE(pts.size() == 3);
    for (const auto& t : pts) {
        CHECK(t.k == 0);
        CHECK(std::abs(t.eps_value - bayesian_threshold(0.7, 0.0, t.r)) < 1e-10);
    }
}

TEST_CASE("cascade_thresholds: one interleaved N") {
    const auto pts = cascade_thresholds(0.7, 0.0, 3, 1);
    bool found_31 = false, found_21 = false;
    for (const auto& t : pts) {
        if (t.r == 3 && t.k == 1) {
            found_31 = true;
            // eta_y = 2/3, closed form (alpha - alpha^(2/3)) / (alpha^(5/3) - 1).
            CHECK(std::abs(t.eps_value - 0.1849130451051917) < 1e-10);
        }
        if (t.r == 2 && t.k == 1) {
            found_21 = true;
            CHECK(std::abs(t.eps_value) < 1e-10);
        }
    }
    CHECK(found_31);
    CHECK(found_21);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i - 1].eps_value <= pts[i].eps_value);
}

TEST_CASE("cascade_thresholds: every root solves its equation inside the domain") {
    for (double p : {0.6, 0.7, 0.8}) {
        for (double beta : {0.0, 0.1, 0.2}) {
            for (const auto& t : cascade_thresholds(p, beta, 30, 3)) {
                CHECK(t.eps_value >= 0.0);
                CHECK(t.eps_value < 1.0 - beta);
                const DerivedModel m = derive(ModelParams(p, t.eps_value, beta));
                CHECK(std::abs(t.r * m.eta_y - t.k * m.eta_n - 1.0) < 1e-9);
            }
        }
    }
}
