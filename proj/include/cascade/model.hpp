#pragma once

// Model parameters for sequential Bayesian learning with two kinds of fake
// agents, the closed-form quantities derived from them, and the threshold
// values of epsilon at which the cascade structure changes.
//
// A fraction eps of agents always report Y, a fraction beta always report N,
// the rest report their Bayesian-optimal action honestly. Private signals pass
// through a binary symmetric channel of quality p.

#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

// True value of the item.
enum class Truth { Good, Bad };

// Reported observation (or action).
enum class Obs : unsigned char { Y, N };

// Private signal.
enum class Signal : unsigned char { High, Low };

inline const char* to_string(Truth v) { return v == Truth::Good ? "G" : "B"; }
inline const char* to_string(Obs o) { return o == Obs::Y ? "Y" : "N"; }
inline const char* to_string(Signal s) { return s == Signal::High ? "H" : "L"; }

// Raised for parameters outside the model's domain. The message names the
// violated invariant.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ModelParams {
public:
    // Throws ParameterError unless 1/2 < p < 1, eps >= 0, beta >= 0 and
    // eps + beta < 1.
    ModelParams(double p, double eps, double beta);

    double p() const noexcept { return p_; }
    double eps() const noexcept { return eps_; }
    double beta() const noexcept { return beta_; }
    double fake_total() const noexcept { return fake_total_; }

    // Same p, fake fractions exchanged.
    ModelParams swapped() const { return {p_, beta_, eps_}; }

private:
    double p_;
    double eps_;
    double beta_;
    double fake_total_;
};

struct DerivedModel {
    ModelParams params;
    double a;      // P(O=Y | V=G) while agents follow their signal
    double b;      // P(O=N | V=B) while agents follow their signal
    double alpha;  // p / (1 - p)
    double eta_y;  // walk step for an observed Y
    double eta_n;  // walk step for an observed N
    double pf_g;   // forward (Y) probability under V=G
    double pf_b;   // forward (Y) probability under V=B

    double forward_prob(Truth v) const noexcept { return v == Truth::Good ? pf_g : pf_b; }
};

DerivedModel derive(const ModelParams& params);

// Closed-form epsilon at which r consecutive Ys stop sufficing to cascade,
// i.e. the solution of r * eta_y(eps) = 1.
double bayesian_threshold(double p, double beta, int r);

struct ThresholdPoint {
    int r = 1;               // Y count
    int k = 0;               // N count; 0 for the Bayesian thresholds
    double eps_value = 0.0;
};

// All eps in [0, 1 - beta) with r * eta_y(eps) - k * eta_n(eps) = 1 for
// 1 <= r <= r_max and 0 <= k <= k_max, sorted by eps.
std::vector<ThresholdPoint> cascade_thresholds(double p, double beta, int r_max, int k_max);

// Bisection tolerance on eps for k >= 1 thresholds.
inline constexpr double kThresholdTolerance = 1e-12;

}  // namespace cascade
