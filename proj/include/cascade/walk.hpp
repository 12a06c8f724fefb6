#pragma once

// Random-walk view of the cascade process. Before any cascade the public
// history is summarised by h = n_y * eta_y - n_n * eta_n; the walk starts at 0
// and is absorbed at the right wall (h > 1, Y cascade) or the left wall
// (h < -1, N cascade).

#include <cstdint>
#include <stdexcept>

#include "cascade/model.hpp"
#include "cascade/rng.hpp"

namespace cascade {

// Boundary band around the walls. A position within tau of +-1 counts as
// "on the wall", where agents still follow their own signal.
inline constexpr double kWallTolerance = 1e-9;

inline constexpr std::int64_t kDefaultMaxSteps = 1'000'000;
inline constexpr int kDefaultDepth = 10'000;

enum class Absorption { Undecided, YCascade, NCascade };

inline const char* to_string(Absorption a) {
    switch (a) {
        case Absorption::YCascade: return "Y";
        case Absorption::NCascade: return "N";
        default: return "undecided";
    }
}

inline Absorption classify_position(double h) noexcept {
    if (h > 1.0 + kWallTolerance) return Absorption::YCascade;
    if (h < -1.0 - kWallTolerance) return Absorption::NCascade;
    return Absorption::Undecided;
}

class WalkState {
public:
    WalkState(double eta_y, double eta_n) noexcept : eta_y_(eta_y), eta_n_(eta_n) {}
    explicit WalkState(const DerivedModel& m) noexcept : WalkState(m.eta_y, m.eta_n) {}

    std::int64_t n_y() const noexcept { return n_y_; }
    std::int64_t n_n() const noexcept { return n_n_; }
    // Always recomputed from the integer counts.
    double h() const noexcept {
        return static_cast<double>(n_y_) * eta_y_ - static_cast<double>(n_n_) * eta_n_;
    }

    void record(Obs o) noexcept { (o == Obs::Y ? n_y_ : n_n_) += 1; }

private:
    double eta_y_;
    double eta_n_;
    std::int64_t n_y_ = 0;
    std::int64_t n_n_ = 0;
};

inline Absorption classify(const WalkState& s) noexcept { return classify_position(s.h()); }

// Throws std::logic_error when s is already absorbed.
WalkState step(WalkState s, Obs o);

struct CascadeOutcome {
    Absorption kind = Absorption::Undecided;
    std::int64_t steps = 0;  // observations consumed
};

// One walk. Each step draws Y with the forward probability for v.
template <UniformSource G>
CascadeOutcome simulate(const DerivedModel& m, Truth v, G& rng, std::int64_t max_steps) {
    if (max_steps < 1) throw ParameterError("max_steps must be >= 1");
    const double pf = m.forward_prob(v);
    WalkState s(m);
    for (std::int64_t n = 1; n <= max_steps; ++n) {
        s.record(rng.uniform() < pf ? Obs::Y : Obs::N);
        if (const Absorption a = classify(s); a != Absorption::Undecided) return {a, n};
    }
    return {Absorption::Undecided, max_steps};
}

struct MCEstimate {
    double p_hat = 0.0;    // Y-cascade fraction among decided trials
    double std_err = 0.0;
    std::int64_t trials = 0;
    std::int64_t y_count = 0;
    std::int64_t undecided = 0;
    std::uint64_t seed = 0;
};

// Raised when more than 1% of trials hit the step cap. Carries the estimate.
class UndecidedError : public std::runtime_error {
public:
    UndecidedError(const std::string& what, MCEstimate est) : std::runtime_error(what), estimate(est) {}
    MCEstimate estimate;
};

// Fills p_hat and std_err from the counts and enforces the undecided limit.
MCEstimate finalize_estimate(std::int64_t trials, std::int64_t y_count, std::int64_t undecided, std::uint64_t seed);

// Monte Carlo estimate of P(Y cascade | v). Bit-identical for any worker count.
MCEstimate mc_estimate(const ModelParams& params, Truth v, std::int64_t trials, std::uint64_t seed,
                       std::int64_t max_steps = kDefaultMaxSteps, unsigned workers = 0);

struct ProbInterval {
    double y_lower = 0.0;  // mass absorbed at the Y wall
    double y_upper = 1.0;  // y_lower + pending
    double n_mass = 0.0;   // mass absorbed at the N wall
    double pending = 1.0;  // mass not yet absorbed

    double width() const noexcept { return y_upper - y_lower; }
    double midpoint() const noexcept { return 0.5 * (y_lower + y_upper); }
    bool contains(double x) const noexcept { return y_lower <= x && x <= y_upper; }
};

// Exact distribution of the walk after `depth` observations, by dynamic
// programming over the (n_y, n_n) lattice.
ProbInterval exact_interval(const ModelParams& params, Truth v, int depth = kDefaultDepth);

}  // namespace cascade
