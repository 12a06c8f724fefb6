#pragma once

// Agent-level model: private signals, exact Bayesian posteriors over raw
// observation histories, the optimal-action rule and the fake-agent
// observation channel. Nothing here uses the walk statistic h, so this engine
// serves as an independent check on the walk reduction.

#include <cstdint>
#include <span>
#include <vector>

#include "cascade/model.hpp"
#include "cascade/rng.hpp"
#include "cascade/walk.hpp"

namespace cascade {

enum class AgentType : unsigned char { Ordinary, YFake, NFake };

inline const char* to_string(AgentType t) {
    switch (t) {
        case AgentType::YFake: return "YFake";
        case AgentType::NFake: return "NFake";
        default: return "Ordinary";
    }
}

inline constexpr double kTieTolerance = 1e-12;
inline constexpr int kMaxOracleDepth = 25;

struct AgentBelief {
    double posterior_g = 0.5;  // P(V=G | signal, history)
    double private_lr = 1.0;   // P(S|B) / P(S|G)
    double public_lr = 1.0;    // P(H|B) / P(H|G)
};

using History = std::vector<Obs>;

// Public likelihood ratio of a history, built one observation at a time. Each
// observation's probability under V marginalises over the reporter's type and
// signal given the optimal rule applied to the preceding prefix. Once the
// prefix is in a cascade the two likelihoods coincide and the ratio freezes.
class PublicLikelihood {
public:
    explicit PublicLikelihood(const ModelParams& params);

    AgentBelief belief(Signal s) const;
    Obs action(Signal s) const;

    // Optimal action no longer depends on the private signal.
    bool cascaded() const { return action(Signal::High) == action(Signal::Low); }

    // P(next observation = Y | v, history so far).
    double prob_y(Truth v) const;

    void append(Obs o);

    double log_ratio() const noexcept { return log_lr_; }
    std::size_t length() const noexcept { return length_; }

private:
    ModelParams params_;
    double log_lr_ = 0.0;
    std::size_t length_ = 0;
};

AgentBelief posterior(std::span<const Obs> history, Signal s, const ModelParams& params);

// Y if posterior_g > 1/2, N if < 1/2, the signal itself on a tie.
Obs decide(const AgentBelief& belief, Signal s);

Obs observe(Obs action, AgentType type);

struct AgentDraw {
    AgentType type = AgentType::Ordinary;
    Signal signal = Signal::High;
    Obs action = Obs::Y;
    Obs observation = Obs::Y;
};

struct AgentRun {
    CascadeOutcome outcome;
    std::vector<AgentDraw> trace;
};

// Agents arrive one at a time; each draws its type (uniform u: u < eps is a
// Y fake, u < eps + beta an N fake) and then its signal (u < P(H|v) is H).
// The run stops as soon as the next agent would act the same under either
// signal; outcome.steps is the history length at that point.
template <UniformSource G>
AgentRun simulate_agents(const ModelParams& params, Truth v, G& rng, std::int64_t max_agents,
                         bool keep_trace = true) {
    if (max_agents < 1) throw ParameterError("max_agents must be >= 1");
    const double p_high = v == Truth::Good ? params.p() : 1.0 - params.p();
    PublicLikelihood pub(params);
    AgentRun run;
    for (std::int64_t n = 0;; ++n) {
        if (pub.cascaded()) {
            const Obs fixed = pub.action(Signal::High);
            run.outcome = {fixed == Obs::Y ? Absorption::YCascade : Absorption::NCascade, n};
            return run;
        }
        if (n == max_agents) {
            run.outcome = {Absorption::Undecided, n};
            return run;
        }
        AgentDraw d;
        const double u_type = rng.uniform();
        d.type = u_type < params.eps()               ? AgentType::YFake
                 : u_type < params.fake_total()      ? AgentType::NFake
                                                     : AgentType::Ordinary;
        d.signal = rng.uniform() < p_high ? Signal::High : Signal::Low;
        d.action = pub.action(d.signal);
        d.observation = observe(d.action, d.type);
        pub.append(d.observation);
        if (keep_trace) run.trace.push_back(d);
    }
}

// Monte Carlo over simulate_agents with the same per-trial seeding as
// mc_estimate.
MCEstimate agent_mc_estimate(const ModelParams& params, Truth v, std::int64_t trials, std::uint64_t seed,
                             std::int64_t max_agents = kDefaultMaxSteps, unsigned workers = 0);

// Enumerates every observation history up to `depth` (at most 25) using the
// agent-level recursion, and returns the exact absorbed masses.
ProbInterval exhaustive_oracle(const ModelParams& params, Truth v, int depth);

}  // namespace cascade
