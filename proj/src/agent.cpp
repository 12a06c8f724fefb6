#include "cascade/agent.hpp"

#include <cmath>

#include "cascade/numeric.hpp"
#include "cascade/parallel.hpp"

namespace cascade {

PublicLikelihood::PublicLikelihood(const ModelParams& params) : params_(params) {}

AgentBelief PublicLikelihood::belief(Signal s) const {
    const double p = params_.p();
    AgentBelief out;
    out.private_lr = s == Signal::High ? (1.0 - p) / p : p / (1.0 - p);
    out.public_lr = std::exp(log_lr_);
    out.posterior_g = 1.0 / (1.0 + out.private_lr * out.public_lr);
    return out;
}

Obs PublicLikelihood::action(Signal s) const { return decide(belief(s), s); }

double PublicLikelihood::prob_y(Truth v) const {
    const double p_high = v == Truth::Good ? params_.p() : 1.0 - params_.p();
    double act_y = 0.0;
    if (action(Signal::High) == Obs::Y) act_y += p_high;
    if (action(Signal::Low) == Obs::Y) act_y += 1.0 - p_high;
    return params_.eps() + (1.0 - params_.fake_total()) * act_y;
}

void PublicLikelihood::append(Obs o) {
    const double y_g = prob_y(Truth::Good);
    const double y_b = prob_y(Truth::Bad);
    const double like_g = o == Obs::Y ? y_g : 1.0 - y_g;
    const double like_b = o == Obs::Y ? y_b : 1.0 - y_b;
    // Equal likelihoods (every post-cascade observation) carry no information,
    // including the zero-probability case.
    if (like_g != like_b) log_lr_ += std::log(like_b) - std::log(like_g);
    ++length_;
}

AgentBelief posterior(std::span<const Obs> history, Signal s, const ModelParams& params) {
    PublicLikelihood pub(params);
    for (Obs o : history) pub.append(o);
    return pub.belief(s);
}

Obs decide(const AgentBelief& belief, Signal s) {
    if (std::abs(belief.posterior_g - 0.5) <= kTieTolerance) return s == Signal::High ? Obs::Y : Obs::N;
    return belief.posterior_g > 0.5 ? Obs::Y : Obs::N;
}

Obs observe(Obs action, AgentType type) {
    switch (type) {
        case AgentType::YFake: return Obs::Y;
        case AgentType::NFake: return Obs::N;
        default: return action;
    }
}

MCEstimate agent_mc_estimate(const ModelParams& params, Truth v, std::int64_t trials, std::uint64_t seed,
                             std::int64_t max_agents, unsigned workers) {
    if (trials < 1) throw ParameterError("trials must be >= 1");
    if (max_agents < 1) throw ParameterError("max_agents must be >= 1");
    struct Counts {
        std::int64_t y = 0;
        std::int64_t undecided = 0;
    };
    const auto chunks = parallel_chunks<Counts>(
        static_cast<std::uint64_t>(trials), workers, [&](std::uint64_t begin, std::uint64_t end) {
            Counts c;
            for (std::uint64_t t = begin; t < end; ++t) {
                RandomStream rng = RandomStream::for_trial(seed, t);
                const AgentRun run = simulate_agents(params, v, rng, max_agents, false);
                if (run.outcome.kind == Absorption::YCascade) ++c.y;
                else if (run.outcome.kind == Absorption::Undecided) ++c.undecided;
            }
            return c;
        });
    Counts total;
    for (const auto& c : chunks) {
        total.y += c.y;
        total.undecided += c.undecided;
    }
    return finalize_estimate(trials, total.y, total.undecided, seed);
}

namespace {

struct OracleSums {
    CompensatedSum y, n, pending;
};

void expand(const PublicLikelihood& node, Truth v, int remaining, double mass, OracleSums& sums) {
    if (node.cascaded()) {
        (node.action(Signal::High) == Obs::Y ? sums.y : sums.n).add(mass);
        return;
    }
    if (remaining == 0) {
        sums.pending.add(mass);
        return;
    }
    const double py = node.prob_y(v);
    PublicLikelihood child_y = node;
    child_y.append(Obs::Y);
    expand(child_y, v, remaining - 1, mass * py, sums);
    PublicLikelihood child_n = node;
    child_n.append(Obs::N);
    expand(child_n, v, remaining - 1, mass * (1.0 - py), sums);
}

}  // namespace

ProbInterval exhaustive_oracle(const ModelParams& params, Truth v, int depth) {
    if (depth < 1) throw ParameterError("depth must be >= 1");
    if (depth > kMaxOracleDepth) throw ParameterError("exhaustive oracle depth must be <= 25");
    OracleSums sums;
    expand(PublicLikelihood(params), v, depth, 1.0, sums);
    ProbInterval out;
    out.y_lower = sums.y.value();
    out.n_mass = sums.n.value();
    out.pending = sums.pending.value();
    out.y_upper = out.y_lower + out.pending;
    return out;
}

}  // namespace cascade
