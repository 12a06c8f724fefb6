#include "cascade/walk.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "cascade/numeric.hpp"
#include "cascade/parallel.hpp"

namespace cascade {

WalkState step(WalkState s, Obs o) {
    if (classify(s) != Absorption::Undecided)
        throw std::logic_error("step: walk already absorbed at h=" + std::to_string(s.h()));
    s.record(o);
    return s;
}

MCEstimate finalize_estimate(std::int64_t trials, std::int64_t y_count, std::int64_t undecided, std::uint64_t seed) {
    MCEstimate est;
    est.trials = trials;
    est.y_count = y_count;
    est.undecided = undecided;
    est.seed = seed;
    const std::int64_t decided = trials - undecided;
    if (decided > 0) {
        est.p_hat = static_cast<double>(y_count) / static_cast<double>(decided);
        est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(decided));
    }
    if (static_cast<double>(undecided) > 0.01 * static_cast<double>(trials)) {
        std::ostringstream os;
        os << undecided << " of " << trials
           << " trials hit the step cap (limit 1%); parameters are too close to eps -> 1 - beta for this cap";
        throw UndecidedError(os.str(), est);
    }
    return est;
}

MCEstimate mc_estimate(const ModelParams& params, Truth v, std::int64_t trials, std::uint64_t seed,
                       std::int64_t max_steps, unsigned workers) {
    if (trials < 1) throw ParameterError("trials must be >= 1");
    if (max_steps < 1) throw ParameterError("max_steps must be >= 1");
    const DerivedModel m = derive(params);

    struct Counts {
        std::int64_t y = 0;
        std::int64_t undecided = 0;
    };
    const auto chunks = parallel_chunks<Counts>(
        static_cast<std::uint64_t>(trials), workers, [&](std::uint64_t begin, std::uint64_t end) {
            Counts c;
            for (std::uint64_t t = begin; t < end; ++t) {
                RandomStream rng = RandomStream::for_trial(seed, t);
                const CascadeOutcome out = simulate(m, v, rng, max_steps);
                if (out.kind == Absorption::YCascade) ++c.y;
                else if (out.kind == Absorption::Undecided) ++c.undecided;
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

ProbInterval exact_interval(const ModelParams& params, Truth v, int depth) {
    if (depth < 1) throw ParameterError("depth must be >= 1");
    const DerivedModel m = derive(params);
    const double pf = m.forward_prob(v);

    // Level n holds the live states with n_y + n_n = n, indexed by n_y - lo.
    std::int64_t lo = 0;
    std::vector<double> level{1.0};
    std::vector<double> next;
    CompensatedSum y_mass, n_mass;

    for (int n = 0; n < depth && !level.empty(); ++n) {
        next.assign(level.size() + 1, 0.0);
        for (std::size_t i = 0; i < level.size(); ++i) {
            const double mass = level[i];
            if (mass == 0.0) continue;
            const std::int64_t n_y = lo + static_cast<std::int64_t>(i);
            const std::int64_t n_n = n - n_y;
            // Y step keeps n_n, N step keeps n_y.
            const double h_up = static_cast<double>(n_y + 1) * m.eta_y - static_cast<double>(n_n) * m.eta_n;
            const double h_down = static_cast<double>(n_y) * m.eta_y - static_cast<double>(n_n + 1) * m.eta_n;
            switch (classify_position(h_up)) {
                case Absorption::YCascade: y_mass.add(mass * pf); break;
                case Absorption::NCascade: n_mass.add(mass * pf); break;
                default: next[i + 1] += mass * pf;
            }
            switch (classify_position(h_down)) {
                case Absorption::YCascade: y_mass.add(mass * (1.0 - pf)); break;
                case Absorption::NCascade: n_mass.add(mass * (1.0 - pf)); break;
                default: next[i] += mass * (1.0 - pf);
            }
        }
        std::size_t first = 0, last = next.size();
        while (first < last && next[first] == 0.0) ++first;
        while (last > first && next[last - 1] == 0.0) --last;
        level.assign(next.begin() + static_cast<std::ptrdiff_t>(first), next.begin() + static_cast<std::ptrdiff_t>(last));
        lo += static_cast<std::int64_t>(first);
    }

    CompensatedSum pending;
    for (double x : level) pending.add(x);

    ProbInterval out;
    out.y_lower = y_mass.value();
    out.n_mass = n_mass.value();
    out.pending = pending.value();
    out.y_upper = out.y_lower + out.pending;
    return out;
}

}  // namespace cascade
