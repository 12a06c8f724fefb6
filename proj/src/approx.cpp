#include "cascade/approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "cascade/numeric.hpp"

namespace cascade {

namespace {

// Branches lighter than this are cut: into `truncated` for the tree (still
// inside the upper bound), dropped for the sequence family (still a lower
// bound).
constexpr double kNegligibleMass = 1e-20;

double position(const DerivedModel& m, std::int64_t n_y, std::int64_t n_n) {
    return static_cast<double>(n_y) * m.eta_y - static_cast<double>(n_n) * m.eta_n;
}

}  // namespace

ComfortZone comfort_zone(const DerivedModel& m) { return {m.eta_n - 1.0, 1.0 - m.eta_n}; }

double TreeIterationState::pending_total() const {
    CompensatedSum s;
    for (const auto& p : pending) s.add(p.mass);
    return s.value();
}

TreeIterationState tree_iterate(const ModelParams& params, Truth v, int m, int depth_cap) {
    if (m < 1) throw ParameterError("iteration count m must be >= 1");
    if (depth_cap < 1) throw ParameterError("depth_cap must be >= 1");
    const DerivedModel dm = derive(params);
    const ComfortZone cz = comfort_zone(dm);
    const double pf = dm.forward_prob(v);

    // All iterations advance together, one observation per level. A branch
    // is keyed by (n_y, finished iterations, has left the zone in the current
    // iteration); n_n follows from the level.
    using Key = std::tuple<std::int64_t, int, bool>;
    std::map<Key, double> active{{{0, 0, false}, 1.0}};
    std::map<std::pair<std::int64_t, std::int64_t>, double> restarts;
    CompensatedSum acc_y, acc_n, truncated;

    for (std::int64_t level = 0; level < depth_cap && !active.empty(); ++level) {
        std::map<Key, double> next;
        for (const auto& [key, mass] : active) {
            if (mass < kNegligibleMass) {
                truncated.add(mass);
                continue;
            }
            const auto [n_y, done, left] = key;
            const std::int64_t n_n = level - n_y;
            for (const Obs o : {Obs::Y, Obs::N}) {
                const double w = mass * (o == Obs::Y ? pf : 1.0 - pf);
                const std::int64_t y = n_y + (o == Obs::Y);
                const std::int64_t n = n_n + (o == Obs::N);
                const double h = position(dm, y, n);
                switch (classify_position(h)) {
                    case Absorption::YCascade: acc_y.add(w); continue;
                    case Absorption::NCascade: acc_n.add(w); continue;
                    default: break;
                }
                if (!cz.contains(h)) next[{y, done, true}] += w;
                else if (!left) next[{y, done, false}] += w;
                else if (done + 1 == m) restarts[{y, n}] += w;
                else next[{y, done + 1, false}] += w;
            }
        }
        active = std::move(next);
    }
    for (const auto& [key, mass] : active) truncated.add(mass);

    TreeIterationState state;
    for (const auto& [key, mass] : restarts) state.pending.push_back({key.first, key.second, mass});
    state.acc_y = acc_y.value();
    state.acc_n = acc_n.value();
    state.truncated = truncated.value();
    state.iterations = m;
    return state;
}

ProbInterval tree_approx(const ModelParams& params, Truth v, int m, int depth_cap) {
    const TreeIterationState s = tree_iterate(params, v, m, depth_cap);
    ProbInterval out;
    out.y_lower = s.acc_y;
    out.n_mass = s.acc_n;
    out.pending = s.pending_total() + s.truncated;
    out.y_upper = out.y_lower + out.pending;
    return out;
}

int StageDecomposition::stage_of(double h) const {
    if (h < -kWallTolerance) return 0;
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), h + kWallTolerance);
    return std::min(static_cast<int>(it - boundaries.begin()), last_stage());
}

StageDecomposition stage_decomposition(const DerivedModel& m) {
    if (!(m.eta_n > m.eta_y)) {
        std::ostringstream os;
        os << "sequence structure requires eta_n > eta_y (eta_y=" << m.eta_y << ", eta_n=" << m.eta_n << ")";
        throw UnsupportedRegime(os.str());
    }
    StageDecomposition s;
    s.r1 = static_cast<int>(std::ceil(1.0 / m.eta_y));
    s.t1 = static_cast<int>(std::ceil(m.eta_n / m.eta_y));
    s.k_plus_1 = s.r1 - s.t1;
    if (s.k_plus_1 < 1) {
        std::ostringstream os;
        os << "sequence structure requires K+1 = r1 - t1 >= 1 (r1=" << s.r1 << ", t1=" << s.t1 << ")";
        throw UnsupportedRegime(os.str());
    }
    const double last = 1.0 - m.eta_n;
    for (int j = 0; j * m.eta_y < last - 1e-12; ++j) s.boundaries.push_back(j * m.eta_y);
    s.boundaries.push_back(last);
    s.boundaries.push_back(1.0);
    return s;
}

namespace {

struct SequenceRules {
    DerivedModel dm;
    StageDecomposition stages;
    double pf;
    int max_drops;

    // Drop count after observing o from (n_y, n_n), or -1 if the branch leaves
    // the family (N-absorbed or too many drops).
    int next_drops(std::int64_t n_y, std::int64_t n_n, int drops, Obs o) const {
        if (o == Obs::N) {
            if (stages.stage_of(position(dm, n_y, n_n)) == stages.last_stage()) ++drops;
            if (drops > max_drops) return -1;
            if (classify_position(position(dm, n_y, n_n + 1)) == Absorption::NCascade) return -1;
        }
        return drops;
    }
};

SequenceRules make_rules(const ModelParams& params, Truth v, int m, int max_length) {
    if (m < 1) throw ParameterError("iteration count m must be >= 1");
    if (max_length < 1) throw ParameterError("max_length must be >= 1");
    const DerivedModel dm = derive(params);
    return {dm, stage_decomposition(dm), dm.forward_prob(v), m};
}

}  // namespace

double sequence_lower_bound(const ModelParams& params, Truth v, int m, int max_length) {
    const SequenceRules rules = make_rules(params, v, m, max_length);
    using Key = std::tuple<std::int64_t, std::int64_t, int>;
    std::map<Key, double> active{{{0, 0, 0}, 1.0}};
    CompensatedSum total;
    for (int len = 0; len < max_length && !active.empty(); ++len) {
        std::map<Key, double> next;
        for (const auto& [key, mass] : active) {
            if (mass < kNegligibleMass) continue;
            const auto [n_y, n_n, drops] = key;
            if (classify_position(position(rules.dm, n_y + 1, n_n)) == Absorption::YCascade) {
                total.add(mass * rules.pf);
            } else {
                next[{n_y + 1, n_n, drops}] += mass * rules.pf;
            }
            if (const int d = rules.next_drops(n_y, n_n, drops, Obs::N); d >= 0)
                next[{n_y, n_n + 1, d}] += mass * (1.0 - rules.pf);
        }
        active = std::move(next);
    }
    return total.value();
}

std::vector<EnumeratedSequence> enumerate_sequences(const ModelParams& params, Truth v, int m, int max_length,
                                                    std::size_t max_count) {
    const SequenceRules rules = make_rules(params, v, m, max_length);
    std::vector<EnumeratedSequence> out;
    std::vector<Obs> path;

    auto visit = [&](auto&& self, std::int64_t n_y, std::int64_t n_n, int drops, double prob) -> void {
        if (static_cast<int>(path.size()) == max_length) return;
        path.push_back(Obs::Y);
        if (classify_position(position(rules.dm, n_y + 1, n_n)) == Absorption::YCascade) {
            if (out.size() == max_count) throw std::length_error("sequence enumeration exceeds max_count");
            out.push_back({path, prob * rules.pf});
        } else {
            self(self, n_y + 1, n_n, drops, prob * rules.pf);
        }
        path.back() = Obs::N;
        if (const int d = rules.next_drops(n_y, n_n, drops, Obs::N); d >= 0)
            self(self, n_y, n_n + 1, d, prob * (1.0 - rules.pf));
        path.pop_back();
    };
    visit(visit, 0, 0, 0, 1.0);
    return out;
}

}  // namespace cascade
