#pragma once

// Structural approximations of the Y-cascade probability.
//
// tree_approx: iterate over excursions out of the comfort zone
// [eta_n - 1, 1 - eta_n]. Each iteration expands the walk from its restart
// points until every branch is absorbed, comes back into the zone (deferred
// to the next iteration at its exact position) or hits the per-iteration
// depth cap. Absorbed Y mass is a lower bound; adding everything still open
// gives an upper bound.
//
// sequence_lower_bound: sum the probabilities of a prefix-free family of
// Y-cascading observation sequences organised by stages of width eta_y on
// [0, 1]. Every member cascades exactly at its last observation, so the sum
// is a certified lower bound whatever the family misses.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cascade/model.hpp"
#include "cascade/walk.hpp"

namespace cascade {

// Raised when the stage decomposition does not exist for the parameters.
class UnsupportedRegime : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct ComfortZone {
    double lo = 0.0;  // eta_n - 1
    double hi = 0.0;  // 1 - eta_n

    bool contains(double h) const noexcept { return h >= lo - kWallTolerance && h <= hi + kWallTolerance; }
};

ComfortZone comfort_zone(const DerivedModel& m);

// Walk position carried between iterations. Counts are global, so h is exact.
struct PendingMass {
    std::int64_t n_y = 0;
    std::int64_t n_n = 0;
    double mass = 0.0;
};

struct TreeIterationState {
    std::vector<PendingMass> pending;  // restart points inside the comfort zone
    double acc_y = 0.0;
    double acc_n = 0.0;
    double truncated = 0.0;  // mass cut by the per-iteration depth cap
    int iterations = 0;

    double pending_total() const;
};

// Runs m iterations starting from mass 1 at h = 0.
TreeIterationState tree_iterate(const ModelParams& params, Truth v, int m, int depth_cap = kDefaultDepth);

// y_lower = acc_y, y_upper = acc_y + pending + truncated.
ProbInterval tree_approx(const ModelParams& params, Truth v, int m, int depth_cap = kDefaultDepth);

struct StageDecomposition {
    int r1 = 0;         // ceil(1 / eta_y): consecutive Ys from 0 to the Y wall
    int t1 = 0;         // ceil(eta_n / eta_y): Ys needed to undo one N
    int k_plus_1 = 0;   // r1 - t1
    std::vector<double> boundaries;  // 0, eta_y, 2 eta_y, ..., 1 - eta_n, 1

    // Stage of a position: 0 below the origin, then 1.. along the boundaries.
    // The last stage is [1 - eta_n, 1].
    int stage_of(double h) const;
    int last_stage() const noexcept { return static_cast<int>(boundaries.size()) - 1; }
};

// Throws UnsupportedRegime unless eta_n > eta_y and r1 - t1 >= 1.
StageDecomposition stage_decomposition(const DerivedModel& m);

// Family used by the sequence bound: Y-cascading sequences that drop out of
// the last stage (an N observed there) at most m times and have at most
// max_length observations. Computed by merging sequences that share
// (n_y, n_n, drops); enumerate_sequences lists the same family explicitly.
double sequence_lower_bound(const ModelParams& params, Truth v, int m, int max_length = kDefaultDepth);

struct EnumeratedSequence {
    std::vector<Obs> observations;
    double probability = 0.0;
};

// Explicit listing of the sequence family (for validation on small
// instances). Throws std::length_error once more than max_count sequences
// would be produced.
std::vector<EnumeratedSequence> enumerate_sequences(const ModelParams& params, Truth v, int m, int max_length,
                                                    std::size_t max_count = 100'000);

}  // namespace cascade
