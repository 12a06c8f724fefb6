#pragma once

// Parameter sweeps over eps at fixed (p, beta), drop detection, and the
// CSV/JSON table format used for figure data.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cascade/model.hpp"
#include "cascade/walk.hpp"

namespace cascade {

enum class Method { MC, Exact, Tree, Sequence, AgentMC };

const char* to_string(Method m);
// Accepts mc, exact, tree, sequence, agent-mc. Throws ParameterError.
Method parse_method(const std::string& s);
Truth parse_truth(const std::string& s);

struct EpsGrid {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.005;
};

struct SweepSpec {
    double p = 0.7;
    double beta = 0.0;
    Truth v = Truth::Bad;
    EpsGrid eps_grid;
    Method method = Method::Exact;
    std::int64_t trials = 100'000;
    std::uint64_t seed = 1;
    int depth = kDefaultDepth;                 // exact DP depth; tree depth cap
    int iters = 10;                            // tree / sequence iterations
    std::int64_t max_steps = kDefaultMaxSteps; // simulation cap
    unsigned workers = 0;
};

// Grid points closer than this to a cascade threshold (but not on it) are
// moved out to exactly this distance.
inline constexpr double kGridClearance = 1e-6;

struct SweepRow {
    double eps = 0.0;
    double beta = 0.0;
    double p = 0.0;
    Truth v = Truth::Bad;
    Method method = Method::Exact;
    std::optional<double> value;
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<double> std_err;
    std::optional<std::int64_t> trials;
    std::optional<std::uint64_t> seed;
    std::string error;  // set on error marker rows; value is then empty

    bool failed() const { return !error.empty(); }
};

// Throws ParameterError on an invalid spec.
void validate(const SweepSpec& spec);

// Grid points in ascending order, after threshold clearance.
std::vector<double> sweep_grid(const SweepSpec& spec);

// One row per grid point. Engine failures become error marker rows.
std::vector<SweepRow> sweep_eps(const SweepSpec& spec);

struct Drop {
    double eps_location = 0.0;  // midpoint between the two rows
    double jump = 0.0;          // positive size of the decrease
};

// Decreases larger than min_jump between consecutive rows that carry a value.
std::vector<Drop> detect_drops(const std::vector<SweepRow>& rows, double min_jump);

enum class TableFormat { Csv, Json };

TableFormat parse_table_format(const std::string& s);

inline constexpr const char* kCsvHeader = "eps,beta,p,v,method,value,lower,upper,std_err,trials,seed";

std::string format_table(const std::vector<SweepRow>& rows, TableFormat format);

// Throws std::runtime_error naming the path on I/O failure.
void write_table(const std::vector<SweepRow>& rows, TableFormat format, const std::filesystem::path& path);

std::vector<SweepRow> parse_csv_table(const std::string& text);

}  // namespace cascade
