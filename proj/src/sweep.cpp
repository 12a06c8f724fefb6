#include "cascade/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cascade/agent.hpp"
#include "cascade/approx.hpp"
#include "cascade/parallel.hpp"

namespace cascade {

namespace {

constexpr int kClearanceRMax = 200;
constexpr int kClearanceKMax = 2;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool is_mc(Method m) { return m == Method::MC || m == Method::AgentMC; }

SweepRow evaluate(const SweepSpec& spec, double eps) {
    SweepRow row;
    row.eps = eps;
    row.beta = spec.beta;
    row.p = spec.p;
    row.v = spec.v;
    row.method = spec.method;
    try {
        const ModelParams params(spec.p, eps, spec.beta);
        switch (spec.method) {
            case Method::MC:
            case Method::AgentMC: {
                const MCEstimate est =
                    spec.method == Method::MC
                        ? mc_estimate(params, spec.v, spec.trials, spec.seed, spec.max_steps, spec.workers)
                        : agent_mc_estimate(params, spec.v, spec.trials, spec.seed, spec.max_steps, spec.workers);
                row.value = est.p_hat;
                row.std_err = est.std_err;
                row.trials = est.trials;
                row.seed = est.seed;
                break;
            }
            case Method::Exact:
            case Method::Tree: {
                const ProbInterval iv = spec.method == Method::Exact
                                            ? exact_interval(params, spec.v, spec.depth)
                                            : tree_approx(params, spec.v, spec.iters, spec.depth);
                row.lower = iv.y_lower;
                row.upper = iv.y_upper;
                row.value = iv.midpoint();
                break;
            }
            case Method::Sequence: {
                const double lb = sequence_lower_bound(params, spec.v, spec.iters, spec.depth);
                row.value = lb;
                row.lower = lb;
                break;
            }
        }
    } catch (const std::exception& e) {
        row.value.reset();
        row.lower.reset();
        row.upper.reset();
        row.std_err.reset();
        row.error = e.what();
    }
    return row;
}

template <class T>
std::string opt_field(const std::optional<T>& x) {
    if (!x) return "";
    if constexpr (std::is_floating_point_v<T>) return fmt17(*x);
    else return std::to_string(*x);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

const char* to_string(Method m) {
    switch (m) {
        case Method::MC: return "mc";
        case Method::Exact: return "exact";
        case Method::Tree: return "tree";
        case Method::Sequence: return "sequence";
        case Method::AgentMC: return "agent-mc";
    }
    return "?";
}

Method parse_method(const std::string& s) {
    for (Method m : {Method::MC, Method::Exact, Method::Tree, Method::Sequence, Method::AgentMC})
        if (s == to_string(m)) return m;
    throw ParameterError("unknown method '" + s + "' (expected mc, exact, tree, sequence or agent-mc)");
}

Truth parse_truth(const std::string& s) {
    if (s == "G" || s == "g") return Truth::Good;
    if (s == "B" || s == "b") return Truth::Bad;
    throw ParameterError("true value must be G or B, got '" + s + "'");
}

TableFormat parse_table_format(const std::string& s) {
    if (s == "csv") return TableFormat::Csv;
    if (s == "json") return TableFormat::Json;
    throw ParameterError("format must be csv or json, got '" + s + "'");
}

void validate(const SweepSpec& spec) {
    (void)ModelParams(spec.p, 0.0, spec.beta);
    const EpsGrid& g = spec.eps_grid;
    if (!(g.step > 0.0)) throw ParameterError("grid step must be > 0");
    if (!(g.start >= 0.0)) throw ParameterError("grid start must be >= 0");
    if (!(g.stop >= g.start)) throw ParameterError("grid stop must be >= start");
    if (!(g.stop < 1.0 - spec.beta)) throw ParameterError("grid stop must be < 1 - beta");
    if (is_mc(spec.method) && spec.trials < 1) throw ParameterError("trials must be >= 1");
    if (spec.depth < 1) throw ParameterError("depth must be >= 1");
    if (spec.iters < 1) throw ParameterError("iters must be >= 1");
    if (spec.max_steps < 1) throw ParameterError("max_steps must be >= 1");
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
    validate(spec);
    const EpsGrid& g = spec.eps_grid;
    const auto count = static_cast<std::int64_t>(std::floor((g.stop - g.start) / g.step + 1e-9)) + 1;
    const auto thresholds = cascade_thresholds(spec.p, spec.beta, kClearanceRMax, kClearanceKMax);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        double eps = g.start + static_cast<double>(i) * g.step;
        for (const auto& t : thresholds) {
            const double d = eps - t.eps_value;
            // Points on a threshold are left for the tie rule to settle.
            if (std::abs(d) > 1e-12 && std::abs(d) < kGridClearance)
                eps = t.eps_value + (d > 0 ? kGridClearance : -kGridClearance);
        }
        out.push_back(std::max(0.0, eps));
    }
    return out;
}

std::vector<SweepRow> sweep_eps(const SweepSpec& spec) {
    const std::vector<double> grid = sweep_grid(spec);
    std::vector<SweepRow> rows(grid.size());
    if (is_mc(spec.method)) {
        // The estimators parallelise over trials themselves.
        for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = evaluate(spec, grid[i]);
        return rows;
    }
    parallel_chunks<int>(grid.size(), spec.workers, [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) rows[i] = evaluate(spec, grid[i]);
        return 0;
    });
    return rows;
}

std::vector<Drop> detect_drops(const std::vector<SweepRow>& rows, double min_jump) {
    std::vector<Drop> out;
    const SweepRow* prev = nullptr;
    for (const auto& row : rows) {
        if (!row.value) continue;
        if (prev && *prev->value - *row.value > min_jump)
            out.push_back({0.5 * (prev->eps + row.eps), *prev->value - *row.value});
        prev = &row;
    }
    return out;
}

std::string format_table(const std::vector<SweepRow>& rows, TableFormat format) {
    if (format == TableFormat::Csv) {
        std::string out = std::string(kCsvHeader) + "\n";
        for (const auto& r : rows) {
            out += fmt17(r.eps) + "," + fmt17(r.beta) + "," + fmt17(r.p) + "," + to_string(r.v) + "," +
                   to_string(r.method) + "," + (r.failed() ? std::string("nan") : opt_field(r.value)) + "," +
                   opt_field(r.lower) + "," + opt_field(r.upper) + "," + opt_field(r.std_err) + "," +
                   opt_field(r.trials) + "," + opt_field(r.seed) + "\n";
        }
        return out;
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["eps"] = r.eps;
        j["beta"] = r.beta;
        j["p"] = r.p;
        j["v"] = to_string(r.v);
        j["method"] = to_string(r.method);
        auto put = [&](const char* key, const auto& x) {
            if (x) j[key] = *x;
            else j[key] = nullptr;
        };
        put("value", r.value);
        put("lower", r.lower);
        put("upper", r.upper);
        put("std_err", r.std_err);
        put("trials", r.trials);
        put("seed", r.seed);
        if (r.failed()) j["error"] = r.error;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

void write_table(const std::vector<SweepRow>& rows, TableFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << format_table(rows, format);
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<SweepRow> parse_csv_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kCsvHeader))
        throw std::runtime_error("CSV table must start with header: " + std::string(kCsvHeader));
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields: " + line);
        SweepRow r;
        r.eps = std::stod(f[0]);
        r.beta = std::stod(f[1]);
        r.p = std::stod(f[2]);
        r.v = parse_truth(f[3]);
        r.method = parse_method(f[4]);
        auto num = [](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return std::stod(s);
        };
        if (f[5] == "nan") r.error = "error";
        else r.value = num(f[5]);
        r.lower = num(f[6]);
        r.upper = num(f[7]);
        r.std_err = num(f[8]);
        if (!f[9].empty()) r.trials = std::stoll(f[9]);
        if (!f[10].empty()) r.seed = std::stoull(f[10]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace cascade
