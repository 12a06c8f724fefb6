#include "cascade/cli.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cascade/agent.hpp"
#include "cascade/approx.hpp"
#include "cascade/model.hpp"
#include "cascade/sweep.hpp"
#include "cascade/walk.hpp"

namespace cascade::cli {

namespace {

using json = nlohmann::ordered_json;

struct Settings {
    std::optional<double> p;
    double eps = 0.0;
    double beta = 0.0;
    std::string v = "B";
    std::string format = "json";
    std::string engine = "walk";
    std::string method;
    std::int64_t trials = 100'000;
    std::uint64_t seed = 1;
    std::int64_t max_steps = kDefaultMaxSteps;
    unsigned workers = 0;
    int depth = kDefaultDepth;
    int depth_cap = kDefaultDepth;
    int iters = 10;
    int r_max = 10;
    int k_max = 2;
    double start = 0.0;
    std::optional<double> stop;
    double step = 0.005;
    std::string out;
};

// One flag of one subcommand, readable from the config file under the same
// name and echoed back in JSON output.
struct Binding {
    std::string key;
    CLI::Option* option;
    std::function<void(const json&)> load;
    std::function<json()> dump;
};

class Registry {
public:
    template <class T>
    void add(CLI::App* sub, const std::string& key, T& var, const std::string& help) {
        CLI::Option* opt = sub->add_option("--" + key, var, help);
        bindings_[sub].push_back(Binding{
            key, opt,
            [&var](const json& j) {
                if constexpr (requires { var.has_value(); }) var = j.get<typename T::value_type>();
                else var = j.get<T>();
            },
            [&var]() -> json {
                if constexpr (requires { var.has_value(); }) {
                    return var ? json(*var) : json(nullptr);
                } else {
                    return json(var);
                }
            }});
    }

    // Fills every flag not given on the command line from the config file.
    void apply_config(CLI::App* sub, const json& config) {
        for (auto& b : bindings_[sub]) {
            if (b.option->count() > 0 || !config.contains(b.key)) continue;
            try {
                b.load(config.at(b.key));
            } catch (const json::exception& e) {
                throw ParameterError("config value for '" + b.key + "' has the wrong type");
            }
        }
    }

    json effective(CLI::App* sub) {
        json j;
        j["subcommand"] = sub->get_name();
        for (auto& b : bindings_[sub]) j[b.key] = b.dump();
        return j;
    }

private:
    std::map<CLI::App*, std::vector<Binding>> bindings_;
};

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot read config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParameterError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ParameterError("config file '" + path + "' must hold a JSON object");
    return j;
}

double require(const std::optional<double>& x, const char* name) {
    if (!x) throw ParameterError(std::string("missing required parameter --") + name);
    return *x;
}

void require_json_format(const Settings& s) {
    if (s.format != "json") throw ParameterError("format must be json for this subcommand, got '" + s.format + "'");
}

json interval_json(const ProbInterval& iv) {
    json j;
    j["y_lower"] = iv.y_lower;
    j["y_upper"] = iv.y_upper;
    j["n_mass"] = iv.n_mass;
    j["pending"] = iv.pending;
    return j;
}

json estimate_json(const MCEstimate& est) {
    json j;
    j["p_hat"] = est.p_hat;
    j["std_err"] = est.std_err;
    j["trials"] = est.trials;
    j["y_count"] = est.y_count;
    j["undecided"] = est.undecided;
    j["seed"] = est.seed;
    return j;
}

void emit(std::ostream& out, json body, const json& config) {
    json j;
    j["config"] = config;
    for (auto& [k, v] : body.items()) j[k] = v;
    out << j.dump(2) << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Settings s;
    Registry reg;
    std::string config_path;

    CLI::App app{"Information cascades with fake agents: exact analysis, simulation and sweeps", "cascade"};
    app.require_subcommand(1);
    app.add_option("--config", config_path, "JSON file with default flag values (flags take precedence)");

    auto model_flags = [&](CLI::App* sub, bool with_eps) {
        reg.add(sub, "p", s.p, "private signal quality, 1/2 < p < 1");
        if (with_eps) reg.add(sub, "eps", s.eps, "fraction of Y-type fake agents");
        reg.add(sub, "beta", s.beta, "fraction of N-type fake agents");
    };

    CLI::App* derive_cmd = app.add_subcommand("derive", "Print the derived model quantities");
    model_flags(derive_cmd, true);
    reg.add(derive_cmd, "format", s.format, "output format (json)");

    CLI::App* thresholds_cmd = app.add_subcommand("thresholds", "Bayesian and cascade thresholds in eps");
    model_flags(thresholds_cmd, false);
    reg.add(thresholds_cmd, "r-max", s.r_max, "largest Y count r");
    reg.add(thresholds_cmd, "k-max", s.k_max, "largest N count k");
    reg.add(thresholds_cmd, "format", s.format, "output format (json)");

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of the Y-cascade probability");
    model_flags(simulate_cmd, true);
    reg.add(simulate_cmd, "v", s.v, "true value, G or B");
    reg.add(simulate_cmd, "engine", s.engine, "walk or agent");
    reg.add(simulate_cmd, "trials", s.trials, "number of trials");
    reg.add(simulate_cmd, "seed", s.seed, "master seed");
    reg.add(simulate_cmd, "max-steps", s.max_steps, "per-trial observation cap");
    reg.add(simulate_cmd, "workers", s.workers, "worker threads (0 = all cores)");
    reg.add(simulate_cmd, "format", s.format, "output format (json)");

    CLI::App* exact_cmd = app.add_subcommand("exact", "Exact finite-depth enclosure of the Y-cascade probability");
    model_flags(exact_cmd, true);
    reg.add(exact_cmd, "v", s.v, "true value, G or B");
    reg.add(exact_cmd, "depth", s.depth, "number of observations");
    reg.add(exact_cmd, "format", s.format, "output format (json)");

    CLI::App* approx_cmd = app.add_subcommand("approx", "Tree enclosure or sequence lower bound");
    model_flags(approx_cmd, true);
    reg.add(approx_cmd, "v", s.v, "true value, G or B");
    reg.add(approx_cmd, "method", s.method, "tree or sequence");
    reg.add(approx_cmd, "iters", s.iters, "iterations M");
    reg.add(approx_cmd, "depth-cap", s.depth_cap, "observation horizon");
    reg.add(approx_cmd, "format", s.format, "output format (json)");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep eps and write a CSV/JSON table");
    model_flags(sweep_cmd, false);
    reg.add(sweep_cmd, "v", s.v, "true value, G or B");
    reg.add(sweep_cmd, "method", s.method, "mc, exact, tree, sequence or agent-mc");
    reg.add(sweep_cmd, "start", s.start, "first eps");
    reg.add(sweep_cmd, "stop", s.stop, "last eps (< 1 - beta)");
    reg.add(sweep_cmd, "step", s.step, "grid step");
    reg.add(sweep_cmd, "trials", s.trials, "Monte Carlo trials per point");
    reg.add(sweep_cmd, "seed", s.seed, "master seed");
    reg.add(sweep_cmd, "depth", s.depth, "exact DP depth / tree horizon");
    reg.add(sweep_cmd, "iters", s.iters, "tree / sequence iterations");
    reg.add(sweep_cmd, "max-steps", s.max_steps, "simulation cap");
    reg.add(sweep_cmd, "workers", s.workers, "worker threads (0 = all cores)");
    reg.add(sweep_cmd, "out", s.out, "output file (stdout when empty)");
    reg.add(sweep_cmd, "format", s.format, "csv or json");

    for (CLI::App* sub : {derive_cmd, thresholds_cmd, simulate_cmd, exact_cmd, approx_cmd, sweep_cmd})
        sub->add_option("--config", config_path, "JSON file with default flag values (flags take precedence)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->get_name() == "sweep") {
        if (sweep_cmd->get_option("--format")->count() == 0) s.format = "csv";
        if (s.method.empty()) s.method = "exact";
    } else if (sub->get_name() == "approx" && s.method.empty()) {
        s.method = "tree";
    }

    try {
        if (!config_path.empty()) reg.apply_config(sub, load_config_file(config_path));
        const json config = reg.effective(sub);

        if (sub == derive_cmd) {
            require_json_format(s);
            const DerivedModel m = derive(ModelParams(require(s.p, "p"), s.eps, s.beta));
            json j;
            j["a"] = m.a;
            j["b"] = m.b;
            j["alpha"] = m.alpha;
            j["eta_y"] = m.eta_y;
            j["eta_n"] = m.eta_n;
            j["pf_g"] = m.pf_g;
            j["pf_b"] = m.pf_b;
            j["fake_total"] = m.params.fake_total();
            emit(out, std::move(j), config);
        } else if (sub == thresholds_cmd) {
            require_json_format(s);
            const double p = require(s.p, "p");
            json bayes = json::array();
            for (int r = 1; r <= s.r_max; ++r)
                bayes.push_back(json{{"r", r}, {"eps", bayesian_threshold(p, s.beta, r)}});
            json all = json::array();
            for (const auto& t : cascade_thresholds(p, s.beta, s.r_max, s.k_max))
                all.push_back(json{{"r", t.r}, {"k", t.k}, {"eps", t.eps_value}});
            emit(out, json{{"bayesian", bayes}, {"cascade", all}}, config);
        } else if (sub == simulate_cmd) {
            require_json_format(s);
            const ModelParams params(require(s.p, "p"), s.eps, s.beta);
            const Truth v = parse_truth(s.v);
            MCEstimate est;
            if (s.engine == "walk") est = mc_estimate(params, v, s.trials, s.seed, s.max_steps, s.workers);
            else if (s.engine == "agent") est = agent_mc_estimate(params, v, s.trials, s.seed, s.max_steps, s.workers);
            else throw ParameterError("engine must be walk or agent, got '" + s.engine + "'");
            emit(out, estimate_json(est), config);
        } else if (sub == exact_cmd) {
            require_json_format(s);
            const ModelParams params(require(s.p, "p"), s.eps, s.beta);
            emit(out, interval_json(exact_interval(params, parse_truth(s.v), s.depth)), config);
        } else if (sub == approx_cmd) {
            require_json_format(s);
            const ModelParams params(require(s.p, "p"), s.eps, s.beta);
            const Truth v = parse_truth(s.v);
            if (s.method == "tree") {
                emit(out, interval_json(tree_approx(params, v, s.iters, s.depth_cap)), config);
            } else if (s.method == "sequence") {
                const StageDecomposition st = stage_decomposition(derive(params));
                json j;
                j["lower_bound"] = sequence_lower_bound(params, v, s.iters, s.depth_cap);
                j["r1"] = st.r1;
                j["t1"] = st.t1;
                j["k_plus_1"] = st.k_plus_1;
                emit(out, std::move(j), config);
            } else {
                throw ParameterError("method must be tree or sequence, got '" + s.method + "'");
            }
        } else if (sub == sweep_cmd) {
            SweepSpec spec;
            spec.p = require(s.p, "p");
            spec.beta = s.beta;
            spec.v = parse_truth(s.v);
            spec.eps_grid = {s.start, require(s.stop, "stop"), s.step};
            spec.method = parse_method(s.method);
            spec.trials = s.trials;
            spec.seed = s.seed;
            spec.depth = s.depth;
            spec.iters = s.iters;
            spec.max_steps = s.max_steps;
            spec.workers = s.workers;
            const TableFormat format = parse_table_format(s.format);
            validate(spec);
            const auto rows = sweep_eps(spec);
            for (const auto& r : rows)
                if (r.failed()) err << "warning: eps=" << r.eps << ": " << r.error << "\n";
            if (!s.out.empty()) {
                write_table(rows, format, s.out);
                if (format == TableFormat::Json)
                    emit(out, json{{"out", s.out}, {"rows", rows.size()}}, config);
            } else if (format == TableFormat::Json) {
                emit(out, json{{"rows", json::parse(format_table(rows, format))}}, config);
            } else {
                out << format_table(rows, format);
            }
        }
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnsupportedRegime& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace cascade::cli
