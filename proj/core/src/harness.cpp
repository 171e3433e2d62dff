#include "lsopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lsopt/datasets.hpp"

namespace lsopt {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double parse_csv_double(const std::string& token, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size())
        throw std::runtime_error(std::string("bad CSV field for ") + what + ": " + token);
    return v;
}

long parse_csv_long(const std::string& token, const char* what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("bad CSV field for ") + what + ": " + token);
    }
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

// ------------------------------------------------------------------ config

std::vector<double> number_list(const json& value, const std::string& key) {
    if (!value.is_array()) throw ConfigError("config key '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& item : value) {
        if (!item.is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
        out.push_back(item.get<double>());
    }
    return out;
}

std::vector<std::string> string_list(const json& value, const std::string& key) {
    if (!value.is_array()) throw ConfigError("config key '" + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& item : value) {
        if (!item.is_string()) throw ConfigError("config key '" + key + "' must hold strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

double number(const json& value, const std::string& key) {
    if (!value.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return value.get<double>();
}

int integer(const json& value, const std::string& key) {
    if (!value.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
    return value.get<int>();
}

std::string text(const json& value, const std::string& key) {
    if (!value.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    return value.get<std::string>();
}

} // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw ConfigError("config must be a flat JSON object");

    ExperimentConfig cfg;
    cfg.gamma = "paper";
    for (const auto& [key, value] : doc.items()) {
        if (key == "problem") cfg.problem = text(value, key);
        else if (key == "dataset") cfg.dataset = text(value, key);
        else if (key == "n") cfg.n = integer(value, key);
        else if (key == "d") cfg.d = integer(value, key);
        else if (key == "sparsity") cfg.sparsity = integer(value, key);
        else if (key == "noise") cfg.noise = number(value, key);
        else if (key == "lambda") cfg.lambda = number(value, key);
        else if (key == "gamma") {
            if (value.is_string()) cfg.gamma = value.get<std::string>();
            else cfg.gamma = format_double(number(value, key));
        }
        else if (key == "mf_rows") cfg.mf_rows = integer(value, key);
        else if (key == "mf_cols") cfg.mf_cols = integer(value, key);
        else if (key == "mf_rank") cfg.mf_rank = integer(value, key);
        else if (key == "mf_density") cfg.mf_density = number(value, key);
        else if (key == "methods") cfg.methods = string_list(value, key);
        else if (key == "include_baseline") {
            if (!value.is_boolean()) throw ConfigError("config key 'include_baseline' must be a boolean");
            cfg.include_baseline = value.get<bool>();
        }
        else if (key == "rho_regular") cfg.rho_regular = number_list(value, key);
        else if (key == "rho_adaptive") cfg.rho_adaptive = number_list(value, key);
        else if (key == "alpha0_multipliers") cfg.alpha0_multipliers = number_list(value, key);
        else if (key == "c") cfg.c = number(value, key);
        else if (key == "c_agd") cfg.c_agd = number(value, key);
        else if (key == "epsilon") cfg.epsilon = number(value, key);
        else if (key == "policy") cfg.policy = text(value, key);
        else if (key == "max_adjustments") cfg.max_adjustments = integer(value, key);
        else if (key == "precision") cfg.precision = number(value, key);
        else if (key == "grad_norm_target") cfg.grad_norm_target = number(value, key);
        else if (key == "max_iterations") cfg.max_iterations = integer(value, key);
        else if (key == "agd_m") cfg.agd_m = number(value, key);
        else if (key == "fista_anchor") cfg.fista_anchor = text(value, key);
        else if (key == "seed") cfg.seed = std::uint64_t(integer(value, key));
        else if (key == "threads") cfg.threads = integer(value, key);
        else if (key == "metric") cfg.metric = text(value, key);
        else if (key == "data_dir") cfg.data_dir = text(value, key);
        else if (key == "reference_budget_multiplier")
            cfg.reference_budget_multiplier = integer(value, key);
        else throw ConfigError("unknown config key: '" + key + "'");
    }
    return cfg;
}

// ---------------------------------------------------------------- instance

namespace {

std::string dataset_stem(const std::string& dataset) {
    std::filesystem::path p(dataset);
    std::string stem = p.stem().string();
    std::transform(stem.begin(), stem.end(), stem.begin(),
                   [](unsigned char ch) { return char(std::tolower(ch)); });
    return stem;
}

// Per-dataset precision targets used when the config leaves them unset.
double default_precision(const std::string& dataset, const std::string& method,
                         const std::string& policy) {
    struct Entry { const char* name; double agd, gd, gd_monotone, adagrad; };
    static const Entry table[] = {
        {"a9a", 1e-9, 1e-6, 1e-5, 1e-6},
        {"adult", 1e-9, 1e-6, 1e-5, 1e-6},
        {"gisette_scale", 1e-9, 1e-9, 1e-5, 1e-9},
        {"mnist", 1e-9, 1e-6, 1e-3, 1e-9},
        {"mushrooms", 1e-9, 1e-9, 1e-5, 1e-9},
        {"phishing", 1e-9, 1e-9, 1e-6, 1e-6},
        {"protein", 1e-9, 1e-9, 1e-5, 1e-9},
        {"web-1", 1e-9, 1e-9, 1e-8, 1e-9},
    };
    const std::string stem = dataset_stem(dataset);
    for (const auto& entry : table) {
        if (stem != entry.name) continue;
        if (method == "agd") return entry.agd;
        if (method == "gd") return policy == "monotone" ? entry.gd_monotone : entry.gd;
        if (method == "adagrad") return entry.adagrad;
    }
    return 1e-9;
}

Method method_from_string(const std::string& name) {
    if (name == "gd") return Method::GD;
    if (name == "agd") return Method::AGD;
    if (name == "adagrad") return Method::Adagrad;
    if (name == "fista") return Method::FISTA;
    throw ConfigError("unknown method: '" + name + "'");
}

} // namespace

ProblemInstance build_problem_instance(const ExperimentConfig& config) {
    ProblemInstance instance;
    instance.seed = config.seed;

    if (config.problem == "logistic") {
        SparseMatrix A;
        Vector labels;
        if (config.dataset == "synth" || config.dataset == "synth_logistic") {
            auto synthesis = synth_logistic(config.n, config.d, config.seed);
            A = to_sparse_matrix(synthesis.data);
            labels = labels_vector(synthesis.data);
            instance.label = "logistic/synth";
        } else {
            const std::string dir = resolve_data_dir(config.data_dir);
            auto dataset = load_libsvm_file(resolve_dataset_path(config.dataset, dir));
            A = to_sparse_matrix(dataset);
            labels = labels_vector(dataset);
            instance.label = "logistic/" + dataset_stem(config.dataset);
        }
        const double data_bound = lipschitz_bound(A, A.rows());
        double gamma;
        if (config.gamma == "paper")
            gamma = data_bound / (10.0 * double(A.rows()));
        else
            gamma = parse_csv_double(config.gamma, "gamma");
        if (gamma < 0.0) throw ConfigError("gamma must be nonnegative");
        instance.problem = logistic_objective(A, labels, gamma);
        instance.x0 = Vector::Zero(A.cols());
        instance.alpha_scale = 1.0 / data_bound;
        instance.baseline_alpha = 1.0 / (data_bound + gamma);
    } else if (config.problem == "lasso") {
        if (config.dataset != "synth" && config.dataset != "synth_lasso")
            throw ConfigError("lasso runs use the synthetic dataset");
        auto synthesis =
            synth_linear_inverse(config.n, config.d, config.sparsity, config.noise, config.seed);
        instance.problem = lasso_objective(synthesis.A, synthesis.y, config.lambda);
        instance.x0 = Vector::Zero(config.d);
        instance.alpha_scale = 1.0 / *instance.problem.lipschitz_hint;
        instance.baseline_alpha = instance.alpha_scale;
        instance.label = "lasso/synth";
    } else if (config.problem == "rosenbrock") {
        instance.problem = rosenbrock_objective();
        instance.x0 = Vector::Zero(2);
        instance.alpha_scale = 1.0; // alpha0 grid entries are absolute
        instance.label = "rosenbrock";
    } else if (config.problem == "matrix_factorization") {
        const Matrix A =
            synth_ratings_matrix(config.mf_rows, config.mf_cols, config.mf_density, config.seed);
        instance.problem = matrix_factorization_objective(A, config.mf_rank);
        instance.x0 =
            matrix_factorization_init(config.mf_rows, config.mf_cols, config.mf_rank,
                                      config.seed + 1);
        instance.alpha_scale = 1.0; // alpha0 grid entries are absolute
        instance.label = "matrix_factorization/synth";
    } else if (config.problem == "example1" || config.problem == "example2") {
        auto [quadratic, oscillatory] = example_objectives();
        const bool first = config.problem == "example1";
        instance.problem = first ? std::move(quadratic) : std::move(oscillatory);
        instance.x0 = Vector::Constant(1, first ? -1.0 : std::acos(-1.0) / 2.0);
        instance.alpha_scale = 1.0;
        instance.label = config.problem;
    } else {
        throw ConfigError("unknown problem: '" + config.problem + "'");
    }

    instance.precision = config.precision.value_or(
        default_precision(config.dataset, config.methods.empty() ? "gd" : config.methods.front(),
                          config.policy));
    return instance;
}

// -------------------------------------------------------------------- grid

namespace {

struct GridCell {
    int index = 0;
    std::string method;
    std::string mode; // fixed | regular | adaptive
    double rho = 0.0;
    double alpha0_multiplier = 0.0;
    RunSettings settings;
};

StepPolicy policy_from_string(const std::string& name) {
    if (name == "restarting") return StepPolicy::Restarting;
    if (name == "monotone") return StepPolicy::Monotone;
    throw ConfigError("unknown policy: '" + name + "'");
}

void validate_grid_config(const ExperimentConfig& config) {
    if (config.methods.empty()) throw ConfigError("at least one method is required");
    for (const auto& name : config.methods) method_from_string(name);
    for (double rho : config.rho_regular)
        if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho values must lie in (0,1)");
    for (double rho : config.rho_adaptive) {
        if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho values must lie in (0,1)");
        const bool armijo = std::any_of(config.methods.begin(), config.methods.end(),
                                        [](const std::string& m) { return m != "fista"; });
        if (armijo && !(config.epsilon < rho))
            throw ConfigError("epsilon must be smaller than every adaptive rho");
    }
    for (double mult : config.alpha0_multipliers)
        if (!(mult > 0.0)) throw ConfigError("alpha0 multipliers must be positive");
    if (!(config.c > 0.0 && config.c < 1.0)) throw ConfigError("c must lie in (0,1)");
    if (!(config.c_agd > 0.0 && config.c_agd < 1.0)) throw ConfigError("c_agd must lie in (0,1)");
    if (!(config.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (config.max_adjustments < 1) throw ConfigError("max_adjustments must be at least 1");
    if (config.max_iterations < 0) throw ConfigError("max_iterations must be nonnegative");
    if (config.metric != "fevals" && config.metric != "elapsed")
        throw ConfigError("metric must be 'fevals' or 'elapsed'");
    if (config.fista_anchor != "fresh" && config.fista_anchor != "lagged")
        throw ConfigError("fista_anchor must be 'fresh' or 'lagged'");
    policy_from_string(config.policy);
}

// Reference objective value from a long run of the tightest applicable
// method; the suboptimality gap of every grid cell is measured against it.
double compute_reference_value(const ProblemInstance& instance, const ExperimentConfig& config) {
    RunSettings settings;
    settings.x0 = instance.x0;
    settings.seed = config.seed;
    settings.stopping.max_iterations =
        std::max(1, config.max_iterations * config.reference_budget_multiplier);
    settings.stopping.gradient_norm_target = 1e-13;

    BacktrackConfig search;
    search.mode = BacktrackMode::Adaptive;
    search.policy = StepPolicy::Monotone;
    search.epsilon = 0.01;
    search.max_adjustments = config.max_adjustments;
    search.alpha0 = 10.0 * instance.alpha_scale;

    if (instance.problem.nonsmooth) {
        settings.method = Method::FISTA;
        search.rho = 1.0 / 1.1;
        settings.step_source = StepSource::line_search(search, CriterionKind::DescentLemma);
    } else if (instance.problem.strong_convexity_hint.value_or(0.0) > 0.0 ||
               config.agd_m > 0.0) {
        settings.method = Method::AGD;
        settings.agd_m = config.agd_m;
        search.rho = 0.9;
        search.c = 0.5;
        settings.step_source = StepSource::line_search(search, CriterionKind::Armijo);
    } else {
        settings.method = Method::GD;
        search.rho = 0.3;
        search.c = 1e-4;
        settings.step_source = StepSource::line_search(search, CriterionKind::Armijo);
    }

    const RunTrace trace = run(instance.problem, settings);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : trace.rows)
        if (std::isfinite(row.objective)) best = std::min(best, row.objective);
    if (!std::isfinite(best))
        throw std::runtime_error("reference run produced no finite objective value");
    return best;
}

std::vector<GridCell> build_cells(const ProblemInstance& instance,
                                  const ExperimentConfig& config, double reference) {
    std::vector<GridCell> cells;
    int index = 0;

    auto base_settings = [&](const std::string& method_name) {
        RunSettings settings;
        settings.method = method_from_string(method_name);
        settings.x0 = instance.x0;
        settings.seed = config.seed;
        settings.agd_m = config.agd_m;
        settings.fista_anchor =
            config.fista_anchor == "lagged" ? FistaAnchor::Lagged : FistaAnchor::FreshIterate;
        settings.stopping.max_iterations = config.max_iterations;
        settings.stopping.reference_value = reference;
        settings.stopping.gap_target =
            config.precision.value_or(default_precision(config.dataset, method_name, config.policy));
        settings.stopping.gradient_norm_target = config.grad_norm_target;
        return settings;
    };

    for (const auto& method_name : config.methods) {
        const bool proximal = method_name == "fista";
        if (config.include_baseline && instance.baseline_alpha) {
            GridCell cell;
            cell.index = index++;
            cell.method = method_name;
            cell.mode = "fixed";
            cell.settings = base_settings(method_name);
            cell.settings.step_source = StepSource::fixed(*instance.baseline_alpha);
            cells.push_back(std::move(cell));
        }
        for (const char* mode : {"regular", "adaptive"}) {
            const auto& rhos =
                std::string(mode) == "regular" ? config.rho_regular : config.rho_adaptive;
            for (double rho : rhos) {
                for (double multiplier : config.alpha0_multipliers) {
                    GridCell cell;
                    cell.index = index++;
                    cell.method = method_name;
                    cell.mode = mode;
                    cell.rho = rho;
                    cell.alpha0_multiplier = multiplier;
                    cell.settings = base_settings(method_name);

                    BacktrackConfig search;
                    search.rho = rho;
                    search.c = method_name == "agd" ? config.c_agd : config.c;
                    search.epsilon = config.epsilon;
                    search.alpha0 = multiplier * instance.alpha_scale;
                    search.policy =
                        proximal ? StepPolicy::Monotone : policy_from_string(config.policy);
                    search.mode = std::string(mode) == "adaptive" ? BacktrackMode::Adaptive
                                                                  : BacktrackMode::Regular;
                    search.max_adjustments = config.max_adjustments;
                    cell.settings.step_source = StepSource::line_search(
                        search, proximal ? CriterionKind::DescentLemma : CriterionKind::Armijo);
                    cells.push_back(std::move(cell));
                }
            }
        }
    }
    return cells;
}

} // namespace

GridOutcome run_grid(const ExperimentConfig& config) {
    validate_grid_config(config);
    const ProblemInstance instance = build_problem_instance(config);

    GridOutcome outcome;
    outcome.problem_label = instance.label;
    outcome.precision = instance.precision;
    outcome.reference_value = compute_reference_value(instance, config);

    std::vector<GridCell> cells = build_cells(instance, config, outcome.reference_value);
    outcome.traces.resize(cells.size());
    std::vector<std::exception_ptr> failures(cells.size());

    const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
    const unsigned requested = config.threads > 0 ? unsigned(config.threads) : hardware;
    const unsigned workers = std::max(1u, std::min<unsigned>(requested, cells.size()));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                const GridCell& cell = cells[i];
                RunTrace trace = run(instance.problem, cell.settings);
                trace.annotate("problem", instance.label);
                trace.annotate("dataset", config.dataset);
                trace.annotate("precision",
                               format_double(*cell.settings.stopping.gap_target));
                trace.annotate("fstar", format_double(outcome.reference_value));
                if (cell.mode != "fixed")
                    trace.annotate("alpha0_multiplier", format_short(cell.alpha0_multiplier));
                trace.annotate("cell", std::to_string(cell.index));
                outcome.traces[i] = std::move(trace);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    return outcome;
}

// ----------------------------------------------------------------- summary

namespace {

double metric_value(const VariantSummary& v, const std::string& metric) {
    return metric == "elapsed" ? v.elapsed_avg : v.f_evals_avg;
}

} // namespace

ComparisonSummary summarize(const std::vector<RunTrace>& traces, double precision,
                            const std::string& metric) {
    if (metric != "fevals" && metric != "elapsed")
        throw ConfigError("metric must be 'fevals' or 'elapsed'");

    ComparisonSummary summary;
    summary.metric = metric;
    summary.precision = precision;

    struct Accumulator {
        VariantSummary v;
        double f_sum = 0.0, grad_sum = 0.0, elapsed_sum = 0.0;
        int counted = 0;
        int order = 0;
    };
    std::vector<Accumulator> groups;

    auto group_of = [&](const RunTrace& trace) -> Accumulator& {
        const auto& fp = trace.fingerprint;
        for (auto& g : groups)
            if (g.v.method == fp.method && g.v.mode == fp.mode &&
                (fp.mode == "fixed" || g.v.rho == fp.rho))
                return g;
        Accumulator g;
        g.order = int(groups.size());
        g.v.method = fp.method;
        g.v.mode = fp.mode;
        g.v.rho = fp.rho;
        g.v.variant = fp.method + "-" + fp.mode;
        if (fp.mode != "fixed") g.v.variant += "-rho" + format_short(fp.rho);
        groups.push_back(std::move(g));
        return groups.back();
    };

    for (const auto& trace : traces) {
        Accumulator& g = group_of(trace);
        ++g.v.cells;
        if (trace.termination == TerminationReason::Diverged || trace.rows.empty()) {
            ++g.v.diverged;
            continue;
        }
        const TraceRow* at = nullptr;
        for (const auto& row : trace.rows)
            if (std::isfinite(row.gap) && row.gap <= precision) {
                at = &row;
                break;
            }
        if (at) ++g.v.reached;
        else at = &trace.rows.back(); // never reached: account the full run
        g.f_sum += double(at->counters.objective_evals);
        g.grad_sum += double(at->counters.gradient_evals);
        g.elapsed_sum += at->elapsed_s;
        ++g.counted;
    }

    for (auto& g : groups) {
        if (g.counted > 0) {
            g.v.f_evals_avg = g.f_sum / g.counted;
            g.v.grad_evals_avg = g.grad_sum / g.counted;
            g.v.elapsed_avg = g.elapsed_sum / g.counted;
        }
    }

    // Each adaptive variant is scored against the best regular variant of
    // the same method.
    std::map<std::string, double> best_regular;
    for (const auto& g : groups) {
        if (g.v.mode != "regular" || g.counted == 0) continue;
        const double value = metric_value(g.v, metric);
        auto it = best_regular.find(g.v.method);
        if (it == best_regular.end() || value < it->second) best_regular[g.v.method] = value;
    }
    for (auto& g : groups) {
        if (g.v.mode != "adaptive" || g.counted == 0) continue;
        auto it = best_regular.find(g.v.method);
        if (it == best_regular.end() || it->second <= 0.0) continue;
        g.v.gain = 1.0 - metric_value(g.v, metric) / it->second;
    }

    std::sort(groups.begin(), groups.end(), [](const Accumulator& a, const Accumulator& b) {
        return a.order < b.order;
    });
    bool single_method = true;
    for (const auto& g : groups)
        if (g.v.method != groups.front().v.method) single_method = false;
    std::optional<double> overall;
    double best_adaptive = std::numeric_limits<double>::infinity();
    for (const auto& g : groups) {
        summary.variants.push_back(g.v);
        if (single_method && g.v.mode == "adaptive" && g.v.gain &&
            metric_value(g.v, metric) < best_adaptive) {
            best_adaptive = metric_value(g.v, metric);
            overall = g.v.gain;
        }
    }
    summary.gain = overall;
    return summary;
}

// --------------------------------------------------------------------- CSV

namespace {
constexpr const char* kTraceHeader =
    "iter,objective,gap,alpha,f_evals,grad_evals,crit_evals,prox_evals,elapsed_s";
}

void emit_trace_csv(const RunTrace& trace, std::ostream& out) {
    const auto& fp = trace.fingerprint;
    out << "# method=" << fp.method << '\n';
    out << "# criterion=" << fp.criterion << '\n';
    out << "# mode=" << fp.mode << '\n';
    out << "# policy=" << fp.policy << '\n';
    out << "# rho=" << format_double(fp.rho) << '\n';
    out << "# c=" << format_double(fp.c) << '\n';
    out << "# epsilon=" << format_double(fp.epsilon) << '\n';
    out << "# alpha0=" << format_double(fp.alpha0) << '\n';
    out << "# seed=" << fp.seed << '\n';
    out << "# termination=" << to_string(trace.termination) << '\n';
    for (const auto& [key, value] : trace.annotations)
        out << "# " << key << '=' << value << '\n';

    out << kTraceHeader << '\n';
    for (const auto& row : trace.rows) {
        out << row.iter << ',' << format_double(row.objective) << ',' << format_double(row.gap)
            << ',' << format_double(row.alpha) << ',' << row.counters.objective_evals << ','
            << row.counters.gradient_evals << ',' << row.counters.criterion_evals << ','
            << row.counters.prox_evals << ',' << format_double(row.elapsed_s) << '\n';
    }
}

RunTrace parse_trace_csv(std::istream& in) {
    RunTrace trace;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.erase(0, 1);
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("malformed trace comment: " + line);
            const std::string key = body.substr(0, eq);
            const std::string value = body.substr(eq + 1);
            auto& fp = trace.fingerprint;
            if (key == "method") fp.method = value;
            else if (key == "criterion") fp.criterion = value;
            else if (key == "mode") fp.mode = value;
            else if (key == "policy") fp.policy = value;
            else if (key == "rho") fp.rho = parse_csv_double(value, "rho");
            else if (key == "c") fp.c = parse_csv_double(value, "c");
            else if (key == "epsilon") fp.epsilon = parse_csv_double(value, "epsilon");
            else if (key == "alpha0") fp.alpha0 = parse_csv_double(value, "alpha0");
            else if (key == "seed") fp.seed = std::uint64_t(parse_csv_long(value, "seed"));
            else if (key == "termination") trace.termination = termination_from_string(value);
            else trace.annotations.emplace_back(key, value);
            continue;
        }
        if (!saw_header) {
            if (line != kTraceHeader)
                throw std::runtime_error("unexpected trace header: " + line);
            saw_header = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 9) throw std::runtime_error("trace row must have 9 fields: " + line);
        TraceRow row;
        row.iter = int(parse_csv_long(cells[0], "iter"));
        row.objective = parse_csv_double(cells[1], "objective");
        row.gap = parse_csv_double(cells[2], "gap");
        row.alpha = parse_csv_double(cells[3], "alpha");
        row.counters.objective_evals = parse_csv_long(cells[4], "f_evals");
        row.counters.gradient_evals = parse_csv_long(cells[5], "grad_evals");
        row.counters.criterion_evals = parse_csv_long(cells[6], "crit_evals");
        row.counters.prox_evals = parse_csv_long(cells[7], "prox_evals");
        row.elapsed_s = parse_csv_double(cells[8], "elapsed_s");
        trace.rows.push_back(row);
    }
    if (!saw_header) throw std::runtime_error("trace CSV has no header row");
    return trace;
}

void emit_summary_csv(const ComparisonSummary& summary, std::ostream& out) {
    out << "# metric=" << summary.metric << '\n';
    out << "# precision=" << format_double(summary.precision) << '\n';
    out << "variant,rho,mode,f_evals_avg,grad_evals_avg,elapsed_avg,reached_precision,gain,"
           "diverged\n";
    for (const auto& v : summary.variants) {
        out << v.variant << ',' << format_double(v.rho) << ',' << v.mode << ','
            << format_double(v.f_evals_avg) << ',' << format_double(v.grad_evals_avg) << ','
            << format_double(v.elapsed_avg) << ',' << v.reached << '/' << v.cells << ',';
        if (v.gain) out << format_double(*v.gain);
        out << ',' << v.diverged << '\n';
    }
}

std::string trace_file_name(const RunTrace& trace) {
    const auto& fp = trace.fingerprint;
    std::string name = "trace_";
    if (const std::string* cell = trace.annotation("cell")) {
        std::string padded = *cell;
        while (padded.size() < 3) padded.insert(padded.begin(), '0');
        name += padded + "_";
    }
    name += fp.method + "_" + fp.mode;
    if (fp.mode != "fixed") name += "_rho" + format_short(fp.rho);
    if (const std::string* mult = trace.annotation("alpha0_multiplier"))
        name += "_a0x" + *mult;
    return name + ".csv";
}

ComparisonSummary write_grid_outputs(const GridOutcome& outcome, const std::string& out_dir,
                                     const std::string& metric) {
    std::filesystem::create_directories(out_dir);
    for (const auto& trace : outcome.traces) {
        std::ofstream out(out_dir + "/" + trace_file_name(trace));
        if (!out) throw std::runtime_error("cannot write trace file in " + out_dir);
        emit_trace_csv(trace, out);
    }
    ComparisonSummary summary = summarize(outcome.traces, outcome.precision, metric);
    std::ofstream out(out_dir + "/summary.csv");
    if (!out) throw std::runtime_error("cannot write summary.csv in " + out_dir);
    emit_summary_csv(summary, out);
    return summary;
}

GradientAuditResult gradient_audit(const ProblemDefinition& problem, int points,
                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    GradientAuditResult result;
    result.points = points;

    Vector x(problem.dimension);
    for (int k = 0; k < points; ++k) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
        const Vector analytic = problem.gradient(x);

        const double step = 1e-6 * (1.0 + x.norm());
        Vector numeric(x.size());
        Vector probe = x;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            probe[i] = x[i] + step;
            const double up = problem.smooth_value(probe);
            probe[i] = x[i] - step;
            const double down = problem.smooth_value(probe);
            probe[i] = x[i];
            numeric[i] = (up - down) / (2.0 * step);
        }
        const double scale = std::max({analytic.norm(), numeric.norm(), 1e-12});
        result.max_rel_error = std::max(result.max_rel_error, (analytic - numeric).norm() / scale);
    }
    return result;
}

ProblemDefinition gradcheck_problem(const std::string& name, std::uint64_t seed) {
    if (name == "logistic") {
        const auto synthesis = synth_logistic(60, 8, seed);
        return logistic_objective(to_sparse_matrix(synthesis.data),
                                  labels_vector(synthesis.data), 1e-3);
    }
    if (name == "lasso") {
        const auto synthesis = synth_linear_inverse(30, 12, 4, 0.05, seed);
        return lasso_objective(synthesis.A, synthesis.y, 0.2);
    }
    if (name == "rosenbrock") return rosenbrock_objective();
    if (name == "matrix_factorization")
        return matrix_factorization_objective(synth_ratings_matrix(10, 8, 0.4, seed), 3);
    if (name == "example1") return example_objectives().first;
    if (name == "example2") return example_objectives().second;
    throw ConfigError("unknown problem: '" + name + "'");
}

std::vector<RunTrace> load_traces(const std::string& dir) {
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("trace_", 0) == 0 && entry.path().extension() == ".csv")
            names.push_back(entry.path().string());
    }
    std::sort(names.begin(), names.end());
    std::vector<RunTrace> traces;
    traces.reserve(names.size());
    for (const auto& name : names) {
        std::ifstream in(name);
        if (!in) throw std::runtime_error("cannot open trace file: " + name);
        traces.push_back(parse_trace_csv(in));
    }
    return traces;
}

} // namespace lsopt
