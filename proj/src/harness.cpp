#include "qcreg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "qcreg/qnn.hpp"

namespace qcreg {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kSaltQnnInit = 1;
constexpr std::uint64_t kSaltMlpInit = 2;
constexpr std::uint64_t kSaltRidgeSplit = 3;

double rmse(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

std::string format_double(double v, const char* fmt = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

}  // namespace

double r_squared(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size()) throw std::invalid_argument("prediction count differs from truth count");
    if (y_true.size() < 2) throw std::invalid_argument("need at least two values");
    double mean = 0.0;
    for (double v : y_true) mean += v;
    mean /= static_cast<double>(y_true.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
        ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    }
    if (ss_tot == 0.0) throw std::domain_error("true values are all identical, R^2 is undefined");
    return 1.0 - ss_res / ss_tot;
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Qnn: return "qnn";
        case ModelKind::MlpRegularized: return "mlp-regularized";
        case ModelKind::MlpUnregularized: return "mlp-unregularized";
    }
    throw std::invalid_argument("unknown model kind");
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "qnn") return ModelKind::Qnn;
    if (name == "mlp-regularized") return ModelKind::MlpRegularized;
    if (name == "mlp-unregularized") return ModelKind::MlpUnregularized;
    throw std::invalid_argument("unknown model kind '" + name + "'");
}

ScalerSummary summarize(const Scaler& scaler) {
    ScalerSummary s;
    s.mean = scaler.mean();
    s.stddev = scaler.stddev();
    s.standardized_min = scaler.standardized_min();
    s.standardized_max = scaler.standardized_max();
    s.constant = scaler.constant_columns();
    return s;
}

PowellOptions grid_powell_options(int depth, int width, Fraction train_fraction) {
    PowellOptions opt;
    opt.line_tolerance = 1e-4;
    opt.cost_tolerance = 1e-5;
    opt.max_iterations = 200;
    if (width <= 1) {
        // One shared budget for the 7-qubit tier keeps the depth comparison an
        // equal-effort one; these cells are cheap at any fraction.
        opt.max_cost_evaluations = 4000;
        return opt;
    }
    // The 14-qubit tier dominates the grid's wall time, so its budgets are
    // concentrated at the smallest fraction, where the small-data comparisons
    // are made; the larger fractions get enough to chart the trend.
    long evals;
    if (train_fraction.value() < 0.3) {
        evals = depth >= 12 ? 13000 : depth >= 6 ? 18000 : 8000;
    } else if (train_fraction.value() < 0.6) {
        evals = depth >= 12 ? 1000 : depth >= 6 ? 3000 : 1200;
    } else {
        evals = depth >= 12 ? 700 : depth >= 6 ? 1600 : 800;
    }
    opt.max_cost_evaluations = evals;
    return opt;
}

std::vector<RunConfig> expand_grid(const GridSpec& grid, int threads_per_run) {
    std::vector<RunConfig> configs;
    for (const Fraction& frac : grid.fractions) {
        for (const auto& [depth, width] : grid.qnn_shapes) {
            for (std::uint64_t seed : grid.seeds) {
                RunConfig c;
                c.model = ModelKind::Qnn;
                c.depth = depth;
                c.width = width;
                c.train_fraction = frac;
                c.seed = seed;
                c.threads = threads_per_run;
                c.powell = grid.powell_override ? *grid.powell_override
                                                : grid_powell_options(depth, width, frac);
                c.adam = grid.adam;
                c.l2_grid = grid.l2_grid;
                configs.push_back(std::move(c));
            }
        }
        for (int variant = 0; variant < 2; ++variant) {
            const bool regularized = variant == 0;
            if (regularized && !grid.mlp_regularized) continue;
            if (!regularized && !grid.mlp_unregularized) continue;
            for (std::uint64_t seed : grid.seeds) {
                RunConfig c;
                c.model = regularized ? ModelKind::MlpRegularized : ModelKind::MlpUnregularized;
                c.depth = 0;
                c.width = 0;
                c.train_fraction = frac;
                c.seed = seed;
                c.threads = threads_per_run;
                c.adam = grid.adam;
                c.l2_grid = grid.l2_grid;
                configs.push_back(std::move(c));
            }
        }
    }
    return configs;
}

RunReport run_single(const RunConfig& config, const Dataset& data,
                     QnnModel* qnn_out, MlpModel* mlp_out) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    report.config = config;

    auto [train, test] = split_train_test(data, config.train_fraction, config.seed);
    report.train_rows = static_cast<int>(train.size());
    report.test_rows = static_cast<int>(test.size());

    const Scaler fx = Scaler::fit(train.features);
    const Scaler fy = Scaler::fit_target(train.targets);
    report.feature_scaler = summarize(fx);
    report.target_scaler = summarize(fy);

    const auto train_x = fx.transform(train.features);
    const auto test_x = fx.transform(test.features);
    const auto train_y = fy.transform_target(train.targets);
    const auto test_y = fy.transform_target(test.targets);

    std::vector<double> train_pred, test_pred;
    if (config.model == ModelKind::Qnn) {
        const int n_attrs = static_cast<int>(train_x.front().size());
        QnnModel model = build_model(n_attrs, config.width, config.depth, mix_seed(config.seed, kSaltQnnInit));
        QnnModel probe = model;
        auto objective = [&](const std::vector<double>& p) {
            probe.params = p;
            return mse_cost(probe, train_x, train_y, config.threads);
        };
        const PowellResult res = powell_minimize(objective, model.params, config.powell);
        model.params = res.best_params;
        report.n_parameters = static_cast<long>(model.params.size());
        report.final_cost = res.best_cost;
        report.cost_evaluations = res.cost_evaluations;
        report.trainer_converged = res.converged;
        PredictBuffer buf;
        train_pred.reserve(train_x.size());
        for (const auto& row : train_x) train_pred.push_back(predict(model, row, buf));
        test_pred.reserve(test_x.size());
        for (const auto& row : test_x) test_pred.push_back(predict(model, row, buf));
        if (qnn_out) *qnn_out = std::move(model);
    } else {
        AdamConfig cfg = config.adam;
        if (config.model == ModelKind::MlpRegularized) {
            const L2Selection sel = select_l2_weight(train_x, train_y, config.l2_grid,
                                                     mix_seed(config.seed, kSaltRidgeSplit), cfg,
                                                     config.threads);
            cfg.l2_weight = sel.best_weight;
        } else {
            cfg.l2_weight = 0.0;
        }
        report.ridge_weight = cfg.l2_weight;
        const int in_width = static_cast<int>(train_x.front().size());
        MlpModel model = init_mlp({in_width, 100, 100, 1}, mix_seed(config.seed, kSaltMlpInit));
        report.n_parameters = static_cast<long>(model.parameter_count());
        const TrainHistory hist = train_mlp(model, train_x, train_y, cfg);
        report.final_cost = hist.loss.back();
        report.cost_evaluations = cfg.epochs;
        report.trainer_converged = true;
        train_pred.reserve(train_x.size());
        for (const auto& row : train_x) train_pred.push_back(forward(model, row));
        test_pred.reserve(test_x.size());
        for (const auto& row : test_x) test_pred.push_back(forward(model, row));
        if (mlp_out) *mlp_out = std::move(model);
    }

    report.train_r2 = r_squared(train_y, train_pred);
    report.test_r2 = r_squared(test_y, test_pred);
    report.train_rmse_mpg = rmse(fy.invert_target(train_pred), train.targets);
    report.test_rmse_mpg = rmse(fy.invert_target(test_pred), test.targets);
    report.ok = true;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

ExperimentTable run_grid(const GridSpec& grid, const Dataset& data, int workers, int total_threads) {
    if (workers < 1) workers = 1;
    if (total_threads <= 0) {
        total_threads = static_cast<int>(std::thread::hardware_concurrency());
        if (total_threads <= 0) total_threads = 1;
    }
    const int per_run = std::max(1, total_threads / workers);
    const std::vector<RunConfig> configs = expand_grid(grid, per_run);
    if (configs.empty()) throw std::invalid_argument("the grid has no cells");

    std::vector<RunReport> reports(configs.size());
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) break;
            try {
                reports[i] = run_single(configs[i], data);
            } catch (const std::exception& e) {
                reports[i] = RunReport{};
                reports[i].config = configs[i];
                reports[i].ok = false;
                reports[i].error = e.what();
            }
        }
    };
    if (workers == 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
        for (auto& t : pool) t.join();
    }

    const bool any_ok = std::any_of(reports.begin(), reports.end(),
                                    [](const RunReport& r) { return r.ok; });
    if (!any_ok) {
        throw std::runtime_error("every grid cell failed; first error: " + reports.front().error);
    }
    return {std::move(reports)};
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<CellSummary> summarize_cells(const ExperimentTable& table) {
    std::vector<CellSummary> cells;
    std::vector<std::vector<double>> train_vals, test_vals;
    for (const RunReport& run : table.runs) {
        const auto& c = run.config;
        std::size_t idx = cells.size();
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].model == c.model && cells[i].depth == c.depth && cells[i].width == c.width &&
                cells[i].fraction == c.train_fraction) {
                idx = i;
                break;
            }
        }
        if (idx == cells.size()) {
            CellSummary s;
            s.model = c.model;
            s.depth = c.depth;
            s.width = c.width;
            s.fraction = c.train_fraction;
            cells.push_back(s);
            train_vals.emplace_back();
            test_vals.emplace_back();
        }
        if (run.ok) {
            train_vals[idx].push_back(run.train_r2);
            test_vals[idx].push_back(run.test_r2);
        }
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        CellSummary& s = cells[i];
        s.runs_ok = static_cast<int>(train_vals[i].size());
        if (s.runs_ok == 0) continue;
        auto stats = [](const std::vector<double>& v, double& mean, double& med, double& mn, double& mx) {
            mean = 0.0;
            mn = v.front();
            mx = v.front();
            for (double x : v) {
                mean += x;
                mn = std::min(mn, x);
                mx = std::max(mx, x);
            }
            mean /= static_cast<double>(v.size());
            med = median(v);
        };
        stats(train_vals[i], s.mean_train_r2, s.median_train_r2, s.min_train_r2, s.max_train_r2);
        stats(test_vals[i], s.mean_test_r2, s.median_test_r2, s.min_test_r2, s.max_test_r2);
    }
    return cells;
}

// JSON layout mirrors the structs field for field so reports replay exactly.

static void to_json(nlohmann::json& j, const Fraction& f) {
    j = nlohmann::json{{"num", f.num}, {"den", f.den}};
}
static void from_json(const nlohmann::json& j, Fraction& f) {
    j.at("num").get_to(f.num);
    j.at("den").get_to(f.den);
}

static void to_json(nlohmann::json& j, const PowellOptions& o) {
    j = nlohmann::json{{"max_iterations", o.max_iterations},
                       {"cost_tolerance", o.cost_tolerance},
                       {"line_tolerance", o.line_tolerance},
                       {"max_cost_evaluations", o.max_cost_evaluations}};
}
static void from_json(const nlohmann::json& j, PowellOptions& o) {
    j.at("max_iterations").get_to(o.max_iterations);
    j.at("cost_tolerance").get_to(o.cost_tolerance);
    j.at("line_tolerance").get_to(o.line_tolerance);
    j.at("max_cost_evaluations").get_to(o.max_cost_evaluations);
}

static void to_json(nlohmann::json& j, const AdamConfig& a) {
    j = nlohmann::json{{"learning_rate", a.learning_rate}, {"epochs", a.epochs},
                       {"beta1", a.beta1},                 {"beta2", a.beta2},
                       {"epsilon", a.epsilon},             {"l2_weight", a.l2_weight}};
}
static void from_json(const nlohmann::json& j, AdamConfig& a) {
    j.at("learning_rate").get_to(a.learning_rate);
    j.at("epochs").get_to(a.epochs);
    j.at("beta1").get_to(a.beta1);
    j.at("beta2").get_to(a.beta2);
    j.at("epsilon").get_to(a.epsilon);
    j.at("l2_weight").get_to(a.l2_weight);
}

static void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json{{"model", to_string(c.model)},
                       {"depth", c.depth},
                       {"width", c.width},
                       {"train_fraction", c.train_fraction},
                       {"seed", c.seed},
                       {"threads", c.threads},
                       {"powell", c.powell},
                       {"adam", c.adam},
                       {"l2_grid", c.l2_grid}};
}
static void from_json(const nlohmann::json& j, RunConfig& c) {
    c.model = parse_model_kind(j.at("model").get<std::string>());
    j.at("depth").get_to(c.depth);
    j.at("width").get_to(c.width);
    j.at("train_fraction").get_to(c.train_fraction);
    j.at("seed").get_to(c.seed);
    j.at("threads").get_to(c.threads);
    j.at("powell").get_to(c.powell);
    j.at("adam").get_to(c.adam);
    j.at("l2_grid").get_to(c.l2_grid);
}

static void to_json(nlohmann::json& j, const ScalerSummary& s) {
    j = nlohmann::json{{"mean", s.mean},
                       {"stddev", s.stddev},
                       {"standardized_min", s.standardized_min},
                       {"standardized_max", s.standardized_max},
                       {"constant", s.constant}};
}
static void from_json(const nlohmann::json& j, ScalerSummary& s) {
    j.at("mean").get_to(s.mean);
    j.at("stddev").get_to(s.stddev);
    j.at("standardized_min").get_to(s.standardized_min);
    j.at("standardized_max").get_to(s.standardized_max);
    j.at("constant").get_to(s.constant);
}

static void to_json(nlohmann::json& j, const RunReport& r) {
    j = nlohmann::json{{"config", r.config},
                       {"ok", r.ok},
                       {"error", r.error},
                       {"train_rows", r.train_rows},
                       {"test_rows", r.test_rows},
                       {"n_parameters", r.n_parameters},
                       {"train_r2", r.train_r2},
                       {"test_r2", r.test_r2},
                       {"final_cost", r.final_cost},
                       {"train_rmse_mpg", r.train_rmse_mpg},
                       {"test_rmse_mpg", r.test_rmse_mpg},
                       {"cost_evaluations", r.cost_evaluations},
                       {"trainer_converged", r.trainer_converged},
                       {"wall_seconds", r.wall_seconds},
                       {"feature_scaler", r.feature_scaler},
                       {"target_scaler", r.target_scaler}};
    if (r.ridge_weight) j["ridge_weight"] = *r.ridge_weight;
}
static void from_json(const nlohmann::json& j, RunReport& r) {
    j.at("config").get_to(r.config);
    j.at("ok").get_to(r.ok);
    j.at("error").get_to(r.error);
    j.at("train_rows").get_to(r.train_rows);
    j.at("test_rows").get_to(r.test_rows);
    j.at("n_parameters").get_to(r.n_parameters);
    j.at("train_r2").get_to(r.train_r2);
    j.at("test_r2").get_to(r.test_r2);
    j.at("final_cost").get_to(r.final_cost);
    j.at("train_rmse_mpg").get_to(r.train_rmse_mpg);
    j.at("test_rmse_mpg").get_to(r.test_rmse_mpg);
    j.at("cost_evaluations").get_to(r.cost_evaluations);
    j.at("trainer_converged").get_to(r.trainer_converged);
    j.at("wall_seconds").get_to(r.wall_seconds);
    j.at("feature_scaler").get_to(r.feature_scaler);
    j.at("target_scaler").get_to(r.target_scaler);
    if (j.contains("ridge_weight")) {
        r.ridge_weight = j.at("ridge_weight").get<double>();
    } else {
        r.ridge_weight.reset();
    }
}

static void to_json(nlohmann::json& j, const CellSummary& s) {
    j = nlohmann::json{{"model", to_string(s.model)},
                       {"depth", s.depth},
                       {"width", s.width},
                       {"fraction", s.fraction},
                       {"runs_ok", s.runs_ok},
                       {"mean_train_r2", s.mean_train_r2},
                       {"median_train_r2", s.median_train_r2},
                       {"min_train_r2", s.min_train_r2},
                       {"max_train_r2", s.max_train_r2},
                       {"mean_test_r2", s.mean_test_r2},
                       {"median_test_r2", s.median_test_r2},
                       {"min_test_r2", s.min_test_r2},
                       {"max_test_r2", s.max_test_r2}};
}

void write_json_report(const ExperimentTable& table, const std::filesystem::path& path) {
    nlohmann::json j;
    j["runs"] = table.runs;
    j["cells"] = summarize_cells(table);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

ExperimentTable read_json_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    const nlohmann::json j = nlohmann::json::parse(in);
    ExperimentTable table;
    table.runs = j.at("runs").get<std::vector<RunReport>>();
    return table;
}

void write_csv_report(const ExperimentTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "model,d,w,fraction,seed,train_r2,test_r2,wall_seconds,lambda\n";
    for (const RunReport& r : table.runs) {
        const auto& c = r.config;
        out << to_string(c.model) << ',';
        if (c.model == ModelKind::Qnn) {
            out << c.depth << ',' << c.width << ',';
        } else {
            out << ",,";
        }
        out << c.train_fraction.str() << ',' << c.seed << ',';
        if (r.ok) {
            out << format_double(r.train_r2) << ',' << format_double(r.test_r2) << ',';
        } else {
            out << ",,";
        }
        out << format_double(r.wall_seconds, "%.3f") << ',';
        if (r.ridge_weight) out << format_double(*r.ridge_weight);
        out << '\n';
    }
}

void write_plot_csv(const ExperimentTable& table, bool test_metric,
                    const std::filesystem::path& path) {
    const std::vector<CellSummary> cells = summarize_cells(table);
    std::vector<Fraction> fractions;
    std::vector<std::string> labels;
    for (const CellSummary& s : cells) {
        if (std::find(fractions.begin(), fractions.end(), s.fraction) == fractions.end()) {
            fractions.push_back(s.fraction);
        }
        const std::string label =
            s.model == ModelKind::Qnn
                ? "qnn_d" + std::to_string(s.depth) + "_w" + std::to_string(s.width)
                : (s.model == ModelKind::MlpRegularized ? "mlp_regularized" : "mlp_unregularized");
        if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
    }
    std::sort(fractions.begin(), fractions.end(),
              [](const Fraction& a, const Fraction& b) { return a.value() < b.value(); });

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "fraction,train_rows";
    for (const auto& label : labels) out << ',' << label;
    out << '\n';
    for (const Fraction& frac : fractions) {
        int train_rows = 0;
        for (const RunReport& r : table.runs) {
            if (r.config.train_fraction == frac) train_rows = std::max(train_rows, r.train_rows);
        }
        out << frac.str() << ',' << train_rows;
        for (const auto& label : labels) {
            out << ',';
            for (const CellSummary& s : cells) {
                const std::string cell_label =
                    s.model == ModelKind::Qnn
                        ? "qnn_d" + std::to_string(s.depth) + "_w" + std::to_string(s.width)
                        : (s.model == ModelKind::MlpRegularized ? "mlp_regularized"
                                                                : "mlp_unregularized");
                if (cell_label == label && s.fraction == frac && s.runs_ok > 0) {
                    out << format_double(test_metric ? s.median_test_r2 : s.median_train_r2);
                    break;
                }
            }
        }
        out << '\n';
    }
}

}  // namespace qcreg
