// Command-line front end: dataset inspection, single training runs, the full
// experiment grid, and report conversion.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcreg/harness.hpp"

using namespace qcreg;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::size_t end = comma == std::string::npos ? text.size() : comma;
        if (end > pos) parts.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    if (parts.empty()) throw std::invalid_argument("empty list '" + text + "'");
    return parts;
}

std::vector<int> parse_ints(const std::string& text) {
    std::vector<int> out;
    for (const auto& part : split_list(text)) out.push_back(std::stoi(part));
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    for (const auto& part : split_list(text)) out.push_back(std::stoull(part));
    return out;
}

std::vector<double> parse_reals(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split_list(text)) out.push_back(std::stod(part));
    return out;
}

std::vector<Fraction> parse_fractions(const std::string& text) {
    std::vector<Fraction> out;
    for (const auto& part : split_list(text)) out.push_back(parse_fraction(part));
    return out;
}

void print_run(const RunReport& r) {
    std::printf("model              %s\n", to_string(r.config.model).c_str());
    if (r.config.model == ModelKind::Qnn) {
        std::printf("depth / width      %d / %d\n", r.config.depth, r.config.width);
    }
    std::printf("train fraction     %s (%d train rows, %d test rows)\n",
                r.config.train_fraction.str().c_str(), r.train_rows, r.test_rows);
    std::printf("seed               %llu\n", static_cast<unsigned long long>(r.config.seed));
    std::printf("parameters         %ld\n", r.n_parameters);
    if (r.ridge_weight) std::printf("ridge penalty      %g\n", *r.ridge_weight);
    std::printf("train R^2          %.6f\n", r.train_r2);
    std::printf("test R^2           %.6f\n", r.test_r2);
    std::printf("train RMSE (mpg)   %.4f\n", r.train_rmse_mpg);
    std::printf("test RMSE (mpg)    %.4f\n", r.test_rmse_mpg);
    std::printf("final cost         %.8f\n", r.final_cost);
    std::printf("%s  %ld (%s)\n",
                r.config.model == ModelKind::Qnn ? "cost evaluations " : "epochs           ",
                r.cost_evaluations, r.trainer_converged ? "converged" : "budget reached");
    std::printf("wall seconds       %.2f\n", r.wall_seconds);
}

void print_cells(const ExperimentTable& table) {
    std::printf("%-18s %3s %3s %9s %5s %13s %12s %13s %12s\n", "model", "d", "w", "fraction",
                "runs", "med train R2", "med test R2", "min train R2", "min test R2");
    for (const auto& c : summarize_cells(table)) {
        std::printf("%-18s %3d %3d %9s %5d %13.4f %12.4f %13.4f %12.4f\n",
                    to_string(c.model).c_str(), c.depth, c.width, c.fraction.str().c_str(),
                    c.runs_ok, c.median_train_r2, c.median_test_r2, c.min_train_r2,
                    c.min_test_r2);
    }
}

void emit(const ExperimentTable& table, const std::string& format, const std::string& out,
          const std::string& plot_prefix) {
    if (!out.empty()) {
        if (format == "csv") {
            write_csv_report(table, out);
        } else {
            write_json_report(table, out);
        }
        std::printf("wrote %s\n", out.c_str());
    }
    if (!plot_prefix.empty()) {
        write_plot_csv(table, false, plot_prefix + "_train.csv");
        write_plot_csv(table, true, plot_prefix + "_test.csv");
        std::printf("wrote %s_train.csv and %s_test.csv\n", plot_prefix.c_str(),
                    plot_prefix.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variational quantum circuit regression on the Auto-MPG data"};
    app.require_subcommand(1);

    std::string data_path, out_path, report_path, format = "json", plot_prefix;
    std::string frac_text = "1/5", fracs_text = "1/5,2/5,4/5";
    std::string depths_text = "3,6,12", widths_text = "1,2", seeds_text = "1,2,3,4,5";
    std::string l2_text;
    std::uint64_t seed = 1;
    int depth = 3, width = 1, threads = 1, workers = 1, total_threads = 0;
    int epochs = 0, max_iters = 0;
    long max_evals = 0;
    double learning_rate = 0.0;
    bool unregularized = false, grid_defaults = false;

    auto* inspect = app.add_subcommand("data-inspect", "Parse the data file and show its shape");
    inspect->add_option("--data", data_path, "Path to auto-mpg.data")->required()
        ->check(CLI::ExistingFile);
    inspect->add_option("--train-frac", frac_text, "Also show this training split");
    inspect->add_option("--seed", seed, "Split seed")->capture_default_str();

    auto* tq = app.add_subcommand("train-qnn", "Train one variational circuit model");
    tq->add_option("--data", data_path, "Path to auto-mpg.data")->required()
        ->check(CLI::ExistingFile);
    tq->add_option("--depth", depth, "Ansatz blocks d")->capture_default_str();
    tq->add_option("--width", width, "Qubits per attribute w")->capture_default_str();
    tq->add_option("--train-frac", frac_text, "Training fraction, e.g. 1/5")->capture_default_str();
    tq->add_option("--seed", seed, "Split and initialization seed")->capture_default_str();
    tq->add_option("--threads", threads, "Threads for the cost evaluation")->capture_default_str();
    tq->add_option("--max-evals", max_evals, "Optimizer cost evaluation budget (0 = default)");
    tq->add_option("--max-iters", max_iters, "Optimizer iteration budget (0 = default)");
    tq->add_flag("--grid-budget", grid_defaults,
                 "Use the trimmed per-cell budget the experiment grid uses");
    tq->add_option("--out", out_path, "Write the trained model as JSON");
    tq->add_option("--report", report_path, "Write the run report as JSON");

    auto* tm = app.add_subcommand("train-mlp", "Train one network baseline");
    tm->add_option("--data", data_path, "Path to auto-mpg.data")->required()
        ->check(CLI::ExistingFile);
    tm->add_option("--train-frac", frac_text, "Training fraction, e.g. 1/5")->capture_default_str();
    tm->add_option("--seed", seed, "Split and initialization seed")->capture_default_str();
    tm->add_flag("--unregularized", unregularized, "Skip the ridge penalty entirely");
    tm->add_option("--l2-grid", l2_text, "Ridge candidates, e.g. 1e-5,1e-4,1e-3");
    tm->add_option("--epochs", epochs, "Training epochs (0 = default 10000)");
    tm->add_option("--learning-rate", learning_rate, "Adam learning rate (0 = default 0.02)");
    tm->add_option("--threads", threads, "Threads for the ridge search")->capture_default_str();
    tm->add_option("--out", out_path, "Write the trained model as JSON");
    tm->add_option("--report", report_path, "Write the run report as JSON");

    auto* ex = app.add_subcommand("experiment", "Run the full model grid");
    ex->add_option("--data", data_path, "Path to auto-mpg.data")->required()
        ->check(CLI::ExistingFile);
    ex->add_option("--fractions", fracs_text, "Training fractions")->capture_default_str();
    ex->add_option("--depths", depths_text, "Circuit depths")->capture_default_str();
    ex->add_option("--widths", widths_text, "Circuit widths")->capture_default_str();
    ex->add_option("--seeds", seeds_text, "Seeds, one run per seed and cell")->capture_default_str();
    ex->add_option("--l2-grid", l2_text, "Ridge candidates for the regularized network");
    ex->add_option("--epochs", epochs, "Network epochs (0 = default 10000)");
    ex->add_option("--max-evals", max_evals,
                   "Override the per-cell circuit budget (0 = built-in schedule)");
    ex->add_option("--max-iters", max_iters, "Override the circuit iteration budget");
    bool no_reg = false, no_unreg = false, no_qnn = false;
    ex->add_flag("--no-mlp-regularized", no_reg, "Drop the regularized network runs");
    ex->add_flag("--no-mlp-unregularized", no_unreg, "Drop the unregularized network runs");
    ex->add_flag("--no-qnn", no_qnn, "Drop the circuit runs");
    ex->add_option("--workers", workers, "Concurrent grid cells")->capture_default_str();
    ex->add_option("--threads", total_threads, "Total threads across workers (0 = all cores)")
        ->capture_default_str();
    ex->add_option("--out", out_path, "Report path")->capture_default_str()->default_str("results.json");
    ex->add_option("--format", format, "Report format")->capture_default_str()
        ->check(CLI::IsMember({"json", "csv"}));
    ex->add_option("--plot-prefix", plot_prefix, "Also write <prefix>_{train,test}.csv");

    std::string in_path;
    auto* rp = app.add_subcommand("report", "Re-emit an existing JSON report");
    rp->add_option("input", in_path, "JSON report produced by experiment")->required()
        ->check(CLI::ExistingFile);
    rp->add_option("--format", format, "Output format")->capture_default_str()
        ->check(CLI::IsMember({"json", "csv"}));
    rp->add_option("--out", out_path, "Converted report path");
    rp->add_option("--plot-prefix", plot_prefix, "Also write <prefix>_{train,test}.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(rp)) {
            const ExperimentTable table = read_json_report(in_path);
            print_cells(table);
            emit(table, format, out_path, plot_prefix);
            return 0;
        }

        const auto records = load_auto_mpg(data_path);
        const Dataset data = drop_missing(records);

        if (app.got_subcommand(inspect)) {
            std::printf("records            %zu\n", records.size());
            std::printf("complete records   %zu (%zu missing horsepower)\n", data.size(),
                        records.size() - data.size());
            std::printf("\n%-14s %12s %12s %12s %12s\n", "column", "mean", "stddev", "min", "max");
            const Scaler sc = Scaler::fit(data.features);
            for (int c = 0; c < kNumAttributes; ++c) {
                double lo = data.features[0][c], hi = lo;
                for (const auto& row : data.features) {
                    lo = std::min(lo, row[c]);
                    hi = std::max(hi, row[c]);
                }
                std::printf("%-14s %12.4f %12.4f %12.4f %12.4f\n", kAttributeNames[c],
                            sc.mean()[c], sc.stddev()[c], lo, hi);
            }
            const Scaler ty = Scaler::fit_target(data.targets);
            double lo = data.targets[0], hi = lo;
            for (double v : data.targets) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            std::printf("%-14s %12.4f %12.4f %12.4f %12.4f\n", "mpg (target)", ty.mean()[0],
                        ty.stddev()[0], lo, hi);
            if (inspect->count("--train-frac") || inspect->count("--seed")) {
                const Fraction frac = parse_fraction(frac_text);
                const auto [train, test] = split_train_test(data, frac, seed);
                std::printf("\nsplit %s seed %llu: %zu train rows, %zu test rows\n",
                            frac.str().c_str(), static_cast<unsigned long long>(seed),
                            train.size(), test.size());
            }
            return 0;
        }

        if (app.got_subcommand(tq)) {
            RunConfig cfg;
            cfg.model = ModelKind::Qnn;
            cfg.depth = depth;
            cfg.width = width;
            cfg.train_fraction = parse_fraction(frac_text);
            cfg.seed = seed;
            cfg.threads = threads;
            if (grid_defaults) cfg.powell = grid_powell_options(depth, width, cfg.train_fraction);
            if (max_evals > 0) cfg.powell.max_cost_evaluations = max_evals;
            if (max_iters > 0) cfg.powell.max_iterations = max_iters;

            QnnModel model;
            const RunReport report = run_single(cfg, data, &model);
            print_run(report);
            if (!out_path.empty()) {
                save_qnn_model(model, out_path);
                std::printf("wrote %s\n", out_path.c_str());
            }
            if (!report_path.empty()) {
                write_json_report(ExperimentTable{{report}}, report_path);
                std::printf("wrote %s\n", report_path.c_str());
            }
            return 0;
        }

        if (app.got_subcommand(tm)) {
            RunConfig cfg;
            cfg.model = unregularized ? ModelKind::MlpUnregularized : ModelKind::MlpRegularized;
            cfg.depth = 0;
            cfg.width = 0;
            cfg.train_fraction = parse_fraction(frac_text);
            cfg.seed = seed;
            cfg.threads = threads;
            if (!l2_text.empty()) cfg.l2_grid = parse_reals(l2_text);
            if (epochs > 0) cfg.adam.epochs = epochs;
            if (learning_rate > 0.0) cfg.adam.learning_rate = learning_rate;

            MlpModel model;
            const RunReport report = run_single(cfg, data, nullptr, &model);
            print_run(report);
            if (!out_path.empty()) {
                save_mlp_model(model, out_path);
                std::printf("wrote %s\n", out_path.c_str());
            }
            if (!report_path.empty()) {
                write_json_report(ExperimentTable{{report}}, report_path);
                std::printf("wrote %s\n", report_path.c_str());
            }
            return 0;
        }

        // experiment
        GridSpec grid;
        grid.fractions = parse_fractions(fracs_text);
        grid.seeds = parse_seeds(seeds_text);
        if (no_qnn) {
            grid.qnn_shapes.clear();
        } else {
            grid.qnn_shapes.clear();
            for (int w : parse_ints(widths_text))
                for (int d : parse_ints(depths_text)) grid.qnn_shapes.emplace_back(d, w);
        }
        grid.mlp_regularized = !no_reg;
        grid.mlp_unregularized = !no_unreg;
        if (!l2_text.empty()) grid.l2_grid = parse_reals(l2_text);
        if (epochs > 0) grid.adam.epochs = epochs;
        if (max_evals > 0 || max_iters > 0) {
            PowellOptions opt;
            if (max_evals > 0) opt.max_cost_evaluations = max_evals;
            if (max_iters > 0) opt.max_iterations = max_iters;
            grid.powell_override = opt;
        }
        if (out_path.empty()) out_path = "results.json";

        const ExperimentTable table = run_grid(grid, data, workers, total_threads);
        print_cells(table);
        int failed = 0;
        for (const auto& run : table.runs) {
            if (run.ok) continue;
            ++failed;
            std::fprintf(stderr, "failed: %s d=%d w=%d %s seed %llu: %s\n",
                         to_string(run.config.model).c_str(), run.config.depth, run.config.width,
                         run.config.train_fraction.str().c_str(),
                         static_cast<unsigned long long>(run.config.seed), run.error.c_str());
        }
        if (failed) std::printf("%d of %zu runs failed\n", failed, table.runs.size());
        emit(table, format, out_path, plot_prefix);
        return failed == 0 ? 0 : 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
