// End-to-end acceptance checks: simulator and optimizer exactness against
// independent oracles, dataset fidelity, and the ordinal claims of the study
// evaluated from one full grid run. Prints one PASS/FAIL line per criterion
// and exits with the number of failures.
//
// Flags:
//   --fast          skip the grid-based criteria (they report SKIP and count
//                   as failures, so this cannot masquerade as a full pass)
//   --table <path>  evaluate the grid criteria from an existing JSON report
//                   instead of re-running the grid; the time budget is then
//                   judged on the summed per-run wall clock

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qcreg/harness.hpp"
#include "qcreg/qnn.hpp"
#include "qcreg/statevector.hpp"
#include "support/dense_oracle.hpp"
#include "support/linear_solve.hpp"

using namespace qcreg;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %2d %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void skip(int criterion, const std::string& detail) {
    std::printf("criterion %2d SKIP  %s\n", criterion, detail.c_str());
    std::fflush(stdout);
    ++failures;
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1: random circuits against the dense Kronecker-product oracle.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int gates = 1 + static_cast<int>(rng() % 20);
        StateVector state(n);
        auto vec = oracle::zero_state(n);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        for (int g = 0; g < gates; ++g) {
            if (n >= 2 && rng() % 2 == 0) {
                const int control = static_cast<int>(rng() % static_cast<unsigned>(n));
                int target = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
                if (target >= control) ++target;
                state.apply_cnot(control, target);
                vec = oracle::matvec(oracle::cnot_full(n, control, target), vec);
            } else {
                const int qubit = static_cast<int>(rng() % static_cast<unsigned>(n));
                const double theta = angle(rng);
                state.apply_ry(qubit, theta);
                vec = oracle::matvec(oracle::ry_full(n, qubit, theta), vec);
            }
        }
        for (std::size_t i = 0; i < vec.size(); ++i) {
            worst = std::max(worst, std::abs(state.amplitude(i) - vec[i]));
        }
    }
    const double elapsed = seconds_since(t0);
    report(1, worst < 1e-10 && elapsed < 10.0,
           fmt("simulator vs dense matrix oracle: max amplitude deviation %.3g over 200 random "
               "circuits (limit 1e-10), %.1f s (limit 10 s)",
               worst, elapsed));
}

// 2: unitarity of long random gate sequences.
void criterion_2() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        StateVector state(6);
        for (int g = 0; g < 100; ++g) {
            if (rng() % 2 == 0) {
                const int control = static_cast<int>(rng() % 6);
                int target = static_cast<int>(rng() % 5);
                if (target >= control) ++target;
                state.apply_cnot(control, target);
            } else {
                state.apply_ry(static_cast<int>(rng() % 6), angle(rng));
            }
        }
        worst = std::max(worst, std::abs(state.norm() - 1.0));
    }
    report(2, worst < 1e-10,
           fmt("unitarity: worst norm drift %.3g after 100-gate sequences on 6 qubits, "
               "100 seeds (limit 1e-10)",
               worst));
}

// 3: Powell against a direct linear solve on quadratics, plus Rosenbrock.
void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    PowellOptions opt;
    opt.max_iterations = 500;
    opt.cost_tolerance = 1e-14;
    opt.line_tolerance = 1e-8;

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t dim = 2 + static_cast<std::size_t>(trial % 5);
        std::vector<std::vector<double>> b(dim, std::vector<double>(dim));
        for (auto& row : b)
            for (double& v : row) v = uni(rng);
        std::vector<std::vector<double>> a(dim, std::vector<double>(dim, 0.0));
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                for (std::size_t k = 0; k < dim; ++k) a[i][j] += b[k][i] * b[k][j];
                if (i == j) a[i][j] += 0.5;
            }
        std::vector<double> rhs(dim);
        for (double& v : rhs) v = uni(rng);

        auto quadratic = [&](const std::vector<double>& x) {
            double value = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                for (std::size_t j = 0; j < dim; ++j) value += 0.5 * x[i] * a[i][j] * x[j];
                value -= rhs[i] * x[i];
            }
            return value;
        };
        const auto found = powell_minimize(quadratic, std::vector<double>(dim, 0.0), opt);
        const auto exact = oracle::solve_linear(a, rhs);
        for (std::size_t i = 0; i < dim; ++i) {
            worst = std::max(worst, std::abs(found.best_params[i] - exact[i]));
        }
    }

    auto rosenbrock = [](const std::vector<double>& x) {
        const double a = x[1] - x[0] * x[0];
        const double b = 1.0 - x[0];
        return 100.0 * a * a + b * b;
    };
    const auto ros = powell_minimize(rosenbrock, {-1.2, 1.0}, opt);
    const double ros_err = std::max(std::abs(ros.best_params[0] - 1.0),
                                    std::abs(ros.best_params[1] - 1.0));
    const double elapsed = seconds_since(t0);
    report(3, worst < 1e-5 && ros_err < 1e-3 && elapsed < 30.0,
           fmt("optimizer exactness: quadratic minimizers within %.3g of the linear-solve "
               "answer (limit 1e-5), Rosenbrock endpoint error %.3g (limit 1e-3), %.1f s "
               "(limit 30 s)",
               worst, ros_err, elapsed));
}

// 4: backpropagation against central finite differences.
void criterion_4() {
    double worst_rel = 0.0;
    const double h = 1e-5;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::vector<int> shape =
            seed % 2 == 0 ? std::vector<int>{3, 5, 1} : std::vector<int>{4, 6, 3, 1};
        const double l2 = seed % 3 == 0 ? 1e-3 : 0.0;
        MlpModel model = init_mlp(shape, seed);

        std::mt19937_64 rng(seed * 977);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::vector<std::vector<double>> x(8, std::vector<double>(static_cast<std::size_t>(shape.front())));
        std::vector<double> y(8);
        for (auto& row : x)
            for (double& v : row) v = uni(rng);
        for (double& v : y) v = uni(rng);

        MlpGradients grads, unused;
        loss_and_gradients(model, x, y, l2, grads);
        auto check_block = [&](std::vector<double>& params, const std::vector<double>& analytic) {
            for (std::size_t i = 0; i < params.size(); ++i) {
                const double saved = params[i];
                params[i] = saved + h;
                const double up = loss_and_gradients(model, x, y, l2, unused);
                params[i] = saved - h;
                const double down = loss_and_gradients(model, x, y, l2, unused);
                params[i] = saved;
                const double numeric = (up - down) / (2.0 * h);
                const double rel = std::abs(analytic[i] - numeric) /
                                   std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-4);
                worst_rel = std::max(worst_rel, rel);
            }
        };
        for (std::size_t l = 0; l + 1 < shape.size(); ++l) {
            check_block(model.weights[l], grads.weights[l]);
            check_block(model.biases[l], grads.biases[l]);
        }
    }
    report(4, worst_rel < 1e-4,
           fmt("gradient check: worst relative deviation from central differences %.3g over "
               "20 seeded networks (limit 1e-4)",
               worst_rel));
}

// 5: dataset parse counts and reduced training sizes.
void criterion_5(const Dataset& data, std::size_t parsed) {
    bool ok = parsed == 398 && data.size() == 392;
    std::string sizes;
    const int expected[3] = {78, 156, 312};
    const Fraction fracs[3] = {{1, 5}, {2, 5}, {4, 5}};
    for (int i = 0; i < 3; ++i) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const auto [train, test] = split_train_test(data, fracs[i], seed);
            ok = ok && static_cast<int>(train.size()) == expected[i] &&
                 train.size() + test.size() == data.size();
        }
        sizes += (i ? "/" : "") + std::to_string(expected[i]);
    }
    report(5, ok,
           fmt("dataset fidelity: %zu parsed, %zu after dropping missing horsepower "
               "(expected 398/392), training sizes %s across seeds",
               parsed, data.size(), sizes.c_str()));
}

const CellSummary* find_cell(const std::vector<CellSummary>& cells, ModelKind kind, int depth,
                             int width, Fraction frac) {
    for (const auto& c : cells) {
        if (c.model == kind && c.depth == depth && c.width == width && c.fraction == frac) {
            return &c;
        }
    }
    return nullptr;
}

std::string per_seed_values(const ExperimentTable& table, ModelKind kind, int depth, int width,
                            Fraction frac) {
    std::string out;
    for (const auto& run : table.runs) {
        const auto& c = run.config;
        if (c.model != kind || c.depth != depth || c.width != width || c.train_fraction != frac ||
            !run.ok) {
            continue;
        }
        out += fmt("%sseed %llu: %.4f", out.empty() ? "" : ", ",
                   static_cast<unsigned long long>(c.seed), run.test_r2);
    }
    return out;
}

// 6: the unregularized network reaches a near-perfect training fit everywhere.
void criterion_6(const ExperimentTable& table) {
    double worst = 1.0;
    long worst_epochs = 0;
    int runs = 0;
    bool all_ok = true;
    for (const auto& run : table.runs) {
        if (run.config.model != ModelKind::MlpUnregularized) continue;
        ++runs;
        if (!run.ok) {
            all_ok = false;
            continue;
        }
        worst = std::min(worst, run.train_r2);
        worst_epochs = std::max(worst_epochs, run.cost_evaluations);
    }
    report(6, all_ok && runs == 15 && worst >= 0.999 && worst_epochs <= 10000,
           fmt("unregularized network training fit: minimum train R^2 %.6f over %d runs "
               "(limit 0.999), at most %ld epochs (limit 10000)",
               worst, runs, worst_epochs));
}

// 7: the d=6, w=2 circuit's training fit decreases as training data grows.
void criterion_7(const std::vector<CellSummary>& cells) {
    const auto* f1 = find_cell(cells, ModelKind::Qnn, 6, 2, {1, 5});
    const auto* f2 = find_cell(cells, ModelKind::Qnn, 6, 2, {2, 5});
    const auto* f4 = find_cell(cells, ModelKind::Qnn, 6, 2, {4, 5});
    if (!f1 || !f2 || !f4 || !f1->runs_ok || !f2->runs_ok || !f4->runs_ok) {
        report(7, false, "d=6 w=2 cells missing from the grid results");
        return;
    }
    const double a = f1->median_train_r2, b = f2->median_train_r2, c = f4->median_train_r2;
    report(7, a > b && b > c && a < 0.999 && b < 0.999 && c < 0.999,
           fmt("implicit regularization: d=6 w=2 median train R^2 %.4f > %.4f > %.4f across "
               "fractions 1/5, 2/5, 4/5, all below 0.999",
               a, b, c));
}

// 8: deeper or wider circuits fit the small training set at least as well.
void criterion_8(const std::vector<CellSummary>& cells) {
    const Fraction frac{1, 5};
    double w1[3], w2[3];
    for (int i = 0; i < 3; ++i) {
        const int depth = i == 0 ? 3 : i == 1 ? 6 : 12;
        const auto* c1 = find_cell(cells, ModelKind::Qnn, depth, 1, frac);
        const auto* c2 = find_cell(cells, ModelKind::Qnn, depth, 2, frac);
        if (!c1 || !c2 || !c1->runs_ok || !c2->runs_ok) {
            report(8, false, "circuit cells missing from the grid results at fraction 1/5");
            return;
        }
        w1[i] = c1->median_train_r2;
        w2[i] = c2->median_train_r2;
    }
    const bool depth_ok = w1[0] <= w1[1] && w1[1] <= w1[2];
    const bool width_ok = w1[0] <= w2[0] && w1[1] <= w2[1] && w1[2] <= w2[2];
    report(8, depth_ok && width_ok,
           fmt("expressibility ordering at 1/5: w=1 median train R^2 %.4f <= %.4f <= %.4f over "
               "d=3,6,12; w=2 counterparts %.4f, %.4f, %.4f each >= the w=1 value",
               w1[0], w1[1], w1[2], w2[0], w2[1], w2[2]));
}

struct GapResult {
    bool valid = false;
    double gap = 0.0;
    double qnn = 0.0;
    double mlp = 0.0;
    int best_depth = 0;
    int best_width = 0;
};

GapResult best_gap(const std::vector<CellSummary>& cells, Fraction frac) {
    GapResult r;
    const auto* mlp = find_cell(cells, ModelKind::MlpRegularized, 0, 0, frac);
    if (!mlp || !mlp->runs_ok) return r;
    bool any = false;
    for (const auto& c : cells) {
        if (c.model != ModelKind::Qnn || !(c.fraction == frac) || !c.runs_ok) continue;
        if (!any || c.median_test_r2 > r.qnn) {
            r.qnn = c.median_test_r2;
            r.best_depth = c.depth;
            r.best_width = c.width;
            any = true;
        }
    }
    if (!any) return r;
    r.mlp = mlp->median_test_r2;
    r.gap = r.qnn - r.mlp;
    r.valid = true;
    return r;
}

// 9: in the small-data regime the best circuit generalizes better than the
// tuned network; per-seed values are printed either way so a sign flip under
// these seeds stays auditable.
void criterion_9(const ExperimentTable& table, const std::vector<CellSummary>& cells) {
    const GapResult g = best_gap(cells, {1, 5});
    if (!g.valid) {
        report(9, false, "required cells missing from the grid results at fraction 1/5");
        return;
    }
    report(9, g.qnn > g.mlp,
           fmt("small-data generalization: best circuit cell (d=%d, w=%d) median test R^2 %.4f vs "
               "regularized network %.4f at fraction 1/5",
               g.best_depth, g.best_width, g.qnn, g.mlp));
    std::printf("             per-seed test R^2, best circuit cell: %s\n",
                per_seed_values(table, ModelKind::Qnn, g.best_depth, g.best_width, {1, 5}).c_str());
    std::printf("             per-seed test R^2, regularized network: %s\n",
                per_seed_values(table, ModelKind::MlpRegularized, 0, 0, {1, 5}).c_str());
}

// 10: the generalization gap narrows as training data grows.
void criterion_10(const std::vector<CellSummary>& cells) {
    const GapResult small = best_gap(cells, {1, 5});
    const GapResult large = best_gap(cells, {4, 5});
    if (!small.valid || !large.valid) {
        report(10, false, "required cells missing from the grid results");
        return;
    }
    report(10, large.gap < small.gap,
           fmt("gap narrowing: circuit-minus-network median test R^2 gap %.4f at fraction 4/5 "
               "vs %.4f at fraction 1/5",
               large.gap, small.gap));
}

// 11: overall wall-clock budget and per-evaluation speed of the 14-qubit model.
void criterion_11(double grid_seconds, const char* how) {
    double means[3];
    const int depths[3] = {3, 6, 12};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int i = 0; i < 3; ++i) {
        const QnnModel model = build_model(7, 2, depths[i], 11);
        std::vector<double> row(7);
        for (double& v : row) v = uni(rng);
        PredictBuffer buffer;
        volatile double sink = predict(model, row, buffer);
        const int reps = 200;
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r) sink = predict(model, row, buffer);
        means[i] = seconds_since(t0) / reps;
        (void)sink;
    }
    double sorted[3] = {means[0], means[1], means[2]};
    std::sort(sorted, sorted + 3);
    const double median_eval = sorted[1];
    const double hours = grid_seconds / 3600.0;
    report(11, hours < 4.0 && median_eval < 1e-3,
           fmt("budget: full default grid %s in %.2f h (limit 4 h); 14-qubit evaluation mean "
               "%.3f/%.3f/%.3f ms at d=3/6/12, median %.3f ms (limit 1 ms)",
               how, hours, means[0] * 1e3, means[1] * 1e3, means[2] * 1e3, median_eval * 1e3));
}

void print_cells(const std::vector<CellSummary>& cells) {
    std::printf("\n%-18s %3s %3s %9s %7s %16s %15s\n", "model", "d", "w", "fraction", "runs",
                "median train R^2", "median test R^2");
    for (const auto& c : cells) {
        std::printf("%-18s %3d %3d %9s %7d %16.4f %15.4f\n", to_string(c.model).c_str(), c.depth,
                    c.width, c.fraction.str().c_str(), c.runs_ok, c.median_train_r2,
                    c.median_test_r2);
    }
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    bool fast = false;
    std::string table_path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--fast") {
            fast = true;
        } else if (arg == "--table" && i + 1 < argc) {
            table_path = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--fast] [--table report.json]\n", argv[0]);
            return 2;
        }
    }

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();

    const auto records = load_auto_mpg(QCREG_DATA_DIR "/auto-mpg.data");
    const Dataset data = drop_missing(records);
    criterion_5(data, records.size());

    if (fast) {
        for (int c = 6; c <= 10; ++c) skip(c, "grid run skipped (fast mode)");
        criterion_11(3600.0 * 100.0, "not run");
        std::printf("summary: %d of 11 criteria passed\n", 11 - failures);
        return failures;
    }

    ExperimentTable table;
    double grid_seconds = 0.0;
    const char* how = "completed";
    if (table_path.empty()) {
        std::printf("running the full default grid (120 runs, single worker)...\n");
        std::fflush(stdout);
        const auto t0 = std::chrono::steady_clock::now();
        table = run_grid(GridSpec{}, data, 1, 1);
        grid_seconds = seconds_since(t0);
        write_json_report(table, "acceptance_report.json");
        write_csv_report(table, "acceptance_table.csv");
        write_plot_csv(table, false, "acceptance_plot_train.csv");
        write_plot_csv(table, true, "acceptance_plot_test.csv");
    } else {
        table = read_json_report(table_path);
        for (const auto& run : table.runs) grid_seconds += run.wall_seconds;
        how = "replayed from report, summed run time";
    }

    const auto cells = summarize_cells(table);
    print_cells(cells);

    int failed_runs = 0;
    for (const auto& run : table.runs) {
        if (!run.ok) {
            ++failed_runs;
            std::printf("failed run: %s d=%d w=%d fraction %s seed %llu: %s\n",
                        to_string(run.config.model).c_str(), run.config.depth, run.config.width,
                        run.config.train_fraction.str().c_str(),
                        static_cast<unsigned long long>(run.config.seed), run.error.c_str());
        }
    }
    if (failed_runs) std::printf("%d of %zu runs failed\n", failed_runs, table.runs.size());

    criterion_6(table);
    criterion_7(cells);
    criterion_8(cells);
    criterion_9(table, cells);
    criterion_10(cells);
    criterion_11(grid_seconds, how);

    std::printf("summary: %d of 11 criteria passed\n", 11 - failures);
    return failures;
}
