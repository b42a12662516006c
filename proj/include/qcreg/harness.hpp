#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcreg/dataset.hpp"
#include "qcreg/mlp.hpp"
#include "qcreg/powell.hpp"
#include "qcreg/qnn.hpp"

namespace qcreg {

/// Coefficient of determination, 1 - SS_res / SS_tot. The true values must
/// not all be identical.
double r_squared(std::span<const double> y_true, std::span<const double> y_pred);

enum class ModelKind { Qnn, MlpRegularized, MlpUnregularized };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// Everything needed to reproduce one training run exactly.
struct RunConfig {
    ModelKind model = ModelKind::Qnn;
    int depth = 3;
    int width = 1;
    Fraction train_fraction{1, 5};
    std::uint64_t seed = 1;
    int threads = 1;
    PowellOptions powell;
    AdamConfig adam;
    std::vector<double> l2_grid = default_l2_grid();
};

struct ScalerSummary {
    std::vector<double> mean, stddev, standardized_min, standardized_max;
    std::vector<bool> constant;
};
ScalerSummary summarize(const Scaler& scaler);

struct RunReport {
    RunConfig config;
    bool ok = false;
    std::string error;
    int train_rows = 0;
    int test_rows = 0;
    long n_parameters = 0;
    double train_r2 = 0.0;
    double test_r2 = 0.0;
    /// Final training objective in scaled space.
    double final_cost = 0.0;
    /// Errors mapped back to original mpg units.
    double train_rmse_mpg = 0.0;
    double test_rmse_mpg = 0.0;
    /// Ridge penalty actually used; empty for the circuit model.
    std::optional<double> ridge_weight;
    /// Objective evaluations for the circuit model, epochs for the networks.
    long cost_evaluations = 0;
    bool trainer_converged = false;
    double wall_seconds = 0.0;
    ScalerSummary feature_scaler, target_scaler;
};

/// The study grid: every listed circuit shape and both network baselines at
/// each training fraction, over the shared seeds.
struct GridSpec {
    std::vector<Fraction> fractions{{1, 5}, {2, 5}, {4, 5}};
    std::vector<std::pair<int, int>> qnn_shapes{{3, 1}, {6, 1}, {12, 1}, {3, 2}, {6, 2}, {12, 2}};
    bool mlp_regularized = true;
    bool mlp_unregularized = true;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<double> l2_grid = default_l2_grid();
    AdamConfig adam;
    /// When set, replaces the per-cell budget from grid_powell_options.
    std::optional<PowellOptions> powell_override;
};

/// Per-cell optimizer budget for grid runs. The 7-qubit tier shares one
/// budget so its depth comparison is an equal-effort one. The 14-qubit tier,
/// where a cost evaluation is about a hundred times more expensive, gets
/// budgets weighted toward the smallest training fraction, which is where
/// the width and generalization comparisons are read.
PowellOptions grid_powell_options(int depth, int width, Fraction train_fraction);

std::vector<RunConfig> expand_grid(const GridSpec& grid, int threads_per_run);

/// Splits, fits the scalers on the training part only, trains the configured
/// model and scores both parts. Deterministic apart from wall_seconds.
/// When an out pointer matching the configured kind is given, the trained
/// model is copied into it.
RunReport run_single(const RunConfig& config, const Dataset& data,
                     QnnModel* qnn_out = nullptr, MlpModel* mlp_out = nullptr);

struct ExperimentTable {
    std::vector<RunReport> runs;
};

/// Runs every cell of the grid. A failing cell records its error in the
/// table and the rest continue; only an entirely failed grid throws.
ExperimentTable run_grid(const GridSpec& grid, const Dataset& data, int workers = 1,
                         int total_threads = 0);

/// Seed-aggregated view of one grid cell.
struct CellSummary {
    ModelKind model = ModelKind::Qnn;
    int depth = 0;
    int width = 0;
    Fraction fraction{1, 5};
    int runs_ok = 0;
    double mean_train_r2 = 0.0, median_train_r2 = 0.0, min_train_r2 = 0.0, max_train_r2 = 0.0;
    double mean_test_r2 = 0.0, median_test_r2 = 0.0, min_test_r2 = 0.0, max_test_r2 = 0.0;
};
std::vector<CellSummary> summarize_cells(const ExperimentTable& table);

double median(std::vector<double> values);

void write_json_report(const ExperimentTable& table, const std::filesystem::path& path);
ExperimentTable read_json_report(const std::filesystem::path& path);
/// One row per run: model,d,w,fraction,seed,train_r2,test_r2,wall_seconds,lambda.
void write_csv_report(const ExperimentTable& table, const std::filesystem::path& path);
/// Median R-squared per model label with one row per training fraction,
/// ready for plotting R-squared against training set size.
void write_plot_csv(const ExperimentTable& table, bool test_metric,
                    const std::filesystem::path& path);

}  // namespace qcreg
