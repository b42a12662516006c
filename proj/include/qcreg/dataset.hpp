#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcreg {

/// One line of the Auto-MPG file. Horsepower is the only field that may be
/// missing (a "?" in the raw data).
struct RawRecord {
    double mpg = 0.0;
    int cylinders = 0;
    double displacement = 0.0;
    std::optional<double> horsepower;
    double weight = 0.0;
    double acceleration = 0.0;
    int model_year = 0;
    int origin = 0;
    std::string car_name;

    bool complete() const { return horsepower.has_value(); }
};

inline constexpr int kNumAttributes = 7;
inline constexpr std::array<const char*, kNumAttributes> kAttributeNames{
    "cylinders", "displacement", "horsepower", "weight",
    "acceleration", "model_year", "origin"};

/// Numeric regression view: one feature row per complete record, in the
/// kAttributeNames column order, with mpg as the target.
struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<double> targets;

    std::size_t size() const { return targets.size(); }
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

/// Parses the whitespace-separated UCI layout: eight numeric fields (a "?"
/// allowed for horsepower) followed by a quoted car name.
std::vector<RawRecord> parse_auto_mpg(std::string_view text);

/// Reads and parses a file in one step.
std::vector<RawRecord> load_auto_mpg(const std::filesystem::path& path);

/// Keeps the complete records and lays them out as features and targets.
Dataset drop_missing(const std::vector<RawRecord>& records);

/// Per-column affine rescaling fitted on one sample set: standardize to zero
/// mean and unit variance, then map the standardized fitting range onto
/// [-1, 1]. Values transformed later may fall outside [-1, 1]; that is
/// expected for data the scaler was not fitted on. Constant columns map to 0
/// and are flagged.
class Scaler {
  public:
    static Scaler fit(const std::vector<std::vector<double>>& rows);
    static Scaler fit_target(std::span<const double> values);

    std::vector<std::vector<double>> transform(const std::vector<std::vector<double>>& rows) const;
    std::vector<double> transform_target(std::span<const double> values) const;
    /// Undoes transform_target back to original units.
    std::vector<double> invert_target(std::span<const double> scaled) const;

    std::size_t columns() const { return mean_.size(); }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& stddev() const { return stddev_; }
    const std::vector<double>& standardized_min() const { return lo_; }
    const std::vector<double>& standardized_max() const { return hi_; }
    const std::vector<bool>& constant_columns() const { return constant_; }

  private:
    double transform_one(double value, std::size_t col) const;
    double invert_one(double value, std::size_t col) const;

    std::vector<double> mean_, stddev_, lo_, hi_;
    std::vector<bool> constant_;
};

/// Reduced training fraction, e.g. {1, 5} for one fifth.
struct Fraction {
    int num = 1;
    int den = 5;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

Fraction parse_fraction(const std::string& text);

/// Seeded uniform shuffle of the row order; the first num * (N / den) rows
/// become the training set and the rest the test set.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, Fraction train_fraction,
                                             std::uint64_t seed);

}  // namespace qcreg
