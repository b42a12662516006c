#include "qcreg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace qcreg {

namespace {

bool parse_double(std::string_view token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

int parse_int_field(std::string_view token, const char* what, int line) {
    double v = 0.0;
    if (!parse_double(token, v)) throw ParseError(std::string("unparseable ") + what, line);
    const double rounded = std::round(v);
    if (std::abs(v - rounded) > 1e-9) throw ParseError(std::string(what) + " is not an integer", line);
    return static_cast<int>(rounded);
}

double parse_real_field(std::string_view token, const char* what, int line) {
    double v = 0.0;
    if (!parse_double(token, v)) throw ParseError(std::string("unparseable ") + what, line);
    return v;
}

}  // namespace

std::vector<RawRecord> parse_auto_mpg(std::string_view text) {
    std::vector<RawRecord> records;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        const std::size_t quote = line.find('"');
        if (quote == std::string_view::npos) throw ParseError("missing quoted car name", line_no);
        const std::size_t quote2 = line.rfind('"');
        if (quote2 == quote) throw ParseError("unterminated car name", line_no);

        std::string_view numeric = line.substr(0, quote);
        std::vector<std::string_view> tokens;
        std::size_t i = 0;
        while (i < numeric.size()) {
            while (i < numeric.size() && (numeric[i] == ' ' || numeric[i] == '\t' || numeric[i] == '\r')) ++i;
            if (i >= numeric.size()) break;
            std::size_t j = i;
            while (j < numeric.size() && numeric[j] != ' ' && numeric[j] != '\t' && numeric[j] != '\r') ++j;
            tokens.push_back(numeric.substr(i, j - i));
            i = j;
        }
        if (tokens.size() != 8) {
            throw ParseError("expected 8 numeric fields before the car name, found " +
                                 std::to_string(tokens.size()),
                             line_no);
        }

        RawRecord rec;
        rec.mpg = parse_real_field(tokens[0], "mpg", line_no);
        if (rec.mpg <= 0.0) throw ParseError("mpg must be positive", line_no);
        rec.cylinders = parse_int_field(tokens[1], "cylinders", line_no);
        rec.displacement = parse_real_field(tokens[2], "displacement", line_no);
        if (tokens[3] == "?") {
            rec.horsepower.reset();
        } else {
            rec.horsepower = parse_real_field(tokens[3], "horsepower", line_no);
        }
        rec.weight = parse_real_field(tokens[4], "weight", line_no);
        rec.acceleration = parse_real_field(tokens[5], "acceleration", line_no);
        rec.model_year = parse_int_field(tokens[6], "model year", line_no);
        rec.origin = parse_int_field(tokens[7], "origin", line_no);
        if (rec.origin < 1 || rec.origin > 3) throw ParseError("origin must be 1, 2 or 3", line_no);
        rec.car_name = std::string(line.substr(quote + 1, quote2 - quote - 1));
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<RawRecord> load_auto_mpg(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_auto_mpg(buf.str());
}

Dataset drop_missing(const std::vector<RawRecord>& records) {
    Dataset data;
    for (const auto& rec : records) {
        if (!rec.complete()) continue;
        data.features.push_back({static_cast<double>(rec.cylinders), rec.displacement,
                                 *rec.horsepower, rec.weight, rec.acceleration,
                                 static_cast<double>(rec.model_year),
                                 static_cast<double>(rec.origin)});
        data.targets.push_back(rec.mpg);
    }
    return data;
}

Scaler Scaler::fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("cannot fit a scaler on an empty set");
    const std::size_t cols = rows.front().size();
    if (cols == 0) throw std::invalid_argument("cannot fit a scaler on zero columns");
    for (const auto& row : rows) {
        if (row.size() != cols) throw std::invalid_argument("rows have inconsistent widths");
    }
    Scaler sc;
    sc.mean_.assign(cols, 0.0);
    sc.stddev_.assign(cols, 0.0);
    sc.lo_.assign(cols, 0.0);
    sc.hi_.assign(cols, 0.0);
    sc.constant_.assign(cols, false);
    const double n = static_cast<double>(rows.size());
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (const auto& row : rows) sum += row[c];
        const double mean = sum / n;
        double var = 0.0;
        double vmin = rows.front()[c], vmax = rows.front()[c];
        for (const auto& row : rows) {
            var += (row[c] - mean) * (row[c] - mean);
            vmin = std::min(vmin, row[c]);
            vmax = std::max(vmax, row[c]);
        }
        sc.mean_[c] = mean;
        if (vmin == vmax) {
            sc.constant_[c] = true;
            sc.stddev_[c] = 0.0;
            continue;
        }
        sc.stddev_[c] = std::sqrt(var / n);
        sc.lo_[c] = (vmin - mean) / sc.stddev_[c];
        sc.hi_[c] = (vmax - mean) / sc.stddev_[c];
    }
    return sc;
}

Scaler Scaler::fit_target(std::span<const double> values) {
    std::vector<std::vector<double>> rows;
    rows.reserve(values.size());
    for (double v : values) rows.push_back({v});
    return fit(rows);
}

double Scaler::transform_one(double value, std::size_t col) const {
    if (constant_[col]) return 0.0;
    const double z = (value - mean_[col]) / stddev_[col];
    return 2.0 * (z - lo_[col]) / (hi_[col] - lo_[col]) - 1.0;
}

double Scaler::invert_one(double value, std::size_t col) const {
    if (constant_[col]) return mean_[col];
    const double z = (value + 1.0) * (hi_[col] - lo_[col]) / 2.0 + lo_[col];
    return mean_[col] + stddev_[col] * z;
}

std::vector<std::vector<double>> Scaler::transform(const std::vector<std::vector<double>>& rows) const {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != columns()) throw std::invalid_argument("row width does not match the scaler");
        std::vector<double> scaled(row.size());
        for (std::size_t c = 0; c < row.size(); ++c) scaled[c] = transform_one(row[c], c);
        out.push_back(std::move(scaled));
    }
    return out;
}

std::vector<double> Scaler::transform_target(std::span<const double> values) const {
    if (columns() != 1) throw std::invalid_argument("target scaler must have one column");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = transform_one(values[i], 0);
    return out;
}

std::vector<double> Scaler::invert_target(std::span<const double> scaled) const {
    if (columns() != 1) throw std::invalid_argument("target scaler must have one column");
    std::vector<double> out(scaled.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) out[i] = invert_one(scaled[i], 0);
    return out;
}

Fraction parse_fraction(const std::string& text) {
    const std::size_t slash = text.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 >= text.size()) {
        throw std::invalid_argument("fraction must look like 1/5, got '" + text + "'");
    }
    Fraction f;
    try {
        f.num = std::stoi(text.substr(0, slash));
        f.den = std::stoi(text.substr(slash + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("fraction must look like 1/5, got '" + text + "'");
    }
    if (f.num < 1 || f.den < 2 || f.num >= f.den) {
        throw std::invalid_argument("fraction must be a proper positive ratio, got '" + text + "'");
    }
    return f;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, Fraction train_fraction,
                                             std::uint64_t seed) {
    if (data.features.size() != data.targets.size()) {
        throw std::invalid_argument("feature and target counts differ");
    }
    const std::size_t n = data.size();
    if (train_fraction.num < 1 || train_fraction.den < 2 || train_fraction.num >= train_fraction.den) {
        throw std::invalid_argument("training fraction must be a proper positive ratio");
    }
    const std::size_t train_n =
        static_cast<std::size_t>(train_fraction.num) * (n / static_cast<std::size_t>(train_fraction.den));
    if (train_n == 0) throw std::invalid_argument("training fraction leaves no training rows");
    if (train_n >= n) throw std::invalid_argument("training fraction leaves no test rows");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    Dataset train, test;
    for (std::size_t i = 0; i < n; ++i) {
        Dataset& dst = i < train_n ? train : test;
        dst.features.push_back(data.features[order[i]]);
        dst.targets.push_back(data.targets[order[i]]);
    }
    return {std::move(train), std::move(test)};
}

}  // namespace qcreg
