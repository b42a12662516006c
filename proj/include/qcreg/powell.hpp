#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcreg {

/// Thrown when an objective returns a non-finite value. `where` is the line
/// parameter or evaluation point coordinate that produced it.
class NumericError : public std::runtime_error {
  public:
    NumericError(const std::string& what, double where)
        : std::runtime_error(what), where_(where) {}
    double where() const { return where_; }

  private:
    double where_;
};

struct PowellOptions {
    int max_iterations = 200;
    double cost_tolerance = 1e-6;
    double line_tolerance = 1e-6;
    long max_cost_evaluations = 200000;
};

struct PowellResult {
    std::vector<double> best_params;
    double best_cost = 0.0;
    int iterations = 0;
    long cost_evaluations = 0;
    /// Initial cost followed by the best cost after each iteration;
    /// non-increasing, and best_cost is always the last entry.
    std::vector<double> history;
    bool converged = false;
};

struct LineMinimum {
    double t = 0.0;
    double value = 0.0;
};

/// Minimizes objective(t) along a line: golden-ratio bracket expansion
/// starting from t = origin and t = origin + direction_scale, then Brent's
/// method to fractional tolerance `tol`.
LineMinimum bracket_and_brent(const std::function<double(double)>& objective,
                              double origin, double direction_scale, double tol);

/// Powell's direction-set minimization without derivatives. Directions start
/// as the coordinate basis; each iteration line-minimizes along every
/// direction, then replaces the direction of largest decrease with the net
/// displacement and line-minimizes along that too. The set resets to the
/// coordinate basis periodically to avoid degeneracy.
///
/// Stops when an iteration's relative decrease falls below cost_tolerance,
/// or at the iteration/evaluation budget (result flagged not converged).
PowellResult powell_minimize(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double> start, const PowellOptions& options = {});

}  // namespace qcreg
