#include "qcreg/powell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace qcreg {

namespace {

constexpr double kGold = 1.618034;
constexpr double kGrowLimit = 100.0;
constexpr double kTiny = 1e-20;
constexpr int kMaxBracketSteps = 500;
constexpr int kBrentMaxIter = 100;
constexpr double kCGold = 0.3819660;
constexpr double kZEps = 1e-10;

struct BudgetExhausted {};

double checked(const std::function<double(double)>& f, double t) {
    const double v = f(t);
    if (!std::isfinite(v)) {
        throw NumericError("objective returned a non-finite value", t);
    }
    return v;
}

struct Bracket {
    double a, b, c;
    double fa, fb, fc;
};

// Golden-ratio expansion with parabolic extrapolation until f(b) is below
// both ends, downhill from the lower of the two starting points.
Bracket bracket_minimum(const std::function<double(double)>& f, double ax, double bx) {
    double fa = checked(f, ax);
    double fb = checked(f, bx);
    if (fb > fa) {
        std::swap(ax, bx);
        std::swap(fa, fb);
    }
    double cx = bx + kGold * (bx - ax);
    double fc = checked(f, cx);
    int steps = 0;
    while (fb > fc) {
        if (++steps > kMaxBracketSteps) {
            throw NumericError("line search failed to bracket a minimum", cx);
        }
        const double r = (bx - ax) * (fb - fc);
        const double q = (bx - cx) * (fb - fa);
        double u = bx - ((bx - cx) * q - (bx - ax) * r) /
                            (2.0 * std::copysign(std::max(std::abs(q - r), kTiny), q - r));
        const double ulim = bx + kGrowLimit * (cx - bx);
        double fu;
        if ((bx - u) * (u - cx) > 0.0) {
            fu = checked(f, u);
            if (fu < fc) {
                return {bx, u, cx, fb, fu, fc};
            } else if (fu > fb) {
                return {ax, bx, u, fa, fb, fu};
            }
            u = cx + kGold * (cx - bx);
            fu = checked(f, u);
        } else if ((cx - u) * (u - ulim) > 0.0) {
            fu = checked(f, u);
            if (fu < fc) {
                bx = cx;
                cx = u;
                u = cx + kGold * (cx - bx);
                fb = fc;
                fc = fu;
                fu = checked(f, u);
            }
        } else if ((u - ulim) * (ulim - cx) >= 0.0) {
            u = ulim;
            fu = checked(f, u);
        } else {
            u = cx + kGold * (cx - bx);
            fu = checked(f, u);
        }
        ax = bx;
        bx = cx;
        cx = u;
        fa = fb;
        fb = fc;
        fc = fu;
    }
    return {ax, bx, cx, fa, fb, fc};
}

// Brent's parabolic-plus-golden-section minimization inside a bracket.
LineMinimum brent_minimize(const std::function<double(double)>& f, const Bracket& br, double tol) {
    double a = std::min(br.a, br.c);
    double b = std::max(br.a, br.c);
    double x = br.b, w = br.b, v = br.b;
    double fx = br.fb, fw = br.fb, fv = br.fb;
    double d = 0.0, e = 0.0;
    for (int iter = 0; iter < kBrentMaxIter; ++iter) {
        const double xm = 0.5 * (a + b);
        const double tol1 = tol * std::abs(x) + kZEps;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
        bool parabolic_ok = false;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double etemp = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
                parabolic_ok = true;
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
            }
        }
        if (!parabolic_ok) {
            e = (x >= xm) ? a - x : b - x;
            d = kCGold * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
        const double fu = checked(f, u);
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; w = x; x = u;
            fv = fw; fw = fx; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; w = u;
                fv = fw; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return {x, fx};
}

}  // namespace

LineMinimum bracket_and_brent(const std::function<double(double)>& objective,
                              double origin, double direction_scale, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("line tolerance must be positive");
    if (!std::isfinite(origin) || !std::isfinite(direction_scale) || direction_scale == 0.0) {
        throw std::invalid_argument("line search origin and scale must be finite and the scale nonzero");
    }
    const Bracket br = bracket_minimum(objective, origin, origin + direction_scale);
    return brent_minimize(objective, br, tol);
}

PowellResult powell_minimize(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double> start, const PowellOptions& options) {
    const std::size_t n = start.size();
    if (n == 0) throw std::invalid_argument("start point must not be empty");
    for (double v : start) {
        if (!std::isfinite(v)) throw std::invalid_argument("start point must be finite");
    }
    if (options.max_iterations < 0) throw std::invalid_argument("max_iterations must be non-negative");
    if (!(options.cost_tolerance > 0.0)) throw std::invalid_argument("cost_tolerance must be positive");
    if (!(options.line_tolerance > 0.0)) throw std::invalid_argument("line_tolerance must be positive");
    if (options.max_cost_evaluations < 1) throw std::invalid_argument("max_cost_evaluations must be positive");

    PowellResult res;
    long evals = 0;
    std::vector<double> x = std::move(start);
    auto eval = [&](const std::vector<double>& p) -> double {
        if (evals >= options.max_cost_evaluations) throw BudgetExhausted{};
        ++evals;
        return objective(p);
    };

    std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
    auto reset_dirs = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(dirs[i].begin(), dirs[i].end(), 0.0);
            dirs[i][i] = 1.0;
        }
    };
    reset_dirs();
    const int reset_period = static_cast<int>(n) + 1;

    double fret = 0.0;
    std::vector<double> probe(n);
    auto line_search = [&](const std::vector<double>& dir) -> LineMinimum {
        auto f1 = [&](double t) {
            for (std::size_t i = 0; i < n; ++i) probe[i] = x[i] + t * dir[i];
            return eval(probe);
        };
        const LineMinimum lm = bracket_and_brent(f1, 0.0, 1.0, options.line_tolerance);
        for (std::size_t i = 0; i < n; ++i) x[i] += lm.t * dir[i];
        return lm;
    };

    try {
        fret = eval(x);
        if (!std::isfinite(fret)) {
            throw NumericError("objective returned a non-finite value at the start point", 0.0);
        }
        res.history.push_back(fret);
        for (int iter = 0; iter < options.max_iterations; ++iter) {
            const double fp = fret;
            const std::vector<double> x_start = x;
            double biggest_drop = 0.0;
            int ibig = -1;
            for (std::size_t i = 0; i < n; ++i) {
                const double before = fret;
                fret = line_search(dirs[i]).value;
                if (before - fret > biggest_drop) {
                    biggest_drop = before - fret;
                    ibig = static_cast<int>(i);
                }
            }
            std::vector<double> disp(n);
            double disp_norm2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                disp[i] = x[i] - x_start[i];
                disp_norm2 += disp[i] * disp[i];
            }
            if (ibig >= 0 && disp_norm2 > 0.0) {
                const LineMinimum lm = line_search(disp);
                fret = lm.value;
                if (lm.t != 0.0) {
                    for (double& v : disp) v *= lm.t;
                }
                dirs[static_cast<std::size_t>(ibig)] = disp;
            }
            ++res.iterations;
            res.history.push_back(fret);
            if (2.0 * (fp - fret) <= options.cost_tolerance * (std::abs(fp) + std::abs(fret)) + kTiny) {
                res.converged = true;
                break;
            }
            if ((iter + 1) % reset_period == 0) reset_dirs();
        }
    } catch (const BudgetExhausted&) {
        res.converged = false;
    }
    res.best_params = std::move(x);
    res.best_cost = res.history.empty() ? fret : res.history.back();
    res.cost_evaluations = evals;
    return res;
}

}  // namespace qcreg
