#include "leocov/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace leocov {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule, positive half.
// Nodes 1, 3, 5, 7 carry the embedded Gauss rule.
constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

double magnitude(double v) { return std::abs(v); }
double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <typename T>
struct Panel {
    double a, b;
    T value;
    double error;
};

template <typename T>
Panel<T> kronrod_panel(const std::function<T(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    T samples[15];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        samples[2 * i] = f(mid - dx);
        samples[2 * i + 1] = f(mid + dx);
    }
    samples[14] = f(mid);

    T kronrod{};
    T gauss{};
    double resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        const T pair = samples[2 * i] + samples[2 * i + 1];
        kronrod += kKronrodWeights[i] * pair;
        resabs += kKronrodWeights[i] * (magnitude(samples[2 * i]) + magnitude(samples[2 * i + 1]));
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    kronrod += kKronrodWeights[7] * samples[14];
    gauss += kGaussWeights[3] * samples[14];
    resabs += kKronrodWeights[7] * magnitude(samples[14]);

    const T mean = kronrod * 0.5;
    double resasc = kKronrodWeights[7] * magnitude(samples[14] - mean);
    for (int i = 0; i < 7; ++i) {
        resasc += kKronrodWeights[i] *
                  (magnitude(samples[2 * i] - mean) + magnitude(samples[2 * i + 1] - mean));
    }

    const T value = kronrod * half;
    double err = magnitude(kronrod - gauss) * half;
    resasc *= half;
    resabs *= half;
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    if (floor > 0.0) err = std::max(err, floor);
    return Panel<T>{a, b, value, err};
}

template <typename T>
struct AdaptiveOutcome {
    T value;
    double error;
    bool converged;
};

template <typename T>
AdaptiveOutcome<T> adaptive_core(const std::function<T(double)>& f, double a, double b,
                                 const QuadratureSpec& spec) {
    auto cmp = [](const Panel<T>& lhs, const Panel<T>& rhs) { return lhs.error < rhs.error; };
    std::priority_queue<Panel<T>, std::vector<Panel<T>>, decltype(cmp)> queue(cmp);
    Panel<T> first = kronrod_panel(f, a, b);
    T total_value = first.value;
    double total_error = first.error;
    queue.push(first);
    int used = 0;
    while (used < spec.max_subdivisions && !queue.empty()) {
        const double bound = std::max(spec.abs_tol, spec.rel_tol * magnitude(total_value));
        if (total_error <= bound) break;
        Panel<T> worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) continue; // at floating resolution
        Panel<T> left = kronrod_panel(f, worst.a, mid);
        Panel<T> right = kronrod_panel(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++used;
    }
    const double bound = std::max(spec.abs_tol, spec.rel_tol * magnitude(total_value));
    return AdaptiveOutcome<T>{total_value, total_error, total_error <= bound};
}

} // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
    }
    if (max_subdivisions < 1) {
        throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    }
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (!(a < b)) {
        if (a == b) return {0.0, 0.0};
        throw std::invalid_argument("integrate_adaptive: requires a < b");
    }
    auto out = adaptive_core<double>(f, a, b, spec);
    if (!out.converged) {
        throw QuadratureFailure("integrate_adaptive: no convergence after max subdivisions",
                                out.value, out.error);
    }
    return {out.value, out.error};
}

ComplexQuadratureResult integrate_adaptive_complex(
    const std::function<std::complex<double>(double)>& f,
    double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (!(a < b)) {
        if (a == b) return {{0.0, 0.0}, 0.0};
        throw std::invalid_argument("integrate_adaptive_complex: requires a < b");
    }
    auto out = adaptive_core<std::complex<double>>(f, a, b, spec);
    if (!out.converged) {
        throw QuadratureFailure("integrate_adaptive_complex: no convergence after max subdivisions",
                                out.value, out.error);
    }
    return {out.value, out.error};
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f,
                                       double a, const QuadratureSpec& spec) {
    auto mapped = [&](double t) {
        const double one_minus = 1.0 - t;
        const double x = a + t / one_minus;
        return f(x) / (one_minus * one_minus);
    };
    return integrate_adaptive(mapped, 0.0, 1.0, spec);
}

namespace {

// Iterated Aitken delta-squared extrapolation of a partial-sum tail. Depth is
// limited and the value is taken from the most settled level (smallest last
// step) rather than the deepest, which keeps extrapolation noise from
// masquerading as a limit.
double aitken_limit(const std::vector<double>& sums) {
    std::vector<double> row(sums);
    double best = row.back();
    double best_step = row.size() >= 2
                           ? std::abs(row[row.size() - 1] - row[row.size() - 2])
                           : std::numeric_limits<double>::infinity();
    for (int depth = 0; depth < 8 && row.size() >= 3; ++depth) {
        std::vector<double> next;
        next.reserve(row.size() - 2);
        for (size_t i = 0; i + 2 < row.size(); ++i) {
            const double d1 = row[i + 1] - row[i];
            const double d2 = row[i + 2] - 2.0 * row[i + 1] + row[i];
            if (std::abs(d2) < 1e-300) {
                next.push_back(row[i + 2]);
            } else {
                next.push_back(row[i] - d1 * d1 / d2);
            }
        }
        if (next.empty()) break;
        if (next.size() >= 2) {
            const double step = std::abs(next[next.size() - 1] - next[next.size() - 2]);
            if (step <= best_step) {
                best_step = step;
                best = next.back();
            }
        } else if (best_step == std::numeric_limits<double>::infinity()) {
            best = next.back();
        }
        row.swap(next);
    }
    return best;
}

constexpr int kSpentPanelsToStop = 50;
constexpr int kMaxPanels = 200000;
constexpr int kAitkenWindow = 24;

// Integral of `integrand` over [0, inf) when it oscillates with the given
// half-period. One Kronrod-panelled half-period at a time; the partial sums
// are Aitken-accelerated, which settles the slowly decaying tails long before
// the raw panels die out.
double oscillatory_sum(const std::function<double(double)>& integrand,
                       double halfperiod, const QuadratureSpec& spec) {
    QuadratureSpec panel_spec = spec;
    panel_spec.abs_tol = std::max(spec.abs_tol * 1e-3, 1e-300);
    panel_spec.rel_tol = std::min(spec.rel_tol, 1e-8);
    panel_spec.max_subdivisions = 60;

    std::vector<double> sums;
    sums.reserve(kAitkenWindow + 1);
    double running = 0.0;
    double last_piece = 0.0;
    double accel_prev = 0.0;
    int accel_stable = 0;
    int spent = 0;
    const double spent_bound = spec.abs_tol * spec.omega_growth_check;

    for (int k = 0; k < kMaxPanels; ++k) {
        const double lo = k * halfperiod;
        if (spec.omega_truncation > 0.0 && lo >= spec.omega_truncation) {
            const double accel_gap =
                sums.size() < 3 ? 0.0 : std::abs(running - aitken_limit(sums));
            const double tail = std::max(accel_gap, std::abs(last_piece));
            if (tail > spec.abs_tol) {
                throw QuadratureFailure(
                    "oscillatory integral: truncation cap reached before convergence",
                    running, tail);
            }
            return running;
        }
        const double piece =
            adaptive_core<double>(integrand, lo, lo + halfperiod, panel_spec).value;
        last_piece = piece;
        running += piece;
        sums.push_back(running);
        if (sums.size() > kAitkenWindow) sums.erase(sums.begin());

        if (std::abs(piece) < spent_bound) {
            if (++spent >= kSpentPanelsToStop) return running;
        } else {
            spent = 0;
        }

        if (k >= 8) {
            const double accel = aitken_limit(sums);
            const double gate = std::max(spec.abs_tol, spec.rel_tol * std::abs(accel));
            if (std::abs(accel - accel_prev) < gate) {
                // Beat patterns between the window and the transform's own
                // phase settle slowly; demand longer agreement early on.
                const int needed = k < 64 ? 6 : 3;
                if (++accel_stable >= needed) return accel;
            } else {
                accel_stable = 0;
            }
            accel_prev = accel;
        }
    }
    throw QuadratureFailure("oscillatory integral: panel budget exhausted",
                            running, std::abs(running - aitken_limit(sums)));
}

} // namespace

double integrate_gauss_composite(const std::function<double(double)>& f,
                                 double a, double b, int segments) {
    // 32-point Gauss-Legendre rule, positive half of the symmetric table.
    static constexpr double kNodes[16][2] = {
        {4.8307665687738310e-02, 9.6540088514727812e-02},
        {1.4447196158279649e-01, 9.5638720079274833e-02},
        {2.3928736225213706e-01, 9.3844399080804566e-02},
        {3.3186860228212767e-01, 9.1173878695763863e-02},
        {4.2135127613063533e-01, 8.7652093004403908e-02},
        {5.0689990893222936e-01, 8.3311924226946846e-02},
        {5.8771575724076230e-01, 7.8193895787070311e-02},
        {6.6304426693021523e-01, 7.2345794108848449e-02},
        {7.3218211874028971e-01, 6.5822222776361752e-02},
        {7.9448379596794239e-01, 5.8684093478535704e-02},
        {8.4936761373256997e-01, 5.0998059262376244e-02},
        {8.9632115576605220e-01, 4.2835898022226426e-02},
        {9.3490607593773967e-01, 3.4273862913021626e-02},
        {9.6476225558750639e-01, 2.5392065309262427e-02},
        {9.8561151154526838e-01, 1.6274394730905965e-02},
        {9.9726386184948157e-01, 7.0186100094692984e-03},
    };
    if (!(a < b)) return 0.0;
    if (segments < 1) segments = 1;
    double total = 0.0;
    const double width = (b - a) / segments;
    for (int seg = 0; seg < segments; ++seg) {
        const double mid = a + (seg + 0.5) * width;
        const double half = 0.5 * width;
        double acc = 0.0;
        for (const auto& nw : kNodes) {
            acc += nw[1] * (f(mid - half * nw[0]) + f(mid + half * nw[0]));
        }
        total += acc * half;
    }
    return total;
}

double interval_prob_from_laplace(
    const std::function<std::complex<double>(double)>& laplace_at_jw,
    double x, const QuadratureSpec& spec) {
    spec.validate();
    if (!(x > 0.0)) return 0.0;
    auto integrand = [&](double w) {
        const double xw = x * w;
        // sin(xw)/w with the removable singularity expanded near zero.
        const double sinc = (std::abs(xw) < 1e-4)
                                ? x * (1.0 - xw * xw / 6.0)
                                : std::sin(xw) / w;
        return laplace_at_jw(w).real() * sinc;
    };
    const double total = oscillatory_sum(integrand, std::numbers::pi / x, spec);
    return std::clamp(total * 2.0 / std::numbers::pi, 0.0, 1.0);
}

double gil_pelaez_cdf(const std::function<std::complex<double>(double)>& laplace_at_jw,
                      double x, const QuadratureSpec& spec) {
    spec.validate();
    if (!(x > 0.0)) return 0.0;
    auto integrand = [&](double w) {
        // E[e^{jwI}] = conj(L(jw)) for a real random variable.
        const std::complex<double> phi = std::conj(laplace_at_jw(w));
        const std::complex<double> rot = std::polar(1.0, -w * x);
        return (rot * phi).imag() / w;
    };
    const double total = oscillatory_sum(integrand, std::numbers::pi / x, spec);
    return std::clamp(0.5 - total / std::numbers::pi, 0.0, 1.0);
}

} // namespace leocov
