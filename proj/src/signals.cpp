#include "vspline/signals.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include "vspline/parallel.hpp"
#include "vspline/rng.hpp"

namespace vspline::signals {

namespace {

// Shared knot positions of the piecewise signals.
constexpr double kKnots[11] = {0.1, 0.13, 0.15, 0.23, 0.25, 0.4,
                               0.44, 0.65, 0.76, 0.78, 0.81};
constexpr double kBlockHeights[11] = {4.0, -5.0, 3.0, -4.0, 5.0, -4.2,
                                      2.1, 4.3, -3.1, 2.1, -4.2};
constexpr double kBumpHeights[11] = {4.0, 5.0, 3.0, 4.0, 5.0, 4.2,
                                     2.1, 4.3, 3.1, 5.1, 4.2};
constexpr double kBumpWidths[11] = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                    0.01, 0.01, 0.005, 0.008, 0.005};

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double sample_sd(const Eigen::VectorXd& x) {
    const double mean = x.mean();
    return std::sqrt((x.array() - mean).square().sum() / (x.size() - 1));
}

std::uint64_t snr_bits(double snr) {
    std::uint64_t bits;
    std::memcpy(&bits, &snr, sizeof bits);
    return bits;
}

std::uint64_t signal_tag(TestSignal signal) { return static_cast<std::uint64_t>(signal) + 1; }

Eigen::VectorXd take(const Eigen::VectorXd& x, const std::vector<int>& idx) {
    Eigen::VectorXd out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = x[idx[i]];
    return out;
}

}  // namespace

TestSignal signal_from_name(const std::string& name) {
    if (name == "Blocks") return TestSignal::Blocks;
    if (name == "Bumps") return TestSignal::Bumps;
    if (name == "HeaviSine") return TestSignal::HeaviSine;
    if (name == "Doppler") return TestSignal::Doppler;
    throw std::invalid_argument("unknown signal '" + name + "'");
}

std::string signal_name(TestSignal signal) {
    switch (signal) {
    case TestSignal::Blocks: return "Blocks";
    case TestSignal::Bumps: return "Bumps";
    case TestSignal::HeaviSine: return "HeaviSine";
    case TestSignal::Doppler: return "Doppler";
    }
    throw std::invalid_argument("unknown signal");
}

double eval_signal(TestSignal signal, double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::domain_error("eval_signal: t must lie in [0, 1]");
    switch (signal) {
    case TestSignal::Blocks: {
        double value = 0.0;
        for (int j = 0; j < 11; ++j) value += kBlockHeights[j] * (1.0 + sign(t - kKnots[j])) / 2.0;
        return value;
    }
    case TestSignal::Bumps: {
        double value = 0.0;
        for (int j = 0; j < 11; ++j) {
            const double u = std::abs((t - kKnots[j]) / kBumpWidths[j]);
            const double k = 1.0 + u;
            value += kBumpHeights[j] / (k * k * k * k);
        }
        return value;
    }
    case TestSignal::HeaviSine:
        return 4.0 * std::sin(4.0 * std::numbers::pi * t) - sign(t - 0.3) - sign(0.72 - t);
    case TestSignal::Doppler:
        return std::sqrt(t * (1.0 - t)) *
               std::sin(2.0 * std::numbers::pi * 1.05 / (t + 0.05));
    }
    throw std::invalid_argument("unknown signal");
}

ObservationSet SimulatedTrajectory::observations() const {
    return ObservationSet(grid, y, v);
}

SimulatedTrajectory simulate(TestSignal signal, int n, double snr, std::uint64_t seed,
                             const SamplingSpec& sampling) {
    if (n < 2) throw std::invalid_argument("simulate: n must be at least 2");
    if (!(snr > 0.0)) throw std::invalid_argument("simulate: snr must be positive");

    Eigen::VectorXd t(n), g(n), f(n);
    for (int i = 0; i < n; ++i) {
        t[i] = i + 1 == n ? 1.0 : static_cast<double>(i) / (n - 1);
        g[i] = eval_signal(signal, t[i]);
    }
    f[0] = 0.0;
    for (int i = 0; i + 1 < n; ++i)
        f[i + 1] = f[i] + 0.5 * (g[i] + g[i + 1]) * (t[i + 1] - t[i]);

    Eigen::VectorXd y = f, v = g;
    if (std::isfinite(snr)) {
        const double sd_f = sample_sd(f) / snr;
        const double sd_g = sample_sd(g) / snr;
        Rng pos_noise(derive_seed({seed, signal_tag(signal), snr_bits(snr), 1}));
        Rng vel_noise(derive_seed({seed, signal_tag(signal), snr_bits(snr), 2}));
        for (int i = 0; i < n; ++i) {
            y[i] += sd_f * pos_noise.normal();
            v[i] += sd_g * vel_noise.normal();
        }
    }

    std::vector<int> idx;
    switch (sampling.mode) {
    case SamplingSpec::Mode::Full:
        idx.resize(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        break;
    case SamplingSpec::Mode::RegularDaughter:
        for (int i = 0; i < n; i += 2) idx.push_back(i);
        break;
    case SamplingSpec::Mode::IrregularDaughter: {
        const int keep = sampling.keep;
        if (keep < 2 || keep > n)
            throw std::invalid_argument("simulate: irregular daughter size out of range");
        // Endpoints always survive so the fitted span matches the mother's.
        Rng sub(derive_seed({seed, signal_tag(signal), snr_bits(snr), 3}));
        const std::vector<int> interior = sub.sample_without_replacement(n - 2, keep - 2);
        idx.push_back(0);
        for (int i : interior) idx.push_back(i + 1);
        idx.push_back(n - 1);
        std::sort(idx.begin(), idx.end());
        break;
    }
    }

    std::vector<double> times(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) times[i] = t[idx[i]];
    return {TimeGrid(std::move(times)), take(g, idx), take(f, idx),
            take(y, idx),              take(v, idx), snr,
            seed};
}

double tmse(const Eigen::VectorXd& true_f, const FittedVSpline& fitted) {
    if (fitted.dims() != 1)
        throw std::invalid_argument("tmse: expects a one-dimensional fit");
    const int n = fitted.grid.size();
    if (true_f.size() != n) throw std::invalid_argument("tmse: grid mismatch");
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = true_f[i] - fitted.theta(2 * i, 0);
        acc += e * e;
    }
    return acc / n;
}

double retrieved_snr(const FittedVSpline& fitted, const Eigen::VectorXd& y) {
    if (fitted.dims() != 1)
        throw std::invalid_argument("retrieved_snr: expects a one-dimensional fit");
    const int n = fitted.grid.size();
    if (y.size() != n) throw std::invalid_argument("retrieved_snr: grid mismatch");
    Eigen::VectorXd fhat(n);
    for (int i = 0; i < n; ++i) fhat[i] = fitted.theta(2 * i, 0);
    const double sd_fit = sample_sd(fhat);
    const double sd_res = sample_sd(fhat - y);
    if (!(sd_res > 0.0)) throw std::runtime_error("retrieved SNR undefined: zero residual variance");
    return sd_fit / sd_res;
}

Method method_from_name(const std::string& name) {
    if (name == "adaptive") return Method::Adaptive;
    if (name == "gamma0") return Method::AdaptiveGammaZero;
    if (name == "nonadaptive") return Method::NonAdaptive;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::string method_name(Method method) {
    switch (method) {
    case Method::Adaptive: return "adaptive";
    case Method::AdaptiveGammaZero: return "gamma0";
    case Method::NonAdaptive: return "nonadaptive";
    }
    throw std::invalid_argument("unknown method");
}

namespace {

SearchSpec search_spec_for(Method method, bool refine) {
    SearchSpec spec = SearchSpec::defaults(method == Method::NonAdaptive
                                               ? PenaltySpec::Family::Constant
                                               : PenaltySpec::Family::Adaptive);
    if (method == Method::AdaptiveGammaZero) spec.gamma_grid = {0.0};
    spec.refine = refine;
    return spec;
}

}  // namespace

std::vector<BenchmarkCell> run_benchmark(const BenchmarkConfig& config) {
    if (config.signals.empty() || config.snrs.empty() || config.methods.empty() ||
        config.seeds.empty())
        throw std::invalid_argument("run_benchmark: signal/snr/method/seed sets must be nonempty");

    std::vector<BenchmarkCell> cells;
    for (TestSignal signal : config.signals)
        for (double snr : config.snrs)
            for (Method method : config.methods)
                for (std::uint64_t seed : config.seeds) {
                    BenchmarkCell cell;
                    cell.signal = signal;
                    cell.snr = snr;
                    cell.method = method;
                    cell.seed = seed;
                    cells.push_back(cell);
                }

    parallel_for(static_cast<int>(cells.size()), config.jobs, [&](int i) {
        BenchmarkCell& cell = cells[i];
        try {
            const SimulatedTrajectory sim =
                simulate(cell.signal, config.n, cell.snr, cell.seed, config.sampling);
            const ObservationSet obs = sim.observations();
            const SearchSpec spec = search_spec_for(cell.method, config.refine);
            const SearchResult search = select_parameters(obs, spec);
            const auto lambdas = interval_lambdas(search.best, obs);
            const FittedVSpline fitted = fit(obs, search.gamma, lambdas);
            cell.tmse = tmse(sim.true_f, fitted);
            cell.retrieved_snr = signals::retrieved_snr(fitted, sim.y);
            cell.sel_gamma = search.gamma;
            cell.sel_param = search.best.p1;
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.note = e.what();
        }
    });
    return cells;
}

}  // namespace vspline::signals
