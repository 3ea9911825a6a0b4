#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vspline/fitted_spline.hpp"
#include "vspline/observation_set.hpp"
#include "vspline/selection.hpp"

namespace vspline::signals {

enum class TestSignal { Blocks, Bumps, HeaviSine, Doppler };

TestSignal signal_from_name(const std::string& name);
std::string signal_name(TestSignal signal);

// Standard test-signal value; t must lie in [0, 1].
double eval_signal(TestSignal signal, double t);

struct SamplingSpec {
    enum class Mode { Full, RegularDaughter, IrregularDaughter };
    Mode mode = Mode::Full;
    int keep = 0;  // IrregularDaughter only

    static SamplingSpec full() { return {Mode::Full, 0}; }
    static SamplingSpec regular_daughter() { return {Mode::RegularDaughter, 0}; }
    static SamplingSpec irregular_daughter(int keep) { return {Mode::IrregularDaughter, keep}; }
};

struct SimulatedTrajectory {
    TimeGrid grid;
    Eigen::VectorXd true_g;  // signal values, used as velocities
    Eigen::VectorXd true_f;  // trapezoid-integrated positions, f(t_1) = 0
    Eigen::VectorXd y, v;    // noisy observations
    double snr = 0.0;
    std::uint64_t seed = 0;

    ObservationSet observations() const;
};

// Simulated trajectory on a uniform grid over [0, 1]. The signal is treated
// as the velocity; positions follow the trapezoid recursion. Noise standard
// deviations are sd(f)/snr and sd(g)/snr (snr = +inf turns noise off). The
// daughter modes build the length-n mother first and subsample it, so both
// daughters of one (signal, snr, seed) triple share a noise draw. Noise and
// subsampling use substreams derived from (seed, signal, snr), making output
// byte-identical for equal inputs.
SimulatedTrajectory simulate(TestSignal signal, int n, double snr, std::uint64_t seed,
                             const SamplingSpec& sampling = SamplingSpec::full());

// Mean squared error against the noiseless positions at the knots.
double tmse(const Eigen::VectorXd& true_f, const FittedVSpline& fitted);

// sd(fitted values) / sd(fitted values - y).
double retrieved_snr(const FittedVSpline& fitted, const Eigen::VectorXd& y);

enum class Method { Adaptive, AdaptiveGammaZero, NonAdaptive };

Method method_from_name(const std::string& name);
std::string method_name(Method method);

struct BenchmarkCell {
    TestSignal signal;
    double snr = 0.0;
    Method method;
    std::uint64_t seed = 0;
    double tmse = std::numeric_limits<double>::quiet_NaN();
    double retrieved_snr = std::numeric_limits<double>::quiet_NaN();
    double sel_gamma = std::numeric_limits<double>::quiet_NaN();
    double sel_param = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    std::string note;
};

struct BenchmarkConfig {
    std::vector<TestSignal> signals;
    std::vector<double> snrs;
    std::vector<Method> methods;
    std::vector<std::uint64_t> seeds;
    int n = 1024;
    SamplingSpec sampling = SamplingSpec::full();
    bool refine = true;
    int jobs = 1;
};

// One parameter search + fit per (signal, snr, method, seed) cell; failures
// are recorded in the row instead of aborting the run. Cell order and values
// are independent of the job count.
std::vector<BenchmarkCell> run_benchmark(const BenchmarkConfig& config);

}  // namespace vspline::signals
