#include "vspline/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "vspline/parallel.hpp"

namespace vspline {

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::min(jobs, count);
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

constexpr double kDegenerateDenominator = 1e-8;

double squared(double x) { return x * x; }

// Squared deleted residual of knot i via the explicit reduced refit. The
// deleted objective keeps the full-data 1/n weighting, hence penalty scale n;
// removing an interior knot merges its intervals under the left lambda.
double deleted_residual_term(const ObservationSet& obs, double gamma,
                             const std::vector<double>& lambdas, int skip) {
    const int n = obs.size();
    const int d = obs.dims();
    std::vector<double> times;
    times.reserve(n - 1);
    Eigen::MatrixXd y(n - 1, d), v(n - 1, d);
    int r = 0;
    for (int k = 0; k < n; ++k) {
        if (k == skip) continue;
        times.push_back(obs.grid.time(k));
        y.row(r) = obs.positions.row(k);
        v.row(r) = obs.velocities.row(k);
        ++r;
    }
    std::vector<double> lam = lambdas;
    lam.erase(lam.begin() + std::min(skip, n - 2));

    const ObservationSet reduced(TimeGrid(std::move(times)), std::move(y), std::move(v));
    const FittedVSpline refit = VsplineSystem(reduced, gamma, lam, n).fit();
    return (obs.positions.row(skip).transpose() - refit.evaluate(obs.grid.time(skip), 0))
        .squaredNorm();
}

}  // namespace

CvScore cv_score(const ObservationSet& obs, double gamma, const std::vector<double>& lambdas) {
    const VsplineSystem system(obs, gamma, lambdas, obs.size());
    const FittedVSpline fitted = system.fit();
    const SmootherDiagonals dg = system.diagonals();

    const int n = obs.size();
    const int d = obs.dims();
    CvScore out;
    out.per_point_terms = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());

    double acc = 0.0;
    int kept = 0;
    for (int i = 0; i < n; ++i) {
        const double dv = 1.0 - gamma * dg.v[i];
        bool degenerate = std::abs(dv) < 1e-12;
        double shrink = 0.0, denom = 0.0;
        if (!degenerate) {
            shrink = gamma * dg.t[i] / dv;
            denom = 1.0 - dg.s[i] - shrink * dg.u[i];
            degenerate = std::abs(denom) < kDegenerateDenominator;
        }
        if (degenerate) {
            out.degenerate_points.push_back(i);
            continue;
        }
        double term = 0.0;
        for (int a = 0; a < d; ++a) {
            const double ry = obs.positions(i, a) - fitted.theta(2 * i, a);
            const double rv = obs.velocities(i, a) - fitted.theta(2 * i + 1, a);
            term += squared((ry + shrink * rv) / denom);
        }
        out.per_point_terms[i] = term;
        acc += term;
        ++kept;
    }
    if (kept == 0) throw std::runtime_error("CV undefined at this parameter point");
    out.value = acc / kept;
    return out;
}

CvScore cv_oracle(const ObservationSet& obs, double gamma, const std::vector<double>& lambdas) {
    const int n = obs.size();
    if (n < 3) throw std::invalid_argument("cv_oracle: requires at least three knots");

    CvScore out;
    out.per_point_terms.resize(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double term = deleted_residual_term(obs, gamma, lambdas, i);
        out.per_point_terms[i] = term;
        acc += term;
    }
    out.value = acc / n;
    return out;
}

double gcv_score(const ObservationSet& obs, double gamma, const std::vector<double>& lambdas,
                 const PrecisionPair& weights) {
    if (!weights.is_diagonal())
        throw std::invalid_argument("gcv_score: only diagonal precision matrices are supported");
    const VsplineSystem system(obs, gamma, lambdas, obs.size(), &weights);
    const FittedVSpline fitted = system.fit();
    const SmootherDiagonals dg = system.diagonals();

    const int n = obs.size();
    const int d = obs.dims();
    const Eigen::VectorXd w1 = weights.w1.diagonal();
    const Eigen::VectorXd w2 = weights.w2.diagonal();

    const double ratio = gamma * dg.t.sum() / (n - gamma * dg.v.sum());
    double num = 0.0;
    for (int a = 0; a < d; ++a) {
        for (int i = 0; i < n; ++i) {
            const double ry = fitted.theta(2 * i, a) - obs.positions(i, a);
            const double rv = fitted.theta(2 * i + 1, a) - obs.velocities(i, a);
            num += w1[i] * ry * ry + 2.0 * ratio * std::sqrt(w1[i] * w2[i]) * ry * rv +
                   ratio * ratio * w2[i] * rv * rv;
        }
    }
    const double den = n - dg.s.sum() - ratio * dg.u.sum();
    return num / (den * den);
}

std::vector<double> SearchSpec::log_grid(double exp_lo, double exp_hi, int count) {
    if (count < 1) throw std::invalid_argument("log_grid: count must be positive");
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = std::pow(10.0, exp_lo);
        return grid;
    }
    for (int i = 0; i < count; ++i)
        grid[i] = std::pow(10.0, exp_lo + (exp_hi - exp_lo) * i / (count - 1));
    return grid;
}

SearchSpec SearchSpec::defaults(PenaltySpec::Family family) {
    SearchSpec spec;
    spec.family = family;
    spec.gamma_grid = log_grid(-3.0, 3.0, 13);
    spec.param_grid = log_grid(-8.0, 2.0, 21);
    if (family == PenaltySpec::Family::BoomConstant ||
        family == PenaltySpec::Family::BoomAdaptive)
        spec.param2_grid = spec.param_grid;
    return spec;
}

namespace {

PenaltySpec make_spec(PenaltySpec::Family family, double p1, double p2) {
    switch (family) {
    case PenaltySpec::Family::Constant: return PenaltySpec::constant(p1);
    case PenaltySpec::Family::Adaptive: return PenaltySpec::adaptive(p1);
    case PenaltySpec::Family::BoomConstant: return PenaltySpec::boom_constant(p1, p2);
    case PenaltySpec::Family::BoomAdaptive: return PenaltySpec::boom_adaptive(p1, p2);
    }
    throw std::invalid_argument("unknown penalty family");
}

void evaluate_candidate(const ObservationSet& obs, const std::vector<int>* boom,
                        SearchCandidate& cand, PenaltySpec::Family family) {
    try {
        const PenaltySpec spec = make_spec(family, cand.p1, cand.p2);
        const auto lambdas = interval_lambdas(spec, obs, boom);
        const CvScore cv = cv_score(obs, cand.gamma, lambdas);
        cand.degenerate_count = static_cast<int>(cv.degenerate_points.size());
        if (cand.degenerate_count * 10 > obs.size()) {
            cand.skipped = true;
            std::ostringstream msg;
            msg << "rejected: " << cand.degenerate_count << " of " << obs.size()
                << " leverages degenerate";
            cand.note = msg.str();
            return;
        }
        // Excluding degenerate points from the mean lets candidates hide
        // their worst knots behind machine-interpolated leverages; complete
        // those terms with the explicit deleted refit so candidates compete
        // on the full score.
        double score = 0.0;
        for (int i = 0; i < obs.size(); ++i) {
            const double term = cv.per_point_terms[i];
            score += std::isnan(term)
                         ? deleted_residual_term(obs, cand.gamma, lambdas, i)
                         : term;
        }
        score /= obs.size();
        if (!std::isfinite(score)) {
            cand.skipped = true;
            cand.note = "rejected: non-finite score";
            return;
        }
        cand.score = score;
    } catch (const std::exception& e) {
        cand.skipped = true;
        cand.note = e.what();
    }
}

// Nelder-Mead in R^m; deterministic, bounded by max_evals function calls.
std::pair<Eigen::VectorXd, double> nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& objective, const Eigen::VectorXd& x0,
    double step, int max_evals, double rel_tol) {
    const int m = static_cast<int>(x0.size());
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        const double value = objective(x);
        return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
    };

    std::vector<Eigen::VectorXd> simplex(m + 1, x0);
    std::vector<double> score(m + 1);
    for (int i = 1; i <= m; ++i) simplex[i][i - 1] += step;
    for (int i = 0; i <= m; ++i) score[i] = eval(simplex[i]);

    auto order = [&] {
        std::vector<int> idx(m + 1);
        for (int i = 0; i <= m; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return score[a] < score[b]; });
        std::vector<Eigen::VectorXd> sx(m + 1);
        std::vector<double> ss(m + 1);
        for (int i = 0; i <= m; ++i) {
            sx[i] = simplex[idx[i]];
            ss[i] = score[idx[i]];
        }
        simplex.swap(sx);
        score.swap(ss);
    };

    order();
    while (evals < max_evals) {
        const double spread = std::abs(score[m] - score[0]);
        if (spread <= rel_tol * std::max(std::abs(score[0]), 1e-300)) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(m);
        for (int i = 0; i < m; ++i) centroid += simplex[i];
        centroid /= m;

        const Eigen::VectorXd reflected = centroid + (centroid - simplex[m]);
        const double fr = eval(reflected);
        if (fr < score[0]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[m]);
            const double fe = eval(expanded);
            if (fe < fr) {
                simplex[m] = expanded;
                score[m] = fe;
            } else {
                simplex[m] = reflected;
                score[m] = fr;
            }
        } else if (fr < score[m - 1]) {
            simplex[m] = reflected;
            score[m] = fr;
        } else {
            const Eigen::VectorXd contracted = centroid + 0.5 * (simplex[m] - centroid);
            const double fc = eval(contracted);
            if (fc < score[m]) {
                simplex[m] = contracted;
                score[m] = fc;
            } else {
                for (int i = 1; i <= m; ++i) {
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
                    score[i] = eval(simplex[i]);
                }
            }
        }
        order();
    }
    return {simplex[0], score[0]};
}

}  // namespace

SearchResult select_parameters(const ObservationSet& obs, const SearchSpec& spec,
                               const std::vector<int>* boom) {
    if (spec.gamma_grid.empty() || spec.param_grid.empty())
        throw std::invalid_argument("select_parameters: grids must be nonempty");
    for (double g : spec.gamma_grid)
        if (!std::isfinite(g) || g < 0.0)
            throw std::invalid_argument("select_parameters: gamma candidates must be nonnegative");
    for (double p : spec.param_grid)
        if (!std::isfinite(p) || p <= 0.0)
            throw std::invalid_argument("select_parameters: penalty candidates must be positive");

    const bool boom_family = spec.family == PenaltySpec::Family::BoomConstant ||
                             spec.family == PenaltySpec::Family::BoomAdaptive;
    std::vector<double> gammas = spec.gamma_grid;
    std::vector<double> params = spec.param_grid;
    std::vector<double> params2 =
        boom_family ? (spec.param2_grid.empty() ? spec.param_grid : spec.param2_grid)
                    : std::vector<double>{1.0};
    std::sort(gammas.begin(), gammas.end());
    std::sort(params.begin(), params.end());
    std::sort(params2.begin(), params2.end());

    SearchResult result;
    result.trace.reserve(gammas.size() * params.size() * params2.size());
    for (double g : gammas)
        for (double p1 : params)
            for (double p2 : params2) {
                SearchCandidate cand;
                cand.gamma = g;
                cand.p1 = p1;
                cand.p2 = p2;
                result.trace.push_back(cand);
            }

    parallel_for(static_cast<int>(result.trace.size()), spec.jobs, [&](int i) {
        evaluate_candidate(obs, boom, result.trace[i], spec.family);
    });

    // Ascending grid order makes strict comparison resolve ties toward the
    // smaller gamma, then the smaller parameters.
    int best_index = -1;
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const SearchCandidate& cand = result.trace[i];
        if (cand.skipped) continue;
        if (best_index < 0 || cand.score < result.trace[best_index].score)
            best_index = static_cast<int>(i);
    }
    if (best_index < 0) {
        std::ostringstream msg;
        msg << "select_parameters: every candidate failed";
        for (std::size_t i = 0; i < result.trace.size() && i < 3; ++i)
            msg << "; [" << i << "] " << result.trace[i].note;
        throw std::runtime_error(msg.str());
    }

    const SearchCandidate& best = result.trace[best_index];
    result.best = make_spec(spec.family, best.p1, best.p2);
    result.gamma = best.gamma;
    result.score = best.score;

    if (spec.refine) {
        const bool free_gamma = gammas.size() > 1 && best.gamma > 0.0;
        std::vector<int> layout;  // 0 = gamma, 1 = p1, 2 = p2
        if (free_gamma) layout.push_back(0);
        layout.push_back(1);
        if (boom_family) layout.push_back(2);

        Eigen::VectorXd x0(layout.size());
        for (std::size_t k = 0; k < layout.size(); ++k)
            x0[k] = std::log(layout[k] == 0 ? best.gamma : (layout[k] == 1 ? best.p1 : best.p2));

        auto decode = [&](const Eigen::VectorXd& x, double& g, double& p1, double& p2) {
            g = best.gamma;
            p1 = best.p1;
            p2 = best.p2;
            for (std::size_t k = 0; k < layout.size(); ++k) {
                const double value = std::exp(x[k]);
                if (layout[k] == 0) g = value;
                else if (layout[k] == 1) p1 = value;
                else p2 = value;
            }
        };

        auto objective = [&](const Eigen::VectorXd& x) {
            SearchCandidate cand;
            decode(x, cand.gamma, cand.p1, cand.p2);
            evaluate_candidate(obs, boom, cand, spec.family);
            return cand.skipped ? std::numeric_limits<double>::infinity() : cand.score;
        };

        const auto [xopt, fopt] = nelder_mead(objective, x0, 0.5, 200, 1e-4);
        if (fopt < result.score) {
            double g, p1, p2;
            decode(xopt, g, p1, p2);
            result.best = make_spec(spec.family, p1, p2);
            result.gamma = g;
            result.score = fopt;
            result.refined = true;
        }
    }
    return result;
}

}  // namespace vspline
