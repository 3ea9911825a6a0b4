#pragma once

#include <limits>
#include <string>
#include <vector>

#include "vspline/penalty.hpp"
#include "vspline/solver.hpp"

namespace vspline {

// Leave-one-out cross-validation score. per_point_terms holds the squared
// deleted residual per knot (squared Euclidean norm for d > 1), NaN at
// degenerate points, which are excluded from the mean.
struct CvScore {
    double value = 0.0;
    Eigen::VectorXd per_point_terms;
    std::vector<int> degenerate_points;
};

// Closed-form score from one full fit plus smoother diagonals.
CvScore cv_score(const ObservationSet& obs, double gamma, const std::vector<double>& lambdas);

// Brute-force score: refits on the n-1 remaining knots for every deletion.
// The deleted objective keeps the full-data 1/n weighting, so the reduced
// system is assembled with penalty scale n. Deleting an interior knot merges
// its two intervals and keeps the left interval's lambda.
CvScore cv_oracle(const ObservationSet& obs, double gamma, const std::vector<double>& lambdas);

// Generalized cross-validation for correlated-error fits; diagonal precision
// matrices only.
double gcv_score(const ObservationSet& obs, double gamma, const std::vector<double>& lambdas,
                 const PrecisionPair& weights);

struct SearchSpec {
    PenaltySpec::Family family = PenaltySpec::Family::Constant;
    std::vector<double> gamma_grid;   // nonnegative; 0 runs the velocity-free fit
    std::vector<double> param_grid;   // lambda0 or eta candidates, positive
    std::vector<double> param2_grid;  // boom families; defaults to param_grid
    bool refine = false;              // Nelder-Mead polish in log space
    int jobs = 1;

    static std::vector<double> log_grid(double exp_lo, double exp_hi, int count);
    static SearchSpec defaults(PenaltySpec::Family family);
};

struct SearchCandidate {
    double gamma = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double score = std::numeric_limits<double>::quiet_NaN();
    int degenerate_count = 0;
    bool skipped = false;
    std::string note;
};

struct SearchResult {
    PenaltySpec best;
    double gamma = 0.0;
    double score = std::numeric_limits<double>::quiet_NaN();
    std::vector<SearchCandidate> trace;  // deterministic grid order
    bool refined = false;
};

// Exhaustive grid evaluation with deterministic tie-breaking (smaller gamma,
// then smaller parameters), optionally polished by Nelder-Mead.
SearchResult select_parameters(const ObservationSet& obs, const SearchSpec& spec,
                               const std::vector<int>* boom = nullptr);

}  // namespace vspline
