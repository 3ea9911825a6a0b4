#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vspline/banded.hpp"
#include "vspline/observation_set.hpp"

namespace vspline {

// Rule producing the per-interval acceleration penalties lambda_i. The
// adaptive families scale with dt_i / vbar_i^2 where vbar_i is the average
// velocity implied by the observed positions; the boom families switch the
// coefficient on a per-interval binary flag (1 = down, 0 = up).
struct PenaltySpec {
    enum class Family { Constant, Adaptive, BoomConstant, BoomAdaptive };

    Family family = Family::Constant;
    double p1 = 1.0;  // lambda0, eta, lambda_d or eta_d
    double p2 = 1.0;  // lambda_u or eta_u (boom families only)

    static PenaltySpec constant(double lambda0);
    static PenaltySpec adaptive(double eta);
    static PenaltySpec boom_constant(double lambda_down, double lambda_up);
    static PenaltySpec boom_adaptive(double eta_down, double eta_up);

    bool is_boom() const {
        return family == Family::BoomConstant || family == Family::BoomAdaptive;
    }
    bool is_adaptive() const {
        return family == Family::Adaptive || family == Family::BoomAdaptive;
    }

    nlohmann::json to_json() const;
    static PenaltySpec from_json(const nlohmann::json& j);
};

std::string family_name(PenaltySpec::Family family);
PenaltySpec::Family family_from_name(const std::string& name);

// Realized per-interval penalties (length n-1, all positive). Boom flags are
// required exactly for the boom families. Repeated positions would send the
// adaptive rule to infinity, so vbar^2 is floored at (1e-3 x mean track
// speed)^2; the result is additionally capped at 1e12 x median.
std::vector<double> interval_lambdas(const PenaltySpec& spec, const ObservationSet& obs,
                                     const std::vector<int>* boom = nullptr);

// Penalty matrix sum_i lambda_i Omega^(i) over the basis second derivatives;
// bandwidth 3 in the interleaved (value, slope) coefficient layout.
BandedSymmetric assemble_omega(const TimeGrid& grid, const std::vector<double>& lambdas);

struct Discrepancy {
    double eps_plus;   // v_i - vbar_i
    double eps_minus;  // v_{i+1} - vbar_i
    double squared;    // eps_plus^2 + eps_plus*eps_minus + eps_minus^2
};

// Velocity discrepancy of a one-dimensional observation set on interval i.
Discrepancy discrepancy(const ObservationSet& obs, int interval);

}  // namespace vspline
