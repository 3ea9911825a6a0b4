#include "vspline/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vspline {

namespace {

void check_positive(double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0)
        throw std::invalid_argument(std::string("PenaltySpec: ") + name + " must be positive");
}

double median(std::vector<double> values) {
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    return values[mid];
}

}  // namespace

PenaltySpec PenaltySpec::constant(double lambda0) {
    check_positive(lambda0, "lambda0");
    return {Family::Constant, lambda0, 1.0};
}

PenaltySpec PenaltySpec::adaptive(double eta) {
    check_positive(eta, "eta");
    return {Family::Adaptive, eta, 1.0};
}

PenaltySpec PenaltySpec::boom_constant(double lambda_down, double lambda_up) {
    check_positive(lambda_down, "lambda_d");
    check_positive(lambda_up, "lambda_u");
    return {Family::BoomConstant, lambda_down, lambda_up};
}

PenaltySpec PenaltySpec::boom_adaptive(double eta_down, double eta_up) {
    check_positive(eta_down, "eta_d");
    check_positive(eta_up, "eta_u");
    return {Family::BoomAdaptive, eta_down, eta_up};
}

std::string family_name(PenaltySpec::Family family) {
    switch (family) {
    case PenaltySpec::Family::Constant: return "constant";
    case PenaltySpec::Family::Adaptive: return "adaptive";
    case PenaltySpec::Family::BoomConstant: return "boom_constant";
    case PenaltySpec::Family::BoomAdaptive: return "boom_adaptive";
    }
    throw std::invalid_argument("unknown penalty family");
}

PenaltySpec::Family family_from_name(const std::string& name) {
    if (name == "constant") return PenaltySpec::Family::Constant;
    if (name == "adaptive") return PenaltySpec::Family::Adaptive;
    if (name == "boom_constant") return PenaltySpec::Family::BoomConstant;
    if (name == "boom_adaptive") return PenaltySpec::Family::BoomAdaptive;
    throw std::invalid_argument("unknown penalty family '" + name + "'");
}

nlohmann::json PenaltySpec::to_json() const {
    nlohmann::json j;
    j["family"] = family_name(family);
    switch (family) {
    case Family::Constant: j["lambda0"] = p1; break;
    case Family::Adaptive: j["eta"] = p1; break;
    case Family::BoomConstant:
        j["lambda_d"] = p1;
        j["lambda_u"] = p2;
        break;
    case Family::BoomAdaptive:
        j["eta_d"] = p1;
        j["eta_u"] = p2;
        break;
    }
    return j;
}

PenaltySpec PenaltySpec::from_json(const nlohmann::json& j) {
    const auto family = family_from_name(j.at("family").get<std::string>());
    switch (family) {
    case Family::Constant: return constant(j.at("lambda0").get<double>());
    case Family::Adaptive: return adaptive(j.at("eta").get<double>());
    case Family::BoomConstant:
        return boom_constant(j.at("lambda_d").get<double>(), j.at("lambda_u").get<double>());
    case Family::BoomAdaptive:
        return boom_adaptive(j.at("eta_d").get<double>(), j.at("eta_u").get<double>());
    }
    throw std::invalid_argument("unknown penalty family");
}

std::vector<double> interval_lambdas(const PenaltySpec& spec, const ObservationSet& obs,
                                     const std::vector<int>* boom) {
    const int m = obs.grid.interval_count();
    check_positive(spec.p1, "first parameter");
    if (spec.is_boom()) {
        check_positive(spec.p2, "second parameter");
        if (boom == nullptr || static_cast<int>(boom->size()) != m)
            throw std::invalid_argument(
                "interval_lambdas: boom penalty families require one boom flag per interval");
    }

    std::vector<double> vbar2(m, 0.0);
    double floor2 = 0.0;
    if (spec.is_adaptive()) {
        double mean_speed = 0.0;
        for (int i = 0; i < m; ++i) {
            const double vb =
                (obs.positions.row(i + 1) - obs.positions.row(i)).norm() / obs.grid.dt(i);
            vbar2[i] = vb * vb;
            mean_speed += vb;
        }
        mean_speed /= m;
        if (!(mean_speed > 0.0)) mean_speed = 1.0;
        const double eps_v = 1e-3 * mean_speed;
        floor2 = eps_v * eps_v;
    }

    std::vector<double> lambdas(m);
    for (int i = 0; i < m; ++i) {
        const double coef =
            spec.is_boom() ? ((*boom)[i] != 0 ? spec.p1 : spec.p2) : spec.p1;
        switch (spec.family) {
        case PenaltySpec::Family::Constant:
        case PenaltySpec::Family::BoomConstant:
            lambdas[i] = coef;
            break;
        case PenaltySpec::Family::Adaptive:
        case PenaltySpec::Family::BoomAdaptive:
            lambdas[i] = coef * obs.grid.dt(i) / std::max(vbar2[i], floor2);
            break;
        }
    }

    // Keep the ridge system well-conditioned when the families mix scales.
    const double cap = 1e12 * median(lambdas);
    for (double& lam : lambdas) lam = std::min(lam, cap);
    return lambdas;
}

BandedSymmetric assemble_omega(const TimeGrid& grid, const std::vector<double>& lambdas) {
    const int m = grid.interval_count();
    if (static_cast<int>(lambdas.size()) != m)
        throw std::invalid_argument("assemble_omega: lambda count must equal the interval count");

    BandedSymmetric omega(2 * grid.size(), 3);
    for (int i = 0; i < m; ++i) {
        const double lam = lambdas[i];
        if (!std::isfinite(lam) || lam <= 0.0)
            throw std::invalid_argument("assemble_omega: interval penalties must be positive");
        const double dt = grid.dt(i);
        const double c3 = lam * 12.0 / (dt * dt * dt);
        const double c2 = lam * 6.0 / (dt * dt);
        const double c1 = lam / dt;
        const int b = 2 * i;
        // Local block over (value_i, slope_i, value_{i+1}, slope_{i+1}).
        omega.at(b, b) += c3;
        omega.at(b + 1, b) += c2;
        omega.at(b + 2, b) += -c3;
        omega.at(b + 3, b) += c2;
        omega.at(b + 1, b + 1) += 4.0 * c1;
        omega.at(b + 2, b + 1) += -c2;
        omega.at(b + 3, b + 1) += 2.0 * c1;
        omega.at(b + 2, b + 2) += c3;
        omega.at(b + 3, b + 2) += -c2;
        omega.at(b + 3, b + 3) += 4.0 * c1;
    }
    return omega;
}

Discrepancy discrepancy(const ObservationSet& obs, int interval) {
    if (interval < 0 || interval >= obs.grid.interval_count())
        throw std::out_of_range("discrepancy: interval index out of range");
    if (obs.dims() != 1)
        throw std::invalid_argument("discrepancy: defined per dimension, pass a 1-d slice");
    const double dt = obs.grid.dt(interval);
    const double vbar = (obs.positions(interval + 1, 0) - obs.positions(interval, 0)) / dt;
    const double ep = obs.velocities(interval, 0) - vbar;
    const double em = obs.velocities(interval + 1, 0) - vbar;
    return {ep, em, ep * ep + ep * em + em * em};
}

}  // namespace vspline
