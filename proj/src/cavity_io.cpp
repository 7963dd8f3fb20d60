#include "carving/cavity_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace carving {

namespace {

[[noreturn]] void reject(const std::string &what) {
    throw std::invalid_argument("invalid cavity parameters: " + what);
}

void check_fraction(const char *name, double value) {
    if (!std::isfinite(value) || value < -kSumTolerance || value > 1.0 + kSumTolerance) {
        std::ostringstream os;
        os << name << " = " << value << " is outside [0, 1]";
        reject(os.str());
    }
}

} // namespace

CavityParams validate_params(const CavityParams &params) {
    check_fraction("kappa1_frac", params.kappa1_frac);
    check_fraction("kappa2_frac", params.kappa2_frac);
    check_fraction("kappa_sc_frac", params.kappa_sc_frac);

    const double sum = params.kappa1_frac + params.kappa2_frac + params.kappa_sc_frac;
    if (std::abs(sum - 1.0) > kSumTolerance) {
        std::ostringstream os;
        os.precision(15);
        os << "fractions sum to " << sum << " (kappa1 + kappa2 + kappa_sc must equal 1)";
        reject(os.str());
    }
    if (!std::isfinite(params.cooperativity) || params.cooperativity <= 0.0) {
        std::ostringstream os;
        os << "cooperativity = " << params.cooperativity << " must be finite and > 0";
        reject(os.str());
    }
    if (!std::isfinite(params.detuning_frac)) {
        reject("detuning_frac must be finite");
    }
    if (!std::isfinite(params.kappa_over_gamma) || params.kappa_over_gamma <= 0.0) {
        reject("kappa_over_gamma must be finite and > 0");
    }

    CavityParams out = params;
    out.kappa1_frac = std::clamp(params.kappa1_frac, 0.0, 1.0) / sum;
    out.kappa2_frac = std::clamp(params.kappa2_frac, 0.0, 1.0) / sum;
    out.kappa_sc_frac = std::clamp(params.kappa_sc_frac, 0.0, 1.0) / sum;
    return out;
}

ScatterCoeffs coefficients(const CavityParams &params, int n_atoms) {
    if (n_atoms < 0) {
        throw std::invalid_argument("n_atoms must be nonnegative, got " + std::to_string(n_atoms));
    }
    const CavityParams p = validate_params(params);
    const double n = static_cast<double>(n_atoms);

    const double in_coupling = 2.0 * p.kappa1_frac;
    const double through_coupling = 2.0 * std::sqrt(p.kappa1_frac * p.kappa2_frac);

    ScatterCoeffs c;
    if (p.detuning_frac == 0.0) {
        const double denom = 1.0 + n * p.cooperativity;
        c.r = cplx(in_coupling / denom - 1.0, 0.0);
        c.t = cplx(through_coupling / denom, 0.0);
    } else {
        const cplx i(0.0, 1.0);
        const cplx cavity = 1.0 - 2.0 * i * p.detuning_frac;
        const cplx atom = 1.0 - 2.0 * i * p.detuning_frac * p.kappa_over_gamma;
        const cplx denom = cavity + n * p.cooperativity / atom;
        c.r = in_coupling / denom - 1.0;
        c.t = through_coupling / denom;
    }
    c.loss_prob = std::max(0.0, 1.0 - std::norm(c.r) - std::norm(c.t));
    return c;
}

CoeffSet coefficient_set(const CavityParams &params) {
    const CavityParams p = validate_params(params);
    return {coefficients(p, 0), coefficients(p, 1), coefficients(p, 2)};
}

CoeffSet ideal_coefficients() {
    CoeffSet set;
    set[0] = {cplx(0.0), cplx(1.0), 0.0};
    set[1] = {cplx(-1.0), cplx(0.0), 0.0};
    set[2] = {cplx(-1.0), cplx(0.0), 0.0};
    return set;
}

} // namespace carving
