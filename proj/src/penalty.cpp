#include <bagus/penalty.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bagus {

std::string to_string(SpectralMode mode) {
    switch (mode) {
    case SpectralMode::spectral:
        return "spectral";
    case SpectralMode::maxelem:
        return "maxelem";
    }
    return "spectral";
}

SpectralMode spectral_mode_from_string(const std::string& s) {
    if (s == "spectral") {
        return SpectralMode::spectral;
    }
    if (s == "maxelem") {
        return SpectralMode::maxelem;
    }
    throw ParameterError("unknown spectral mode '" + s + "' (expected spectral or maxelem)");
}

void Hyperparameters::validate() const {
    std::ostringstream os;
    if (!(v0 > 0.0) || !std::isfinite(v0)) {
        os << "v0 must be positive and finite (got " << v0 << ")";
    } else if (!(v1 > v0) || !std::isfinite(v1)) {
        os << "v1 must exceed v0 (got v0=" << v0 << ", v1=" << v1 << ")";
    } else if (!(eta > 0.0 && eta < 1.0)) {
        os << "eta must lie in (0,1) (got " << eta << ")";
    } else if (!(tau >= 0.0) || !std::isfinite(tau)) {
        os << "tau must be non-negative (got " << tau << ")";
    } else if (B && !(*B > 0.0)) {
        os << "B must be positive (got " << *B << ")";
    } else if (!(inner_tol > 0.0) || !(outer_tol > 0.0)) {
        os << "tolerances must be positive";
    } else if (max_inner < 1 || max_outer < 1) {
        os << "iteration caps must be at least 1";
    } else {
        return;
    }
    throw ParameterError("hyperparameters: " + os.str());
}

double pen_ss(double theta, const Hyperparameters& h) {
    const double a = std::abs(theta);
    const double slab = std::log(h.eta / (2.0 * h.v1)) - a / h.v1;
    const double spike = std::log((1.0 - h.eta) / (2.0 * h.v0)) - a / h.v0;
    const double hi = std::max(slab, spike);
    const double lo = std::min(slab, spike);
    return -(hi + std::log1p(std::exp(lo - hi)));
}

double slab_log_odds(double theta, const Hyperparameters& h) {
    return std::log(h.v0 / h.v1) + std::log(h.eta / (1.0 - h.eta)) +
           std::abs(theta) * (1.0 / h.v0 - 1.0 / h.v1);
}

double stable_logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double pen_ss_grad(double theta, const Hyperparameters& h) {
    if (theta == 0.0) {
        throw ContractViolation("pen_ss_grad: undefined at 0, use subgradient_interval");
    }
    const double w = stable_logistic(slab_log_odds(theta, h));
    const double mag = w / h.v1 + (1.0 - w) / h.v0;
    return theta > 0.0 ? mag : -mag;
}

std::pair<double, double> subgradient_interval(const Hyperparameters& h) {
    const double w = stable_logistic(slab_log_odds(0.0, h));
    const double lambda0 = w / h.v1 + (1.0 - w) / h.v0;
    return {-lambda0, lambda0};
}

double pen_ss_hess(double theta, const Hyperparameters& h) {
    if (theta == 0.0) {
        throw ContractViolation("pen_ss_hess: undefined at 0");
    }
    const double k = 1.0 / h.v0 - 1.0 / h.v1;
    const double w = stable_logistic(slab_log_odds(theta, h));
    return -k * k * w * (1.0 - w);
}

double inclusion_prob(double theta, const Hyperparameters& h) {
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return std::clamp(stable_logistic(slab_log_odds(theta, h)), lo, hi);
}

double objective(const SymMatrix& theta, const SymMatrix& s, Index n, const Hyperparameters& h) {
    if (theta.dim() != s.dim()) {
        throw ShapeError("objective: theta and S differ in dimension");
    }
    const double logdet = log_det_spd(theta);
    const Matrix& t = theta.dense();
    const double trace = t.cwiseProduct(s.dense()).sum();
    double pen = 0.0;
    const Index p = theta.dim();
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < j; ++i) {
            pen += pen_ss(t(i, j), h);
        }
    }
    const double diag = h.tau * t.diagonal().sum();
    return 0.5 * static_cast<double>(n) * (trace - logdet) + pen + diag;
}

double convexity_cap(Index n, double v0) { return std::sqrt(2.0 * static_cast<double>(n) * v0); }

} // namespace bagus
