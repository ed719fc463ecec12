#include "lcoc/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "lcoc/errors.hpp"

namespace lcoc {

namespace {

// d/dx max(x,0)^alpha, floored where the exponent alpha-1 would blow up.
double pow_plus_derivative(double x, double alpha) {
    if (alpha < 1.0 || x <= 0.0) {
        return alpha * std::pow(std::max(x, kPowFloor), alpha - 1.0);
    }
    return alpha * std::pow(x, alpha - 1.0);
}

void check_velocity(const VelocityField& v, const SpaceTimeGrid& grid, const char* name) {
    require_on_grid(v.x, grid, name);
    require_on_grid(v.y, grid, name);
    if (!v.x.all_finite() || !v.y.all_finite()) {
        throw ValidationError(std::string(name) + ": non-finite velocity");
    }
}

void check_data(const ScalarField& f0, const Frames& fb, const SpaceTimeGrid& grid,
                const char* name) {
    require_on_grid(f0, grid, name);
    require_frames(fb, grid, name);
    if (!f0.all_finite()) throw ValidationError(std::string(name) + ": non-finite initial data");
    for (const auto& frame : fb) {
        if (!frame.all_finite()) {
            throw ValidationError(std::string(name) + ": non-finite boundary data");
        }
    }
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            if (grid.is_boundary(i, j) && std::abs(f0(i, j) - fb[0](i, j)) > 1e-10) {
                throw ValidationError(std::string(name) +
                                      ": initial data disagrees with boundary data at node (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

}  // namespace

void validate_params(const ModelParams& params, const SpaceTimeGrid& grid) {
    if (!(params.d1 > 0.0)) throw ValidationError("model.d1: must be > 0");
    if (!(params.d2 > 0.0)) throw ValidationError("model.d2: must be > 0");
    if (!(params.capacity > 0.0)) throw ValidationError("model.capacity: must be > 0");
    if (!(params.alpha > 0.0)) throw ValidationError("model.alpha: must be > 0");
    if (!(params.k >= 0.0)) throw ValidationError("model.k: must be >= 0");
    check_velocity(params.vel1, grid, "model.advection (species 1)");
    check_velocity(params.vel2, grid, "model.advection (species 2)");
    check_data(params.f0_1, params.fb_1, grid, "model.f1");
    check_data(params.f0_2, params.fb_2, grid, "model.f2");
    validate_modes(params.modes, grid);
}

VelocityField zero_velocity(const SpaceTimeGrid& grid) {
    return {ScalarField(grid), ScalarField(grid)};
}

VelocityField rotation_velocity(const SpaceTimeGrid& grid, double omega) {
    const double cx = 0.5 * grid.lx();
    const double cy = 0.5 * grid.ly();
    return {sample_field(grid, [&](double, double y) { return -omega * (y - cy); }),
            sample_field(grid, [&](double x, double) { return omega * (x - cx); })};
}

double pow_plus(double x, double alpha) { return std::pow(std::max(x, 0.0), alpha); }

ReactionValues reaction_terms(double f1, double f2, double beta1, double beta2, double s1,
                              double s2, const ModelParams& params) {
    assert(!std::isnan(f1) && !std::isnan(f2) && !std::isnan(beta1) && !std::isnan(beta2) &&
           !std::isnan(s1) && !std::isnan(s2));
    const double logistic = 1.0 - (f1 + f2) / params.capacity;
    return {
        beta1 * f1 * logistic,
        beta2 * f2 * logistic,
        params.k * (s1 * pow_plus(f1, params.alpha) * f2 - s2 * f1 * pow_plus(f2, params.alpha)),
    };
}

ReactionJacobian reaction_jacobian(double f1, double f2, double beta1, double beta2, double s1,
                                   double s2, const ModelParams& params) {
    const double n = params.capacity;
    const double a = params.alpha;
    const double k = params.k;
    const double logistic = 1.0 - (f1 + f2) / n;
    const double p1 = pow_plus(f1, a);
    const double p2 = pow_plus(f2, a);
    ReactionJacobian jac{};
    jac.dr1_df1 = beta1 * (logistic - f1 / n);
    jac.dr1_df2 = -beta1 * f1 / n;
    jac.dr2_df1 = -beta2 * f2 / n;
    jac.dr2_df2 = beta2 * (logistic - f2 / n);
    jac.dr_df1 = k * (s1 * pow_plus_derivative(f1, a) * f2 - s2 * p2);
    jac.dr_df2 = k * (s1 * p1 - s2 * f1 * pow_plus_derivative(f2, a));
    jac.dr1_dbeta1 = f1 * logistic;
    jac.dr2_dbeta2 = f2 * logistic;
    jac.dr_ds1 = k * p1 * f2;
    jac.dr_ds2 = -k * f1 * p2;
    return jac;
}

}  // namespace lcoc
