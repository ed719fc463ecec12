#pragma once

#include "lcoc/grid.hpp"
#include "lcoc/noise.hpp"

namespace lcoc {

/// Coefficients and data of the two-language competition system.
struct ModelParams {
    double d1 = 0.01;
    double d2 = 0.01;
    VelocityField vel1;
    VelocityField vel2;
    double k = 0.05;
    double alpha = 1.31;
    double capacity = 10.0;
    NoiseModes modes;
    ScalarField f0_1;
    ScalarField f0_2;
    /// Dirichlet data per time level; only boundary nodes are read.
    Frames fb_1;
    Frames fb_2;
    /// Floor densities at zero after every step. Off by default.
    bool clip_negative = false;
};

/// Throws ValidationError when a coefficient is out of range, a field is on
/// the wrong mesh, or the initial and boundary data disagree at t = 0.
void validate_params(const ModelParams& params, const SpaceTimeGrid& grid);

/// Zero velocity on the given mesh.
VelocityField zero_velocity(const SpaceTimeGrid& grid);

/// Rigid rotation about the domain center with angular speed omega.
VelocityField rotation_velocity(const SpaceTimeGrid& grid, double omega);

struct ReactionValues {
    double r1;  // logistic growth of language 1
    double r2;  // logistic growth of language 2
    double r;   // interaction, enters language 1 with + and language 2 with -
};

struct ReactionJacobian {
    double dr1_df1;
    double dr1_df2;
    double dr2_df1;
    double dr2_df2;
    double dr_df1;
    double dr_df2;
    double dr1_dbeta1;
    double dr2_dbeta2;
    double dr_ds1;
    double dr_ds2;
};

/// Fractional power of the positive part, max(x,0)^alpha.
double pow_plus(double x, double alpha);

/// Floor used in the derivative of pow_plus when it would be singular.
inline constexpr double kPowFloor = 1e-8;

ReactionValues reaction_terms(double f1, double f2, double beta1, double beta2, double s1,
                              double s2, const ModelParams& params);

ReactionJacobian reaction_jacobian(double f1, double f2, double beta1, double beta2, double s1,
                                   double s2, const ModelParams& params);

}  // namespace lcoc
