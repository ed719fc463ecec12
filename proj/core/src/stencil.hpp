#pragma once

// Internal discrete operators shared by the forward and adjoint solvers.

#include "lcoc/grid.hpp"

namespace lcoc::detail {

/// Solves (I - dt D Lap) u = rhs at interior nodes with u fixed to Dirichlet
/// data on the boundary, by unpreconditioned conjugate gradients. The
/// interior operator is symmetric positive definite on a uniform mesh.
class DiffusionSolver {
public:
    static constexpr double kTolerance = 1e-10;

    DiffusionSolver(const SpaceTimeGrid& grid, double diffusion, double dt);

    /// `rhs` boundary entries are ignored; `boundary` interior entries are
    /// ignored. `step` is only used for error reporting.
    ScalarField solve(const ScalarField& rhs, const ScalarField& boundary, int step) const;

    int max_iterations() const { return max_iterations_; }

private:
    void apply(const ScalarField& u, ScalarField& out) const;

    SpaceTimeGrid grid_;
    double cx_;
    double cy_;
    int max_iterations_;
};

/// Per-step coefficients of the exponentially transformed operator for one
/// species: with phi = sum_i h_i B_i(t), the neighbour ratios exp(phi_nb -
/// phi) carry the corrected drift, and `potential` is the zeroth-order term
/// 1/2 sum h_i^2 - D exp(-phi) Lap exp(phi).
struct TransformedCoefficients {
    ScalarField east;
    ScalarField west;
    ScalarField north;
    ScalarField south;
    ScalarField potential;
};

TransformedCoefficients transformed_coefficients(const ScalarField& phi,
                                                 const ScalarField& square_sum, double diffusion,
                                                 const SpaceTimeGrid& grid);

/// exp(-phi) [D Lap - div(F .)] (exp(phi) c) - D Lap c - 1/2 sum h^2 c at
/// interior nodes, assembled as corrected drift plus potential. Zero on the
/// boundary.
ScalarField transformed_operator(const TransformedCoefficients& coeff, const ScalarField& c,
                                 double diffusion, const VelocityField& velocity,
                                 const SpaceTimeGrid& grid);

/// Transpose of advection_divergence restricted to interior rows and
/// columns; a discrete -F . grad(z). Zero on the boundary.
ScalarField advection_transpose(const ScalarField& z, const VelocityField& velocity,
                                const SpaceTimeGrid& grid);

}  // namespace lcoc::detail
