#include "stencil.hpp"

#include <cmath>

#include "lcoc/errors.hpp"

namespace lcoc::detail {

namespace {

double interior_dot(const ScalarField& a, const ScalarField& b, const SpaceTimeGrid& grid) {
    double s = 0.0;
    for (int j = 1; j < grid.ny() - 1; ++j) {
        for (int i = 1; i < grid.nx() - 1; ++i) s += a(i, j) * b(i, j);
    }
    return s;
}

}  // namespace

DiffusionSolver::DiffusionSolver(const SpaceTimeGrid& grid, double diffusion, double dt)
    : grid_(grid),
      cx_(dt * diffusion / (grid.dx() * grid.dx())),
      cy_(dt * diffusion / (grid.dy() * grid.dy())),
      max_iterations_(10 * grid.nx() * grid.ny()) {}

// out = (I - dt D Lap) u on interior nodes, treating boundary values of u as 0.
void DiffusionSolver::apply(const ScalarField& u, ScalarField& out) const {
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    for (int j = 1; j < ny - 1; ++j) {
        for (int i = 1; i < nx - 1; ++i) {
            const double c = u(i, j);
            const double e = i + 1 < nx - 1 ? u(i + 1, j) : 0.0;
            const double w = i - 1 > 0 ? u(i - 1, j) : 0.0;
            const double n = j + 1 < ny - 1 ? u(i, j + 1) : 0.0;
            const double s = j - 1 > 0 ? u(i, j - 1) : 0.0;
            out(i, j) = c - cx_ * (e - 2.0 * c + w) - cy_ * (n - 2.0 * c + s);
        }
    }
}

ScalarField DiffusionSolver::solve(const ScalarField& rhs, const ScalarField& boundary,
                                   int step) const {
    const int nx = grid_.nx();
    const int ny = grid_.ny();

    // Move the known boundary values to the right-hand side.
    ScalarField b(grid_);
    for (int j = 1; j < ny - 1; ++j) {
        for (int i = 1; i < nx - 1; ++i) {
            double v = rhs(i, j);
            if (i == 1) v += cx_ * boundary(0, j);
            if (i == nx - 2) v += cx_ * boundary(nx - 1, j);
            if (j == 1) v += cy_ * boundary(i, 0);
            if (j == ny - 2) v += cy_ * boundary(i, ny - 1);
            b(i, j) = v;
        }
    }

    ScalarField x(grid_);
    for (int j = 1; j < ny - 1; ++j) {
        for (int i = 1; i < nx - 1; ++i) x(i, j) = rhs(i, j);
    }

    ScalarField ax(grid_);
    apply(x, ax);
    ScalarField r(grid_);
    for (int j = 1; j < ny - 1; ++j) {
        for (int i = 1; i < nx - 1; ++i) r(i, j) = b(i, j) - ax(i, j);
    }
    const double target = kTolerance * std::max(1.0, std::sqrt(interior_dot(b, b, grid_)));
    ScalarField p = r;
    ScalarField ap(grid_);
    double rr = interior_dot(r, r, grid_);
    int it = 0;
    while (std::sqrt(rr) > target) {
        if (it++ >= max_iterations_) {
            throw SolverError("diffusion solve did not converge", step);
        }
        apply(p, ap);
        const double alpha = rr / interior_dot(p, ap, grid_);
        for (int j = 1; j < ny - 1; ++j) {
            for (int i = 1; i < nx - 1; ++i) {
                x(i, j) += alpha * p(i, j);
                r(i, j) -= alpha * ap(i, j);
            }
        }
        const double rr_next = interior_dot(r, r, grid_);
        const double beta = rr_next / rr;
        rr = rr_next;
        for (int j = 1; j < ny - 1; ++j) {
            for (int i = 1; i < nx - 1; ++i) p(i, j) = r(i, j) + beta * p(i, j);
        }
    }

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (grid_.is_boundary(i, j)) x(i, j) = boundary(i, j);
        }
    }
    return x;
}

TransformedCoefficients transformed_coefficients(const ScalarField& phi,
                                                 const ScalarField& square_sum, double diffusion,
                                                 const SpaceTimeGrid& grid) {
    TransformedCoefficients out{ScalarField(grid, 1.0), ScalarField(grid, 1.0),
                                ScalarField(grid, 1.0), ScalarField(grid, 1.0), ScalarField(grid)};
    const double rx = diffusion / (grid.dx() * grid.dx());
    const double ry = diffusion / (grid.dy() * grid.dy());
    for (int j = 1; j < grid.ny() - 1; ++j) {
        for (int i = 1; i < grid.nx() - 1; ++i) {
            const double p = phi(i, j);
            out.east(i, j) = std::exp(phi(i + 1, j) - p);
            out.west(i, j) = std::exp(phi(i - 1, j) - p);
            out.north(i, j) = std::exp(phi(i, j + 1) - p);
            out.south(i, j) = std::exp(phi(i, j - 1) - p);
            // exp(-phi) D Lap exp(phi), written through the same ratios.
            const double curvature = rx * (out.east(i, j) - 1.0 + out.west(i, j) - 1.0) +
                                     ry * (out.north(i, j) - 1.0 + out.south(i, j) - 1.0);
            out.potential(i, j) = 0.5 * square_sum(i, j) - curvature;
        }
    }
    return out;
}

ScalarField transformed_operator(const TransformedCoefficients& coeff, const ScalarField& c,
                                 double diffusion, const VelocityField& velocity,
                                 const SpaceTimeGrid& grid) {
    const double rx = diffusion / (grid.dx() * grid.dx());
    const double ry = diffusion / (grid.dy() * grid.dy());
    const double rdx = 1.0 / grid.dx();
    const double rdy = 1.0 / grid.dy();
    ScalarField out(grid);
    for (int j = 1; j < grid.ny() - 1; ++j) {
        for (int i = 1; i < grid.nx() - 1; ++i) {
            const double cc = c(i, j);
            const double e = coeff.east(i, j);
            const double w = coeff.west(i, j);
            const double n = coeff.north(i, j);
            const double s = coeff.south(i, j);
            const double drift = rx * ((e - 1.0) * (c(i + 1, j) - cc) + (w - 1.0) * (c(i - 1, j) - cc)) +
                                 ry * ((n - 1.0) * (c(i, j + 1) - cc) + (s - 1.0) * (c(i, j - 1) - cc));

            const double u = velocity.x(i, j);
            const double v = velocity.y(i, j);
            const double own_x = u * cc;
            const double own_y = v * cc;
            const double ddx = u >= 0.0 ? own_x - velocity.x(i - 1, j) * w * c(i - 1, j)
                                        : velocity.x(i + 1, j) * e * c(i + 1, j) - own_x;
            const double ddy = v >= 0.0 ? own_y - velocity.y(i, j - 1) * s * c(i, j - 1)
                                        : velocity.y(i, j + 1) * n * c(i, j + 1) - own_y;

            out(i, j) = drift - (ddx * rdx + ddy * rdy) - coeff.potential(i, j) * cc;
        }
    }
    return out;
}

ScalarField advection_transpose(const ScalarField& z, const VelocityField& velocity,
                                const SpaceTimeGrid& grid) {
    const int nx = grid.nx();
    const int ny = grid.ny();
    const double rdx = 1.0 / grid.dx();
    const double rdy = 1.0 / grid.dy();
    ScalarField out(grid);
    auto scatter = [&](int i, int j, double value) {
        if (i > 0 && j > 0 && i < nx - 1 && j < ny - 1) out(i, j) += value;
    };
    for (int j = 1; j < ny - 1; ++j) {
        for (int i = 1; i < nx - 1; ++i) {
            const double zi = z(i, j);
            const double u = velocity.x(i, j);
            const double v = velocity.y(i, j);
            if (u >= 0.0) {
                scatter(i, j, u * rdx * zi);
                scatter(i - 1, j, -velocity.x(i - 1, j) * rdx * zi);
            } else {
                scatter(i + 1, j, velocity.x(i + 1, j) * rdx * zi);
                scatter(i, j, -u * rdx * zi);
            }
            if (v >= 0.0) {
                scatter(i, j, v * rdy * zi);
                scatter(i, j - 1, -velocity.y(i, j - 1) * rdy * zi);
            } else {
                scatter(i, j + 1, velocity.y(i, j + 1) * rdy * zi);
                scatter(i, j, -v * rdy * zi);
            }
        }
    }
    return out;
}

}  // namespace lcoc::detail
