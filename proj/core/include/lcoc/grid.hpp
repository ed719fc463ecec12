#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lcoc {

/// Uniform tensor mesh of the rectangle [0,lx]x[0,ly] together with a
/// uniform time mesh of [0,T]. Node (i,j) sits at (i*dx, j*dy); time level k
/// at k*dt. Boundary nodes are those with i in {0,nx-1} or j in {0,ny-1}.
class SpaceTimeGrid {
public:
    SpaceTimeGrid(int nx, int ny, double lx, double ly, int nt, double t_final);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nt() const { return nt_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double t_final() const { return t_final_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double dt() const { return dt_; }

    std::size_t node_count() const { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    double x(int i) const { return i * dx_; }
    double y(int j) const { return j * dy_; }
    double t(int k) const { return k * dt_; }
    bool is_boundary(int i, int j) const {
        return i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1;
    }

    /// Same space mesh, different number of time steps.
    SpaceTimeGrid with_time_steps(int nt) const;

    /// Boundary-half-weighted cell area of node (i,j).
    double space_weight(int i, int j) const;
    /// Trapezoid weight of time level k.
    double time_weight(int k) const;

    bool same_space(const SpaceTimeGrid& other) const;
    bool operator==(const SpaceTimeGrid& other) const = default;

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
    int nt_;
    double t_final_;
    double dx_;
    double dy_;
    double dt_;
};

/// One time frame of a node-indexed nx x ny real field (x fastest).
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int nx, int ny, double value = 0.0);
    explicit ScalarField(const SpaceTimeGrid& grid, double value = 0.0);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(int i, int j) { return values_[static_cast<std::size_t>(j) * nx_ + i]; }
    double operator()(int i, int j) const { return values_[static_cast<std::size_t>(j) * nx_ + i]; }
    double& operator[](std::size_t n) { return values_[n]; }
    double operator[](std::size_t n) const { return values_[n]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool matches(const SpaceTimeGrid& grid) const {
        return nx_ == grid.nx() && ny_ == grid.ny();
    }
    bool all_finite() const;
    double max_abs() const;

    ScalarField& operator+=(const ScalarField& rhs);
    ScalarField& operator-=(const ScalarField& rhs);
    ScalarField& operator*=(double s);

    bool operator==(const ScalarField& other) const = default;

private:
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField lhs, const ScalarField& rhs);
ScalarField operator-(ScalarField lhs, const ScalarField& rhs);
ScalarField operator*(double s, ScalarField rhs);

/// nt+1 frames of a space-time field.
using Frames = std::vector<ScalarField>;

struct VelocityField {
    ScalarField x;
    ScalarField y;
};

ScalarField sample_field(const SpaceTimeGrid& grid,
                         const std::function<double(double, double)>& fn);
Frames sample_frames(const SpaceTimeGrid& grid,
                     const std::function<double(double, double, double)>& fn);
Frames constant_frames(const SpaceTimeGrid& grid, double value);

/// D * (5-point Laplacian) at interior nodes, 0 on the boundary.
ScalarField laplacian_dirichlet(const ScalarField& field, double diffusion,
                                const SpaceTimeGrid& grid);

/// First-order upwind div(F f) at interior nodes, 0 on the boundary. The
/// upwind side of each axis is picked from the sign of the velocity
/// component at the node itself.
ScalarField advection_divergence(const ScalarField& field, const VelocityField& velocity,
                                 const SpaceTimeGrid& grid);

/// Boundary-half-weighted cell sum in space, trapezoid rule in time.
/// `frames` must hold nt+1 entries.
double integrate_space_time(std::span<const ScalarField> frames, const SpaceTimeGrid& grid);

/// Boundary-half-weighted cell sum of one frame.
double integrate_space(const ScalarField& field, const SpaceTimeGrid& grid);

/// sqrt of integrate_space_time((a-b)^2).
double l2_distance(std::span<const ScalarField> a, std::span<const ScalarField> b,
                   const SpaceTimeGrid& grid);
/// sqrt of integrate_space_time(a^2).
double l2_norm(std::span<const ScalarField> a, const SpaceTimeGrid& grid);

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* what);
void require_on_grid(const ScalarField& field, const SpaceTimeGrid& grid, const char* what);
void require_frames(std::span<const ScalarField> frames, const SpaceTimeGrid& grid,
                    const char* what);

}  // namespace lcoc
