#include "lcoc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lcoc/errors.hpp"

namespace lcoc {

SpaceTimeGrid::SpaceTimeGrid(int nx, int ny, double lx, double ly, int nt, double t_final)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), nt_(nt), t_final_(t_final) {
    if (nx < 3 || ny < 3) {
        throw ValidationError("grid: nx and ny must be >= 3");
    }
    if (nt < 1) {
        throw ValidationError("grid: nt must be >= 1");
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !(t_final > 0.0)) {
        throw ValidationError("grid: lx, ly and t_final must be > 0");
    }
    dx_ = lx / (nx - 1);
    dy_ = ly / (ny - 1);
    dt_ = t_final / nt;
}

SpaceTimeGrid SpaceTimeGrid::with_time_steps(int nt) const {
    return SpaceTimeGrid(nx_, ny_, lx_, ly_, nt, t_final_);
}

double SpaceTimeGrid::space_weight(int i, int j) const {
    const double wx = (i == 0 || i == nx_ - 1) ? 0.5 : 1.0;
    const double wy = (j == 0 || j == ny_ - 1) ? 0.5 : 1.0;
    return wx * wy * dx_ * dy_;
}

double SpaceTimeGrid::time_weight(int k) const {
    return (k == 0 || k == nt_) ? 0.5 * dt_ : dt_;
}

bool SpaceTimeGrid::same_space(const SpaceTimeGrid& other) const {
    return nx_ == other.nx_ && ny_ == other.ny_ && lx_ == other.lx_ && ly_ == other.ly_;
}

ScalarField::ScalarField(int nx, int ny, double value)
    : nx_(nx), ny_(ny), values_(static_cast<std::size_t>(nx) * ny, value) {}

ScalarField::ScalarField(const SpaceTimeGrid& grid, double value)
    : ScalarField(grid.nx(), grid.ny(), value) {}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& rhs) {
    require_same_shape(*this, rhs, "field +=");
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += rhs.values_[n];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& rhs) {
    require_same_shape(*this, rhs, "field -=");
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= rhs.values_[n];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField lhs, const ScalarField& rhs) { return lhs += rhs; }
ScalarField operator-(ScalarField lhs, const ScalarField& rhs) { return lhs -= rhs; }
ScalarField operator*(double s, ScalarField rhs) { return rhs *= s; }

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* what) {
    if (a.nx() != b.nx() || a.ny() != b.ny()) {
        throw ValidationError(std::string(what) + ": field shape mismatch (" +
                              std::to_string(a.nx()) + "x" + std::to_string(a.ny()) + " vs " +
                              std::to_string(b.nx()) + "x" + std::to_string(b.ny()) + ")");
    }
}

void require_on_grid(const ScalarField& field, const SpaceTimeGrid& grid, const char* what) {
    if (!field.matches(grid)) {
        throw ValidationError(std::string(what) + ": field is " + std::to_string(field.nx()) +
                              "x" + std::to_string(field.ny()) + " but grid is " +
                              std::to_string(grid.nx()) + "x" + std::to_string(grid.ny()));
    }
}

void require_frames(std::span<const ScalarField> frames, const SpaceTimeGrid& grid,
                    const char* what) {
    if (frames.size() != static_cast<std::size_t>(grid.nt()) + 1) {
        throw ValidationError(std::string(what) + ": expected " + std::to_string(grid.nt() + 1) +
                              " frames, got " + std::to_string(frames.size()));
    }
    for (const auto& f : frames) require_on_grid(f, grid, what);
}

ScalarField sample_field(const SpaceTimeGrid& grid,
                         const std::function<double(double, double)>& fn) {
    ScalarField out(grid);
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            out(i, j) = fn(grid.x(i), grid.y(j));
        }
    }
    return out;
}

Frames sample_frames(const SpaceTimeGrid& grid,
                     const std::function<double(double, double, double)>& fn) {
    Frames out;
    out.reserve(grid.nt() + 1);
    for (int k = 0; k <= grid.nt(); ++k) {
        const double t = grid.t(k);
        out.push_back(sample_field(grid, [&](double x, double y) { return fn(x, y, t); }));
    }
    return out;
}

Frames constant_frames(const SpaceTimeGrid& grid, double value) {
    return Frames(grid.nt() + 1, ScalarField(grid, value));
}

ScalarField laplacian_dirichlet(const ScalarField& field, double diffusion,
                                const SpaceTimeGrid& grid) {
    require_on_grid(field, grid, "laplacian_dirichlet");
    if (!(diffusion > 0.0)) {
        throw ValidationError("laplacian_dirichlet: diffusion must be > 0");
    }
    const double cx = diffusion / (grid.dx() * grid.dx());
    const double cy = diffusion / (grid.dy() * grid.dy());
    ScalarField out(grid);
    for (int j = 1; j < grid.ny() - 1; ++j) {
        for (int i = 1; i < grid.nx() - 1; ++i) {
            const double c = field(i, j);
            out(i, j) = cx * (field(i + 1, j) - 2.0 * c + field(i - 1, j)) +
                        cy * (field(i, j + 1) - 2.0 * c + field(i, j - 1));
        }
    }
    return out;
}

ScalarField advection_divergence(const ScalarField& field, const VelocityField& velocity,
                                 const SpaceTimeGrid& grid) {
    require_on_grid(field, grid, "advection_divergence");
    require_on_grid(velocity.x, grid, "advection_divergence (velocity x)");
    require_on_grid(velocity.y, grid, "advection_divergence (velocity y)");
    const double rdx = 1.0 / grid.dx();
    const double rdy = 1.0 / grid.dy();
    ScalarField out(grid);
    for (int j = 1; j < grid.ny() - 1; ++j) {
        for (int i = 1; i < grid.nx() - 1; ++i) {
            const double u = velocity.x(i, j);
            const double v = velocity.y(i, j);
            const double own_x = u * field(i, j);
            const double own_y = v * field(i, j);
            const double ddx = u >= 0.0 ? own_x - velocity.x(i - 1, j) * field(i - 1, j)
                                        : velocity.x(i + 1, j) * field(i + 1, j) - own_x;
            const double ddy = v >= 0.0 ? own_y - velocity.y(i, j - 1) * field(i, j - 1)
                                        : velocity.y(i, j + 1) * field(i, j + 1) - own_y;
            out(i, j) = ddx * rdx + ddy * rdy;
        }
    }
    return out;
}

double integrate_space(const ScalarField& field, const SpaceTimeGrid& grid) {
    require_on_grid(field, grid, "integrate_space");
    double sum = 0.0;
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            sum += grid.space_weight(i, j) * field(i, j);
        }
    }
    return sum;
}

double integrate_space_time(std::span<const ScalarField> frames, const SpaceTimeGrid& grid) {
    if (frames.empty()) {
        throw ValidationError("integrate_space_time: empty frame sequence");
    }
    require_frames(frames, grid, "integrate_space_time");
    double sum = 0.0;
    for (int k = 0; k <= grid.nt(); ++k) {
        sum += grid.time_weight(k) * integrate_space(frames[k], grid);
    }
    return sum;
}

double l2_distance(std::span<const ScalarField> a, std::span<const ScalarField> b,
                   const SpaceTimeGrid& grid) {
    require_frames(a, grid, "l2_distance");
    require_frames(b, grid, "l2_distance");
    double sum = 0.0;
    for (int k = 0; k <= grid.nt(); ++k) {
        double frame = 0.0;
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) {
                const double d = a[k](i, j) - b[k](i, j);
                frame += grid.space_weight(i, j) * d * d;
            }
        }
        sum += grid.time_weight(k) * frame;
    }
    return std::sqrt(sum);
}

double l2_norm(std::span<const ScalarField> a, const SpaceTimeGrid& grid) {
    require_frames(a, grid, "l2_norm");
    double sum = 0.0;
    for (int k = 0; k <= grid.nt(); ++k) {
        double frame = 0.0;
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) {
                frame += grid.space_weight(i, j) * a[k](i, j) * a[k](i, j);
            }
        }
        sum += grid.time_weight(k) * frame;
    }
    return std::sqrt(sum);
}

}  // namespace lcoc
