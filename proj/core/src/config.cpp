#include "lcoc/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "lcoc/errors.hpp"

namespace lcoc {

using nlohmann::json;

double FieldSpec::operator()(double x, double y, double t, const SpaceTimeGrid& grid) const {
    const double pi = std::numbers::pi;
    double v = base + slope * t;
    if (bump != 0.0) v += bump * std::sin(pi * x / grid.lx()) * std::sin(pi * y / grid.ly());
    return v;
}

Frames FieldSpec::frames(const SpaceTimeGrid& grid) const {
    return sample_frames(grid, [&](double x, double y, double t) { return (*this)(x, y, t, grid); });
}

ScalarField FieldSpec::at(const SpaceTimeGrid& grid, int k) const {
    const double t = grid.t(k);
    return sample_field(grid, [&](double x, double y) { return (*this)(x, y, t, grid); });
}

VelocityField AdvectionSpec::velocity(const SpaceTimeGrid& grid) const {
    switch (type) {
        case Type::rotation:
            return rotation_velocity(grid, omega);
        case Type::uniform:
            return {ScalarField(grid, u), ScalarField(grid, v)};
        case Type::none:
            break;
    }
    return zero_velocity(grid);
}

double AdvectionSpec::max_speed(const SpaceTimeGrid& grid) const {
    const VelocityField f = velocity(grid);
    return std::max(f.x.max_abs(), f.y.max_abs());
}

double RunConfig::gradient_tol() const {
    if (gradient_tolerance) return *gradient_tolerance;
    return gradient_stochastic ? 1e-2 : 1e-3;
}

bool RunConfig::noise_off() const {
    if (!modes.empty()) {
        for (const auto& m : modes) {
            if (m.h1.amplitude != 0.0 || m.h2.amplitude != 0.0) return false;
        }
        return true;
    }
    return n_modes == 0 || amplitude == 0.0;
}

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ValidationError(key + ": " + what);
}

// One JSON object plus the keys read from it, so leftovers can be reported.
class Block {
public:
    Block(const json& j, std::string path, std::vector<std::string>& warnings)
        : j_(j), path_(std::move(path)), warnings_(warnings) {
        if (!j_.is_object()) fail(path_, "must be an object");
    }

    std::string key(std::string_view name) const {
        return path_.empty() ? std::string(name) : path_ + "." + std::string(name);
    }

    bool has(const std::string& name) const { return j_.contains(name); }

    const json& raw(const std::string& name) {
        used_.insert(name);
        return j_.at(name);
    }

    double number(const std::string& name, std::optional<double> fallback = std::nullopt) {
        if (!has(name)) {
            if (!fallback) fail(key(name), "missing required key");
            return *fallback;
        }
        const json& v = raw(name);
        if (!v.is_number()) fail(key(name), "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(key(name), "must be finite");
        return d;
    }

    long long integer(const std::string& name, std::optional<long long> fallback = std::nullopt) {
        if (!has(name)) {
            if (!fallback) fail(key(name), "missing required key");
            return *fallback;
        }
        const json& v = raw(name);
        if (!v.is_number_integer()) fail(key(name), "must be an integer");
        return v.get<long long>();
    }

    std::uint64_t unsigned_integer(const std::string& name, std::uint64_t fallback) {
        if (!has(name)) return fallback;
        const json& v = raw(name);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            fail(key(name), "must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& name, bool fallback) {
        if (!has(name)) return fallback;
        const json& v = raw(name);
        if (!v.is_boolean()) fail(key(name), "must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& name, const std::string& fallback) {
        if (!has(name)) return fallback;
        const json& v = raw(name);
        if (!v.is_string()) fail(key(name), "must be a string");
        return v.get<std::string>();
    }

    FieldSpec field(const std::string& name, std::optional<double> fallback = std::nullopt) {
        if (!has(name)) {
            if (!fallback) fail(key(name), "missing required key");
            return FieldSpec{*fallback, 0.0, 0.0};
        }
        const json& v = raw(name);
        if (v.is_number()) return FieldSpec{v.get<double>(), 0.0, 0.0};
        Block b(v, key(name), warnings_);
        FieldSpec spec;
        spec.base = b.number("base", 0.0);
        spec.bump = b.number("bump", 0.0);
        spec.slope = b.number("slope", 0.0);
        b.finish();
        return spec;
    }

    template <class T>
    std::vector<T> list(const std::string& name, std::vector<T> fallback) {
        if (!has(name)) return fallback;
        const json& v = raw(name);
        if (!v.is_array() || v.empty()) fail(key(name), "must be a non-empty array");
        std::vector<T> out;
        for (const auto& e : v) {
            if constexpr (std::is_integral_v<T>) {
                if (!e.is_number_integer()) fail(key(name), "entries must be integers");
            } else {
                if (!e.is_number()) fail(key(name), "entries must be numbers");
            }
            out.push_back(e.get<T>());
        }
        return out;
    }

    Block child(const std::string& name) { return Block(raw(name), key(name), warnings_); }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!used_.count(k)) warnings_.push_back(key(k) + ": unknown key ignored");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::vector<std::string>& warnings_;
    std::set<std::string> used_;
};

AdvectionSpec parse_advection(Block b) {
    AdvectionSpec a;
    const std::string type = b.string("type", "none");
    if (type == "none") {
        a.type = AdvectionSpec::Type::none;
    } else if (type == "rotation") {
        a.type = AdvectionSpec::Type::rotation;
        a.omega = b.number("omega");
    } else if (type == "uniform") {
        a.type = AdvectionSpec::Type::uniform;
        a.u = b.number("u", 0.0);
        a.v = b.number("v", 0.0);
    } else {
        fail(b.key("type"), "unknown advection type '" + type + "'");
    }
    b.finish();
    return a;
}

ModeShape parse_shape(Block b) {
    ModeShape s;
    s.amplitude = b.number("amplitude");
    s.kx = static_cast<int>(b.integer("kx", 1));
    s.ky = static_cast<int>(b.integer("ky", 1));
    if (s.kx < 1) fail(b.key("kx"), "must be >= 1");
    if (s.ky < 1) fail(b.key("ky"), "must be >= 1");
    b.finish();
    return s;
}

void require_positive(double v, const std::string& key) {
    if (!(v > 0.0)) fail(key, "must be > 0");
}

void check_field_bounds(const FieldSpec& lo, const FieldSpec& hi, const SpaceTimeGrid& grid,
                        const std::string& key) {
    for (int k = 0; k <= grid.nt(); ++k) {
        for (int j = 0; j < grid.ny(); ++j) {
            for (int i = 0; i < grid.nx(); ++i) {
                const double t = grid.t(k);
                if (lo(grid.x(i), grid.y(j), t, grid) > hi(grid.x(i), grid.y(j), t, grid)) {
                    fail(key, "lower bound exceeds upper bound");
                }
            }
        }
    }
}

}  // namespace

RunConfig parse_config(std::string_view text, std::string_view source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string(source) + ": parse error: " + e.what());
    }

    RunConfig c;
    Block top(root, "", c.warnings);
    for (const char* name : {"grid", "model", "cost", "bounds"}) {
        if (!top.has(name)) fail(name, "missing required block");
    }

    {
        Block g = top.child("grid");
        c.nx = static_cast<int>(g.integer("nx"));
        c.ny = static_cast<int>(g.integer("ny"));
        c.lx = g.number("lx", 1.0);
        c.ly = g.number("ly", 1.0);
        c.nt = static_cast<int>(g.integer("nt"));
        c.t_final = g.number("t_final");
        if (c.nx < 3) fail("grid.nx", "must be >= 3");
        if (c.ny < 3) fail("grid.ny", "must be >= 3");
        if (c.nt < 1) fail("grid.nt", "must be >= 1");
        require_positive(c.lx, "grid.lx");
        require_positive(c.ly, "grid.ly");
        require_positive(c.t_final, "grid.t_final");
        g.finish();
    }

    {
        Block m = top.child("model");
        c.d1 = m.number("d1", 0.01);
        c.d2 = m.number("d2", 0.01);
        c.k = m.number("k", 0.05);
        c.alpha = m.number("alpha", 1.31);
        c.capacity = m.number("capacity", 10.0);
        require_positive(c.d1, "model.d1");
        require_positive(c.d2, "model.d2");
        if (c.k < 0.0) fail("model.k", "must be >= 0");
        require_positive(c.alpha, "model.alpha");
        require_positive(c.capacity, "model.capacity");
        if (m.has("advection")) c.advection1 = parse_advection(m.child("advection"));
        c.advection2 = m.has("advection2") ? parse_advection(m.child("advection2")) : c.advection1;
        c.f1 = m.field("f1");
        c.f2 = m.field("f2");
        c.clip_negative = m.boolean("clip_negative", false);
        m.finish();
    }

    if (top.has("noise")) {
        Block n = top.child("noise");
        c.n_modes = static_cast<int>(n.integer("n_modes", c.n_modes));
        c.amplitude = n.number("amplitude", c.amplitude);
        if (c.n_modes < 0) fail("noise.n_modes", "must be >= 0");
        if (n.has("modes")) {
            const json& list = n.raw("modes");
            if (!list.is_array()) fail("noise.modes", "must be an array");
            for (std::size_t i = 0; i < list.size(); ++i) {
                const std::string key = "noise.modes[" + std::to_string(i) + "]";
                Block mb(list[i], key, c.warnings);
                ExplicitMode mode;
                mode.h1 = parse_shape(mb.child("h1"));
                mode.h2 = parse_shape(mb.child("h2"));
                mb.finish();
                c.modes.push_back(mode);
            }
            c.n_modes = static_cast<int>(c.modes.size());
        }
        n.finish();
    }

    {
        Block cb = top.child("cost");
        c.lambda1 = cb.number("lambda1", 1.0);
        c.lambda2 = cb.number("lambda2", 1.0);
        if (c.lambda1 < 0.0) fail("cost.lambda1", "must be >= 0");
        if (c.lambda2 < 0.0) fail("cost.lambda2", "must be >= 0");
        c.r1 = cb.field("r1");
        c.r2 = cb.field("r2");
        c.r3 = cb.field("r3");
        c.r4 = cb.field("r4");
        c.b1 = cb.field("b1");
        c.b2 = cb.field("b2");
        cb.finish();
    }

    {
        Block b = top.child("bounds");
        for (int i = 0; i < kControlCount; ++i) {
            const std::string name(kControlNames[i]);
            if (!b.has(name)) fail("bounds." + name, "missing required key");
            Block one = b.child(name);
            c.bounds[i][0] = one.field("lower");
            c.bounds[i][1] = one.field("upper");
            one.finish();
        }
        b.finish();
    }

    if (top.has("optimizer")) {
        Block o = top.child("optimizer");
        c.damping = o.number("damping", c.damping);
        c.tol = o.number("tol", c.tol);
        c.max_iter = static_cast<int>(o.integer("max_iter", c.max_iter));
        o.finish();
    }
    if (!(c.damping > 0.0 && c.damping <= 1.0)) fail("optimizer.damping", "must lie in (0, 1]");
    require_positive(c.tol, "optimizer.tol");
    if (c.max_iter < 1) fail("optimizer.max_iter", "must be >= 1");

    if (top.has("solver")) {
        Block s = top.child("solver");
        const std::string name = s.string("backend", "transformed");
        try {
            c.backend = parse_backend(name);
        } catch (const ValidationError&) {
            fail("solver.backend", "unknown backend '" + name + "'");
        }
        s.finish();
    }

    if (top.has("run")) {
        Block r = top.child("run");
        c.seed = r.unsigned_integer("seed", c.seed);
        c.n_paths = static_cast<int>(r.integer("n_paths", c.n_paths));
        c.output = r.string("output", c.output);
        const std::string mode = r.string("ensemble_mode", "simulate");
        c.ensemble_mode = parse_ensemble_mode(mode);
        c.workers = static_cast<int>(r.integer("workers", c.workers));
        c.snapshots = r.list<int>("snapshots", {});
        r.finish();
    }
    if (c.n_paths < 1) fail("run.n_paths", "must be >= 1");
    if (c.workers < 0) fail("run.workers", "must be >= 0");
    for (int s : c.snapshots) {
        if (s < 0 || s > c.nt) fail("run.snapshots", "time level out of range");
    }

    if (top.has("checks")) {
        Block ch = top.child("checks");
        if (ch.has("gradient")) {
            Block g = ch.child("gradient");
            c.gradient_stochastic = g.boolean("stochastic", false);
            c.gradient_eps = g.list<double>("eps", c.gradient_eps);
            if (g.has("tolerance")) c.gradient_tolerance = g.number("tolerance");
            g.finish();
        }
        if (ch.has("equivalence")) {
            Block e = ch.child("equivalence");
            c.equivalence_levels = e.list<int>("levels", c.equivalence_levels);
            c.equivalence_paths = static_cast<int>(e.integer("n_paths", c.equivalence_paths));
            c.equivalence_min_ratio = e.number("min_ratio", c.equivalence_min_ratio);
            c.equivalence_noise_off_tol = e.number("noise_off_tol", c.equivalence_noise_off_tol);
            e.finish();
        }
        if (ch.has("stability")) {
            Block s = ch.child("stability");
            c.stability_deltas = s.list<double>("deltas", c.stability_deltas);
            c.stability_max_ratio = s.number("max_ratio", c.stability_max_ratio);
            c.stability_bound = s.number("bound", c.stability_bound);
            s.finish();
        }
        ch.finish();
    }
    if (c.equivalence_paths < 1) fail("checks.equivalence.n_paths", "must be >= 1");
    for (double eps : c.gradient_eps) require_positive(eps, "checks.gradient.eps");
    for (std::size_t i = 0; i < c.equivalence_levels.size(); ++i) {
        if (c.equivalence_levels[i] < 1) fail("checks.equivalence.levels", "must be >= 1");
        if (i > 0 && c.equivalence_levels[i] % c.equivalence_levels[i - 1] != 0) {
            fail("checks.equivalence.levels", "each level must divide the next");
        }
    }
    top.finish();

    const SpaceTimeGrid grid = build_grid(c);
    for (int i = 0; i < kControlCount; ++i) {
        check_field_bounds(c.bounds[i][0], c.bounds[i][1], grid,
                           "bounds." + std::string(kControlNames[i]));
    }
    // Full model validation on the mesh (modes, compatibility).
    validate_params(build_problem(c, grid).params, grid);

    const double speed = std::max(c.advection1.max_speed(grid), c.advection2.max_speed(grid));
    const double h = std::min(grid.dx(), grid.dy());
    if (speed > 0.0 && grid.dt() > 0.25 * h / speed) {
        std::ostringstream msg;
        msg << "grid.nt: dt=" << grid.dt() << " exceeds the advective limit 0.25*h/|F|="
            << 0.25 * h / speed;
        c.warnings.push_back(msg.str());
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path.string() + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string());
}

SpaceTimeGrid build_grid(const RunConfig& config) {
    return SpaceTimeGrid(config.nx, config.ny, config.lx, config.ly, config.nt, config.t_final);
}

Problem build_problem(const RunConfig& config) { return build_problem(config, build_grid(config)); }

Problem build_problem(const RunConfig& config, const SpaceTimeGrid& grid) {
    ModelParams p;
    p.d1 = config.d1;
    p.d2 = config.d2;
    p.k = config.k;
    p.alpha = config.alpha;
    p.capacity = config.capacity;
    p.vel1 = config.advection1.velocity(grid);
    p.vel2 = config.advection2.velocity(grid);
    p.clip_negative = config.clip_negative;
    p.f0_1 = config.f1.at(grid, 0);
    p.f0_2 = config.f2.at(grid, 0);
    p.fb_1 = config.f1.frames(grid);
    p.fb_2 = config.f2.frames(grid);
    if (config.modes.empty()) {
        p.modes = default_modes(config.n_modes, config.amplitude, grid);
    } else {
        const double pi = std::numbers::pi;
        auto shape = [&](const ModeShape& s) {
            return sample_field(grid, [&](double x, double y) {
                return s.amplitude * std::sin(s.kx * pi * x / grid.lx()) *
                       std::sin(s.ky * pi * y / grid.ly());
            });
        };
        for (const auto& m : config.modes) {
            ScalarField h1 = shape(m.h1);
            ScalarField h2 = shape(m.h2);
            // sin(k pi) is only zero up to rounding; pin the boundary.
            for (int j = 0; j < grid.ny(); ++j) {
                for (int i = 0; i < grid.nx(); ++i) {
                    if (grid.is_boundary(i, j)) h1(i, j) = h2(i, j) = 0.0;
                }
            }
            p.modes.h1.push_back(std::move(h1));
            p.modes.h2.push_back(std::move(h2));
        }
    }

    CostSpec cost;
    cost.lambda1 = config.lambda1;
    cost.lambda2 = config.lambda2;
    cost.r1 = config.r1.frames(grid);
    cost.r2 = config.r2.frames(grid);
    cost.r3 = config.r3.frames(grid);
    cost.r4 = config.r4.frames(grid);
    cost.b1 = config.b1.frames(grid);
    cost.b2 = config.b2.frames(grid);

    auto bounds = std::make_shared<ControlBounds>();
    for (int i = 0; i < kControlCount; ++i) {
        bounds->lower[i] = config.bounds[i][0].frames(grid);
        bounds->upper[i] = config.bounds[i][1].frames(grid);
    }
    return Problem{grid, std::move(p), std::move(cost), std::move(bounds)};
}

FbsOptions fbs_options(const RunConfig& config) {
    FbsOptions o;
    o.damping = config.damping;
    o.tol = config.tol;
    o.max_iter = config.max_iter;
    o.backend = config.backend;
    return o;
}

EnsembleOptions ensemble_options(const RunConfig& config) {
    EnsembleOptions o;
    o.n_paths = config.n_paths;
    o.base_seed = config.seed;
    o.mode = config.ensemble_mode;
    o.workers = config.workers;
    o.backend = config.backend;
    o.fbs = fbs_options(config);
    o.snapshot_levels = config.snapshots;
    return o;
}

}  // namespace lcoc
