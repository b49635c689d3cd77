#include "selflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "selflow/field_io.hpp"
#include "selflow/initial.hpp"
#include "selflow/projection.hpp"

namespace selflow {
namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double to_double(std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ArgumentError("expected a number, got '" + std::string(s) + "'");
    return v;
}

long long to_int(std::string_view s) {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ArgumentError("expected an integer, got '" + std::string(s) + "'");
    return v;
}

std::uint64_t to_u64(std::string_view s) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ArgumentError("expected a non-negative integer, got '" + std::string(s) + "'");
    return v;
}

bool to_bool(std::string_view s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ArgumentError("expected true or false, got '" + std::string(s) + "'");
}

std::vector<double> numbers(std::string_view s, std::size_t count) {
    std::vector<double> out;
    for (auto part : split(s, ',')) out.push_back(to_double(part));
    if (count && out.size() != count)
        throw ArgumentError("expected " + std::to_string(count) + " comma-separated numbers");
    return out;
}

std::string fmt_list(const std::vector<double>& v) {
    std::vector<std::string> parts;
    for (double x : v) parts.push_back(fmt(x));
    return join(parts, ",");
}

double positive(double v) {
    if (!(v > 0.0)) throw ArgumentError("must be positive");
    return v;
}
double non_negative(double v) {
    if (!(v >= 0.0)) throw ArgumentError("must be non-negative");
    return v;
}

std::pair<std::string, std::string> tagged(std::string_view s) {
    const auto c = s.find(':');
    if (c == std::string_view::npos) return {std::string(s), {}};
    return {std::string(trim(s.substr(0, c))), std::string(trim(s.substr(c + 1)))};
}

// "<kind>[:args]" canonicalised; numeric arguments reformatted
std::string canonical_source(std::string_view s, const std::map<std::string, std::size_t>& kinds) {
    auto [kind, args] = tagged(s);
    const auto it = kinds.find(kind);
    if (it == kinds.end()) {
        std::vector<std::string> names;
        for (const auto& [k, n] : kinds) names.push_back(k);
        throw ArgumentError("unknown source '" + kind + "' (expected one of " + join(names, ", ") + ")");
    }
    if (kind == "file") {
        if (args.empty()) throw ArgumentError("file: needs a path");
        return "file:" + args;
    }
    if (it->second == 0) {
        if (!args.empty()) throw ArgumentError(kind + " takes no arguments");
        return kind;
    }
    return kind + ":" + fmt_list(numbers(args, it->second));
}

std::pair<double, double> pair_x(std::string_view s) {
    const auto parts = split(s, 'x');
    if (parts.size() != 2) throw ArgumentError("expected '<a> x <b>'");
    return {to_double(parts[0]), to_double(parts[1])};
}

struct Entry {
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Entry>& schema() {
    static const std::map<std::string, Entry> s = [] {
        std::map<std::string, Entry> m;
        auto num = [&](const char* key, double RunConfig::*field, double (*check)(double)) {
            m[key] = {[=](RunConfig& c, std::string_view v) { c.*field = check(to_double(v)); },
                      [=](const RunConfig& c) { return fmt(c.*field); }};
        };
        auto flag = [&](const char* key, bool RunConfig::*field) {
            m[key] = {[=](RunConfig& c, std::string_view v) { c.*field = to_bool(v); },
                      [=](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
        };
        auto count = [&](const char* key, int RunConfig::*field, int lo) {
            m[key] = {[=](RunConfig& c, std::string_view v) {
                          const long long n = to_int(v);
                          if (n < lo || n > 1000000000)
                              throw ArgumentError("must be an integer >= " + std::to_string(lo));
                          c.*field = static_cast<int>(n);
                      },
                      [=](const RunConfig& c) { return std::to_string(c.*field); }};
        };
        auto optional_positive = [&](const char* key, std::optional<double> RunConfig::*field) {
            m[key] = {[=](RunConfig& c, std::string_view v) {
                          if (v == "auto")
                              (c.*field).reset();
                          else
                              c.*field = positive(to_double(v));
                      },
                      [=](const RunConfig& c) {
                          return (c.*field) ? fmt(*(c.*field)) : std::string("auto");
                      }};
        };
        auto choice = [&](const char* key, std::string RunConfig::*field,
                          std::vector<std::string> allowed) {
            m[key] = {[=](RunConfig& c, std::string_view v) {
                          if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
                              throw ArgumentError("expected one of " + join(allowed, ", "));
                          c.*field = std::string(v);
                      },
                      [=](const RunConfig& c) { return c.*field; }};
        };
        auto source = [&](const char* key, std::string RunConfig::*field,
                          std::map<std::string, std::size_t> kinds) {
            m[key] = {[=](RunConfig& c, std::string_view v) { c.*field = canonical_source(v, kinds); },
                      [=](const RunConfig& c) { return c.*field; }};
        };

        m["sim.grid"] = {[](RunConfig& c, std::string_view v) {
                             const auto [a, b] = pair_x(v);
                             if (a != std::floor(a) || b != std::floor(b) || a < 4 || b < 4 ||
                                 a > 1e5 || b > 1e5)
                                 throw ArgumentError("node counts must be integers >= 4");
                             c.nx = static_cast<int>(a);
                             c.ny = static_cast<int>(b);
                         },
                         [](const RunConfig& c) {
                             return std::to_string(c.nx) + " x " + std::to_string(c.ny);
                         }};
        m["sim.domain"] = {[](RunConfig& c, std::string_view v) {
                               const auto [a, b] = pair_x(v);
                               c.lx = positive(a);
                               c.ly = positive(b);
                           },
                           [](const RunConfig& c) { return fmt(c.lx) + " x " + fmt(c.ly); }};
        choice("sim.bc", &RunConfig::bc, {"periodic", "neumann", "dirichlet"});
        num("sim.eps", &RunConfig::eps, positive);
        num("sim.mu", &RunConfig::mu, positive);
        num("sim.lambda", &RunConfig::lambda, positive);
        num("sim.gamma", &RunConfig::gamma, positive);
        optional_positive("sim.dt", &RunConfig::dt);
        flag("sim.dt_override", &RunConfig::dt_override);
        num("sim.T", &RunConfig::T, positive);
        num("sim.proj_tol", &RunConfig::proj_tol, positive);
        m["noise.seed"] = {[](RunConfig& c, std::string_view v) { c.seed = to_u64(v); },
                           [](const RunConfig& c) { return std::to_string(c.seed); }};
        count("noise.modes", &RunConfig::modes, 0);
        num("noise.sigma0", &RunConfig::sigma0, non_negative);
        num("noise.q", &RunConfig::q, non_negative);
        num("noise.xi1", &RunConfig::xi1, non_negative);
        num("noise.xi2", &RunConfig::xi2, non_negative);
        source("field.h", &RunConfig::field_h, {{"const", 3}, {"wave", 1}, {"file", 0}});
        source("init.u", &RunConfig::init_u, {{"zero", 0}, {"taylor-green", 2}, {"file", 0}});
        source("init.d", &RunConfig::init_d,
               {{"const", 3}, {"vortex", 3}, {"texture", 1}, {"skew-texture", 1}, {"file", 0}});
        m["out.dir"] = {[](RunConfig& c, std::string_view v) {
                            if (v.empty()) throw ArgumentError("must not be empty");
                            c.out_dir = std::string(v);
                        },
                        [](const RunConfig& c) { return c.out_dir; }};
        count("out.checkpoint_every", &RunConfig::checkpoint_every, 1);
        choice("run.mode", &RunConfig::mode, {"simulate", "ensemble", "sweep", "diagnose", "selftest"});
        count("ensemble.paths", &RunConfig::paths, 1);
        m["ensemble.sup"] = {[](RunConfig& c, std::string_view v) {
                                 if (v != "checkpoints" && v != "steps")
                                     throw ArgumentError("expected checkpoints or steps");
                                 c.sup_every_step = v == "steps";
                             },
                             [](const RunConfig& c) {
                                 return std::string(c.sup_every_step ? "steps" : "checkpoints");
                             }};
        m["sweep.eps"] = {[](RunConfig& c, std::string_view v) {
                              std::vector<double> e = numbers(v, 0);
                              for (std::size_t i = 0; i < e.size(); ++i) {
                                  positive(e[i]);
                                  if (i && !(e[i] < e[i - 1]))
                                      throw ArgumentError("values must be strictly decreasing");
                              }
                              c.sweep_eps = std::move(e);
                          },
                          [](const RunConfig& c) { return fmt_list(c.sweep_eps); }};
        flag("diag.budget", &RunConfig::budget);
        optional_positive("diag.defect_radius", &RunConfig::defect_radius);
        optional_positive("diag.delta0sq", &RunConfig::delta0_sq);
        return m;
    }();
    return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : ArgumentError("invalid configuration:\n  " + join(problems, "\n  ")),
      problems_(std::move(problems)) {}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& [k, e] : schema()) out.push_back(k);
    return out;
}

std::string RunConfig::canonical() const {
    std::string out;
    for (const auto& [k, e] : schema()) out += k + " = " + e.get(*this) + "\n";
    return out;
}

std::string RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::vector<std::string> problems;
    std::map<std::string, int> seen;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const std::string where = "line " + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            problems.push_back(where + "expected 'key = value'");
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = schema().find(key);
        if (it == schema().end()) {
            problems.push_back(where + "unknown key '" + key + "'");
            continue;
        }
        if (const auto prev = seen.find(key); prev != seen.end()) {
            problems.push_back(where + "duplicate key '" + key + "' (first set on line " +
                               std::to_string(prev->second) + ")");
            continue;
        }
        seen[key] = line_no;
        try {
            it->second.set(cfg, value);
        } catch (const ArgumentError& e) {
            problems.push_back(where + key + ": " + e.what());
        }
        if (end == text.size()) break;
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read configuration " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

Grid make_grid(const RunConfig& c) {
    if (c.bc == "periodic")
        return Grid(c.nx, c.ny, c.lx, c.ly, VelocityBc::periodic, DirectorBc::periodic);
    return Grid(c.nx, c.ny, c.lx, c.ly, VelocityBc::no_slip,
                c.bc == "neumann" ? DirectorBc::neumann : DirectorBc::dirichlet);
}

template <class F>
F load_field(const std::string& path, const Grid& g, const char* what) {
    AnyField any = read_snapshot(std::filesystem::path(path), g.lx(), g.ly());
    if (!std::holds_alternative<F>(any))
        throw ArgumentError(std::string(what) + ": snapshot has the wrong component count");
    F f = std::get<F>(std::move(any));
    if (!(f.grid() == g)) throw ArgumentError(std::string(what) + ": snapshot grid does not match sim.grid/sim.bc");
    return f;
}

std::vector<double> args_of(const std::string& s) {
    return numbers(tagged(s).second, 0);
}

}  // namespace

Problem build_problem(const RunConfig& c) {
    const Grid grid = make_grid(c);
    const std::string u_kind = tagged(c.init_u).first, d_kind = tagged(c.init_d).first,
                      h_kind = tagged(c.field_h).first;

    VectorField u0(grid);
    if (u_kind == "taylor-green") {
        const auto a = args_of(c.init_u);
        if (a[0] != std::floor(a[0]) || a[0] < 1)
            throw ConfigError({"init.u: wavenumber must be a positive integer"});
        u0 = taylor_green(grid, static_cast<int>(a[0]), a[1]);
    } else if (u_kind == "file") {
        u0 = leray_project(load_field<VectorField>(tagged(c.init_u).second, grid, "init.u"), c.proj_tol).u;
    }

    DirectorField d0(grid);
    if (d_kind == "const") {
        const auto a = args_of(c.init_d);
        d0.fill({a[0], a[1], a[2]});
    } else if (d_kind == "vortex") {
        const auto a = args_of(c.init_d);
        if (!(a[2] > 0.0)) throw ConfigError({"init.d: vortex core must be positive"});
        d0 = vortex_director(grid, a[0], a[1], a[2]);
    } else if (d_kind == "texture") {
        d0 = texture_director(grid, args_of(c.init_d)[0]);
    } else if (d_kind == "skew-texture") {
        d0 = skew_texture_director(grid, args_of(c.init_d)[0]);
    } else {
        d0 = load_field<DirectorField>(tagged(c.init_d).second, grid, "init.d");
    }

    MagneticField h = [&] {
        if (h_kind == "const") {
            const auto a = args_of(c.field_h);
            return MagneticField{DirectorField(grid, Vec3{a[0], a[1], a[2]}), c.field_h};
        }
        if (h_kind == "wave") return MagneticField{wave_field(grid, args_of(c.field_h)[0]), c.field_h};
        return MagneticField{load_field<DirectorField>(tagged(c.field_h).second, grid, "field.h"),
                             c.field_h};
    }();

    Params p;
    p.eps = c.eps;
    p.mu = c.mu;
    p.lambda = c.lambda;
    p.gamma = c.gamma;
    p.xi1 = c.xi1;
    p.xi2 = c.xi2;
    p.T = c.T;
    p.proj_tol = c.proj_tol;
    p.allow_unstable_dt = c.dt_override;

    double eps_min = c.eps;
    if (c.mode == "sweep")
        for (double e : c.sweep_eps) eps_min = std::min(eps_min, e);
    const double bound = stability_dt(eps_min, grid, c.mu, c.gamma, u0.max_abs());
    std::size_t steps;
    if (c.dt) {
        p.dt = *c.dt;
        if (p.dt > bound && !c.dt_override)
            throw StabilityError("sim.dt " + fmt(p.dt) + " exceeds the stability bound " + fmt(bound) +
                                     " (set sim.dt_override = true to force it)",
                                 p.dt, bound);
        steps = static_cast<std::size_t>(std::ceil(c.T / p.dt - 1e-9));
    } else {
        steps = static_cast<std::size_t>(std::ceil(c.T / bound));
        p.dt = c.T / static_cast<double>(steps);
    }
    p.validate();

    Problem out{c, grid, p, NoiseSpec{c.modes, c.sigma0, c.q}, std::move(h), std::move(u0),
                std::move(d0), steps};
    return out;
}

Problem with_eps(const Problem& problem, double eps) {
    Problem out = problem;
    out.params.eps = eps;
    out.config.eps = eps;
    if (out.params.dt > stability_dt(eps, out.grid, out.params.mu, out.params.gamma, out.u0.max_abs()) &&
        !out.params.allow_unstable_dt)
        throw StabilityError("time step too large for eps = " + fmt(eps), out.params.dt,
                             stability_dt(eps, out.grid, out.params.mu, out.params.gamma));
    return out;
}

}  // namespace selflow
