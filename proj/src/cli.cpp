#include "nelson/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "nelson/action.hpp"
#include "nelson/bounds.hpp"
#include "nelson/fiber.hpp"
#include "nelson/nonfock.hpp"
#include "nelson/semigroup.hpp"
#include "nelson/verify.hpp"

#ifndef NELSON_VERSION
#define NELSON_VERSION "0.0.0"
#endif

namespace nelson::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "model.eps",         "model.mu",          "model.N",          "model.kappa",      "model.lambda",
        "model.chi",         "model.eta",         "grid.radial",      "grid.angular",     "grid.rho_max",
        "grid.rho_min",      "mc.dt",             "mc.paths",         "mc.seed",          "mc.threads",
        "experiment.t",      "experiment.x",      "experiment.potential", "experiment.omega0",
        "experiment.radius", "experiment.soft_a", "experiment.strength", "experiment.box", "experiment.xi",
        "experiment.suite",  "experiment.log_term", "experiment.form", "experiment.kappas", "experiment.p",
        "experiment.probes", "experiment.trials", "experiment.out"};
    return keys;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "infinity") return kernel::kInf;
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

struct View {
    const Settings& s;
    bool has(const std::string& k) const { return s.count(k) != 0; }
    std::string str(const std::string& k, const std::string& def) const { return has(k) ? s.at(k) : def; }
    double num(const std::string& k, double def) const { return has(k) ? to_double(k, s.at(k)) : def; }
    long long integer(const std::string& k, long long def) const { return has(k) ? to_int(k, s.at(k)) : def; }
    bool flag(const std::string& k, bool def) const {
        if (!has(k)) return def;
        const std::string v = s.at(k);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(k + ": expected true or false, got '" + v + "'");
    }
};

kernel::ModelParams model_from(const View& v, kernel::ModelParams p) {
    p.eps = v.num("model.eps", p.eps);
    p.mu = v.num("model.mu", p.mu);
    p.n_particles = int(v.integer("model.N", p.n_particles));
    if (v.has("model.kappa")) {
        const double k = v.num("model.kappa", p.kappa);
        if (!std::isinf(k) && (k <= 0.0 || k != std::floor(k)))
            throw ConfigError("model.kappa: expected a positive integer or 'inf'");
        p.kappa = k;
    }
    p.lambda_split = v.num("model.lambda", p.lambda_split);
    const std::string chi = v.str("model.chi", p.chi == kernel::ChiKind::sharp ? "sharp" : "taper");
    if (chi == "sharp")
        p.chi = kernel::ChiKind::sharp;
    else if (chi == "taper")
        p.chi = kernel::ChiKind::taper;
    else
        throw ConfigError("model.chi: expected sharp or taper, got '" + chi + "'");
    const std::string eta = v.str("model.eta", "one");
    if (eta == "one") {
        p.eta = kernel::EtaKind::one;
    } else if (eta.rfind("ir-cut:", 0) == 0) {
        p.eta = kernel::EtaKind::ir_cut;
        p.eta_cut = to_double("model.eta", eta.substr(7));
    } else {
        throw ConfigError("model.eta: expected one or ir-cut:L, got '" + eta + "'");
    }
    p.grid.radial_nodes = int(v.integer("grid.radial", p.grid.radial_nodes));
    p.grid.angular_nodes = int(v.integer("grid.angular", p.grid.angular_nodes));
    p.grid.rho_max = v.num("grid.rho_max", p.grid.rho_max);
    p.grid.rho_min = v.num("grid.rho_min", p.grid.rho_min);
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    return p;
}

McControls mc_from(const View& v, McControls mc) {
    mc.dt = v.num("mc.dt", mc.dt);
    if (!(mc.dt > 0.0)) throw ConfigError("mc.dt: must be positive");
    const long long n = v.integer("mc.paths", mc.n_paths);
    if (n < 2 || n > 100000000) throw ConfigError("mc.paths: must lie in [2, 1e8]");
    mc.n_paths = int(n);
    const long long seed = v.integer("mc.seed", (long long)mc.seed);
    if (seed < 0) throw ConfigError("mc.seed: must be non-negative");
    mc.seed = std::uint64_t(seed);
    mc.threads = int(v.integer("mc.threads", mc.threads));
    return mc;
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

class Csv {
public:
    Csv(const std::string& anchor, const std::vector<std::string>& cols) {
        os_ << "# " << anchor << "\n";
        for (size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
        os_ << "\n";
    }
    template <class... T>
    void row(const T&... v) {
        bool first = true;
        ((os_ << (first ? "" : ",") << cell(v), first = false), ...);
        os_ << "\n";
    }
    std::string str() const { return os_.str(); }

private:
    static std::string cell(double x) { return fmt(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(long long x) { return std::to_string(x); }
    static std::string cell(const std::string& x) { return x; }
    static std::string cell(const char* x) { return x; }
    std::ostringstream os_;
};

// Files are staged as *.part and renamed only after the manifest is on disk.
class Artifacts {
public:
    explicit Artifacts(std::string dir) : dir_(std::move(dir)) {}
    void add(const std::string& name, const std::string& content) { files_.emplace_back(name, content); }
    void commit(json manifest) {
        if (dir_.empty()) return;
        fs::create_directories(dir_);
        std::vector<fs::path> staged;
        try {
            for (const auto& [name, content] : files_) {
                const fs::path p = fs::path(dir_) / (name + ".part");
                std::ofstream(p, std::ios::binary) << content;
                staged.push_back(p);
                manifest["files"].push_back(name);
            }
            std::ofstream(fs::path(dir_) / "manifest.json") << manifest.dump(2) << "\n";
            for (size_t i = 0; i < staged.size(); ++i) fs::rename(staged[i], fs::path(dir_) / files_[i].first);
        } catch (...) {
            for (const auto& p : staged) fs::remove(p);
            throw;
        }
    }

private:
    std::string dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

json params_json(const kernel::ModelParams& p) {
    return {{"eps", p.eps},
            {"mu", p.mu},
            {"N", p.n_particles},
            {"kappa", p.finite_cutoff() ? json(p.kappa) : json("inf")},
            {"lambda", p.lambda_split},
            {"chi", p.chi == kernel::ChiKind::sharp ? "sharp" : "taper"},
            {"eta", p.eta == kernel::EtaKind::one ? "one" : "ir-cut:" + fmt(p.eta_cut)},
            {"grid_radial", p.grid.radial_nodes},
            {"grid_angular", p.grid.angular_nodes}};
}

semigroup::PotentialSpec potential_from(const View& v) {
    semigroup::PotentialSpec V;
    const std::string k = v.str("experiment.potential", "zero");
    if (k == "zero") {
        V.kind = semigroup::PotentialSpec::Kind::zero;
    } else if (k == "harmonic") {
        V.kind = semigroup::PotentialSpec::Kind::harmonic;
        V.omega0 = v.num("experiment.omega0", 1.0);
        V.radius = v.num("experiment.radius", 10.0);
    } else if (k == "soft-coulomb") {
        V.kind = semigroup::PotentialSpec::Kind::soft_coulomb;
        V.a = v.num("experiment.soft_a", 1.0);
        V.strength = v.num("experiment.strength", 1.0);
    } else {
        throw ConfigError("experiment.potential: expected zero, harmonic or soft-coulomb, got '" + k + "'");
    }
    return V;
}

std::vector<double> positions_from(const View& v, int N) {
    std::vector<double> x(3 * N, 0.0);
    if (v.has("experiment.x")) {
        x = parse_list(v.str("experiment.x", ""));
        if (int(x.size()) != 3 * N) throw ConfigError("experiment.x: expected 3N = " + std::to_string(3 * N) + " values");
    }
    return x;
}

std::vector<double> times_from(const View& v, const std::string& def) {
    try {
        return parse_time_grid(v.str("experiment.t", def));
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("experiment.t: ") + e.what());
    }
}

semigroup::ActionForm form_from(const View& v) {
    const std::string f = v.str("experiment.form", "decomposed");
    if (f == "decomposed") return semigroup::ActionForm::decomposed;
    if (f == "direct") return semigroup::ActionForm::direct;
    throw ConfigError("experiment.form: expected decomposed or direct, got '" + f + "'");
}

struct Outcome {
    json summary;
    int code = 0;
};

Outcome cmd_action(const View& v, Artifacts& out) {
    const auto p = model_from(v, {});
    const auto mc = mc_from(v, {});
    const auto tg = times_from(v, "1");
    const auto x = positions_from(v, p.n_particles);
    const auto idx = semigroup::time_indices(tg, mc.dt);
    const semigroup::PathEvaluator ev(p);
    std::vector<std::vector<action::ActionBreakdown>> rows(mc.n_paths);
    parallel_for_index(mc.n_paths, mc.threads, [&](int s) {
        const auto path = paths::sample_path(mc.seed, std::uint64_t(s), idx.back(), mc.dt, p.n_particles);
        semigroup::SnapshotOptions o;
        o.fields = false;
        ev.run(path, x, idx, o, nullptr, [&](const semigroup::Snapshot& sn) { rows[s].push_back(sn.action); });
    });
    Csv csv("complex action u_t[x, b] and its decomposition (dimensionless), per Brownian path",
            {"stream [index]", "t [time]", "b [1]", "c_minus [1]", "c_plus [1]", "v [1]", "m [1]", "u [1]",
             "u_direct [1]", "tail [1]"});
    std::vector<double> mean(tg.size(), 0.0), sq(tg.size(), 0.0);
    double tail = 0.0;
    for (int s = 0; s < mc.n_paths; ++s)
        for (size_t k = 0; k < tg.size(); ++k) {
            const auto& a = rows[s][k];
            csv.row(s, tg[k], a.b, a.c_minus, a.c_plus, a.v, a.m, a.u_total, a.u_direct ? *a.u_direct : NAN, a.tail);
            mean[k] += a.u_total / mc.n_paths;
            sq[k] += a.u_total * a.u_total / mc.n_paths;
            tail = std::max(tail, a.tail);
        }
    if (!p.finite_cutoff() && tail > 0.25)
        throw GridTailError("outer radial half carries " + fmt(tail) + " of the action; raise grid.rho_max");
    out.add("action.csv", csv.str());
    json s{{"params", params_json(p)}, {"n_paths", mc.n_paths}, {"tail_max", tail}};
    for (size_t k = 0; k < tg.size(); ++k)
        s["mean_u"].push_back({{"t", tg[k]},
                               {"mean", mean[k]},
                               {"stderr", std::sqrt(std::max(0.0, sq[k] - mean[k] * mean[k]) / (mc.n_paths - 1))}});
    if (v.has("experiment.kappas")) {
        const auto ks = parse_list(v.str("experiment.kappas", ""));
        const auto T = action::action_convergence_stat(x, tg.back(), ks, p, mc);
        Csv c2("E|u_kappa - u_inf| at fixed t with common random numbers (dimensionless)",
               {"kappa [momentum]", "mean_abs_diff [1]", "stderr [1]", "n_paths [count]"});
        for (const auto& r : T.rows) c2.row(r.kappa, r.value, r.std_err, T.n_paths);
        out.add("convergence.csv", c2.str());
        s["convergence"] = {{"slope", T.slope}, {"slope_stderr", T.slope_stderr}, {"tail_max", T.tail_max}};
    }
    return {s, 0};
}

json fit_json(const semigroup::EnergyFit& f) {
    return {{"energy", f.energy},
            {"energy_err", f.energy_err},
            {"window", {f.t_lo, f.t_hi}},
            {"convexity_ok", f.convexity_ok},
            {"convexity_excess", f.convexity_excess},
            {"log_coef", f.log_coef},
            {"log_coef_err", f.log_coef_err}};
}

semigroup::EnergyOptions energy_opts(const View& v) {
    semigroup::EnergyOptions o;
    o.box_half_width = v.num("experiment.box", o.box_half_width);
    o.form = form_from(v);
    o.fit.log_term = v.flag("experiment.log_term", false);
    return o;
}

Outcome cmd_energy(const View& v, Artifacts& out, bool tilde) {
    const auto p = model_from(v, {});
    const auto mc = mc_from(v, {});
    const auto tg = times_from(v, "0.5:4:8");
    const auto V = potential_from(v);
    auto opt = energy_opts(v);
    semigroup::EnergyFit f;
    json s{{"params", params_json(p)}, {"representation", tilde ? "nonfock" : "fock"}};
    if (tilde) {
        nonfock::GrossParams gp;
        gp.lambda = p.lambda_split;
        gp.base = p;
        f = nonfock::tilde_ground_energy(gp, V, tg, mc, opt);
        if (p.finite_cutoff() && gp.representable()) {
            const auto ev = nonfock::make_evaluator(gp);
            const int n = std::min(mc.n_paths, 50);
            const int steps = int(std::lround(tg.back() / mc.dt));
            std::vector<double> res(n);
            const std::vector<double> x(3 * p.n_particles, 0.0);
            parallel_for_index(n, mc.threads, [&](int k) {
                const auto path = paths::sample_path(mc.seed, std::uint64_t(k), steps, mc.dt, p.n_particles);
                const auto g = verify::random_probe(ev.grid(), mc.seed, 2 * std::uint64_t(k));
                const auto h = verify::random_probe(ev.grid(), mc.seed, 2 * std::uint64_t(k) + 1);
                res[k] = nonfock::idgross_residual(ev, path, x, steps, g, h, gp, V).rel;
            });
            s["idgross_max_rel_residual"] = *std::max_element(res.begin(), res.end());
        }
    } else {
        f = semigroup::ground_energy(p, V, tg, mc, opt);
    }
    Csv csv(std::string("ln Z(t) with Z(t) = int <rho Omega, e^{-tH} rho Omega> dx, ") +
                (tilde ? "non-Fock action" : "Fock action") + " (dimensionless)",
            {"representation", "t [time]", "lnZ [1]", "stderr [1]", "n_paths [count]", "n_x_points [count]"});
    for (size_t k = 0; k < tg.size(); ++k)
        csv.row(std::string(tilde ? "nonfock" : "fock"), tg[k], f.lnZ[k], f.std_err[k], f.n_paths, f.n_x_points);
    s.update(fit_json(f));
    out.add(tilde ? "nonfock.csv" : "energy.csv", csv.str());
    out.add(tilde ? "nonfock.json" : "energy.json", s.dump(2) + "\n");
    return {s, 0};
}

Outcome cmd_fiber(const View& v, Artifacts& out) {
    kernel::ModelParams p = model_from(v, {});
    if (p.n_particles != 1) throw ConfigError("model.N: the fiber experiment needs N = 1");
    const auto mc = mc_from(v, {});
    const auto tg = times_from(v, "0.5:4:8");
    std::vector<Vec3> xis;
    std::stringstream ss(v.str("experiment.xi", "0,0,0"));
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto c = parse_list(item);
        if (c.size() != 3) throw ConfigError("experiment.xi: each momentum needs three components");
        xis.push_back({c[0], c[1], c[2]});
    }
    fiber::FiberOptions opt;
    opt.form = form_from(v);
    opt.fit.log_term = v.flag("experiment.log_term", false);
    Csv csv("ln E[e^{u_t + i xi.B_t}] for the fiber at total momentum xi (dimensionless)",
            {"xi_x [momentum]", "xi_y [momentum]", "xi_z [momentum]", "t [time]", "lnZ_re [1]", "lnZ_im [rad]",
             "stderr [1]", "n_paths [count]"});
    json s{{"params", params_json(p)}, {"fibers", json::array()}};
    for (const auto& xi : xis) {
        const auto f = fiber::fiber_energy(xi, p, tg, mc, opt);
        for (size_t k = 0; k < tg.size(); ++k)
            csv.row(xi[0], xi[1], xi[2], tg[k], f.lnZ[k], f.lnZ_im[k], f.std_err[k], f.n_paths);
        json j = fit_json(f);
        j["xi"] = {xi[0], xi[1], xi[2]};
        s["fibers"].push_back(j);
    }
    out.add("fiber.csv", csv.str());
    out.add("fiber.json", s.dump(2) + "\n");
    return {s, 0};
}

Outcome cmd_bounds(const View& v, Artifacts& out) {
    const double eps = v.num("model.eps", 1.0);
    const int N = int(v.integer("model.N", 1));
    const double mu = v.num("model.mu", 0.0);
    const auto tg = times_from(v, "1");
    const double p = v.num("experiment.p", 2.0);
    const auto rows = bounds::bound_table(eps, N, mu, tg.back(), p);
    Csv csv("closed-form bounds with universal constants set to 1",
            {"quantity", "formula", "value [1]", "regime", "anchor"});
    std::printf("%-24s %-18s %-24s %s\n", "quantity", "value", "regime", "anchor");
    for (const auto& r : rows) {
        csv.row("\"" + r.quantity + "\"", "\"" + r.formula + "\"", r.value, "\"" + r.regime + "\"",
                "\"" + r.anchor + "\"");
        std::printf("%-24s %-18.10g %-24s %s\n", r.quantity.c_str(), r.value, r.regime.c_str(), r.anchor.c_str());
    }
    out.add("bounds.csv", csv.str());
    json s{{"eps", eps}, {"N", N}, {"mu", mu}, {"t", tg.back()}, {"p", p}};
    bounds::PekarTrial g;
    bounds::PekarTrial h;
    h.kind = bounds::PekarTrial::Kind::hydrogenic;
    s["pekar"] = {{"gaussian", bounds::pekar_energy(g).energy}, {"hydrogenic", bounds::pekar_energy(h).energy},
                  {"E_P", bounds::kPekarEnergy}};
    const long long trials = v.integer("experiment.trials", 100000);
    const std::uint64_t seed = std::uint64_t(v.integer("mc.seed", 1));
    for (int n : {2, 3, 4}) {
        const auto r = bounds::pair_lemma_check(n, {}, trials, seed);
        s["pair_lemma"].push_back({{"N", n},
                                   {"lhs", r.lhs},
                                   {"lhs_err", r.lhs_err},
                                   {"rhs", r.rhs},
                                   {"rhs_err", r.rhs_err},
                                   {"violated", r.violated}});
    }
    out.add("bounds.json", s.dump(2) + "\n");
    return {s, 0};
}

Outcome cmd_verify(const View& v, const std::vector<std::string>& suites, Artifacts& out) {
    verify::SuiteConfig cfg;
    cfg.p = model_from(v, cfg.p);
    cfg.mc = mc_from(v, cfg.mc);
    cfg.probes = int(v.integer("experiment.probes", cfg.probes));
    cfg.t = times_from(v, "1").back();
    json s{{"suites", json::array()}};
    bool ok = true;
    for (const auto& name : suites) {
        const auto r = verify::run_suite(name, cfg);
        ok = ok && r.passed();
        s["suites"].push_back(json::parse(verify::to_json(r)));
    }
    s["passed"] = ok;
    out.add("verify.json", s.dump(2) + "\n");
    return {s, ok ? 0 : 3};
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char b[32];
    std::strftime(b, sizeof b, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return b;
}

}  // namespace

Settings parse_config_text(const std::string& text, const std::string& origin) {
    Settings s;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (!known_keys().count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        if (val.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
        s[key] = val;
    }
    return s;
}

Settings load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::uint64_t config_hash(const Settings& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& [k, v] : s) {
        if (k == "experiment.out" || k == "mc.threads") continue;
        for (char c : k + "=" + v + "\n") {
            h ^= std::uint8_t(c);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(to_double("list", item));
    }
    if (out.empty()) throw ConfigError("empty list '" + text + "'");
    return out;
}

std::vector<double> parse_time_grid(const std::string& text) {
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) return parse_list(text);
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError("expected a:b:n, got '" + text + "'");
    const double a = to_double("t", text.substr(0, c1)), b = to_double("t", text.substr(c1 + 1, c2 - c1 - 1));
    const long long n = to_int("t", text.substr(c2 + 1));
    if (n < 1 || !(b >= a) || !(a > 0.0)) throw ConfigError("expected 0 < a <= b and n >= 1 in '" + text + "'");
    std::vector<double> t;
    for (long long i = 0; i < n; ++i) t.push_back(n == 1 ? b : a + (b - a) * double(i) / double(n - 1));
    return t;
}

int run(int argc, char** argv) {
    CLI::App app{"Path-integral engine for the renormalized Nelson model"};
    app.set_version_flag("--version", NELSON_VERSION);
    app.require_subcommand(1);
    struct Flag {
        const char* name;
        const char* key;
        const char* help;
    };
    const std::vector<Flag> common{
        {"--eps", "model.eps", "coupling constant"},
        {"--mu", "model.mu", "boson mass"},
        {"--N", "model.N", "number of particles"},
        {"--kappa", "model.kappa", "UV cutoff (integer or inf)"},
        {"--lambda", "model.lambda", "IR split of the Gross transformation"},
        {"--chi", "model.chi", "cutoff profile: sharp or taper"},
        {"--eta", "model.eta", "IR profile: one or ir-cut:L"},
        {"--dt", "mc.dt", "time step"},
        {"--t", "experiment.t", "times: a:b:n or a comma list"},
        {"--paths", "mc.paths", "number of Brownian paths"},
        {"--seed", "mc.seed", "RNG seed"},
        {"--threads", "mc.threads", "worker count (default NELSON_FK_THREADS)"},
        {"--grid-radial", "grid.radial", "radial quadrature nodes"},
        {"--grid-angular", "grid.angular", "angular nodes: 6, 14, 26 or 2M^2"},
        {"--rho-max", "grid.rho_max", "outer radius of the momentum grid"},
        {"--out", "experiment.out", "output directory"},
    };
    const std::vector<std::tuple<std::string, Flag>> extra{
        {"action", {"--x", "experiment.x", "start positions, 3N comma-separated values"}},
        {"action", {"--kappas", "experiment.kappas", "cutoffs for the convergence table"}},
        {"energy", {"--potential", "experiment.potential", "zero, harmonic or soft-coulomb"}},
        {"energy", {"--omega0", "experiment.omega0", "harmonic frequency"}},
        {"energy", {"--box", "experiment.box", "half width of the spatial box"}},
        {"energy", {"--form", "experiment.form", "decomposed or direct"}},
        {"nonfock", {"--potential", "experiment.potential", "zero, harmonic or soft-coulomb"}},
        {"nonfock", {"--omega0", "experiment.omega0", "harmonic frequency"}},
        {"nonfock", {"--box", "experiment.box", "half width of the spatial box"}},
        {"fiber", {"--xi", "experiment.xi", "total momenta 'x,y,z;x,y,z'"}},
        {"bounds", {"--p", "experiment.p", "moment order"}},
        {"bounds", {"--trials", "experiment.trials", "pair lemma Monte Carlo trials"}},
        {"verify", {"--probes", "experiment.probes", "random coherent probes"}},
    };
    std::map<std::string, std::string> given;
    std::map<std::string, std::map<std::string, std::string>> values;
    std::string config_path;
    std::vector<std::string> suites;
    bool log_term = false;
    bool quiet = false;
    std::map<std::string, CLI::App*> subs;
    for (const char* name : {"action", "energy", "fiber", "nonfock", "bounds", "verify"}) {
        auto* sc = app.add_subcommand(name);
        subs[name] = sc;
        sc->add_option("--config", config_path, "flat key = value config file");
        sc->add_flag("--quiet", quiet, "do not print the JSON summary");
        for (const auto& f : common) sc->add_option(f.name, values[name][f.key], f.help);
        for (const auto& [cmd, f] : extra)
            if (cmd == name) sc->add_option(f.name, values[name][f.key], f.help);
        if (std::string(name) == "energy" || std::string(name) == "nonfock" || std::string(name) == "fiber")
            sc->add_flag("--log-term", log_term, "fit ln Z = a - E t - gamma ln t");
        if (std::string(name) == "verify")
            sc->add_option("--suite", suites, "fock-algebra, identities, moments, convergence, bounds")->delimiter(',');
    }
    subs["verify"]->footer("Exit code 3 when a check fails.");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    std::string cmd;
    for (const auto& [name, sc] : subs)
        if (sc->parsed()) cmd = name;

    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    try {
        Settings s;
        if (!config_path.empty()) s = load_config_file(config_path);
        auto* sc = subs[cmd];
        for (const auto& f : common)
            if (sc->count(f.name)) s[f.key] = values[cmd][f.key];
        for (const auto& [c, f] : extra)
            if (c == cmd && sc->count(f.name)) s[f.key] = values[cmd][f.key];
        if (log_term) s["experiment.log_term"] = "true";
        if (cmd == "verify") {
            if (suites.empty() && s.count("experiment.suite")) {
                std::stringstream ss(s["experiment.suite"]);
                std::string item;
                while (std::getline(ss, item, ',')) suites.push_back(trim(item));
            }
            if (suites.empty()) {
                std::cerr << "verify: no suite selected (use --suite)\n";
                return 2;
            }
            for (const auto& su : suites)
                if (std::find(verify::suite_names().begin(), verify::suite_names().end(), su) ==
                    verify::suite_names().end()) {
                    std::cerr << "verify: unknown suite '" << su << "'\n";
                    return 2;
                }
            std::string joined;
            for (const auto& su : suites) joined += (joined.empty() ? "" : ",") + su;
            s["experiment.suite"] = joined;
        }
        const View v{s};
        Artifacts out(v.str("experiment.out", ""));
        Outcome o;
        if (cmd == "action") o = cmd_action(v, out);
        if (cmd == "energy") o = cmd_energy(v, out, false);
        if (cmd == "nonfock") o = cmd_energy(v, out, true);
        if (cmd == "fiber") o = cmd_fiber(v, out);
        if (cmd == "bounds") o = cmd_bounds(v, out);
        if (cmd == "verify") o = cmd_verify(v, suites, out);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char hash[20];
        std::snprintf(hash, sizeof hash, "%016llx", (unsigned long long)config_hash(s));
        json cfg = json::object();
        for (const auto& [k, val] : s) cfg[k] = val;
        json manifest{{"command", cmd},
                      {"config", cfg},
                      {"config_hash", hash},
                      {"seed", v.integer("mc.seed", 1)},
                      {"version", NELSON_VERSION},
                      {"started_utc", started},
                      {"wall_time_s", wall},
                      {"threads", resolve_threads(int(v.integer("mc.threads", 0)))},
                      {"files", json::array()}};
        out.commit(manifest);
        if (cmd != "bounds" && !quiet) std::cout << o.summary.dump(2) << "\n";
        return o.code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace nelson::cli
