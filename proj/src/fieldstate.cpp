#include "nelson/fieldstate.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nelson::field {

namespace {

constexpr double kPi = 3.14159265358979323846;

void push_orbit(AngularRule& r, const Vec3& v, double w) {
    // All sign combinations of the nonzero components of v.
    for (int sx : {1, -1})
        for (int sy : {1, -1})
            for (int sz : {1, -1}) {
                if ((v[0] == 0.0 && sx < 0) || (v[1] == 0.0 && sy < 0) || (v[2] == 0.0 && sz < 0)) continue;
                r.dirs.push_back({sx * v[0], sy * v[1], sz * v[2]});
                r.weights.push_back(4.0 * kPi * w);
            }
}

void push_permutations(AngularRule& r, const Vec3& v, double w) {
    std::vector<Vec3> seen;
    Vec3 a = v;
    std::sort(a.begin(), a.end());
    do {
        if (std::find(seen.begin(), seen.end(), a) == seen.end()) {
            seen.push_back(a);
            push_orbit(r, a, w);
        }
    } while (std::next_permutation(a.begin(), a.end()));
}

struct GlTable {
    explicit GlTable(int n) : t(gsl_integration_glfixed_table_alloc(size_t(n))), n(n) {}
    ~GlTable() { gsl_integration_glfixed_table_free(t); }
    void point(double a, double b, int i, double& x, double& w) const {
        gsl_integration_glfixed_point(a, b, size_t(i), &x, &w, t);
    }
    gsl_integration_glfixed_table* t;
    int n;
};

}  // namespace

AngularRule angular_rule(int n) {
    AngularRule r;
    const double s2 = 1.0 / std::sqrt(2.0), s3 = 1.0 / std::sqrt(3.0);
    if (n == 6) {
        push_permutations(r, {0.0, 0.0, 1.0}, 1.0 / 6.0);
        r.degree = 3;
    } else if (n == 14) {
        push_permutations(r, {0.0, 0.0, 1.0}, 1.0 / 15.0);
        push_orbit(r, {s3, s3, s3}, 3.0 / 40.0);
        r.degree = 5;
    } else if (n == 26) {
        push_permutations(r, {0.0, 0.0, 1.0}, 1.0 / 21.0);
        push_permutations(r, {0.0, s2, s2}, 4.0 / 105.0);
        push_orbit(r, {s3, s3, s3}, 9.0 / 280.0);
        r.degree = 7;
    } else {
        const int m = int(std::lround(std::sqrt(n / 2.0)));
        if (m < 1 || 2 * m * m != n)
            throw DomainError("angular node count must be 6, 14, 26 or 2 M^2");
        GlTable gl(m);
        for (int a = 0; a < m; ++a) {
            double z, wz;
            gl.point(-1.0, 1.0, a, z, wz);
            const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
            for (int b = 0; b < 2 * m; ++b) {
                const double ph = (b + 0.5) * kPi / m;
                r.dirs.push_back({st * std::cos(ph), st * std::sin(ph), z});
                r.weights.push_back(wz * kPi / m);
            }
        }
        r.degree = 2 * m - 1;
    }
    return r;
}

RadialRule radial_rule(int n, double rho_min, double rho_max, std::vector<double> breaks) {
    if (n < 4) throw DomainError("radial rule needs at least 4 nodes");
    if (!(rho_max > 0.0) || !std::isfinite(rho_max)) throw DomainError("rho_max must be finite and > 0");
    rho_min = std::min(rho_min, 0.5 * rho_max);
    std::vector<double> edges{rho_min, rho_max};
    for (double b : breaks)
        if (b > rho_min * (1 + 1e-12) && b < rho_max * (1 - 1e-12)) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    // Subdivide so that no log panel spans more than a factor of 4.
    std::vector<double> panels{edges.front()};
    for (size_t e = 0; e + 1 < edges.size(); ++e) {
        const double ratio = std::log(edges[e + 1] / edges[e]);
        const int pieces = std::max(1, int(std::ceil(ratio / std::log(4.0) - 1e-9)));
        for (int q = 1; q <= pieces; ++q) panels.push_back(edges[e] * std::exp(ratio * q / pieces));
    }
    panels.back() = rho_max;
    const int np = int(panels.size()) - 1;
    const int n0 = std::max(2, n / 8);
    std::vector<double> len(np);
    for (int q = 0; q < np; ++q) len[q] = std::log(panels[q + 1] / panels[q]);
    const double total = std::accumulate(len.begin(), len.end(), 0.0);
    std::vector<int> cnt(np);
    const int rest = n - n0;
    for (int q = 0; q < np; ++q) cnt[q] = std::max(2, int(std::lround(rest * len[q] / total)));
    int diff = rest - std::accumulate(cnt.begin(), cnt.end(), 0);
    while (diff != 0) {
        int best = -1;
        for (int q = 0; q < np; ++q) {
            if (diff < 0 && cnt[q] <= 2) continue;
            if (best < 0 || (diff > 0 ? cnt[q] * len[best] < cnt[best] * len[q]
                                      : cnt[q] * len[best] > cnt[best] * len[q]))
                best = q;
        }
        if (best < 0) break;
        cnt[best] += diff > 0 ? 1 : -1;
        diff += diff > 0 ? -1 : 1;
    }
    RadialRule r;
    {
        GlTable gl(n0);
        for (int i = 0; i < n0; ++i) {
            double s, ws;
            gl.point(0.0, 1.0, i, s, ws);
            const double rho = rho_min * s * s;
            r.nodes.push_back(rho);
            r.weights.push_back(ws * 2.0 * rho_min * s * rho * rho);
        }
    }
    for (int q = 0; q < np; ++q) {
        GlTable gl(cnt[q]);
        for (int i = 0; i < cnt[q]; ++i) {
            double s, ws;
            gl.point(std::log(panels[q]), std::log(panels[q + 1]), i, s, ws);
            const double rho = std::exp(s);
            r.nodes.push_back(rho);
            r.weights.push_back(ws * rho * rho * rho);
        }
    }
    return r;
}

MomentumGrid::MomentumGrid(RadialRule radial, AngularRule angular, double mu)
    : rho_(std::move(radial.nodes)),
      wr_(std::move(radial.weights)),
      dirs_(std::move(angular.dirs)),
      wa_(std::move(angular.weights)),
      mu_(mu),
      degree_(angular.degree) {
    omega_.resize(rho_.size());
    for (size_t i = 0; i < rho_.size(); ++i) omega_[i] = kernel::dispersion(rho_[i], mu_);
    rho_max_ = rho_.empty() ? 0.0 : rho_.back();
    anti_.assign(dirs_.size(), -1);
    for (size_t j = 0; j < dirs_.size(); ++j) {
        for (size_t l = 0; l < dirs_.size(); ++l) {
            const Vec3& a = dirs_[j];
            const Vec3& b = dirs_[l];
            if (std::abs(a[0] + b[0]) + std::abs(a[1] + b[1]) + std::abs(a[2] + b[2]) < 1e-12) {
                anti_[j] = int(l);
                break;
            }
        }
        if (anti_[j] < 0) throw DomainError("angular rule is not antipodally symmetric");
        if (anti_[j] > int(j)) half_.push_back(int(j));
    }
}

MomentumGrid MomentumGrid::build(const ModelParams& p, std::vector<double> breaks) {
    double rho_max = p.grid.rho_max;
    if (!(rho_max > 0.0)) rho_max = p.finite_cutoff() ? p.support_radius() : 1e3;
    if (p.finite_cutoff()) {
        breaks.push_back(p.kappa);
        if (p.chi == kernel::ChiKind::taper) breaks.push_back(2.0 * p.kappa);
    }
    if (p.lambda_split > 0.0) breaks.push_back(p.lambda_split);
    if (p.eta == kernel::EtaKind::ir_cut && p.eta_cut > 0.0) breaks.push_back(p.eta_cut);
    for (double b : p.grid.breaks) breaks.push_back(b);
    return MomentumGrid(radial_rule(p.grid.radial_nodes, p.grid.rho_min, rho_max, breaks),
                        angular_rule(p.grid.angular_nodes), p.mu);
}

Vec3 MomentumGrid::k(int n) const {
    const double r = rho_[radial_index(n)];
    const Vec3& d = dirs_[dir_index(n)];
    return {r * d[0], r * d[1], r * d[2]};
}

FieldState zero_state(const MomentumGrid& grid, Role role) {
    FieldState s;
    s.grid = &grid;
    s.role = role;
    s.values.assign(grid.size(), cplx(0.0, 0.0));
    return s;
}

FieldState atom_state(const MomentumGrid& grid, const kernel::Atom& atom, const ModelParams& p) {
    if (kernel::kernel_info(atom.kernel).rank != 0) throw DomainError("atom_state needs a rank-0 kernel");
    FieldState s = zero_state(grid);
    s.cutoff_finite = p.finite_cutoff();
    for (int n = 0; n < grid.size(); ++n) {
        const int i = grid.radial_index(n);
        const double rho = grid.rho()[i];
        if (rho < atom.band_lo) continue;
        const double r = kernel::kernel_radial(atom.kernel, rho, p);
        const Vec3 k = grid.k(n);
        s.values[n] = std::polar(r * std::exp(-atom.damping * grid.omega()[i]), -dot(k, atom.x));
    }
    return s;
}

namespace {

// Largest weight exponent w for which <A, omega^w A> stays finite without a cutoff.
double weight_ceiling(Role r) {
    switch (r) {
        case Role::Uminus:
        case Role::Uplus:
        case Role::Iaccum: return 0.0;
        case Role::Maccum:
        case Role::Mminus:
        case Role::S: return 0.5;
        case Role::custom: return kernel::kInf;
    }
    return kernel::kInf;
}

}  // namespace

cplx grid_inner(const MomentumGrid& grid, const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s(0.0, 0.0);
    for (int n = 0; n < grid.size(); ++n) s += grid.weight(n) * std::conj(a[n]) * b[n];
    return s;
}

cplx weighted_inner(const FieldState& a, const FieldState& b, double w) {
    if (a.grid != b.grid || a.grid == nullptr) throw DomainError("states live on different grids");
    if ((!a.cutoff_finite || !b.cutoff_finite) && a.role != Role::custom && b.role != Role::custom) {
        const double ceiling = std::min(weight_ceiling(a.role), weight_ceiling(b.role));
        if (!(w < ceiling)) throw WeightNotAllowed("weight exponent not admissible without cutoff");
    }
    const MomentumGrid& g = *a.grid;
    cplx s(0.0, 0.0);
    for (int n = 0; n < g.size(); ++n) {
        const double om = g.omega()[g.radial_index(n)];
        const double f = w == 0.0 ? 1.0 : std::pow(om, w);
        s += g.weight(n) * f * std::conj(a.values[n]) * b.values[n];
    }
    return s;
}

FieldEngine::FieldEngine(const MomentumGrid& grid, const ModelParams& p) : grid_(&grid), p_(p) {
    p_.kappa = kernel::kInf;
    active_ = p.eps != 0.0;
    const int nr = grid.n_radial();
    f_.resize(nr);
    beta_.resize(nr);
    ratio_.resize(nr);
    for (int i = 0; i < nr; ++i) {
        const double rho = grid.rho()[i];
        const double om = grid.omega()[i];
        f_[i] = kernel::coupling_f(rho, p_);
        beta_[i] = kernel::coupling_beta(rho, p_);
        ratio_[i] = 2.0 * om / (om + 0.5 * rho * rho);
    }
    for (int j : grid.half_dirs()) {
        const Vec3& d = grid.dirs()[j];
        for (int i = 0; i < nr; ++i) {
            const double rho = grid.rho()[i];
            kx_.push_back(rho * d[0]);
            ky_.push_back(rho * d[1]);
            kz_.push_back(rho * d[2]);
            w_.push_back(grid.weight(grid.node(i, j)));
            rad_.push_back(i);
        }
    }
}

void FieldEngine::phases_at(int step, std::vector<std::vector<cplx>>& out) const {
    const int np = p_.n_particles;
    const size_t nh = kx_.size();
    out.resize(np);
    const double* row = path_->row(step);
    for (int l = 0; l < np; ++l) {
        out[l].resize(nh);
        const double qx = x_[3 * l] + row[3 * l];
        const double qy = x_[3 * l + 1] + row[3 * l + 1];
        const double qz = x_[3 * l + 2] + row[3 * l + 2];
        cplx* o = out[l].data();
        for (size_t h = 0; h < nh; ++h) {
            const double s = kx_[h] * qx + ky_[h] * qy + kz_[h] * qz;
            o[h] = cplx(std::cos(s), -std::sin(s));
        }
    }
}

void FieldEngine::start(const paths::BrownianPath& path, const std::vector<double>& x) {
    if (path.n_particles != p_.n_particles) throw DomainError("path particle count mismatch");
    path_ = &path;
    x_ = x.empty() ? std::vector<double>(3 * p_.n_particles, 0.0) : x;
    if (int(x_.size()) != 3 * p_.n_particles) throw DomainError("offset must have 3N entries");
    step_ = 0;
    const int nr = grid_->n_radial();
    const double dt = path.dt;
    edt_.resize(nr);
    phi_.resize(nr);
    dfac_.resize(nr);
    emt_.assign(nr, 1.0);
    for (int i = 0; i < nr; ++i) {
        const double om = grid_->omega()[i];
        const double z = dt * om;
        edt_[i] = std::exp(-z);
        phi_[i] = -std::expm1(-z) / om;
        const double g = z < 1e-3 ? z * z * (0.5 - z / 6.0 + z * z / 24.0) : z + std::expm1(-z);
        dfac_[i] = g / (om * om);
    }
    const size_t nh = kx_.size();
    um_.assign(nh, 0.0);
    up_.assign(nh, 0.0);
    mm_.assign(nh, 0.0);
    mminus_.assign(nh, 0.0);
    acc_v_.assign(nh, 0.0);
    acc_m_.assign(nh, 0.0);
    acc_dir_.assign(nh, 0.0);
    if (!active_) return;
    phases_at(0, pl_);
    p0_.assign(nh, 0.0);
    for (const auto& pl : pl_)
        for (size_t h = 0; h < nh; ++h) p0_[h] += pl[h];
    pn_ = p0_;
}

void FieldEngine::advance() {
    if (!path_) throw DomainError("engine not started");
    if (step_ >= path_->n_steps) throw IndexError("engine advanced past the end of the path");
    if (!active_) {
        ++step_;
        return;
    }
    const int np = p_.n_particles;
    const double dt = path_->dt;
    const size_t nh = kx_.size();
    phases_at(step_ + 1, pl_next_);
    const double* r0 = path_->row(step_);
    const double* r1 = path_->row(step_ + 1);
    const double nn = double(np);
    for (size_t h = 0; h < nh; ++h) {
        const int i = rad_[h];
        cplx pnew(0.0, 0.0), xs(0.0, 0.0);
        for (int l = 0; l < np; ++l) {
            pnew += pl_next_[l][h];
            const double kdb = kx_[h] * (r1[3 * l] - r0[3 * l]) + ky_[h] * (r1[3 * l + 1] - r0[3 * l + 1]) +
                               kz_[h] * (r1[3 * l + 2] - r0[3 * l + 2]);
            xs += pl_[l][h] * kdb;
        }
        const cplx X = cplx(0.0, beta_[i]) * xs;
        const cplx abar = 0.5 * (pn_[h] + pnew);
        const cplx fa = f_[i] * abar;
        const cplx S = mm_[h] - ratio_[i] * up_[h];
        acc_m_[h] += std::real(std::conj(S) * X);
        acc_dir_[h] += phi_[i] * std::real(std::conj(up_[h]) * fa) + std::norm(fa) * dfac_[i];
        if (np > 1) {
            const double om = grid_->omega()[i];
            acc_v_[h] += dt * om * beta_[i] * beta_[i] * 0.5 * (std::norm(pn_[h]) + std::norm(pnew) - 2.0 * nn);
        }
        um_[h] += emt_[i] * phi_[i] * fa;
        up_[h] = edt_[i] * up_[h] + phi_[i] * fa;
        mm_[h] = edt_[i] * (mm_[h] + X);
        mminus_[h] += emt_[i] * X;
        pn_[h] = pnew;
    }
    for (size_t i = 0; i < emt_.size(); ++i) emt_[i] *= edt_[i];
    std::swap(pl_, pl_next_);
    ++step_;
}

void FieldEngine::advance_to(int step) {
    if (step < step_) throw IndexError("engine cannot step backwards");
    while (step_ < step) advance();
}

RadialTerms FieldEngine::terms() const {
    const int nr = grid_->n_radial();
    RadialTerms t;
    t.t = time();
    t.n_particles = p_.n_particles;
    for (auto* v : {&t.b, &t.c_minus, &t.c_plus, &t.v, &t.m, &t.direct, &t.e_ren}) v->assign(nr, 0.0);
    if (!active_) return t;
    for (int i = 0; i < nr; ++i) t.e_ren[i] = 4.0 * kPi * grid_->radial_weights()[i] * f_[i] * beta_[i];
    for (size_t h = 0; h < kx_.size(); ++h) {
        const int i = rad_[h];
        const double w2 = 2.0 * w_[h];
        const double b = beta_[i];
        const double theta = std::norm(p0_[h]) + std::norm(pn_[h]) - 2.0 * emt_[i] * std::real(std::conj(p0_[h]) * pn_[h]);
        t.b[i] += 0.5 * w2 * theta * b * b;
        t.c_minus[i] += w2 * b * std::real(std::conj(p0_[h]) * um_[h]);
        t.c_plus[i] += w2 * b * std::real(std::conj(up_[h]) * pn_[h]);
        t.v[i] += w2 * acc_v_[h];
        t.m[i] += w2 * acc_m_[h];
        t.direct[i] += w2 * acc_dir_[h];
    }
    return t;
}

FieldState FieldEngine::state(Role role, const std::vector<double>& scale) const {
    FieldState s = zero_state(*grid_, role);
    if (!active_) return s;
    const int nr = grid_->n_radial();
    size_t h = 0;
    for (int j : grid_->half_dirs()) {
        const int ja = grid_->antipode_dir(j);
        for (int i = 0; i < nr; ++i, ++h) {
            cplx v;
            switch (role) {
                case Role::Uminus: v = um_[h]; break;
                case Role::Uplus: v = up_[h]; break;
                case Role::Maccum: v = mm_[h]; break;
                case Role::Mminus: v = mminus_[h]; break;
                case Role::Iaccum: v = ratio_[i] * up_[h]; break;
                case Role::S: v = mm_[h] - ratio_[i] * up_[h]; break;
                case Role::custom: v = 0.0; break;
            }
            v *= scale[i];
            s.values[grid_->node(i, j)] = v;
            s.values[grid_->node(i, ja)] = std::conj(v);
        }
    }
    return s;
}

std::vector<cplx> FieldEngine::phase_sum(bool initial) const {
    const MomentumGrid& g = *grid_;
    std::vector<cplx> out(g.size(), cplx(0.0, 0.0));
    const double* row = path_->row(initial ? 0 : step_);
    for (int l = 0; l < p_.n_particles; ++l) {
        const Vec3 q{x_[3 * l] + row[3 * l], x_[3 * l + 1] + row[3 * l + 1], x_[3 * l + 2] + row[3 * l + 2]};
        for (int n = 0; n < g.size(); ++n) {
            const double s = dot(g.k(n), q);
            out[n] += cplx(std::cos(s), -std::sin(s));
        }
    }
    return out;
}

Vec3 FieldEngine::d_vector(int particle, const std::vector<double>& weight) const {
    if (particle < 0 || particle >= p_.n_particles) throw IndexError("particle index out of range");
    Vec3 d{0.0, 0.0, 0.0};
    if (!active_) return d;
    for (size_t h = 0; h < kx_.size(); ++h) {
        const int i = rad_[h];
        const cplx S = mm_[h] - ratio_[i] * up_[h];
        // Re(conj(S) p i) = -Im(conj(S) p)
        const double c = -2.0 * w_[h] * weight[i] * beta_[i] * std::imag(std::conj(S) * pl_[particle][h]);
        d[0] += c * kx_[h];
        d[1] += c * ky_[h];
        d[2] += c * kz_[h];
    }
    return d;
}

}  // namespace nelson::field
