#include "wginv/go.hpp"

#include <cmath>
#include <sstream>

namespace wginv {

void GOProbe::validate() const {
    if (std::abs(norm(theta) - 1.0) > 1e-12)
        throw ConfigError("GO probe direction theta is not unit length");
    if (rho <= 1.0) throw ConfigError("GO probe frequency rho must exceed 1");
    if (sign != 1 && sign != -1) throw ConfigError("GO probe sign must be +-1");
    if (K.empty()) throw ConfigError("GO probe constant vector K is empty");
}

void check_resolution_guard(const Grid4& g, double rho) {
    double ppw = 2.0 * M_PI / (rho * g.cs.h);
    if (ppw < 10.0 - 1e-9) {
        std::ostringstream os;
        os << "resolution guard: points per wavelength = " << ppw
           << " < 10 (rule: h <= 2*pi/(10*rho); h = " << g.cs.h << ", rho = " << rho
           << ")";
        throw ConfigError(os.str());
    }
}

std::complex<double> ansatz_phase(const GOProbe& p, double t, Vec2 xp) {
    double s = p.sign * p.rho * (dot(xp, p.theta) + t);
    return {std::cos(s), std::sin(s)};
}

std::complex<double> ansatz_value(const GOProbe& p, int c, double t, Vec2 xp,
                                  double x3) {
    double amp = p.K[c] * p.profile.phi(xp + t * p.theta) * p.profile.h(x3);
    if (amp == 0.0) return {0.0, 0.0};
    return amp * ansatz_phase(p, t, xp);
}

std::complex<double> ansatz_dt_value(const GOProbe& p, int c, double t, Vec2 xp,
                                     double x3) {
    Vec2 arg = xp + t * p.theta;
    double v;
    Vec2 grad;
    double hess[3];
    p.profile.phi_derivs(arg, v, grad, hess);
    double hv = p.profile.h(x3);
    std::complex<double> phase = ansatz_phase(p, t, xp);
    std::complex<double> irho(0.0, p.sign * p.rho);
    // d/dt [phi(x'+t theta) e^{i sign rho (x'.theta+t)}]
    //   = [theta . grad(phi) + i sign rho phi] e^{...}
    return p.K[c] * hv * (dot(p.theta, grad) + irho * v) * phase;
}

ComplexSpatialField build_ansatz(const Grid4& g, const GOProbe& p, int level) {
    int n = static_cast<int>(p.K.size());
    ComplexSpatialField f(n, g.cs.n1, g.cs.n2, g.n_x3);
    double t = g.t(level);
    for (int i = 0; i < g.cs.n1; ++i) {
        for (int j = 0; j < g.cs.n2; ++j) {
            Vec2 xp{g.cs.x1(i), g.cs.x2(j)};
            double ph = p.profile.phi(xp + t * p.theta);
            if (ph == 0.0) continue;
            std::complex<double> base = ph * ansatz_phase(p, t, xp);
            for (int k = 0; k < g.n_x3; ++k) {
                double hv = p.profile.h(g.x3(k));
                if (hv == 0.0) continue;
                for (int c = 0; c < n; ++c) {
                    std::complex<double> v = p.K[c] * hv * base;
                    f.re(c, i, j, k) = v.real();
                    f.im(c, i, j, k) = v.imag();
                }
            }
        }
    }
    return f;
}

double residual_source_value(const Grid4& g, const MatrixPotential& q, const GOProbe& p,
                             int c, double t, Vec2 xp, double x3) {
    Vec2 arg = xp + t * p.theta;
    double v;
    Vec2 grad;
    double hess[3];
    p.profile.phi_derivs(arg, v, grad, hess);
    double hv, h1, h2;
    p.profile.h_derivs(x3, hv, h1, h2);
    if (v == 0.0 && hv == 0.0) return 0.0;
    double tt = p.theta.x * p.theta.x * hess[0] + 2.0 * p.theta.x * p.theta.y * hess[1] +
                p.theta.y * p.theta.y * hess[2];
    double lap = hess[0] + hess[2];
    double out = ((tt - lap) * hv - v * h2) * p.K[c];
    if (!q.is_zero() && v != 0.0 && hv != 0.0) {
        int n = q.n;
        double amp = v * hv;
        for (int cc = 0; cc < n; ++cc) {
            double qe = q.entry(g, c, cc, t, xp.x, xp.y, x3);
            if (qe != 0.0) out += qe * amp * p.K[cc];
        }
    }
    return out;
}

SpatialField build_residual_source(const Grid4& g, const MatrixPotential& q,
                                   const GOProbe& p, int level) {
    int n = static_cast<int>(p.K.size());
    SpatialField f = SpatialField::like(g, n);
    double t = g.t(level);
    for (int i = 0; i < g.cs.n1; ++i)
        for (int j = 0; j < g.cs.n2; ++j) {
            Vec2 xp{g.cs.x1(i), g.cs.x2(j)};
            if (norm(xp + t * p.theta - p.profile.center) > p.profile.support_radius_xy()) continue;
            for (int k = 0; k < g.n_x3; ++k) {
                if (std::abs(g.x3(k) - p.profile.center_x3) > p.profile.width3()) continue;
                for (int c = 0; c < n; ++c)
                    f(c, i, j, k) = residual_source_value(g, q, p, c, t, xp, g.x3(k));
            }
        }
    return f;
}

namespace {

// Index window of the moving profile support at time t.
struct SupportWindow {
    int i_lo, i_hi, j_lo, j_hi, k_lo, k_hi;
};

SupportWindow support_window(const Grid4& g, const GOProbe& p, double t) {
    const ProbeProfile& pr = p.profile;
    Vec2 ctr = pr.center - t * p.theta;  // center of phi(x'+t theta) in x'
    SupportWindow w;
    const double rxy = pr.support_radius_xy();
    const double r3 = pr.width3();
    w.i_lo = std::max(0, static_cast<int>(std::floor((ctr.x - rxy - g.cs.origin_x) / g.cs.h)));
    w.i_hi = std::min(g.cs.n1 - 1,
                      static_cast<int>(std::ceil((ctr.x + rxy - g.cs.origin_x) / g.cs.h)));
    w.j_lo = std::max(0, static_cast<int>(std::floor((ctr.y - rxy - g.cs.origin_y) / g.cs.h)));
    w.j_hi = std::min(g.cs.n2 - 1,
                      static_cast<int>(std::ceil((ctr.y + rxy - g.cs.origin_y) / g.cs.h)));
    w.k_lo = std::max(0, static_cast<int>(std::floor(
                             (pr.center_x3 - r3 + g.x3_half_width) / g.h_x3)));
    w.k_hi = std::min(g.n_x3 - 1, static_cast<int>(std::ceil(
                                      (pr.center_x3 + r3 + g.x3_half_width) / g.h_x3)));
    return w;
}

// Source -e^{sign i rho s} J(t,x), one complex part.
class RemainderSource : public SourceTerm {
  public:
    RemainderSource(const MatrixPotential& q, const GOProbe& p, bool imag_part)
        : q_(q), p_(p), imag_(imag_part) {}

    void add_to(const Grid4& g, double t, double scale, SpatialField& dst) const override {
        SupportWindow w = support_window(g, p_, t);
        int n = static_cast<int>(p_.K.size());
        for (int i = w.i_lo; i <= w.i_hi; ++i) {
            for (int j = w.j_lo; j <= w.j_hi; ++j) {
                Vec2 xp{g.cs.x1(i), g.cs.x2(j)};
                double s = p_.sign * p_.rho * (dot(xp, p_.theta) + t);
                double ph = imag_ ? std::sin(s) : std::cos(s);
                for (int k = w.k_lo; k <= w.k_hi; ++k) {
                    for (int c = 0; c < n; ++c) {
                        double jv =
                            residual_source_value(g, q_, p_, c, t, xp, g.x3(k));
                        if (jv != 0.0) dst(c, i, j, k) -= scale * ph * jv;
                    }
                }
            }
        }
    }

  private:
    const MatrixPotential& q_;
    const GOProbe& p_;
    bool imag_;
};

struct MultiRecorder : FieldRecorder {
    std::vector<FieldRecorder*> rs;
    void record(int level, double t, const SpatialField& u) override {
        for (auto* r : rs) r->record(level, t, u);
    }
};

}  // namespace

ComplexBoundaryTriple probe_boundary_data(const Grid4& g, const GOProbe& p) {
    p.validate();
    check_resolution_guard(g, p.rho);
    int n = static_cast<int>(p.K.size());
    ComplexBoundaryTriple d;
    d.re.phi = SpatialField::like(g, n);
    d.im.phi = SpatialField::like(g, n);
    d.re.psi = SpatialField::like(g, n);
    d.im.psi = SpatialField::like(g, n);

    for (int i = 0; i < g.cs.n1; ++i) {
        for (int j = 0; j < g.cs.n2; ++j) {
            Vec2 xp{g.cs.x1(i), g.cs.x2(j)};
            for (int k = 0; k < g.n_x3; ++k) {
                double x3 = g.x3(k);
                if (p.profile.h(x3) == 0.0 && std::abs(x3 - p.profile.center_x3) > p.profile.width3())
                    continue;
                for (int c = 0; c < n; ++c) {
                    auto v = ansatz_value(p, c, 0.0, xp, x3);
                    auto dv = ansatz_dt_value(p, c, 0.0, xp, x3);
                    d.re.phi(c, i, j, k) = v.real();
                    d.im.phi(c, i, j, k) = v.imag();
                    d.re.psi(c, i, j, k) = dv.real();
                    d.im.psi(c, i, j, k) = dv.imag();
                }
            }
        }
    }

    // Dirichlet trace on Sigma, banded around the h_eps support.
    int kc = static_cast<int>(std::lround((p.profile.center_x3 + g.x3_half_width) / g.h_x3));
    int half = static_cast<int>(std::ceil(p.profile.width3() / g.h_x3)) + 1;
    int klo = std::max(0, kc - half), khi = std::min(g.n_x3 - 1, kc + half);
    int nb = static_cast<int>(g.cs.boundary.size());
    d.re.f = BoundaryField(g.n_t, n, nb, klo, khi);
    d.im.f = BoundaryField(g.n_t, n, nb, klo, khi);
    for (int m = 0; m < g.n_t; ++m) {
        double t = g.t(m);
        for (int b = 0; b < nb; ++b) {
            const BoundaryNode& bn = g.cs.boundary[b];
            Vec2 xp{g.cs.x1(bn.i), g.cs.x2(bn.j)};
            double ph = p.profile.phi(xp + t * p.theta);
            if (ph == 0.0) continue;
            std::complex<double> base = ph * ansatz_phase(p, t, xp);
            for (int k = klo; k <= khi; ++k) {
                double hv = p.profile.h(g.x3(k));
                if (hv == 0.0) continue;
                for (int c = 0; c < n; ++c) {
                    std::complex<double> v = p.K[c] * hv * base;
                    d.re.f(m, c, b, k) = v.real();
                    d.im.f(m, c, b, k) = v.imag();
                }
            }
        }
    }
    return d;
}

std::complex<double> GOSolution::total(const Grid4& g, int level, int c, int i, int j,
                                       int k) const {
    Vec2 xp{g.cs.x1(i), g.cs.x2(j)};
    std::complex<double> v = ansatz_value(probe, c, g.t(level), xp, g.x3(k));
    if (psi_re) v += std::complex<double>(psi_re->at(level, c, i, j, k),
                                          psi_im->at(level, c, i, j, k));
    return v;
}

GOSolution solve_remainder(const Grid4& g, const MatrixPotential& q_eq, const GOProbe& p,
                           int record_k3_lo, int record_k3_hi) {
    p.validate();
    check_resolution_guard(g, p.rho);
    int n = static_cast<int>(p.K.size());
    if (!q_eq.is_zero() && q_eq.n != n)
        throw ConfigError("potential size does not match probe vector K");

    GOSolution sol;
    sol.probe = p;

    bool record = record_k3_lo >= 0 && record_k3_hi >= record_k3_lo;

    RemainderSource src_re(q_eq, p, false);
    RemainderSource src_im(q_eq, p, true);

    auto run_part = [&](const SourceTerm& src, std::shared_ptr<BoxRecorder>& rec_out,
                        double& l2_out) {
        L2TimeAccumulator l2acc(g);
        std::shared_ptr<BoxRecorder> box;
        MultiRecorder multi;
        multi.rs.push_back(&l2acc);
        if (record) {
            box = std::make_shared<BoxRecorder>(g, n, record_k3_lo, record_k3_hi);
            multi.rs.push_back(box.get());
        }
        SolveOptions opt;
        opt.source = &src;
        opt.recorder = &multi;
        opt.want_neumann = false;
        BoundaryTriple zero_data;
        if (p.sign > 0) {
            solve_ibvp(g, q_eq, zero_data, opt);
        } else {
            // Backward solve of box(Psi) + q_eq Psi = S with zero final data:
            // solve_adjoint applies the transpose, so feed it q_eq^T.
            MatrixPotential qt = transpose_potential(q_eq);
            SpatialField zf;
            BoundaryField zb;
            solve_adjoint(g, qt, zf, zf, zb, opt);
        }
        rec_out = box;
        l2_out = l2acc.norm();
    };

    double l2r = 0.0, l2i = 0.0;
    run_part(src_re, sol.psi_re, l2r);
    run_part(src_im, sol.psi_im, l2i);
    sol.psi_l2 = std::sqrt(l2r * l2r + l2i * l2i);
    return sol;
}

double ansatz_discrete_residual(const Grid4& g, const MatrixPotential& q, const GOProbe& p,
                                int level) {
    if (level < 1 || level > g.steps() - 1)
        throw ConfigError("residual level must be interior in time");
    int n = static_cast<int>(p.K.size());
    ComplexSpatialField um1 = build_ansatz(g, p, level - 1);
    ComplexSpatialField u0 = build_ansatz(g, p, level);
    ComplexSpatialField up1 = build_ansatz(g, p, level + 1);
    double t = g.t(level);
    double worst = 0.0;
    const double idt2 = 1.0 / (g.dt * g.dt);
    const double ih2 = 1.0 / (g.cs.h * g.cs.h);
    const double iz2 = 1.0 / (g.h_x3 * g.h_x3);
    for (int i = 1; i < g.cs.n1 - 1; ++i) {
        for (int j = 1; j < g.cs.n2 - 1; ++j) {
            if (g.cs.shape != CrossSectionShape::rectangle && !g.cs.is_interior(i, j))
                continue;
            Vec2 xp{g.cs.x1(i), g.cs.x2(j)};
            double s = p.sign * p.rho * (dot(xp, p.theta) + t);
            std::complex<double> phase(std::cos(s), std::sin(s));
            for (int k = 1; k < g.n_x3 - 1; ++k) {
                for (int c = 0; c < n; ++c) {
                    std::complex<double> dtt =
                        (up1.at(c, i, j, k) - 2.0 * u0.at(c, i, j, k) +
                         um1.at(c, i, j, k)) *
                        idt2;
                    std::complex<double> lap =
                        (u0.at(c, i + 1, j, k) + u0.at(c, i - 1, j, k) +
                         u0.at(c, i, j + 1, k) + u0.at(c, i, j - 1, k) -
                         4.0 * u0.at(c, i, j, k)) *
                            ih2 +
                        (u0.at(c, i, j, k + 1) + u0.at(c, i, j, k - 1) -
                         2.0 * u0.at(c, i, j, k)) *
                            iz2;
                    std::complex<double> qu(0.0, 0.0);
                    if (!q.is_zero()) {
                        for (int cc = 0; cc < n; ++cc)
                            qu += q.entry(g, c, cc, t, xp.x, xp.y, g.x3(k)) *
                                  u0.at(cc, i, j, k);
                    }
                    std::complex<double> jv =
                        residual_source_value(g, q, p, c, t, xp, g.x3(k)) * phase;
                    worst = std::max(worst, std::abs(dtt - lap + qu - jv));
                }
            }
        }
    }
    return worst;
}

MatrixPotential transpose_potential(const MatrixPotential& q) {
    MatrixPotential t = q;
    if (q.is_zero()) return t;
    int n = q.n;
    std::size_t nodes = t.vals.size() / (static_cast<std::size_t>(n) * n);
    for (std::size_t s = 0; s < nodes; ++s) {
        double* e = t.vals.data() + s * n * n;
        for (int r = 0; r < n; ++r)
            for (int c = r + 1; c < n; ++c) std::swap(e[r * n + c], e[c * n + r]);
    }
    // The analytic closure, if any, must be transposed too.
    if (q.analytic.valid()) {
        auto inner = q.analytic.eval;
        int nn = n;
        t.analytic.eval = [inner, nn](double tt, double x1, double x2, double x3,
                                      double* out) {
            inner(tt, x1, x2, x3, out);
            for (int r = 0; r < nn; ++r)
                for (int c = r + 1; c < nn; ++c) std::swap(out[r * nn + c], out[c * nn + r]);
        };
    }
    return t;
}

}  // namespace wginv
