#include "wginv/light_ray.hpp"

#include <cmath>

namespace wginv {

namespace {

// Adaptive Simpson on [a, b] with absolute tolerance.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol) {
    // Seed with a composite pass so narrow features are not missed.
    const int n0 = 64;
    double h = (b - a) / n0;
    double total = 0.0;
    for (int s = 0; s < n0; ++s) {
        double x0 = a + s * h, x1 = x0 + h;
        double f0 = f(x0), fm = f(0.5 * (x0 + x1)), f1 = f(x1);
        double whole = h / 6.0 * (f0 + 4.0 * fm + f1);
        total += adaptive_simpson(f, x0, x1, f0, fm, f1, whole, tol / n0, 24);
    }
    return total;
}

}  // namespace

double lrt_direct(const Grid4& g, const MatrixPotential& q, int row, int col, Vec2 theta,
                  Vec2 y, double y3) {
    if (q.is_zero()) return 0.0;
    auto f = [&](double t) {
        return q.entry(g, row, col, t, y.x - t * theta.x, y.y - t * theta.y, y3);
    };
    return integrate(f, 0.0, g.T, 1e-10);
}

std::vector<std::complex<double>> identity_rhs_components(const Grid4& g,
                                                          const ComplexIOOutput& diff,
                                                          const GOProbe& vp, IOMode mode) {
    const int n = static_cast<int>(vp.K.size());
    std::vector<std::complex<double>> acc(n, {0.0, 0.0});
    const double restrict_x3 = mode.partial ? mode.R : -1.0;

    // Surface term: - int_Sigma (DL3) . v  with v the adjoint ansatz trace.
    if (!diff.re.neumann.empty()) {
        const BoundaryField& nre = diff.re.neumann;
        const BoundaryField& nim = diff.im.neumann;
        const auto& bn = g.cs.boundary;
        const int nb = static_cast<int>(bn.size());
        for (int m = 0; m < nre.n_t(); ++m) {
            double t = g.t(m);
            double wt = (m == 0 || m == nre.n_t() - 1) ? 0.5 * g.dt : g.dt;
            for (int b = 0; b < nb; ++b) {
                Vec2 xp{g.cs.x1(bn[b].i), g.cs.x2(bn[b].j)};
                double ph = vp.profile.phi(xp + t * vp.theta);
                if (ph == 0.0) continue;
                std::complex<double> vbase = ph * ansatz_phase(vp, t, xp);
                double warc = bn[b].weight;
                for (int k = nre.k3_lo(); k <= nre.k3_hi(); ++k) {
                    double x3 = g.x3(k);
                    if (restrict_x3 >= 0.0 && std::abs(x3) >= restrict_x3) continue;
                    double hv = vp.profile.h(x3);
                    if (hv == 0.0) continue;
                    double wz = (k == 0 || k == g.n_x3 - 1) ? 0.5 * g.h_x3 : g.h_x3;
                    std::complex<double> v = hv * vbase;
                    double w = wt * warc * wz;
                    for (int c = 0; c < n; ++c) {
                        std::complex<double> dl3(nre.at(m, c, b, k), nim.at(m, c, b, k));
                        acc[c] -= w * dl3 * v;
                    }
                }
            }
        }
    }

    // Volume terms at t = T: (DL2) . v(T) - d_t v(T) . (DL1).
    const double Tt = g.T;
    for (int i = 0; i < g.cs.n1; ++i) {
        for (int j = 0; j < g.cs.n2; ++j) {
            if (!g.cs.in_domain(i, j)) continue;
            Vec2 xp{g.cs.x1(i), g.cs.x2(j)};
            Vec2 arg = xp + Tt * vp.theta;
            double pv;
            Vec2 grad;
            double hess[3];
            vp.profile.phi_derivs(arg, pv, grad, hess);
            if (pv == 0.0 && grad.x == 0.0 && grad.y == 0.0) continue;
            std::complex<double> phase = ansatz_phase(vp, Tt, xp);
            std::complex<double> irho(0.0, vp.sign * vp.rho);
            std::complex<double> vb = pv * phase;
            std::complex<double> dvb = (dot(vp.theta, grad) + irho * pv) * phase;
            for (int k = 0; k < g.n_x3; ++k) {
                double hv = vp.profile.h(g.x3(k));
                if (hv == 0.0) continue;
                double w = node_volume_weight(g, i, j, k);
                std::complex<double> v = hv * vb;
                std::complex<double> dv = hv * dvb;
                for (int c = 0; c < n; ++c) {
                    std::complex<double> dl1(diff.re.final_value(c, i, j, k),
                                             diff.im.final_value(c, i, j, k));
                    std::complex<double> dl2(diff.re.final_velocity(c, i, j, k),
                                             diff.im.final_velocity(c, i, j, k));
                    acc[c] += w * (dl2 * v - dv * dl1);
                }
            }
        }
    }
    return acc;
}

std::complex<double> identity_rhs(const Grid4& g, const ComplexIOOutput& diff,
                                  const GOProbe& vp, IOMode mode) {
    auto comps = identity_rhs_components(g, diff, vp, mode);
    std::complex<double> out{0.0, 0.0};
    for (std::size_t c = 0; c < comps.size(); ++c) out += vp.K[c] * comps[c];
    return out;
}

std::complex<double> identity_lhs(const Grid4& g, const MatrixPotential& q_diff,
                                  const GOSolution& u1, const GOSolution& v) {
    if (q_diff.is_zero()) return {0.0, 0.0};
    const int n = q_diff.n;
    std::complex<double> acc{0.0, 0.0};
    int klo = q_diff.k_lo, khi = q_diff.k_hi;
    if (u1.psi_re) {
        klo = std::max(klo, u1.psi_re->k3_lo());
        khi = std::min(khi, u1.psi_re->k3_hi());
    }
    for (int m = 0; m < g.n_t; ++m) {
        double wt = (m == 0 || m == g.n_t - 1) ? 0.5 * g.dt : g.dt;
        int ql = q_diff.time_independent ? 0 : m;
        for (int i = q_diff.i_lo; i <= q_diff.i_hi; ++i) {
            for (int j = q_diff.j_lo; j <= q_diff.j_hi; ++j) {
                if (!g.cs.in_domain(i, j)) continue;
                for (int k = klo; k <= khi; ++k) {
                    double w = wt * node_volume_weight(g, i, j, k);
                    if (w == 0.0) continue;
                    const double* e = q_diff.entries_at(ql, i, j, k);
                    std::complex<double> uv[8];
                    std::complex<double> vv[8];
                    for (int c = 0; c < n; ++c) {
                        uv[c] = u1.total(g, m, c, i, j, k);
                        vv[c] = v.total(g, m, c, i, j, k);
                    }
                    std::complex<double> s{0.0, 0.0};
                    for (int r = 0; r < n; ++r) {
                        std::complex<double> qu{0.0, 0.0};
                        for (int c = 0; c < n; ++c) qu += e[r * n + c] * uv[c];
                        s += qu * vv[r];
                    }
                    acc += w * s;
                }
            }
        }
    }
    return acc;
}

std::vector<std::complex<double>> extract_all_entries(const Grid4& g,
                                                      IoMapOracle& q1_oracle,
                                                      const MatrixPotential& q2, Vec2 theta,
                                                      Vec2 y, double y3, double rho,
                                                      double eps, IOMode mode) {
    const int n = q1_oracle.system_size();
    check_resolution_guard(g, rho);
    ProbeProfile prof = make_profile(g, ProfileShape::bump, y, y3, eps);

    GOProbe vp;  // adjoint probe, shared profile, opposite phase sign
    vp.theta = theta;
    vp.rho = rho;
    vp.sign = -1;
    vp.K.assign(n, 0.0);
    vp.profile = prof;

    std::vector<std::complex<double>> values(static_cast<std::size_t>(n) * n);
    for (int c = 0; c < n; ++c) {
        GOProbe fw;
        fw.theta = theta;
        fw.rho = rho;
        fw.sign = +1;
        fw.K.assign(n, 0.0);
        fw.K[c] = 1.0;
        fw.profile = prof;
        ComplexBoundaryTriple data = probe_boundary_data(g, fw);
        ComplexIOOutput o1 = q1_oracle.apply(data, mode);
        ComplexIOOutput o2 = apply_io_map_c(g, q2, data, mode);
        ComplexIOOutput diff = io_subtract_c(o2, o1);
        auto comps = identity_rhs_components(g, diff, vp, mode);
        for (int r = 0; r < n; ++r) values[static_cast<std::size_t>(r) * n + c] = comps[r];
    }
    return values;
}

RaySample extract_ray(const Grid4& g, IoMapOracle& q1_oracle, const MatrixPotential& q2,
                      int row, int col, Vec2 theta, Vec2 y, double y3, double rho,
                      double eps, IOMode mode) {
    const int n = q1_oracle.system_size();
    check_resolution_guard(g, rho);
    ProbeProfile prof = make_profile(g, ProfileShape::bump, y, y3, eps);

    GOProbe fw;
    fw.theta = theta;
    fw.rho = rho;
    fw.sign = +1;
    fw.K.assign(n, 0.0);
    fw.K[col] = 1.0;
    fw.profile = prof;

    GOProbe vp;
    vp.theta = theta;
    vp.rho = rho;
    vp.sign = -1;
    vp.K.assign(n, 0.0);
    vp.K[row] = 1.0;
    vp.profile = prof;

    ComplexBoundaryTriple data = probe_boundary_data(g, fw);
    ComplexIOOutput o1 = q1_oracle.apply(data, mode);
    ComplexIOOutput o2 = apply_io_map_c(g, q2, data, mode);
    ComplexIOOutput diff = io_subtract_c(o2, o1);

    RaySample s;
    s.row = row;
    s.col = col;
    s.theta = theta;
    s.y = y;
    s.y3 = y3;
    s.eps = eps;
    s.rho = rho;
    s.source = RaySample::Source::identity_extraction;
    s.value = identity_rhs(g, diff, vp, mode);
    return s;
}

RaySample extract_ray(const Grid4& g, const MatrixPotential& q1,
                      const MatrixPotential& q2, int row, int col, Vec2 theta, Vec2 y,
                      double y3, double rho, double eps, IOMode mode) {
    SolverOracle oracle(g, q1);
    return extract_ray(g, oracle, q2, row, col, theta, y, y3, rho, eps, mode);
}

}  // namespace wginv
