#include "wginv/probe.hpp"

#include <cmath>

namespace wginv {

namespace {

double bump_value(double r) {
    double r2 = r * r;
    if (r2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r2));
}

// First and second radial derivatives of exp(-1/(1-r^2)).
void bump_derivs(double r, double& v, double& d1, double& d2) {
    double r2 = r * r;
    if (r2 >= 1.0) {
        v = d1 = d2 = 0.0;
        return;
    }
    double s = 1.0 - r2;
    v = std::exp(-1.0 / s);
    double f1 = -2.0 * r / (s * s);                        // d/dr of -1/s
    double f2 = -2.0 / (s * s) - 8.0 * r2 / (s * s * s);   // second derivative
    d1 = v * f1;
    d2 = v * (f1 * f1 + f2);
}

// C-infinity step: 0 at s<=0, 1 at s>=1.
double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    double a = std::exp(-1.0 / s);
    double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

double plateau_value(double core, double r) {
    double ar = std::abs(r);
    if (ar <= core) return 1.0;
    if (ar >= 1.0) return 0.0;
    return smooth_step((1.0 - ar) / (1.0 - core));
}

}  // namespace

double ProbeProfile::radial(ProfileShape s, double core, double r) {
    if (s == ProfileShape::bump) return bump_value(r);
    return plateau_value(core, r);
}

void ProbeProfile::radial_derivs(ProfileShape s, double core, double r, double& v,
                                 double& d1, double& d2) {
    if (s == ProfileShape::bump) {
        bump_derivs(r, v, d1, d2);
        return;
    }
    v = plateau_value(core, r);
    double ar = std::abs(r);
    if (ar <= core || ar >= 1.0) {
        d1 = d2 = 0.0;
        return;
    }
    // Taper band: 5-point central differences of the closed form.
    const double dh = 1e-4;
    double fm2 = plateau_value(core, r - 2 * dh), fm1 = plateau_value(core, r - dh);
    double fp1 = plateau_value(core, r + dh), fp2 = plateau_value(core, r + 2 * dh);
    d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * dh);
    d2 = (-fm2 + 16.0 * fm1 - 30.0 * v + 16.0 * fp1 - fp2) / (12.0 * dh * dh);
}

double ProbeProfile::phi(Vec2 xp) const {
    Vec2 d = xp - center;
    if (eps_perp > 0.0) {
        double p = d.x * axis.x + d.y * axis.y;
        double s = -d.x * axis.y + d.y * axis.x;
        return amp2 * radial(shape, plateau_core, std::abs(p) / eps) *
               radial(shape, plateau_core, std::abs(s) / eps_perp);
    }
    return amp2 * radial(shape, plateau_core, norm(d) / eps);
}

void ProbeProfile::phi_derivs(Vec2 xp, double& val, Vec2& grad, double hess[3]) const {
    Vec2 d = xp - center;
    if (eps_perp > 0.0) {
        // separable in the rotated frame (p, s)
        double p = d.x * axis.x + d.y * axis.y;
        double s = -d.x * axis.y + d.y * axis.x;
        double vp, p1, p2, vs, s1, s2;
        double sp = p >= 0.0 ? 1.0 : -1.0, ss = s >= 0.0 ? 1.0 : -1.0;
        radial_derivs(shape, plateau_core, std::abs(p) / eps, vp, p1, p2);
        radial_derivs(shape, plateau_core, std::abs(s) / eps_perp, vs, s1, s2);
        p1 *= sp / eps;
        p2 /= eps * eps;
        s1 *= ss / eps_perp;
        s2 /= eps_perp * eps_perp;
        val = amp2 * vp * vs;
        double gp = amp2 * p1 * vs;  // d/dp
        double gs = amp2 * vp * s1;  // d/ds
        double hpp = amp2 * p2 * vs, hss = amp2 * vp * s2, hps = amp2 * p1 * s1;
        // rotate back: x = p*axis + s*axis_perp with axis_perp = (-ay, ax)
        Vec2 a = axis, b{-axis.y, axis.x};
        grad = {gp * a.x + gs * b.x, gp * a.y + gs * b.y};
        hess[0] = hpp * a.x * a.x + 2.0 * hps * a.x * b.x + hss * b.x * b.x;
        hess[1] = hpp * a.x * a.y + hps * (a.x * b.y + a.y * b.x) + hss * b.x * b.y;
        hess[2] = hpp * a.y * a.y + 2.0 * hps * a.y * b.y + hss * b.y * b.y;
        return;
    }
    double ra = norm(d);
    double r = ra / eps;
    double v, d1, d2;
    radial_derivs(shape, plateau_core, r, v, d1, d2);
    val = amp2 * v;
    if (ra < 1e-12 * eps) {
        grad = {0.0, 0.0};
        double hv = amp2 * d2 / (eps * eps);
        hess[0] = hv;
        hess[1] = 0.0;
        hess[2] = hv;
        return;
    }
    Vec2 u{d.x / ra, d.y / ra};
    double g1 = amp2 * d1 / eps;
    grad = {g1 * u.x, g1 * u.y};
    double hr = amp2 * d2 / (eps * eps);       // radial second derivative
    double ht = amp2 * d1 / (eps * ra);        // tangential curvature d1 / r
    hess[0] = hr * u.x * u.x + ht * (1.0 - u.x * u.x);
    hess[1] = (hr - ht) * u.x * u.y;
    hess[2] = hr * u.y * u.y + ht * (1.0 - u.y * u.y);
}

double ProbeProfile::h(double x3) const {
    double r = (x3 - center_x3) / width3();
    return amp1 * radial(shape, plateau_core, std::abs(r));
}

void ProbeProfile::h_derivs(double x3, double& val, double& d1, double& d2) const {
    double w = width3();
    double d = x3 - center_x3;
    double r = std::abs(d) / w;
    double v, r1, r2;
    radial_derivs(shape, plateau_core, r, v, r1, r2);
    double sgn = d >= 0.0 ? 1.0 : -1.0;
    val = amp1 * v;
    d1 = amp1 * r1 * sgn / w;
    d2 = amp1 * r2 / (w * w);
}

namespace {

void normalize_on_grid(const Grid4& g, ProbeProfile& p) {
    p.amp2 = 1.0;
    p.amp1 = 1.0;
    // Grid-lattice L2 normalization. The 2D lattice extends the grid of the
    // cross-section over the whole plane (the moving profile may exit omega).
    const double h = g.cs.h;
    const double rad = p.support_radius_xy();
    long i_lo = static_cast<long>(std::floor((p.center.x - rad - g.cs.origin_x) / h)) - 1;
    long i_hi = static_cast<long>(std::ceil((p.center.x + rad - g.cs.origin_x) / h)) + 1;
    long j_lo = static_cast<long>(std::floor((p.center.y - rad - g.cs.origin_y) / h)) - 1;
    long j_hi = static_cast<long>(std::ceil((p.center.y + rad - g.cs.origin_y) / h)) + 1;
    double s2 = 0.0;
    for (long i = i_lo; i <= i_hi; ++i) {
        for (long j = j_lo; j <= j_hi; ++j) {
            Vec2 xp{g.cs.origin_x + i * h, g.cs.origin_y + j * h};
            double v = p.phi(xp);
            s2 += v * v * h * h;
        }
    }
    if (s2 <= 0.0) throw ConfigError("profile phi has no mass on the grid (eps too small?)");
    p.amp2 = 1.0 / std::sqrt(s2);

    double s1 = 0.0;
    for (int k = 0; k < g.n_x3; ++k) {
        double v = p.h(g.x3(k));
        s1 += v * v * g.h_x3;
    }
    if (s1 <= 0.0) throw ConfigError("profile h has no mass on the grid (eps too small?)");
    p.amp1 = 1.0 / std::sqrt(s1);
}

}  // namespace

ProbeProfile make_profile(const Grid4& g, ProfileShape shape, Vec2 y, double y3,
                          double eps, double plateau_core) {
    ProbeProfile p;
    p.shape = shape;
    p.center = y;
    p.center_x3 = y3;
    p.eps = eps;
    p.plateau_core = plateau_core;
    normalize_on_grid(g, p);
    return p;
}

ProbeProfile make_profile_aniso(const Grid4& g, ProfileShape shape, Vec2 y, double y3,
                                double eps_par, double eps_perp, double eps3, Vec2 axis,
                                double plateau_core) {
    ProbeProfile p;
    p.shape = shape;
    p.center = y;
    p.center_x3 = y3;
    p.eps = eps_par;
    p.eps_perp = eps_perp;
    p.eps3 = eps3;
    double an = norm(axis);
    if (an <= 0.0) throw ConfigError("profile axis must be nonzero");
    p.axis = {axis.x / an, axis.y / an};
    p.plateau_core = plateau_core;
    normalize_on_grid(g, p);
    return p;
}

ProbeProfile zero_profile() {
    ProbeProfile p;
    p.amp2 = 0.0;
    p.amp1 = 0.0;
    return p;
}

}  // namespace wginv
