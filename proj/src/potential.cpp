#include "wginv/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wginv {

double MatrixPotential::entry(const Grid4& g, int row, int col, double t, double x1,
                              double x2, double x3) const {
    if (is_zero()) return 0.0;
    if (analytic.valid()) {
        if (t < 0.0 || t > g.T) return 0.0;
        double e[64];
        analytic.eval(t, x1, x2, x3, e);
        return e[static_cast<std::size_t>(row) * n + col];
    }
    // Multilinear interpolation of the samples, zero outside the box.
    auto clampf = [](double u, int lo, int hi, int& i0, double& w) {
        double fi = u;
        i0 = static_cast<int>(std::floor(fi));
        w = fi - i0;
        if (i0 < lo || i0 >= hi) {
            if (i0 == hi && w < 1e-12) {
                i0 = hi - 1;
                w = 1.0;
                return true;
            }
            return false;
        }
        return true;
    };
    double fu = (x1 - g.cs.origin_x) / g.cs.h;
    double fv = (x2 - g.cs.origin_y) / g.cs.h;
    double fw = (x3 + g.x3_half_width) / g.h_x3;
    double ft = time_independent ? 0.0 : t / g.dt;
    int i0, j0, k0, m0;
    double wi, wj, wk, wm;
    if (!clampf(fu, i_lo, i_hi, i0, wi)) return 0.0;
    if (!clampf(fv, j_lo, j_hi, j0, wj)) return 0.0;
    if (!clampf(fw, k_lo, k_hi, k0, wk)) return 0.0;
    if (time_independent) {
        m0 = 0;
        wm = 0.0;
    } else {
        if (t < 0.0 || t > g.T + 1e-12) return 0.0;
        m0 = static_cast<int>(std::floor(ft));
        wm = ft - m0;
        if (m0 >= nt_levels - 1) {
            m0 = nt_levels - 2;
            wm = 1.0;
        }
        if (m0 < 0) {
            m0 = 0;
            wm = 0.0;
        }
    }
    auto sample = [&](int m, int i, int j, int k) {
        return entries_at(m, i, j, k)[static_cast<std::size_t>(row) * n + col];
    };
    double out = 0.0;
    for (int dm = 0; dm <= (time_independent ? 0 : 1); ++dm) {
        double tm = time_independent ? 1.0 : (dm == 0 ? 1.0 - wm : wm);
        if (tm == 0.0) continue;
        for (int di = 0; di <= 1; ++di)
            for (int dj = 0; dj <= 1; ++dj)
                for (int dk = 0; dk <= 1; ++dk) {
                    double w = tm * (di ? wi : 1.0 - wi) * (dj ? wj : 1.0 - wj) *
                               (dk ? wk : 1.0 - wk);
                    if (w == 0.0) continue;
                    out += w * sample(m0 + dm, i0 + di, j0 + dj, k0 + dk);
                }
    }
    return out;
}

double MatrixPotential::measured_sup() const {
    double m = 0.0;
    for (double v : vals) m = std::max(m, std::abs(v));
    return m;
}

double MatrixPotential::lipschitz_quotient(const Grid4& g) const {
    if (is_zero()) return 0.0;
    double m = 0.0;
    int ne = n * n;
    int b1 = box_n1(), b2 = box_n2(), b3 = box_n3();
    for (int mt = 0; mt < nt_levels; ++mt) {
        for (int i = i_lo; i <= i_hi; ++i) {
            for (int j = j_lo; j <= j_hi; ++j) {
                for (int k = k_lo; k <= k_hi; ++k) {
                    const double* e0 = entries_at(mt, i, j, k);
                    for (int e = 0; e < ne; ++e) {
                        if (i < i_hi)
                            m = std::max(m, std::abs(entries_at(mt, i + 1, j, k)[e] - e0[e]) /
                                                g.cs.h);
                        if (j < j_hi)
                            m = std::max(m, std::abs(entries_at(mt, i, j + 1, k)[e] - e0[e]) /
                                                g.cs.h);
                        if (k < k_hi)
                            m = std::max(m, std::abs(entries_at(mt, i, j, k + 1)[e] - e0[e]) /
                                                g.h_x3);
                        if (!time_independent && mt < nt_levels - 1)
                            m = std::max(m, std::abs(entries_at(mt + 1, i, j, k)[e] - e0[e]) /
                                                g.dt);
                    }
                }
            }
        }
    }
    (void)b1;
    (void)b2;
    (void)b3;
    return m;
}

void MatrixPotential::validate(const Grid4& g) const {
    if (is_zero()) return;
    double sup = measured_sup();
    if (!std::isfinite(sup)) throw ConfigError("potential contains non-finite samples");
    if (sup > bound_M * (1.0 + 1e-10)) {
        std::ostringstream os;
        os << "potential sup norm " << sup << " exceeds declared bound M = " << bound_M;
        throw ConfigError(os.str());
    }
    // Support in x3 must be inside |x3| <= support_r.
    if (std::abs(g.x3(k_lo)) > support_r + g.h_x3 + 1e-12 ||
        std::abs(g.x3(k_hi)) > support_r + g.h_x3 + 1e-12) {
        std::ostringstream os;
        os << "potential sample box exceeds declared x3 support radius r = " << support_r;
        throw ConfigError(os.str());
    }
    double lip = lipschitz_quotient(g);
    if (!std::isfinite(lip))
        throw ConfigError("potential difference quotients are not finite");
}

MatrixPotential sample_potential(const Grid4& g, const AnalyticPotential& def,
                                 double support_r, double bound_M, bool time_independent) {
    MatrixPotential q;
    q.n = def.n;
    q.bound_M = bound_M;
    q.support_r = support_r;
    q.time_independent = time_independent;
    q.analytic = def;
    q.i_lo = 0;
    q.i_hi = g.cs.n1 - 1;
    q.j_lo = 0;
    q.j_hi = g.cs.n2 - 1;
    // x3 box: the sampled band around 0 covering |x3| <= support_r.
    int kc = static_cast<int>(std::lround(g.x3_half_width / g.h_x3));
    int half = static_cast<int>(std::ceil(support_r / g.h_x3 - 1e-12));
    q.k_lo = std::max(0, kc - half);
    q.k_hi = std::min(g.n_x3 - 1, kc + half);
    q.nt_levels = time_independent ? 1 : g.n_t;

    std::size_t nodes = static_cast<std::size_t>(q.box_n1()) * q.box_n2() * q.box_n3();
    q.vals.assign(nodes * q.nt_levels * q.n * q.n, 0.0);
    std::vector<double> e(static_cast<std::size_t>(q.n) * q.n);
    for (int m = 0; m < q.nt_levels; ++m) {
        double t = g.t(m);
        for (int i = q.i_lo; i <= q.i_hi; ++i) {
            for (int j = q.j_lo; j <= q.j_hi; ++j) {
                for (int k = q.k_lo; k <= q.k_hi; ++k) {
                    def.eval(t, g.cs.x1(i), g.cs.x2(j), g.x3(k), e.data());
                    std::copy(e.begin(), e.end(), q.vals.begin() + q.index(m, i, j, k));
                }
            }
        }
    }
    return q;
}

MatrixPotential zero_potential(int n) {
    MatrixPotential q;
    q.n = n;
    return q;
}

AnalyticPotential potential_difference(const AnalyticPotential& a,
                                       const AnalyticPotential& b) {
    AnalyticPotential d;
    if (a.valid() && b.valid() && a.n != b.n)
        throw ConfigError("potential system sizes differ");
    d.n = a.valid() ? a.n : b.n;
    int n = d.n;
    auto ae = a.eval, be = b.eval;
    d.eval = [n, ae, be](double t, double x1, double x2, double x3, double* out) {
        std::vector<double> tmp(static_cast<std::size_t>(n) * n, 0.0);
        if (ae)
            ae(t, x1, x2, x3, out);
        else
            std::fill(out, out + n * n, 0.0);
        if (be) {
            be(t, x1, x2, x3, tmp.data());
            for (int e = 0; e < n * n; ++e) out[e] -= tmp[e];
        }
    };
    return d;
}

}  // namespace wginv
