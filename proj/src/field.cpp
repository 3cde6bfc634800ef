#include "wginv/field.hpp"

#include <algorithm>
#include <cmath>

namespace wginv {

double node_volume_weight(const Grid4& g, int i, int j, int k) {
    const CrossSection& cs = g.cs;
    if (!cs.in_domain(i, j)) return 0.0;
    double w = cs.h * cs.h * g.h_x3;
    if (cs.shape == CrossSectionShape::rectangle) {
        if (i == 0 || i == cs.n1 - 1) w *= 0.5;
        if (j == 0 || j == cs.n2 - 1) w *= 0.5;
    } else if (cs.is_boundary(i, j)) {
        w *= 0.5;
    }
    if (k == 0 || k == g.n_x3 - 1) w *= 0.5;
    return w;
}

double l2_norm(const Grid4& g, const SpatialField& f) {
    double acc = 0.0;
    for (int c = 0; c < f.ncomp(); ++c)
        for (int i = 0; i < f.n1(); ++i)
            for (int j = 0; j < f.n2(); ++j)
                for (int k = 0; k < f.n3(); ++k) {
                    double v = f(c, i, j, k);
                    if (v != 0.0) acc += node_volume_weight(g, i, j, k) * v * v;
                }
    return std::sqrt(acc);
}

double h1_norm(const Grid4& g, const SpatialField& f) {
    const CrossSection& cs = g.cs;
    double acc = 0.0;
    auto diff = [](double a, double b, double h) { return (a - b) / h; };
    for (int c = 0; c < f.ncomp(); ++c) {
        for (int i = 0; i < f.n1(); ++i) {
            for (int j = 0; j < f.n2(); ++j) {
                if (!cs.in_domain(i, j)) continue;
                for (int k = 0; k < f.n3(); ++k) {
                    double w = node_volume_weight(g, i, j, k);
                    double v = f(c, i, j, k);
                    double gx = 0.0, gy = 0.0, gz = 0.0;
                    if (i + 1 < f.n1() && cs.in_domain(i + 1, j))
                        gx = diff(f(c, i + 1, j, k), v, cs.h);
                    else if (i > 0 && cs.in_domain(i - 1, j))
                        gx = diff(v, f(c, i - 1, j, k), cs.h);
                    if (j + 1 < f.n2() && cs.in_domain(i, j + 1))
                        gy = diff(f(c, i, j + 1, k), v, cs.h);
                    else if (j > 0 && cs.in_domain(i, j - 1))
                        gy = diff(v, f(c, i, j - 1, k), cs.h);
                    if (k + 1 < f.n3())
                        gz = diff(f(c, i, j, k + 1), v, g.h_x3);
                    else if (k > 0)
                        gz = diff(v, f(c, i, j, k - 1), g.h_x3);
                    acc += w * (v * v + gx * gx + gy * gy + gz * gz);
                }
            }
        }
    }
    return std::sqrt(acc);
}

double sigma_l2_norm(const Grid4& g, const BoundaryField& f, double restrict_x3) {
    if (f.empty()) return 0.0;
    double acc = 0.0;
    int nb = static_cast<int>(g.cs.boundary.size());
    for (int m = 0; m < f.n_t(); ++m) {
        double wt = (m == 0 || m == f.n_t() - 1) ? 0.5 * g.dt : g.dt;
        for (int c = 0; c < f.ncomp(); ++c) {
            for (int b = 0; b < nb; ++b) {
                double warc = g.cs.boundary[b].weight;
                for (int k = f.k3_lo(); k <= f.k3_hi(); ++k) {
                    if (restrict_x3 >= 0.0 && std::abs(g.x3(k)) >= restrict_x3) continue;
                    double wz = (k == 0 || k == g.n_x3 - 1) ? 0.5 * g.h_x3 : g.h_x3;
                    double v = f.at(m, c, b, k);
                    acc += wt * warc * wz * v * v;
                }
            }
        }
    }
    return std::sqrt(acc);
}

double l2_norm_c(const Grid4& g, const ComplexSpatialField& f) {
    double a = l2_norm(g, f.re), b = l2_norm(g, f.im);
    return std::sqrt(a * a + b * b);
}

double sigma_l2_norm_c(const Grid4& g, const ComplexBoundaryField& f, double restrict_x3) {
    double a = sigma_l2_norm(g, f.re, restrict_x3), b = sigma_l2_norm(g, f.im, restrict_x3);
    return std::sqrt(a * a + b * b);
}

}  // namespace wginv
