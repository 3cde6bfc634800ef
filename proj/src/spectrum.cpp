#include "wginv/spectrum.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace wginv {

void ConeSpectrum::init(const ConeGrid& g) {
    cg = g;
    grid_vals.assign(g.size(), {0.0, 0.0});
    bin_count.assign(g.size(), 0.0f);
    row_cond.assign(static_cast<std::size_t>(g.n_xi) * g.n_xi, 0.0);
    row_flag.assign(static_cast<std::size_t>(g.n_xi) * g.n_xi, 0);
    samples.clear();
    extrapolated = false;
}

namespace {

// Recover the uniform lattice of the ray set; throws on inconsistency.
void check_lattice(const std::vector<RaySample>& rays, double& spacing) {
    if (rays.size() < 2) {
        spacing = 1.0;
        return;
    }
    std::vector<double> xs;
    xs.reserve(rays.size() * 2);
    for (const auto& r : rays) {
        xs.push_back(r.y.x);
        xs.push_back(r.y.y);
    }
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t s = 1; s < xs.size(); ++s) {
        double gap = xs[s] - xs[s - 1];
        if (gap > 1e-9) {
            d = (d == 0.0) ? gap : std::min(d, gap);
        }
    }
    if (d == 0.0) {
        spacing = 1.0;
        return;
    }
    for (double x : xs) {
        double r = std::abs(x / d - std::lround(x / d));
        if (r > 1e-6) throw ConfigError("fourier_slice: rays are not on a uniform y' grid");
    }
    spacing = d;
}

}  // namespace

std::vector<ExactSample> fourier_slice(const ConeGrid& cg, Vec2 theta,
                                       const std::vector<RaySample>& rays) {
    double dy = 0.0;
    check_lattice(rays, dy);
    std::vector<ExactSample> out;
    out.reserve(static_cast<std::size_t>(cg.n_xi) * cg.n_xi);
    const double cell = dy * dy;
    for (int m1 = 0; m1 < cg.n_xi; ++m1) {
        for (int m2 = 0; m2 < cg.n_xi; ++m2) {
            Vec2 xi{cg.xi(m1), cg.xi(m2)};
            std::complex<double> acc{0.0, 0.0};
            for (const auto& r : rays) {
                double ph = -(r.y.x * xi.x + r.y.y * xi.y);
                acc += r.value * std::complex<double>(std::cos(ph), std::sin(ph));
            }
            ExactSample s;
            s.tau = dot(theta, xi);
            s.m1 = m1;
            s.m2 = m2;
            s.v = acc * cell;
            out.push_back(s);
        }
    }
    return out;
}

void add_cone_samples(ConeSpectrum& cs, const std::vector<ExactSample>& samples) {
    const ConeGrid& g = cs.cg;
    for (const auto& s : samples) {
        cs.samples.push_back(s);
        int j = static_cast<int>(std::lround(s.tau / g.dtau())) + g.n_tau / 2;
        if (j < 0 || j >= g.n_tau) continue;
        std::size_t idx = g.index(j, s.m1, s.m2);
        float c = cs.bin_count[idx];
        cs.grid_vals[idx] = (cs.grid_vals[idx] * static_cast<double>(c) + s.v) /
                            static_cast<double>(c + 1.0f);
        cs.bin_count[idx] = c + 1.0f;
    }
}

void extend_spectrum(ConeSpectrum& cs, double lambda, double cond_threshold) {
    const ConeGrid& g = cs.cg;
    const double dt = g.dt_out();
    const int n_g = static_cast<int>(std::lround(g.t_sup / dt)) + 1;

    // Group exact samples per xi-row.
    std::vector<std::vector<const ExactSample*>> per_row(
        static_cast<std::size_t>(g.n_xi) * g.n_xi);
    for (const auto& s : cs.samples)
        per_row[static_cast<std::size_t>(s.m1) * g.n_xi + s.m2].push_back(&s);

    Eigen::VectorXd tgrid(n_g), w(n_g);
    for (int k = 0; k < n_g; ++k) {
        tgrid[k] = k * dt;
        w[k] = (k == 0 || k == n_g - 1) ? 0.5 * dt : dt;
    }

    for (int m1 = 0; m1 < g.n_xi; ++m1) {
        for (int m2 = 0; m2 < g.n_xi; ++m2) {
            std::size_t row = static_cast<std::size_t>(m1) * g.n_xi + m2;
            double xin = std::hypot(g.xi(m1), g.xi(m2));
            if (xin >= g.tau_max()) continue;  // fully sampled row: leave as is
            const auto& smp = per_row[row];
            if (smp.empty()) continue;

            const int ns = static_cast<int>(smp.size());
            Eigen::MatrixXcd A(ns, n_g);
            Eigen::VectorXcd b(ns);
            for (int s = 0; s < ns; ++s) {
                b[s] = smp[s]->v;
                for (int k = 0; k < n_g; ++k) {
                    double ph = -smp[s]->tau * tgrid[k];
                    A(s, k) = w[k] * std::complex<double>(std::cos(ph), std::sin(ph));
                }
            }
            Eigen::MatrixXcd N = A.adjoint() * A;
            double tr = N.trace().real();
            double lam = lambda * std::max(tr / n_g, 1e-300);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(N);
            double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
            double cond = (hi + lam) / std::max(lo + lam, 1e-300);
            cs.row_cond[row] = cond;
            Eigen::MatrixXcd Nr = N;
            for (int k = 0; k < n_g; ++k) Nr(k, k) += lam;
            Eigen::VectorXcd gfit = Nr.ldlt().solve(A.adjoint() * b);

            bool ill = cond > cond_threshold;
            cs.row_flag[row] = ill ? 2 : 1;
            for (int j = 0; j < g.n_tau; ++j) {
                double tau = g.tau(j);
                if (ill && std::abs(tau) > xin) continue;  // partial extension only
                std::complex<double> val{0.0, 0.0};
                for (int k = 0; k < n_g; ++k) {
                    double ph = -tau * tgrid[k];
                    val += w[k] * std::complex<double>(std::cos(ph), std::sin(ph)) *
                           gfit[k];
                }
                cs.grid_vals[g.index(j, m1, m2)] = val;
            }
        }
    }
    cs.extrapolated = true;
}

double SliceField::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

InversionResult invert_spectrum(const ConeSpectrum& cs, double alpha, double keep_t_max,
                                const SliceField* reference) {
    const ConeGrid& g = cs.cg;
    if (alpha > std::min(g.tau_max(), g.xi_max()) + 1e-12) {
        std::ostringstream os;
        os << "invert_spectrum: cutoff alpha = " << alpha
           << " exceeds the sampled band min(tau_max, xi_max) = "
           << std::min(g.tau_max(), g.xi_max());
        throw ConfigError(os.str());
    }

    const int nt = g.n_tau, nx = g.n_xi;
    std::vector<std::complex<double>> buf(g.size());
    int kept = 0;
    for (int j = 0; j < nt; ++j) {
        for (int m1 = 0; m1 < nx; ++m1) {
            for (int m2 = 0; m2 < nx; ++m2) {
                double tau = g.tau(j);
                double x1 = g.xi(m1), x2 = g.xi(m2);
                double rad = std::sqrt(tau * tau + x1 * x1 + x2 * x2);
                std::complex<double> v = cs.grid_vals[g.index(j, m1, m2)];
                if (rad >= alpha) {
                    v = 0.0;
                } else {
                    ++kept;
                }
                // phase shift for the x-box origin
                double ph = g.x_lo * (x1 + x2);
                buf[g.index(j, m1, m2)] =
                    v * std::complex<double>(std::cos(ph), std::sin(ph));
            }
        }
    }

    // Backward FFT (sign +) over all three axes.
    fftw_complex* arr = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan = fftw_plan_dft_3d(nt, nx, nx, arr, arr, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    const double scale = 1.0 / (g.t_dom * g.x_dom * g.x_dom);
    InversionResult res;
    res.kept_modes = kept;
    res.amplification = kept * scale;
    SliceField& f = res.field;
    f.n_t = static_cast<int>(std::lround(keep_t_max / g.dt_out())) + 1;
    f.n_x = nx;
    f.dt = g.dt_out();
    f.dx = g.dx_out();
    f.x_lo = g.x_lo;
    f.v.assign(static_cast<std::size_t>(f.n_t) * nx * nx, 0.0);
    double imax = 0.0;
    for (int a = 0; a < f.n_t; ++a) {
        for (int b1 = 0; b1 < nx; ++b1) {
            for (int b2 = 0; b2 < nx; ++b2) {
                double sgn = ((a + b1 + b2) % 2 == 0) ? 1.0 : -1.0;
                std::complex<double> v = buf[g.index(a % nt, b1, b2)] * (scale * sgn);
                f.at(a, b1, b2) = v.real();
                imax = std::max(imax, std::abs(v.imag()));
            }
        }
    }
    res.imag_linf = imax;

    if (reference) {
        FieldErrors e = compare_fields(g, f, *reference);
        res.linf_err = e.linf;
        res.linf_rel = e.linf_rel;
        res.hminus1_err = e.hminus1;
    }
    return res;
}

FieldErrors compare_fields(const ConeGrid& g, const SliceField& f, const SliceField& r) {
    FieldErrors out;
    const int nt = g.n_tau, nx = g.n_xi;
    double lerr = 0.0;
    for (std::size_t s = 0; s < f.v.size(); ++s)
        lerr = std::max(lerr, std::abs(f.v[s] - r.v[s]));
    out.linf = lerr;
    double rmax = r.max_abs();
    out.linf_rel = rmax > 0.0 ? lerr / rmax : lerr;

    // Discrete H^-1 of the error: forward transform of the restricted
    // error field, Sobolev-weighted mode sum.
    std::vector<std::complex<double>> ebuf(g.size(), {0.0, 0.0});
    for (int a = 0; a < f.n_t; ++a)
        for (int b1 = 0; b1 < nx; ++b1)
            for (int b2 = 0; b2 < nx; ++b2) {
                double wt = (a == 0 || a == f.n_t - 1) ? 0.5 : 1.0;
                ebuf[g.index(a, b1, b2)] = wt * (f.at(a, b1, b2) - r.at(a, b1, b2)) *
                                           g.dt_out() * g.dx_out() * g.dx_out();
            }
    fftw_complex* ea = reinterpret_cast<fftw_complex*>(ebuf.data());
    fftw_plan ep = fftw_plan_dft_3d(nt, nx, nx, ea, ea, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(ep);
    fftw_destroy_plan(ep);
    double acc = 0.0;
    for (int j = 0; j < nt; ++j)
        for (int m1 = 0; m1 < nx; ++m1)
            for (int m2 = 0; m2 < nx; ++m2) {
                // FFT output index -> signed frequency
                double tau = ((j + nt / 2) % nt - nt / 2) * g.dtau();
                double x1 = ((m1 + nx / 2) % nx - nx / 2) * g.dxi();
                double x2 = ((m2 + nx / 2) % nx - nx / 2) * g.dxi();
                double k2 = tau * tau + x1 * x1 + x2 * x2;
                double a2 = std::norm(std::complex<double>(ebuf[g.index(j, m1, m2)]));
                acc += a2 / (1.0 + k2);
            }
    acc *= g.dtau() * g.dxi() * g.dxi() / std::pow(2.0 * M_PI, 3);
    out.hminus1 = std::sqrt(acc);
    return out;
}

double cone_coverage_gap(const ConeGrid& cg, const std::vector<Vec2>& thetas,
                         double alpha) {
    double diag = std::sqrt(cg.dtau() * cg.dtau() + 2.0 * cg.dxi() * cg.dxi());
    double worst = 0.0;
    for (int j = 0; j < cg.n_tau; ++j) {
        double tau = cg.tau(j);
        for (int m1 = 0; m1 < cg.n_xi; ++m1) {
            for (int m2 = 0; m2 < cg.n_xi; ++m2) {
                Vec2 xi{cg.xi(m1), cg.xi(m2)};
                double xin = norm(xi);
                if (std::abs(tau) > xin) continue;  // outside the cone
                if (tau * tau + xin * xin >= alpha * alpha) continue;
                if (xin == 0.0) continue;  // tau = 0 sample exists trivially
                double best = 1e300;
                for (const auto& th : thetas)
                    best = std::min(best, std::abs(tau - dot(th, xi)));
                worst = std::max(worst, best / diag);
            }
        }
    }
    return worst;
}

SliceField sample_reference(const ConeGrid& cg, const AnalyticPotential& diff, int row,
                            int col, double y3, double keep_t_max) {
    SliceField f;
    f.n_t = static_cast<int>(std::lround(keep_t_max / cg.dt_out())) + 1;
    f.n_x = cg.n_xi;
    f.dt = cg.dt_out();
    f.dx = cg.dx_out();
    f.x_lo = cg.x_lo;
    f.v.assign(static_cast<std::size_t>(f.n_t) * f.n_x * f.n_x, 0.0);
    if (!diff.valid()) return f;
    std::vector<double> e(static_cast<std::size_t>(diff.n) * diff.n);
    for (int a = 0; a < f.n_t; ++a)
        for (int b1 = 0; b1 < f.n_x; ++b1)
            for (int b2 = 0; b2 < f.n_x; ++b2) {
                diff.eval(a * f.dt, cg.x_lo + b1 * f.dx, cg.x_lo + b2 * f.dx, y3,
                          e.data());
                f.at(a, b1, b2) = e[static_cast<std::size_t>(row) * diff.n + col];
            }
    return f;
}

}  // namespace wginv
