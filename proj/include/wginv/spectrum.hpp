#pragma once

#include <complex>
#include <vector>

#include "wginv/light_ray.hpp"

namespace wginv {

/// Frequency grid for the per-slice spectrum q_hat(tau, xi): tau dual to a
/// time window of length t_dom >> T (so compact time support is an active
/// constraint), xi dual to an x'-box of length x_dom covering omega.
struct ConeGrid {
    int n_tau = 256;
    int n_xi = 12;
    double t_dom = 32.0;  // tau spacing 2*pi / t_dom
    double x_dom = 2.0;   // xi  spacing 2*pi / x_dom
    double x_lo = -0.5;   // output box start per axis
    double t_sup = 2.0;   // time support bound used by the extension

    double dtau() const { return 2.0 * M_PI / t_dom; }
    double dxi() const { return 2.0 * M_PI / x_dom; }
    double tau(int j) const { return (j - n_tau / 2) * dtau(); }
    double xi(int m) const { return (m - n_xi / 2) * dxi(); }
    double tau_max() const { return (n_tau / 2) * dtau(); }
    double xi_max() const { return (n_xi / 2) * dxi(); }
    double dt_out() const { return t_dom / n_tau; }
    double dx_out() const { return x_dom / n_xi; }

    std::size_t size() const {
        return static_cast<std::size_t>(n_tau) * n_xi * n_xi;
    }
    std::size_t index(int j, int m1, int m2) const {
        return (static_cast<std::size_t>(j) * n_xi + m1) * n_xi + m2;
    }
};

/// One exact-frequency cone sample: value of q_hat at (tau = theta.xi, xi).
struct ExactSample {
    double tau = 0.0;
    int m1 = 0, m2 = 0;  // xi grid indices
    std::complex<double> v{0.0, 0.0};
};

/// Sampled Fourier data of one potential entry at one slice y3.
struct ConeSpectrum {
    int row = 0, col = 0;
    double y3 = 0.0;
    ConeGrid cg;
    std::vector<std::complex<double>> grid_vals;  // [j][m1][m2]
    std::vector<float> bin_count;                 // nearest-tau binning hits
    std::vector<ExactSample> samples;             // exact-tau samples
    std::vector<double> row_cond;                 // per xi-row fit condition
    std::vector<std::uint8_t> row_flag;  // 0 untouched, 1 extended, 2 ill-cond
    bool extrapolated = false;

    void init(const ConeGrid& g);
};

/// DFT in y' of one direction's rays, evaluated on the xi grid and tagged
/// with tau = theta . xi. The rays must lie on a uniform y' lattice
/// (missing lattice points count as zero; the transform is extended by
/// zero off the sampled footprint).
std::vector<ExactSample> fourier_slice(const ConeGrid& cg, Vec2 theta,
                                       const std::vector<RaySample>& rays);

/// Accumulate samples: stores them and nearest-tau bins them into the grid
/// (conflicts averaged).
void add_cone_samples(ConeSpectrum& cs, const std::vector<ExactSample>& samples);

/// Support-constrained least-squares completion: per xi-row, fit a time
/// profile supported in [0, t_sup] to the exact-tau samples (ridge
/// parameter lambda, relative) and evaluate it on the full tau grid.
/// Rows with |xi| >= tau_max are left untouched; rows whose normal matrix
/// condition exceeds cond_threshold are filled only inside the sampled
/// cone and flagged.
void extend_spectrum(ConeSpectrum& cs, double lambda = 1e-8,
                     double cond_threshold = 1e12);

/// Real field on the output grid (t in [0,T], x' in the box), plus error
/// functionals against an optional reference.
struct SliceField {
    int n_t = 0, n_x = 0;
    double dt = 0.0, dx = 0.0, x_lo = 0.0;
    std::vector<double> v;  // [a][b1][b2]
    double at(int a, int b1, int b2) const {
        return v[(static_cast<std::size_t>(a) * n_x + b1) * n_x + b2];
    }
    double& at(int a, int b1, int b2) {
        return v[(static_cast<std::size_t>(a) * n_x + b1) * n_x + b2];
    }
    double max_abs() const;
};

struct InversionResult {
    SliceField field;
    double imag_linf = 0.0;        // discarded imaginary part (diagnostic)
    double amplification = 0.0;    // kept-mode count / domain volume
    int kept_modes = 0;
    double linf_err = -1.0;        // vs reference, absolute
    double linf_rel = -1.0;        // vs reference, relative to its sup
    double hminus1_err = -1.0;     // discrete H^-1 of the error
};

/// Zero-fill outside B(0, alpha), inverse FFT, restrict to [0,T] x box.
/// alpha must not exceed the sampled band min(tau_max, xi_max).
InversionResult invert_spectrum(const ConeSpectrum& cs, double alpha,
                                double keep_t_max,
                                const SliceField* reference = nullptr);

struct FieldErrors {
    double linf = 0.0;
    double linf_rel = 0.0;
    double hminus1 = 0.0;
};

/// L-infinity and discrete H^-1 error functionals between two slice fields
/// on the same output grid.
FieldErrors compare_fields(const ConeGrid& cg, const SliceField& f, const SliceField& ref);

/// Worst nearest-sample gap (in units of the grid cell diagonal) over cone
/// grid points inside B(0, alpha): the direction set must leave no grid
/// point further than one cell from a sample.
double cone_coverage_gap(const ConeGrid& cg, const std::vector<Vec2>& thetas,
                         double alpha);

/// Sample an analytic difference potential entry on the inversion output
/// grid (reference for error functionals).
SliceField sample_reference(const ConeGrid& cg, const AnalyticPotential& diff, int row,
                            int col, double y3, double keep_t_max);

}  // namespace wginv
