#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "wginv/probe.hpp"
#include "wginv/solver.hpp"

namespace wginv {

/// Oscillatory probe: direction theta, frequency rho, phase sign, constant
/// vector K, and the mollifier profile.
struct GOProbe {
    Vec2 theta{1.0, 0.0};
    double rho = 8.0;
    int sign = +1;  // +1 forward phase, -1 adjoint phase
    std::vector<double> K;
    ProbeProfile profile;

    void validate() const;
};

/// Enforce the points-per-wavelength guard: h <= 2*pi / (10 * rho) along
/// theta. Throws ConfigError naming the rule otherwise.
void check_resolution_guard(const Grid4& g, double rho);

/// Phase factor e^{sign * i * rho * (x'.theta + t)}.
std::complex<double> ansatz_phase(const GOProbe& p, double t, Vec2 xp);

/// Component c of the oscillatory ansatz K phi(x'+t theta) h(x3) e^{...}.
std::complex<double> ansatz_value(const GOProbe& p, int c, double t, Vec2 xp, double x3);

/// Exact time derivative of the ansatz component (used for psi).
std::complex<double> ansatz_dt_value(const GOProbe& p, int c, double t, Vec2 xp,
                                     double x3);

/// Materialize the ansatz on one time level.
ComplexSpatialField build_ansatz(const Grid4& g, const GOProbe& p, int level);

/// The rho-independent residual profile J of the ansatz:
///   J = [(theta^T Hess(phi) theta - Lap(phi)) h - phi h''] K + q (phi h K),
/// with the profile arguments shifted to x' + t theta. Real-valued.
double residual_source_value(const Grid4& g, const MatrixPotential& q, const GOProbe& p,
                             int c, double t, Vec2 xp, double x3);

/// Materialize J on one time level.
SpatialField build_residual_source(const Grid4& g, const MatrixPotential& q,
                                   const GOProbe& p, int level);

/// Boundary/initial datum of the total GO solution: because the remainder
/// has zero initial (or final) conditions and a zero lateral trace, the
/// datum equals the traces of the ansatz alone and is fully analytic.
ComplexBoundaryTriple probe_boundary_data(const Grid4& g, const GOProbe& p);

/// Geometric-optics solution: ansatz (implicit, closed form) plus the
/// numerically solved remainder Psi.
struct GOSolution {
    GOProbe probe;
    double psi_l2 = 0.0;  // ||Psi||_{L2(Omega_T)}
    // Remainder recorded over an x3 index band (both complex parts); may be
    // null when no interior evaluation is needed.
    std::shared_ptr<BoxRecorder> psi_re, psi_im;
    /// Total field component at a grid node and time level (ansatz + Psi).
    std::complex<double> total(const Grid4& g, int level, int c, int i, int j,
                               int k) const;
};

/// Solve the remainder problem box(Psi) + q_eq Psi = -e^{sign i rho s} J
/// with zero lateral trace and zero initial (sign +) or final (sign -)
/// conditions. record_k3_lo/hi < 0 disables interior recording.
GOSolution solve_remainder(const Grid4& g, const MatrixPotential& q_eq, const GOProbe& p,
                           int record_k3_lo = -1, int record_k3_hi = -1);

/// Max-abs discrete residual of the ansatz alone over interior nodes:
///   D_t^2(ansatz) - Lap_h(ansatz) + q ansatz - e^{i sign rho s} J
/// at the given interior time level. Measures the dispersive error.
double ansatz_discrete_residual(const Grid4& g, const MatrixPotential& q, const GOProbe& p,
                                int level);

/// Transposed copy of a potential (samples swapped entrywise).
MatrixPotential transpose_potential(const MatrixPotential& q);

}  // namespace wginv
