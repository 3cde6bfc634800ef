#pragma once

#include <complex>
#include <vector>

#include "wginv/go.hpp"
#include "wginv/io_map.hpp"

namespace wginv {

/// One sampled value of the light-ray transform of a potential entry.
struct RaySample {
    enum class Source { direct_quadrature, identity_extraction };
    int row = 0, col = 0;
    Vec2 theta{1.0, 0.0};
    Vec2 y{0.0, 0.0};
    double y3 = 0.0;
    std::complex<double> value{0.0, 0.0};
    double eps = 0.0;
    double rho = 0.0;
    Source source = Source::direct_quadrature;
};

/// Brute-force light-ray transform: adaptive quadrature of
/// t -> q_{row,col}(t, y - t theta, y3) over [0, T], with q extended by
/// zero outside the domain. The oracle for all identity-based extractions.
double lrt_direct(const Grid4& g, const MatrixPotential& q, int row, int col, Vec2 theta,
                  Vec2 y, double y3);

/// Boundary-side right-hand side of the integral identity
///   int_{Omega_T} (q u1) . v =
///     - int_Sigma (DL3) . v + int_Omega [ (DL2) . v(T) - d_t v(T) . (DL1) ],
/// with DLk the IO-output differences for the forward probe datum and v the
/// adjoint GO solution (its traces on Sigma and at t = T equal the adjoint
/// ansatz, so the pairing is analytic). The pairing is bilinear (no
/// conjugation); the adjoint probe carries the opposite phase sign.
/// Returns one complex value per adjoint component (pairing with e_r);
/// contract with K* to obtain the identity value.
std::vector<std::complex<double>> identity_rhs_components(
    const Grid4& g, const ComplexIOOutput& diff, const GOProbe& adjoint_probe,
    IOMode mode = {});

std::complex<double> identity_rhs(const Grid4& g, const ComplexIOOutput& diff,
                                  const GOProbe& adjoint_probe, IOMode mode = {});

/// Interior-side of the same identity, computed from recorded GO fields:
///   int_{Omega_T} (q u1) . v  over the recorded x3 band.
/// u1 and v are GO solutions (ansatz + recorded remainder); q here is the
/// difference potential q1 - q2.
std::complex<double> identity_lhs(const Grid4& g, const MatrixPotential& q_diff,
                                  const GOSolution& u1, const GOSolution& v);

/// Mollified light-ray extraction of entry (row, col) of q1 - q2 at ray
/// (theta, y, y3): builds the forward probe with K = e_col and the adjoint
/// probe with K* = e_row, applies both IO maps to the analytic probe datum
/// and evaluates the identity RHS. Error O(1/rho) + O(eps).
RaySample extract_ray(const Grid4& g, IoMapOracle& q1_oracle, const MatrixPotential& q2,
                      int row, int col, Vec2 theta, Vec2 y, double y3, double rho,
                      double eps, IOMode mode = {});

/// Convenience overload for tests: wraps q1 in a solver-backed oracle.
RaySample extract_ray(const Grid4& g, const MatrixPotential& q1,
                      const MatrixPotential& q2, int row, int col, Vec2 theta, Vec2 y,
                      double y3, double rho, double eps, IOMode mode = {});

/// All entries at once from n forward solves per potential: the adjoint
/// pairing is a contraction, so entry (r, c) reuses the c-th forward solve.
/// values[r * n + c] approximates L[(q1-q2)_{rc}](theta, y) at slice y3.
std::vector<std::complex<double>> extract_all_entries(const Grid4& g,
                                                      IoMapOracle& q1_oracle,
                                                      const MatrixPotential& q2, Vec2 theta,
                                                      Vec2 y, double y3, double rho,
                                                      double eps, IOMode mode = {});

}  // namespace wginv
