#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wginv/field.hpp"
#include "wginv/geometry.hpp"

namespace wginv {

/// Closed-form definition of a matrix potential entry set. The callback
/// writes all n*n entries (row-major) at one space-time point.
struct AnalyticPotential {
    int n = 0;
    std::function<void(double t, double x1, double x2, double x3, double* entries)> eval;

    bool valid() const { return n > 0 && static_cast<bool>(eval); }
};

/// n x n real potential q(t,x) sampled on a Grid4, stored only on its
/// support box (q vanishes for |x3| > support_r and outside the box).
/// Time-independent potentials keep a single time level.
class MatrixPotential {
  public:
    int n = 0;
    double bound_M = 0.0;    // declared sup-norm bound
    double support_r = 0.0;  // x3 half-width of the support
    bool time_independent = false;

    // Support box in grid indices (inclusive). Empty box => q == 0.
    int i_lo = 0, i_hi = -1, j_lo = 0, j_hi = -1, k_lo = 0, k_hi = -1;
    int nt_levels = 0;

    // Layout: [t][i][j][k][e], entries e = r*n + c row-major, fastest axis.
    std::vector<double> vals;

    // Optional closed form kept alongside the samples; preferred by the
    // ray-transform quadrature when present.
    AnalyticPotential analytic;

    bool is_zero() const { return vals.empty(); }
    int box_n1() const { return i_hi - i_lo + 1; }
    int box_n2() const { return j_hi - j_lo + 1; }
    int box_n3() const { return k_hi - k_lo + 1; }

    std::size_t index(int m, int i, int j, int k) const {
        std::size_t node =
            ((static_cast<std::size_t>(i - i_lo) * box_n2() + (j - j_lo)) * box_n3() +
             (k - k_lo));
        return (static_cast<std::size_t>(m) * box_n1() * box_n2() * box_n3() + node) *
               (static_cast<std::size_t>(n) * n);
    }

    const double* entries_at(int m, int i, int j, int k) const {
        return vals.data() + index(time_independent ? 0 : m, i, j, k);
    }

    /// Entry value at an arbitrary point: closed form when available,
    /// otherwise multilinear interpolation of the samples (zero outside
    /// the support box and outside [0,T]).
    double entry(const Grid4& g, int row, int col, double t, double x1, double x2,
                 double x3) const;

    /// Measured sup norm of the samples.
    double measured_sup() const;

    /// Largest first-order difference quotient over the samples (grid-scale
    /// W^{1,inf} check). Returns 0 for the zero potential.
    double lipschitz_quotient(const Grid4& g) const;

    /// Throws ConfigError if an invariant fails (sup bound, x3 support,
    /// finite difference quotients).
    void validate(const Grid4& g) const;
};

/// Sample a closed-form potential on the grid. The support box is derived
/// from support_r in x3 and covers the whole cross-section in x'.
MatrixPotential sample_potential(const Grid4& g, const AnalyticPotential& def,
                                 double support_r, double bound_M,
                                 bool time_independent = false);

/// Zero potential of system size n.
MatrixPotential zero_potential(int n);

/// q1 - q2 as an analytic definition (for truth references in tests and
/// scoring); both must share the system size.
AnalyticPotential potential_difference(const AnalyticPotential& a,
                                       const AnalyticPotential& b);

}  // namespace wginv
