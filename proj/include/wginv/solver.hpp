#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "wginv/field.hpp"
#include "wginv/geometry.hpp"
#include "wginv/potential.hpp"

namespace wginv {

/// Real-valued probe datum (phi, psi, f). Empty members mean zero. The
/// Dirichlet trace f is banded in x3 (zero outside its band).
struct BoundaryTriple {
    SpatialField phi;  // initial value on Omega
    SpatialField psi;  // initial velocity
    BoundaryField f;   // Dirichlet datum on Sigma

    bool zero_f() const { return f.empty(); }
};

/// Complex probe = two real triples solved independently.
struct ComplexBoundaryTriple {
    BoundaryTriple re, im;
};

/// The three traces (u|_{t=T}, d_t u|_{t=T}, d_nu u|_Sigma).
struct IOOutput {
    SpatialField final_value;
    SpatialField final_velocity;
    BoundaryField neumann;
};

struct ComplexIOOutput {
    IOOutput re, im;
};

/// Right-hand side F(t,x) of an inhomogeneous solve.
class SourceTerm {
  public:
    virtual ~SourceTerm() = default;
    /// Add scale * F(t, .) into dst, touching only the support of F.
    virtual void add_to(const Grid4& g, double t, double scale, SpatialField& dst) const = 0;
};

/// Per-time-level observer of the evolving field.
class FieldRecorder {
  public:
    virtual ~FieldRecorder() = default;
    virtual void record(int level, double t, const SpatialField& u) = 0;
};

/// Records the field over an x3 index band for every time level.
class BoxRecorder : public FieldRecorder {
  public:
    BoxRecorder(const Grid4& g, int ncomp, int k3_lo, int k3_hi);
    void record(int level, double t, const SpatialField& u) override;
    /// Value at (level, c, i, j, k); zero outside the recorded band.
    double at(int level, int c, int i, int j, int k) const;
    int k3_lo() const { return k3_lo_; }
    int k3_hi() const { return k3_hi_; }

  private:
    int n_t_, ncomp_, n1_, n2_, k3_lo_, k3_hi_;
    std::vector<double> v_;
    std::size_t index(int m, int c, int i, int j, int k) const {
        return (((static_cast<std::size_t>(m) * ncomp_ + c) * n1_ + i) * n2_ + j) *
                   (k3_hi_ - k3_lo_ + 1) +
               (k - k3_lo_);
    }
};

/// Accumulates the trapezoid-in-time L2(Omega_T) norm of the field.
class L2TimeAccumulator : public FieldRecorder {
  public:
    explicit L2TimeAccumulator(const Grid4& g) : g_(g) {}
    void record(int level, double t, const SpatialField& u) override;
    double norm() const { return std::sqrt(acc_); }

  private:
    const Grid4& g_;
    double acc_ = 0.0;
};

/// Leapfrog-compatible discrete energy
///   E^{m+1/2} = 1/2 |(u^{m+1}-u^m)/dt|^2 + 1/2 <grad u^{m+1}, grad u^m>
///             + 1/2 <q u^{m+1}, u^m>,
/// exactly conserved by the scheme for symmetric time-independent q.
class EnergyTracker : public FieldRecorder {
  public:
    EnergyTracker(const Grid4& g, const MatrixPotential& q) : g_(g), q_(q) {}
    void record(int level, double t, const SpatialField& u) override;
    const std::vector<double>& energies() const { return e_; }
    /// max_m |E_m - E_0| / |E_0|
    double relative_drift() const;

  private:
    const Grid4& g_;
    const MatrixPotential& q_;
    SpatialField prev_;
    std::vector<double> e_;
};

struct SolveOptions {
    const SourceTerm* source = nullptr;
    FieldRecorder* recorder = nullptr;
    bool want_neumann = true;
    bool check_compatibility = true;
};

/// Leapfrog solve of box(u) + q u = F on (0,T) x omega x [-X3, X3] with
/// Dirichlet data f on the lateral boundary and zero at the x3 caps.
IOOutput solve_ibvp(const Grid4& g, const MatrixPotential& q, const BoundaryTriple& data,
                    const SolveOptions& opt = {});

/// Output traces of the backward solve at t = 0.
struct AdjointOutput {
    SpatialField initial_value;
    SpatialField initial_velocity;
    BoundaryField neumann;
};

/// Backward-in-time solve of box(v) + q^T v = F with prescribed final
/// conditions; realized as the forward solve under t -> T - t with the
/// transposed, time-reversed potential, which makes it the exact algebraic
/// transpose of solve_ibvp under trapezoid space-time inner products.
AdjointOutput solve_adjoint(const Grid4& g, const MatrixPotential& q,
                            const SpatialField& final_value,
                            const SpatialField& final_velocity, const BoundaryField& fstar,
                            const SolveOptions& opt = {});

/// Partial-data mode for the IO map: full traces, or the Neumann trace
/// restricted to (0,T) x d(omega) x (-R, R).
struct IOMode {
    bool partial = false;
    double R = 0.0;
    static IOMode full() { return {}; }
    static IOMode partial_data(double R) { return {true, R}; }
};

/// IO map evaluation: discards the interior field. In partial mode the
/// Neumann trace is zeroed for |x3| >= R and the datum must lie in L_R.
IOOutput apply_io_map(const Grid4& g, const MatrixPotential& q, const BoundaryTriple& data,
                      IOMode mode = {}, const SolveOptions& opt = {});

ComplexIOOutput apply_io_map_c(const Grid4& g, const MatrixPotential& q,
                               const ComplexBoundaryTriple& data, IOMode mode = {});

/// Discrete surrogate of the probe-space norm: H1 x L2 x H1(Sigma) plus the
/// 1/t-weighted first-derivative boundary terms evaluated at half-step
/// quadrature nodes (first node t = dt/2). A proxy, not the exact norm.
double proxy_norm(const Grid4& g, const BoundaryTriple& data);
double proxy_norm_c(const Grid4& g, const ComplexBoundaryTriple& data);

/// Composite norm of an IO output: sqrt(H1(final)^2 + L2(velocity)^2 +
/// L2(Sigma, neumann)^2), optionally restricting the trace to |x3| < R.
double io_output_norm(const Grid4& g, const IOOutput& out, double restrict_x3 = -1.0);
double io_output_norm_c(const Grid4& g, const ComplexIOOutput& out,
                        double restrict_x3 = -1.0);

/// Membership check for L_R: the Dirichlet trace vanishes for |x3| >= R.
bool in_data_space_R(const Grid4& g, const BoundaryTriple& data, double R);

}  // namespace wginv
