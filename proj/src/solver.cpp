#include "wginv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace wginv {

namespace {

// Internal solve controls: the adjoint path runs the same kernel with the
// potential transposed and all time-dependent inputs reversed.
struct StepContext {
    const Grid4& g;
    const MatrixPotential& q;
    bool q_transpose = false;
    bool q_time_reverse = false;

    int q_level(int m) const {
        if (q.is_zero() || q.time_independent) return 0;
        return q_time_reverse ? (g.n_t - 1 - m) : m;
    }
};

// out = Laplacian(u) - q(t_m) u on interior nodes (others untouched).
void apply_spatial_operator(const StepContext& ctx, int m, const SpatialField& u,
                            SpatialField& out) {
    const Grid4& g = ctx.g;
    const CrossSection& cs = g.cs;
    const int n1 = cs.n1, n2 = cs.n2, n3 = g.n_x3;
    const int ncomp = u.ncomp();
    const double ax = 1.0 / (cs.h * cs.h);
    const double az = 1.0 / (g.h_x3 * g.h_x3);
    const std::ptrdiff_t S1 = static_cast<std::ptrdiff_t>(n2) * n3;
    const std::ptrdiff_t S2 = n3;
    const bool rect = cs.shape == CrossSectionShape::rectangle;

    for (int c = 0; c < ncomp; ++c) {
        const double* uc = u.comp(c);
        double* oc = out.comp(c);
        for (int i = 1; i < n1 - 1; ++i) {
            for (int j = 1; j < n2 - 1; ++j) {
                if (!rect && !cs.is_interior(i, j)) continue;
                std::size_t base = (static_cast<std::size_t>(i) * n2 + j) * n3;
                for (int k = 1; k < n3 - 1; ++k) {
                    std::size_t s = base + k;
                    double v = uc[s];
                    oc[s] = ax * (uc[s + S1] + uc[s - S1] + uc[s + S2] + uc[s - S2] -
                                  4.0 * v) +
                            az * (uc[s + 1] + uc[s - 1] - 2.0 * v);
                }
            }
        }
    }

    if (!ctx.q.is_zero()) {
        const MatrixPotential& q = ctx.q;
        const int n = q.n;
        const int ql = ctx.q_level(m);
        const int ilo = std::max(q.i_lo, 1), ihi = std::min(q.i_hi, n1 - 2);
        const int jlo = std::max(q.j_lo, 1), jhi = std::min(q.j_hi, n2 - 2);
        const int klo = std::max(q.k_lo, 1), khi = std::min(q.k_hi, n3 - 2);
        double acc[8];
        for (int i = ilo; i <= ihi; ++i) {
            for (int j = jlo; j <= jhi; ++j) {
                if (!rect && !cs.is_interior(i, j)) continue;
                for (int k = klo; k <= khi; ++k) {
                    const double* e = q.entries_at(ql, i, j, k);
                    for (int r = 0; r < n; ++r) {
                        double a = 0.0;
                        for (int c = 0; c < n; ++c) {
                            double qe = ctx.q_transpose ? e[c * n + r] : e[r * n + c];
                            a += qe * u(c, i, j, k);
                        }
                        acc[r] = a;
                    }
                    for (int r = 0; r < n; ++r) out(r, i, j, k) -= acc[r];
                }
            }
        }
    }
}

// Leapfrog update: un = 2 u - um1 + dt^2 (Lap u - q u) on interior nodes.
void leapfrog_interior(const StepContext& ctx, int m, const SpatialField& u,
                       const SpatialField& um1, SpatialField& un) {
    const Grid4& g = ctx.g;
    const CrossSection& cs = g.cs;
    const int n1 = cs.n1, n2 = cs.n2, n3 = g.n_x3;
    const int ncomp = u.ncomp();
    const double cx = g.dt * g.dt / (cs.h * cs.h);
    const double cz = g.dt * g.dt / (g.h_x3 * g.h_x3);
    const std::ptrdiff_t S1 = static_cast<std::ptrdiff_t>(n2) * n3;
    const std::ptrdiff_t S2 = n3;
    const bool rect = cs.shape == CrossSectionShape::rectangle;

    for (int c = 0; c < ncomp; ++c) {
        const double* uc = u.comp(c);
        const double* pc = um1.comp(c);
        double* nc = un.comp(c);
        for (int i = 1; i < n1 - 1; ++i) {
            for (int j = 1; j < n2 - 1; ++j) {
                if (!rect && !cs.is_interior(i, j)) continue;
                std::size_t base = (static_cast<std::size_t>(i) * n2 + j) * n3;
                for (int k = 1; k < n3 - 1; ++k) {
                    std::size_t s = base + k;
                    double v = uc[s];
                    nc[s] = 2.0 * v - pc[s] +
                            cx * (uc[s + S1] + uc[s - S1] + uc[s + S2] + uc[s - S2] -
                                  4.0 * v) +
                            cz * (uc[s + 1] + uc[s - 1] - 2.0 * v);
                }
            }
        }
    }

    if (!ctx.q.is_zero()) {
        const MatrixPotential& q = ctx.q;
        const int n = q.n;
        const int ql = ctx.q_level(m);
        const double dt2 = g.dt * g.dt;
        const int ilo = std::max(q.i_lo, 1), ihi = std::min(q.i_hi, n1 - 2);
        const int jlo = std::max(q.j_lo, 1), jhi = std::min(q.j_hi, n2 - 2);
        const int klo = std::max(q.k_lo, 1), khi = std::min(q.k_hi, n3 - 2);
        double acc[8];
        for (int i = ilo; i <= ihi; ++i) {
            for (int j = jlo; j <= jhi; ++j) {
                if (!rect && !cs.is_interior(i, j)) continue;
                for (int k = klo; k <= khi; ++k) {
                    const double* e = q.entries_at(ql, i, j, k);
                    for (int r = 0; r < n; ++r) {
                        double a = 0.0;
                        for (int c = 0; c < n; ++c) {
                            double qe = ctx.q_transpose ? e[c * n + r] : e[r * n + c];
                            a += qe * u(c, i, j, k);
                        }
                        acc[r] = a;
                    }
                    for (int r = 0; r < n; ++r) un(r, i, j, k) -= dt2 * acc[r];
                }
            }
        }
    }
}

void inject_boundary(const Grid4& g, const BoundaryField& f, int m, SpatialField& u) {
    if (f.empty()) return;
    const auto& bn = g.cs.boundary;
    for (int c = 0; c < u.ncomp(); ++c) {
        for (std::size_t b = 0; b < bn.size(); ++b) {
            for (int k = f.k3_lo(); k <= f.k3_hi(); ++k) {
                u(c, bn[b].i, bn[b].j, k) = f.at(m, c, static_cast<int>(b), k);
            }
        }
    }
}

void extract_neumann(const Grid4& g, const SpatialField& u, int m, BoundaryField& out) {
    const auto& bn = g.cs.boundary;
    const double h = g.cs.h;
    for (int c = 0; c < u.ncomp(); ++c) {
        for (std::size_t b = 0; b < bn.size(); ++b) {
            const BoundaryNode& nd = bn[b];
            int i1 = nd.i + nd.di, j1 = nd.j + nd.dj;
            int i2 = nd.i + 2 * nd.di, j2 = nd.j + 2 * nd.dj;
            bool second_ok = i2 >= 0 && i2 < g.cs.n1 && j2 >= 0 && j2 < g.cs.n2 &&
                             g.cs.in_domain(i2, j2);
            for (int k = 0; k < g.n_x3; ++k) {
                double ub = u(c, nd.i, nd.j, k);
                double u1 = u(c, i1, j1, k);
                double d;
                if (second_ok) {
                    double u2 = u(c, i2, j2, k);
                    d = (3.0 * ub - 4.0 * u1 + u2) / (2.0 * h);
                } else {
                    d = (ub - u1) / h;
                }
                out(m, c, static_cast<int>(b), k) = d;
            }
        }
    }
}

void check_finite(const SpatialField& u, int step) {
    for (std::size_t s = 0; s < u.size(); s += 7) {
        double v = u.data()[s];
        // catches NaN and Inf as well as pre-overflow blowup
        if (!(std::abs(v) < 1e120)) {
            std::ostringstream os;
            os << "solver instability: non-finite or diverging value at step " << step;
            throw NumericalError(os.str());
        }
    }
}

struct SolveOutputs {
    IOOutput io;
};

// Core forward march shared by solve_ibvp and solve_adjoint.
SolveOutputs march(const StepContext& ctx, const BoundaryTriple& data,
                   const SolveOptions& opt) {
    const Grid4& g = ctx.g;
    int ncomp = ctx.q.is_zero() ? 0 : ctx.q.n;
    if (!data.phi.empty()) ncomp = std::max(ncomp, data.phi.ncomp());
    if (!data.psi.empty()) ncomp = std::max(ncomp, data.psi.ncomp());
    if (!data.f.empty()) ncomp = std::max(ncomp, data.f.ncomp());
    if (ncomp == 0) ncomp = 1;
    if (ncomp > 8) throw ConfigError("system size > 8 not supported");

    const int M = g.steps();
    SpatialField u = SpatialField::like(g, ncomp);
    SpatialField um1 = SpatialField::like(g, ncomp);
    SpatialField un = SpatialField::like(g, ncomp);

    // u^0 = phi with boundary values from f(0); x3 caps clamped to zero.
    if (!data.phi.empty()) u = data.phi;
    inject_boundary(g, data.f, 0, u);
    for (int c = 0; c < ncomp; ++c)
        for (int i = 0; i < g.cs.n1; ++i)
            for (int j = 0; j < g.cs.n2; ++j) {
                u(c, i, j, 0) = 0.0;
                u(c, i, j, g.n_x3 - 1) = 0.0;
            }

    SolveOutputs out;
    BoundaryField& neumann = out.io.neumann;
    if (opt.want_neumann) {
        neumann = BoundaryField::like(g, ncomp);
        extract_neumann(g, u, 0, neumann);
    }
    if (opt.recorder) opt.recorder->record(0, 0.0, u);

    // Second-order start: u^1 = phi + dt psi + dt^2/2 (L phi + F^0).
    {
        un.fill(0.0);
        apply_spatial_operator(ctx, 0, u, un);
        if (opt.source) opt.source->add_to(g, 0.0, 1.0, un);
        double half = 0.5 * g.dt * g.dt;
        SpatialField u1 = u;  // phi
        if (!data.psi.empty()) u1.axpy(g.dt, data.psi);
        // interior correction
        for (int c = 0; c < ncomp; ++c)
            for (int i = 1; i < g.cs.n1 - 1; ++i)
                for (int j = 1; j < g.cs.n2 - 1; ++j) {
                    if (g.cs.shape != CrossSectionShape::rectangle &&
                        !g.cs.is_interior(i, j))
                        continue;
                    for (int k = 1; k < g.n_x3 - 1; ++k)
                        u1(c, i, j, k) += half * un(c, i, j, k);
                }
        um1 = u;
        u = u1;
        inject_boundary(g, data.f, std::min(1, M), u);
        for (int c = 0; c < ncomp; ++c)
            for (int i = 0; i < g.cs.n1; ++i)
                for (int j = 0; j < g.cs.n2; ++j) {
                    u(c, i, j, 0) = 0.0;
                    u(c, i, j, g.n_x3 - 1) = 0.0;
                }
        if (opt.want_neumann && M >= 1) extract_neumann(g, u, 1, neumann);
        if (opt.recorder && M >= 1) opt.recorder->record(1, g.dt, u);
    }

    for (int m = 1; m < M; ++m) {
        un.fill(0.0);
        leapfrog_interior(ctx, m, u, um1, un);
        if (opt.source) opt.source->add_to(g, g.t(m), g.dt * g.dt, un);
        inject_boundary(g, data.f, m + 1, un);
        for (int c = 0; c < ncomp; ++c)
            for (int i = 0; i < g.cs.n1; ++i)
                for (int j = 0; j < g.cs.n2; ++j) {
                    un(c, i, j, 0) = 0.0;
                    un(c, i, j, g.n_x3 - 1) = 0.0;
                }
        std::swap(um1, u);
        std::swap(u, un);
        if (opt.want_neumann) extract_neumann(g, u, m + 1, neumann);
        if (opt.recorder) opt.recorder->record(m + 1, g.t(m + 1), u);
        if ((m & 7) == 0 || m == M - 1) check_finite(u, m + 1);
    }

    out.io.final_value = u;

    // Final velocity by centered difference through one ghost step.
    {
        un.fill(0.0);
        leapfrog_interior(ctx, M, u, um1, un);
        if (opt.source) opt.source->add_to(g, g.T, g.dt * g.dt, un);
        SpatialField vel = SpatialField::like(g, ncomp);
        for (int c = 0; c < ncomp; ++c)
            for (int i = 1; i < g.cs.n1 - 1; ++i)
                for (int j = 1; j < g.cs.n2 - 1; ++j) {
                    if (g.cs.shape != CrossSectionShape::rectangle &&
                        !g.cs.is_interior(i, j))
                        continue;
                    for (int k = 1; k < g.n_x3 - 1; ++k)
                        vel(c, i, j, k) =
                            (un(c, i, j, k) - um1(c, i, j, k)) / (2.0 * g.dt);
                }
        // Boundary nodes carry d_t f(T), one-sided in time.
        if (!data.f.empty() && M >= 2) {
            const auto& bn = g.cs.boundary;
            for (int c = 0; c < ncomp && c < data.f.ncomp(); ++c)
                for (std::size_t b = 0; b < bn.size(); ++b)
                    for (int k = data.f.k3_lo(); k <= data.f.k3_hi(); ++k) {
                        double d = (3.0 * data.f.at(M, c, static_cast<int>(b), k) -
                                    4.0 * data.f.at(M - 1, c, static_cast<int>(b), k) +
                                    data.f.at(M - 2, c, static_cast<int>(b), k)) /
                                   (2.0 * g.dt);
                        vel(c, bn[b].i, bn[b].j, k) = d;
                    }
        }
        out.io.final_velocity = std::move(vel);
    }
    return out;
}

void check_compatibility(const Grid4& g, const BoundaryTriple& data) {
    if (data.phi.empty() && data.f.empty()) return;
    double scale = 1.0;
    if (!data.phi.empty()) scale = std::max(scale, data.phi.max_abs());
    const auto& bn = g.cs.boundary;
    double worst = 0.0;
    int ncomp = data.f.empty() ? (data.phi.empty() ? 0 : data.phi.ncomp())
                               : data.f.ncomp();
    for (int c = 0; c < ncomp; ++c) {
        for (std::size_t b = 0; b < bn.size(); ++b) {
            for (int k = 0; k < g.n_x3; ++k) {
                double fv = data.f.empty() ? 0.0 : data.f.at(0, c, static_cast<int>(b), k);
                double pv = data.phi.empty() ? 0.0 : data.phi(c, bn[b].i, bn[b].j, k);
                worst = std::max(worst, std::abs(fv - pv));
            }
        }
    }
    if (worst > 1e-10 * scale) {
        std::ostringstream os;
        os << "incompatible data: max |f(0,.) - phi| on the boundary = " << worst
           << " exceeds 1e-10 relative tolerance";
        throw ConfigError(os.str());
    }
}

}  // namespace

BoxRecorder::BoxRecorder(const Grid4& g, int ncomp, int k3_lo, int k3_hi)
    : n_t_(g.n_t), ncomp_(ncomp), n1_(g.cs.n1), n2_(g.cs.n2), k3_lo_(k3_lo),
      k3_hi_(k3_hi),
      v_(static_cast<std::size_t>(g.n_t) * ncomp * g.cs.n1 * g.cs.n2 *
             (k3_hi - k3_lo + 1),
         0.0) {}

void BoxRecorder::record(int level, double /*t*/, const SpatialField& u) {
    for (int c = 0; c < ncomp_; ++c)
        for (int i = 0; i < n1_; ++i)
            for (int j = 0; j < n2_; ++j)
                for (int k = k3_lo_; k <= k3_hi_; ++k)
                    v_[index(level, c, i, j, k)] = u(c, i, j, k);
}

double BoxRecorder::at(int level, int c, int i, int j, int k) const {
    if (k < k3_lo_ || k > k3_hi_) return 0.0;
    return v_[index(level, c, i, j, k)];
}

void L2TimeAccumulator::record(int level, double /*t*/, const SpatialField& u) {
    double w = (level == 0 || level == g_.steps()) ? 0.5 * g_.dt : g_.dt;
    double nrm = l2_norm(g_, u);
    acc_ += w * nrm * nrm;
}

void EnergyTracker::record(int level, double /*t*/, const SpatialField& u) {
    if (level == 0) {
        prev_ = u;
        return;
    }
    // Half-step energy of the scheme under the plain lattice inner product:
    //   E = 1/2 |(u^{m+1}-u^m)/dt|^2 + 1/2 <(-Lap_h + q) u^{m+1}, u^m>,
    // exactly conserved by the recurrence for symmetric time-independent q.
    const Grid4& g = g_;
    const double cell = g.cs.h * g.cs.h * g.h_x3;
    double kin = 0.0, pstar = 0.0;
    StepContext ctx{g, q_, false, false};
    SpatialField lu(u.ncomp(), u.n1(), u.n2(), u.n3());
    apply_spatial_operator(ctx, 0, u, lu);  // (Lap - q) u^{m+1} on interior nodes
    for (int c = 0; c < u.ncomp(); ++c) {
        for (int i = 1; i < g.cs.n1 - 1; ++i) {
            for (int j = 1; j < g.cs.n2 - 1; ++j) {
                if (g.cs.shape != CrossSectionShape::rectangle && !g.cs.is_interior(i, j))
                    continue;
                for (int k = 1; k < g.n_x3 - 1; ++k) {
                    double du = (u(c, i, j, k) - prev_(c, i, j, k)) / g.dt;
                    kin += du * du;
                    pstar -= lu(c, i, j, k) * prev_(c, i, j, k);
                }
            }
        }
    }
    e_.push_back(0.5 * cell * (kin + pstar));
    prev_ = u;
}

double EnergyTracker::relative_drift() const {
    if (e_.empty()) return 0.0;
    double e0 = e_.front();
    if (e0 == 0.0) return 0.0;
    double worst = 0.0;
    for (double e : e_) worst = std::max(worst, std::abs(e - e0));
    return worst / std::abs(e0);
}

IOOutput solve_ibvp(const Grid4& g, const MatrixPotential& q, const BoundaryTriple& data,
                    const SolveOptions& opt) {
    if (opt.check_compatibility) check_compatibility(g, data);
    StepContext ctx{g, q, false, false};
    return march(ctx, data, opt).io;
}

namespace {

BoundaryField reverse_time(const BoundaryField& f, int n_t) {
    if (f.empty()) return {};
    BoundaryField r(n_t, f.ncomp(), f.n_bnodes(), f.k3_lo(), f.k3_hi());
    for (int m = 0; m < n_t; ++m)
        for (int c = 0; c < f.ncomp(); ++c)
            for (int b = 0; b < f.n_bnodes(); ++b)
                for (int k = f.k3_lo(); k <= f.k3_hi(); ++k)
                    r(m, c, b, k) = f.at(n_t - 1 - m, c, b, k);
    return r;
}

class ReversedSource : public SourceTerm {
  public:
    ReversedSource(const SourceTerm* inner, double T) : inner_(inner), T_(T) {}
    void add_to(const Grid4& g, double t, double scale, SpatialField& dst) const override {
        inner_->add_to(g, T_ - t, scale, dst);
    }

  private:
    const SourceTerm* inner_;
    double T_;
};

class ReversedRecorder : public FieldRecorder {
  public:
    ReversedRecorder(FieldRecorder* inner, const Grid4& g) : inner_(inner), g_(g) {}
    void record(int level, double /*t*/, const SpatialField& u) override {
        int m = g_.steps() - level;
        inner_->record(m, g_.t(m), u);
    }

  private:
    FieldRecorder* inner_;
    const Grid4& g_;
};

}  // namespace

AdjointOutput solve_adjoint(const Grid4& g, const MatrixPotential& q,
                            const SpatialField& final_value,
                            const SpatialField& final_velocity, const BoundaryField& fstar,
                            const SolveOptions& opt) {
    BoundaryTriple rev;
    rev.phi = final_value;
    if (!final_velocity.empty()) {
        rev.psi = final_velocity;
        rev.psi.scale(-1.0);
    }
    rev.f = reverse_time(fstar, g.n_t);

    SolveOptions ropt = opt;
    std::unique_ptr<ReversedSource> rsrc;
    if (opt.source) {
        rsrc = std::make_unique<ReversedSource>(opt.source, g.T);
        ropt.source = rsrc.get();
    }
    std::unique_ptr<ReversedRecorder> rrec;
    if (opt.recorder) {
        rrec = std::make_unique<ReversedRecorder>(opt.recorder, g);
        ropt.recorder = rrec.get();
    }
    ropt.check_compatibility = false;

    StepContext ctx{g, q, true, true};
    SolveOutputs fwd = march(ctx, rev, ropt);

    AdjointOutput out;
    out.initial_value = std::move(fwd.io.final_value);
    out.initial_velocity = std::move(fwd.io.final_velocity);
    out.initial_velocity.scale(-1.0);
    out.neumann = reverse_time(fwd.io.neumann, g.n_t);
    return out;
}

IOOutput apply_io_map(const Grid4& g, const MatrixPotential& q, const BoundaryTriple& data,
                      IOMode mode, const SolveOptions& opt) {
    if (mode.partial) {
        if (!in_data_space_R(g, data, mode.R)) {
            std::ostringstream os;
            os << "partial-data IO map: Dirichlet datum does not vanish for |x3| >= R = "
               << mode.R;
            throw ConfigError(os.str());
        }
    }
    IOOutput out = solve_ibvp(g, q, data, opt);
    if (mode.partial && !out.neumann.empty()) {
        for (int m = 0; m < out.neumann.n_t(); ++m)
            for (int c = 0; c < out.neumann.ncomp(); ++c)
                for (int b = 0; b < out.neumann.n_bnodes(); ++b)
                    for (int k = out.neumann.k3_lo(); k <= out.neumann.k3_hi(); ++k)
                        if (std::abs(g.x3(k)) >= mode.R) out.neumann(m, c, b, k) = 0.0;
    }
    return out;
}

ComplexIOOutput apply_io_map_c(const Grid4& g, const MatrixPotential& q,
                               const ComplexBoundaryTriple& data, IOMode mode) {
    ComplexIOOutput out;
    out.re = apply_io_map(g, q, data.re, mode);
    out.im = apply_io_map(g, q, data.im, mode);
    return out;
}

bool in_data_space_R(const Grid4& g, const BoundaryTriple& data, double R) {
    if (data.f.empty()) return true;
    for (int m = 0; m < data.f.n_t(); ++m)
        for (int c = 0; c < data.f.ncomp(); ++c)
            for (int b = 0; b < data.f.n_bnodes(); ++b)
                for (int k = data.f.k3_lo(); k <= data.f.k3_hi(); ++k)
                    if (std::abs(g.x3(k)) >= R && data.f.at(m, c, b, k) != 0.0)
                        return false;
    return true;
}

namespace {

// Tangential neighbors of each boundary node along the cross-section curve.
std::vector<std::array<int, 2>> tangential_neighbors(const CrossSection& cs) {
    std::vector<int> at(static_cast<std::size_t>(cs.n1) * cs.n2, -1);
    for (std::size_t b = 0; b < cs.boundary.size(); ++b)
        at[cs.index(cs.boundary[b].i, cs.boundary[b].j)] = static_cast<int>(b);
    std::vector<std::array<int, 2>> nb(cs.boundary.size(), {-1, -1});
    const int off[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                           {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (std::size_t b = 0; b < cs.boundary.size(); ++b) {
        int found = 0;
        for (const auto& o : off) {
            int i = cs.boundary[b].i + o[0], j = cs.boundary[b].j + o[1];
            if (i < 0 || i >= cs.n1 || j < 0 || j >= cs.n2) continue;
            int idx = at[cs.index(i, j)];
            if (idx >= 0) {
                nb[b][found++] = idx;
                if (found == 2) break;
            }
        }
    }
    return nb;
}

}  // namespace

double proxy_norm(const Grid4& g, const BoundaryTriple& data) {
    double acc = 0.0;
    if (!data.phi.empty()) {
        double v = h1_norm(g, data.phi);
        acc += v * v;
    }
    if (!data.psi.empty()) {
        double v = l2_norm(g, data.psi);
        acc += v * v;
    }
    if (!data.f.empty()) {
        const BoundaryField& f = data.f;
        auto nbrs = tangential_neighbors(g.cs);
        const auto& bn = g.cs.boundary;
        int M = f.n_t() - 1;
        // H1(Sigma)-type surrogate for the (3/2,3/2) trace norm plus the
        // 1/t-weighted first derivatives sampled at half steps.
        for (int m = 0; m < M; ++m) {
            double tmid = (m + 0.5) * g.dt;
            for (int c = 0; c < f.ncomp(); ++c) {
                for (int b = 0; b < f.n_bnodes(); ++b) {
                    double warc = bn[b].weight;
                    for (int k = f.k3_lo(); k <= f.k3_hi(); ++k) {
                        double wz = (k == 0 || k == g.n_x3 - 1) ? 0.5 * g.h_x3 : g.h_x3;
                        double w = g.dt * warc * wz;
                        double fm = f.at(m, c, b, k);
                        double fp = f.at(m + 1, c, b, k);
                        double fmid = 0.5 * (fm + fp);
                        double dft = (fp - fm) / g.dt;
                        // tangential difference at the midpoint level
                        double dftau = 0.0;
                        if (nbrs[b][0] >= 0 && nbrs[b][1] >= 0) {
                            const auto& a = bn[nbrs[b][0]];
                            const auto& bb = bn[nbrs[b][1]];
                            double dist = g.cs.h *
                                          std::hypot(double(a.i - bb.i), double(a.j - bb.j));
                            double va = 0.5 * (f.at(m, c, nbrs[b][0], k) +
                                               f.at(m + 1, c, nbrs[b][0], k));
                            double vb = 0.5 * (f.at(m, c, nbrs[b][1], k) +
                                               f.at(m + 1, c, nbrs[b][1], k));
                            if (dist > 0.0) dftau = (va - vb) / dist;
                        }
                        double dfz = 0.0;
                        if (k < f.k3_hi()) {
                            double va = 0.5 * (f.at(m, c, b, k + 1) + f.at(m + 1, c, b, k + 1));
                            dfz = (va - fmid) / g.h_x3;
                        } else if (k > f.k3_lo()) {
                            double va = 0.5 * (f.at(m, c, b, k - 1) + f.at(m + 1, c, b, k - 1));
                            dfz = (fmid - va) / g.h_x3;
                        }
                        double grads = dft * dft + dftau * dftau + dfz * dfz;
                        acc += w * (fmid * fmid + grads);  // H1(Sigma) surrogate
                        acc += w * grads / tmid;           // singular-weight term
                    }
                }
            }
        }
    }
    return std::sqrt(acc);
}

double proxy_norm_c(const Grid4& g, const ComplexBoundaryTriple& data) {
    double a = proxy_norm(g, data.re), b = proxy_norm(g, data.im);
    return std::sqrt(a * a + b * b);
}

double io_output_norm(const Grid4& g, const IOOutput& out, double restrict_x3) {
    double a = out.final_value.empty() ? 0.0 : h1_norm(g, out.final_value);
    double b = out.final_velocity.empty() ? 0.0 : l2_norm(g, out.final_velocity);
    double c = sigma_l2_norm(g, out.neumann, restrict_x3);
    return std::sqrt(a * a + b * b + c * c);
}

double io_output_norm_c(const Grid4& g, const ComplexIOOutput& out, double restrict_x3) {
    double a = io_output_norm(g, out.re, restrict_x3);
    double b = io_output_norm(g, out.im, restrict_x3);
    return std::sqrt(a * a + b * b);
}

}  // namespace wginv
