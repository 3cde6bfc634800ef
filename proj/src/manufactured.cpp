#include "wginv/manufactured.hpp"

#include <cmath>
#include <memory>

namespace wginv {

namespace {

double shape_x(double x1, double x2, double x3) {
    return std::sin(M_PI * x1) * std::sin(M_PI * x2) * std::exp(-x3 * x3);
}

// Fixed smooth potential entering the forcing: Gaussian bumps, symmetric.
void q_bump(double /*t*/, double x1, double x2, double x3, double* e) {
    double b = std::exp(-((x1 - 0.5) * (x1 - 0.5) + (x2 - 0.5) * (x2 - 0.5)) / 0.08 -
                        x3 * x3 / 0.18);
    e[0] = 0.8 * b;
    e[1] = 0.3 * b;
    e[2] = 0.3 * b;
    e[3] = 0.5 * b;
}

class ManufacturedSource : public SourceTerm {
  public:
    explicit ManufacturedSource(const MatrixPotential& q) : q_(q) {}

    void add_to(const Grid4& g, double t, double scale, SpatialField& dst) const override {
        double ct = std::cos(t);
        double e[4];
        for (int i = 1; i < g.cs.n1 - 1; ++i) {
            double x1 = g.cs.x1(i);
            for (int j = 1; j < g.cs.n2 - 1; ++j) {
                double x2 = g.cs.x2(j);
                for (int k = 1; k < g.n_x3 - 1; ++k) {
                    double x3 = g.x3(k);
                    double s = shape_x(x1, x2, x3);
                    if (s == 0.0) continue;
                    // box(u*) = (1 + 2 pi^2 - (4 x3^2 - 2)) cos(t) shape, since
                    // (exp(-x3^2))'' = (4 x3^2 - 2) exp(-x3^2)
                    double box0 = (-1.0 + 2.0 * M_PI * M_PI - (4.0 * x3 * x3 - 2.0)) * ct * s;
                    q_bump(t, x1, x2, x3, e);
                    double u0 = ct * s;  // first component of u*, second is 0
                    dst(0, i, j, k) += scale * (box0 + e[0] * u0);
                    dst(1, i, j, k) += scale * (e[2] * u0);
                }
            }
        }
    }

  private:
    const MatrixPotential& q_;
};

}  // namespace

double ManufacturedCase::exact(int c, double t, double x1, double x2, double x3) const {
    if (c != 0) return 0.0;
    return std::cos(t) * shape_x(x1, x2, x3);
}

SpatialField ManufacturedCase::exact_field(const Grid4& g, double t) const {
    SpatialField f = SpatialField::like(g, n);
    for (int i = 0; i < g.cs.n1; ++i)
        for (int j = 0; j < g.cs.n2; ++j)
            for (int k = 0; k < g.n_x3; ++k)
                f(0, i, j, k) = exact(0, t, g.cs.x1(i), g.cs.x2(j), g.x3(k));
    return f;
}

BoundaryTriple ManufacturedCase::data(const Grid4& g) const {
    BoundaryTriple d;
    d.phi = exact_field(g, 0.0);
    d.psi = SpatialField::like(g, n);  // d_t u*(0) = -sin(0) shape = 0
    // The lateral trace of u* vanishes identically; keep f empty.
    return d;
}

std::unique_ptr<SourceTerm> ManufacturedCase::make_source() const {
    return std::make_unique<ManufacturedSource>(q);
}

ManufacturedCase ManufacturedCase::make(const Grid4& g) {
    ManufacturedCase c;
    AnalyticPotential def;
    def.n = 2;
    def.eval = [](double t, double x1, double x2, double x3, double* e) {
        q_bump(t, x1, x2, x3, e);
    };
    // Gaussian tails are cut at the sampling box edge (~1e-5 of the peak).
    c.q = sample_potential(g, def, 1.5, 1.0, true);
    return c;
}

std::vector<ConvergenceRow> manufactured_convergence(const GridConfig& base,
                                                     const std::vector<double>& h_list) {
    std::vector<ConvergenceRow> rows;
    double prev = 0.0;
    for (double h : h_list) {
        GridConfig gc = base;
        gc.h = h;
        Grid4 g = build_grid(gc);
        ManufacturedCase mc = ManufacturedCase::make(g);
        ManufacturedSource src(mc.q);
        SolveOptions opt;
        opt.source = &src;
        opt.want_neumann = false;
        IOOutput out = solve_ibvp(g, mc.q, mc.data(g), opt);
        SpatialField exact = mc.exact_field(g, g.T);
        double err = 0.0;
        for (std::size_t s = 0; s < exact.size(); ++s)
            err = std::max(err, std::abs(exact.data()[s] - out.final_value.data()[s]));
        ConvergenceRow r;
        r.h = h;
        r.err = err;
        r.ratio = prev > 0.0 ? prev / err : 0.0;
        prev = err;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace wginv
