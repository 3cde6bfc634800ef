#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <vector>

#include "wginv/geometry.hpp"

namespace wginv {

/// Dense n-vector field on the spatial grid of a Grid4 (one time level).
/// Layout: comp-major, then x1, x2, x3 (x3 fastest).
class SpatialField {
  public:
    SpatialField() = default;
    SpatialField(int ncomp, int n1, int n2, int n3)
        : ncomp_(ncomp), n1_(n1), n2_(n2), n3_(n3),
          v_(static_cast<std::size_t>(ncomp) * n1 * n2 * n3, 0.0) {}

    static SpatialField like(const Grid4& g, int ncomp) {
        return SpatialField(ncomp, g.cs.n1, g.cs.n2, g.n_x3);
    }

    int ncomp() const { return ncomp_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    int n3() const { return n3_; }
    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    std::size_t index(int c, int i, int j, int k) const {
        return ((static_cast<std::size_t>(c) * n1_ + i) * n2_ + j) * n3_ + k;
    }
    double& operator()(int c, int i, int j, int k) { return v_[index(c, i, j, k)]; }
    double operator()(int c, int i, int j, int k) const { return v_[index(c, i, j, k)]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* comp(int c) { return v_.data() + static_cast<std::size_t>(c) * n1_ * n2_ * n3_; }
    const double* comp(int c) const {
        return v_.data() + static_cast<std::size_t>(c) * n1_ * n2_ * n3_;
    }

    void fill(double x) { std::fill(v_.begin(), v_.end(), x); }
    void axpy(double a, const SpatialField& other) {
        assert(size() == other.size());
        for (std::size_t s = 0; s < v_.size(); ++s) v_[s] += a * other.v_[s];
    }
    void scale(double a) {
        for (auto& x : v_) x *= a;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

  private:
    int ncomp_ = 0, n1_ = 0, n2_ = 0, n3_ = 0;
    std::vector<double> v_;
};

/// Complex field stored as a real/imaginary pair; the PDE has real
/// coefficients so the two parts evolve independently.
struct ComplexSpatialField {
    SpatialField re, im;

    ComplexSpatialField() = default;
    ComplexSpatialField(int ncomp, int n1, int n2, int n3)
        : re(ncomp, n1, n2, n3), im(ncomp, n1, n2, n3) {}

    std::complex<double> at(int c, int i, int j, int k) const {
        return {re(c, i, j, k), im(c, i, j, k)};
    }
    double max_abs() const {
        double m = 0.0;
        for (std::size_t s = 0; s < re.size(); ++s)
            m = std::max(m, std::hypot(re.data()[s], im.data()[s]));
        return m;
    }
};

/// Trace samples on the lateral boundary Sigma, banded in x3: values are
/// stored for k3 in [k3_lo, k3_hi] only and are zero outside the band.
/// Layout per time level: comp-major, then boundary node, then k3.
class BoundaryField {
  public:
    BoundaryField() = default;
    BoundaryField(int n_t, int ncomp, int n_bnodes, int k3_lo, int k3_hi)
        : n_t_(n_t), ncomp_(ncomp), nb_(n_bnodes), k3_lo_(k3_lo), k3_hi_(k3_hi),
          v_(static_cast<std::size_t>(n_t) * ncomp * n_bnodes * (k3_hi - k3_lo + 1), 0.0) {}

    static BoundaryField like(const Grid4& g, int ncomp) {
        return BoundaryField(g.n_t, ncomp, static_cast<int>(g.cs.boundary.size()), 0,
                             g.n_x3 - 1);
    }

    int n_t() const { return n_t_; }
    int ncomp() const { return ncomp_; }
    int n_bnodes() const { return nb_; }
    int k3_lo() const { return k3_lo_; }
    int k3_hi() const { return k3_hi_; }
    int band() const { return k3_hi_ - k3_lo_ + 1; }
    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    std::size_t index(int m, int c, int b, int k) const {
        return ((static_cast<std::size_t>(m) * ncomp_ + c) * nb_ + b) *
                   static_cast<std::size_t>(band()) +
               (k - k3_lo_);
    }
    double& operator()(int m, int c, int b, int k) { return v_[index(m, c, b, k)]; }
    double at(int m, int c, int b, int k) const {
        if (k < k3_lo_ || k > k3_hi_) return 0.0;
        return v_[index(m, c, b, k)];
    }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    void fill(double x) { std::fill(v_.begin(), v_.end(), x); }

  private:
    int n_t_ = 0, ncomp_ = 0, nb_ = 0, k3_lo_ = 0, k3_hi_ = -1;
    std::vector<double> v_;
};

struct ComplexBoundaryField {
    BoundaryField re, im;
};

/// Node quadrature weight for integrals over Omega (trapezoid per axis;
/// nodes outside an embedded-boundary cross-section weigh zero).
double node_volume_weight(const Grid4& g, int i, int j, int k);

/// L2(Omega) norm with trapezoid weights.
double l2_norm(const Grid4& g, const SpatialField& f);
/// Discrete H1(Omega) seminorm-augmented norm: L2 plus centered/one-sided
/// first differences in all three axes.
double h1_norm(const Grid4& g, const SpatialField& f);
/// L2(Sigma) norm of a boundary trace (time trapezoid, arc-length weights),
/// optionally restricted to |x3| < restrict_x3 (negative = no restriction).
double sigma_l2_norm(const Grid4& g, const BoundaryField& f, double restrict_x3 = -1.0);

double l2_norm_c(const Grid4& g, const ComplexSpatialField& f);
double sigma_l2_norm_c(const Grid4& g, const ComplexBoundaryField& f,
                       double restrict_x3 = -1.0);

}  // namespace wginv
