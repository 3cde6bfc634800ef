#pragma once

#include <vector>

#include "wginv/geometry.hpp"

namespace wginv {

enum class ProfileShape { bump, plateau };

/// Smooth compactly supported probe profile: a 2D mollifier phi_eps
/// centered at y' and a 1D mollifier h_eps centered at y3, both supported
/// on radius eps and L2-normalized on the grid lattice (the discrete mass
/// is exactly 1, which the extraction identity relies on).
///
/// Shapes: the classic bump exp(-1/(1-r^2)) with closed-form radial
/// derivatives, and a smooth plateau (identically 1 on |r| <= core)
/// whose taper derivatives are differenced numerically.
class ProbeProfile {
  public:
    ProfileShape shape = ProfileShape::bump;
    Vec2 center;             // y'
    double center_x3 = 0.0;  // y3
    double eps = 0.3;
    // Anisotropic planar support: width eps along `axis`, eps_perp across
    // it (0 = isotropic radial bump of radius eps). The remainder-scaling
    // experiments elongate the profile along the ray so the oscillation
    // count per profile width is large without grazing the lateral faces.
    double eps_perp = 0.0;
    Vec2 axis{1.0, 0.0};
    double eps3 = 0.0;          // x3 width (0 = use eps)
    double plateau_core = 0.5;  // plateau extent as a fraction of eps
    double amp2 = 0.0;          // 2D normalization (set by make_profile)
    double amp1 = 0.0;          // 1D normalization

    double width3() const { return eps3 > 0.0 ? eps3 : eps; }
    double support_radius_xy() const {
        return eps_perp > 0.0 ? std::max(eps, eps_perp) : eps;
    }

    double phi(Vec2 xp) const;
    /// Value, gradient and Hessian (hxx, hxy, hyy) of phi_eps at xp.
    void phi_derivs(Vec2 xp, double& val, Vec2& grad, double hess[3]) const;

    double h(double x3) const;
    void h_derivs(double x3, double& val, double& d1, double& d2) const;

    bool identically_zero() const { return amp2 == 0.0 || amp1 == 0.0; }

    /// Radial profile on [0, 1): shared by both factors.
    static double radial(ProfileShape s, double core, double r);
    static void radial_derivs(ProfileShape s, double core, double r, double& v,
                              double& d1, double& d2);
};

/// Build a profile normalized on the grid lattice of g: the lattice sums
/// sum phi_eps^2 h^2 and sum h_eps^2 h_x3 both equal 1.
ProbeProfile make_profile(const Grid4& g, ProfileShape shape, Vec2 y, double y3,
                          double eps, double plateau_core = 0.5);

/// Anisotropic variant: planar widths (eps_par along axis, eps_perp across)
/// and a separate x3 width.
ProbeProfile make_profile_aniso(const Grid4& g, ProfileShape shape, Vec2 y, double y3,
                                double eps_par, double eps_perp, double eps3, Vec2 axis,
                                double plateau_core = 0.5);

/// Zero profile (phi == 0); build_ansatz of it is the zero field.
ProbeProfile zero_profile();

}  // namespace wginv
