#include "wginv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wginv {

double CrossSection::diameter() const {
    if (shape == CrossSectionShape::rectangle) return std::hypot(lx, ly);
    return 2.0 * radius;
}

double CrossSection::area() const {
    if (shape == CrossSectionShape::rectangle) return lx * ly;
    return M_PI * radius * radius;
}

double CrossSection::cell_area_sum() const {
    if (shape == CrossSectionShape::rectangle) {
        double sum = 0.0;
        for (int i = 0; i < n1; ++i) {
            for (int j = 0; j < n2; ++j) {
                if (!in_domain(i, j)) continue;
                double w = h * h;
                if (i == 0 || i == n1 - 1) w *= 0.5;
                if (j == 0 || j == n2 - 1) w *= 0.5;
                sum += w;
            }
        }
        return sum;
    }
    // Embedded disk: midpoint rule over cells (centers inside the circle).
    double sum = 0.0;
    for (int i = 0; i + 1 < n1; ++i) {
        for (int j = 0; j + 1 < n2; ++j) {
            double cx = x1(i) + 0.5 * h, cy = x2(j) + 0.5 * h;
            if (cx * cx + cy * cy <= radius * radius) sum += h * h;
        }
    }
    return sum;
}

namespace {

int round_count(double length, double h, const char* what) {
    double raw = length / h;
    int n = static_cast<int>(std::lround(raw));
    if (n < 2 || std::abs(raw - n) > 1e-9 * std::max(1.0, raw)) {
        std::ostringstream os;
        os << what << " = " << length << " is not a positive multiple of the spacing " << h;
        throw ConfigError(os.str());
    }
    return n;
}

void build_rectangle(CrossSection& cs) {
    int nc1 = round_count(cs.lx, cs.h, "cross-section side lx");
    int nc2 = round_count(cs.ly, cs.h, "cross-section side ly");
    cs.n1 = nc1 + 1;
    cs.n2 = nc2 + 1;
    cs.mask.assign(static_cast<std::size_t>(cs.n1) * cs.n2, 1);
    for (int i = 0; i < cs.n1; ++i) {
        for (int j = 0; j < cs.n2; ++j) {
            if (i == 0 || i == cs.n1 - 1 || j == 0 || j == cs.n2 - 1)
                cs.mask[cs.index(i, j)] = 2;
        }
    }
    cs.boundary.clear();
    for (int i = 0; i < cs.n1; ++i) {
        for (int j = 0; j < cs.n2; ++j) {
            if (!cs.is_boundary(i, j)) continue;
            BoundaryNode b;
            b.i = i;
            b.j = j;
            b.weight = cs.h;
            // Corner tie-break: faces normal to x1 own the corners.
            if (i == 0) {
                b.normal = {-1.0, 0.0};
                b.di = 1;
            } else if (i == cs.n1 - 1) {
                b.normal = {1.0, 0.0};
                b.di = -1;
            } else if (j == 0) {
                b.normal = {0.0, -1.0};
                b.dj = 1;
            } else {
                b.normal = {0.0, 1.0};
                b.dj = -1;
            }
            cs.boundary.push_back(b);
        }
    }
}

void build_disk(CrossSection& cs) {
    // Embedded boundary: nodes strictly inside the circle are kept; inside
    // nodes with an outside 4-neighbor become boundary nodes.
    int nc = round_count(2.0 * cs.radius, cs.h, "disk diameter");
    cs.n1 = nc + 1;
    cs.n2 = nc + 1;
    cs.origin_x = -cs.radius;
    cs.origin_y = -cs.radius;
    cs.mask.assign(static_cast<std::size_t>(cs.n1) * cs.n2, 0);
    auto inside = [&](int i, int j) {
        double x = cs.x1(i), y = cs.x2(j);
        return x * x + y * y <= cs.radius * cs.radius + 1e-12;
    };
    for (int i = 0; i < cs.n1; ++i)
        for (int j = 0; j < cs.n2; ++j)
            if (inside(i, j)) cs.mask[cs.index(i, j)] = 1;
    for (int i = 0; i < cs.n1; ++i) {
        for (int j = 0; j < cs.n2; ++j) {
            if (cs.mask[cs.index(i, j)] != 1) continue;
            bool edge = (i == 0 || i == cs.n1 - 1 || j == 0 || j == cs.n2 - 1);
            if (!edge) {
                edge = !inside(i + 1, j) || !inside(i - 1, j) || !inside(i, j + 1) ||
                       !inside(i, j - 1);
            }
            if (edge) cs.mask[cs.index(i, j)] = 2;
        }
    }
    cs.boundary.clear();
    double perim_share = 0.0;
    for (int i = 0; i < cs.n1; ++i)
        for (int j = 0; j < cs.n2; ++j)
            if (cs.is_boundary(i, j)) perim_share += 1.0;
    for (int i = 0; i < cs.n1; ++i) {
        for (int j = 0; j < cs.n2; ++j) {
            if (!cs.is_boundary(i, j)) continue;
            BoundaryNode b;
            b.i = i;
            b.j = j;
            double x = cs.x1(i), y = cs.x2(j);
            double r = std::hypot(x, y);
            if (r < 1e-14) {
                b.normal = {1.0, 0.0};
            } else {
                b.normal = {x / r, y / r};
            }
            // Inward step along the dominant normal axis.
            if (std::abs(b.normal.x) >= std::abs(b.normal.y)) {
                b.di = b.normal.x > 0 ? -1 : 1;
            } else {
                b.dj = b.normal.y > 0 ? -1 : 1;
            }
            b.weight = 2.0 * M_PI * cs.radius / perim_share;
            cs.boundary.push_back(b);
        }
    }
}

}  // namespace

CrossSection build_cross_section(const GridConfig& cfg) {
    if (cfg.h <= 0.0) throw ConfigError("grid spacing h must be positive");
    CrossSection cs;
    cs.shape = cfg.shape;
    cs.lx = cfg.lx;
    cs.ly = cfg.ly;
    cs.radius = cfg.radius;
    cs.h = cfg.h;
    if (cfg.shape == CrossSectionShape::rectangle) {
        build_rectangle(cs);
    } else {
        build_disk(cs);
    }
    return cs;
}

Grid4 build_grid(const GridConfig& cfg) {
    if (cfg.h <= 0.0 || cfg.h_x3 <= 0.0)
        throw ConfigError("grid spacings must be positive");
    if (cfg.cfl_factor <= 0.0 || cfg.cfl_factor > 1.0 / std::sqrt(3.0) + 1e-12) {
        std::ostringstream os;
        os << "cfl_factor " << cfg.cfl_factor << " outside (0, 1/sqrt(3)]";
        throw ConfigError(os.str());
    }

    Grid4 g;
    g.cs = build_cross_section(cfg);

    if (cfg.T <= g.cs.diameter()) {
        std::ostringstream os;
        os << "T <= diam(omega): T = " << cfg.T << ", diam = " << g.cs.diameter();
        throw ConfigError(os.str());
    }

    double min_x3 = cfg.probe_support_radius + cfg.T + 2.0 * cfg.h_x3;
    if (cfg.x3_half_width + 1e-12 < min_x3) {
        std::ostringstream os;
        os << "x3_half_width = " << cfg.x3_half_width
           << " too small for probe support radius " << cfg.probe_support_radius
           << "; minimal admissible X3 = " << min_x3;
        throw ConfigError(os.str());
    }

    g.x3_half_width = cfg.x3_half_width;
    g.h_x3 = cfg.h_x3;
    g.T = cfg.T;
    g.cfl_factor = cfg.cfl_factor;
    g.n_x3 = round_count(2.0 * cfg.x3_half_width, cfg.h_x3, "x3 extent 2*X3") + 1;

    double hmin = std::min(cfg.h, cfg.h_x3);
    double dt0 = cfg.cfl_factor * hmin;
    int steps = static_cast<int>(std::ceil(cfg.T / dt0 - 1e-12));
    g.dt = cfg.T / steps;
    g.n_t = steps + 1;
    if (g.dt > cfg.cfl_factor * hmin + 1e-12) {
        std::ostringstream os;
        os << "CFL violation: dt = " << g.dt << " exceeds " << cfg.cfl_factor << " * "
           << hmin << " (offending spacing min(h, h_x3) = " << hmin << ")";
        throw ConfigError(os.str());
    }
    return g;
}

std::vector<Vec2> normals(const CrossSection& cs) {
    std::vector<Vec2> out;
    out.reserve(cs.boundary.size());
    for (const auto& b : cs.boundary) out.push_back(b.normal);
    return out;
}

DirectionSet make_direction_set(int n_theta, double offset_lo, double offset_hi,
                                double offset_spacing, const std::vector<double>& slices) {
    if (n_theta < 1) throw ConfigError("direction count must be >= 1");
    if (offset_spacing <= 0.0 || offset_hi <= offset_lo)
        throw ConfigError("invalid offset grid");
    DirectionSet ds;
    ds.thetas.reserve(n_theta);
    for (int k = 0; k < n_theta; ++k) {
        double a = 2.0 * M_PI * k / n_theta;
        ds.thetas.push_back({std::cos(a), std::sin(a)});
    }
    int n_off = static_cast<int>(std::floor((offset_hi - offset_lo) / offset_spacing + 1e-9)) + 1;
    for (int k = 0; k < n_off; ++k) {
        ds.offsets_x.push_back(offset_lo + k * offset_spacing);
        ds.offsets_y.push_back(offset_lo + k * offset_spacing);
    }
    ds.slices = slices;
    ds.offset_spacing = offset_spacing;
    return ds;
}

}  // namespace wginv
