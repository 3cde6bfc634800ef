#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wginv {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

enum class CrossSectionShape { rectangle, disk };

/// One node of the cross-section boundary: grid indices, outward unit
/// normal, and the inward axis step used for one-sided normal stencils.
struct BoundaryNode {
    int i = 0, j = 0;     // grid indices in the cross-section
    Vec2 normal;          // outward unit normal
    int di = 0, dj = 0;   // unit step toward the interior
    double weight = 0.0;  // boundary quadrature weight (arc length share)
};

/// Discrete cross-section omega of the waveguide. Nodes live on a uniform
/// tensor grid of spacing h; the rectangle occupies [0,Lx]x[0,Ly] exactly,
/// the disk is carved out of its bounding square (embedded boundary).
class CrossSection {
  public:
    CrossSectionShape shape = CrossSectionShape::rectangle;
    double lx = 1.0, ly = 1.0;  // rectangle side lengths
    double radius = 0.5;        // disk radius
    double h = 1.0 / 32.0;      // grid spacing
    int n1 = 0, n2 = 0;         // node counts per axis

    // Node classification. interior_mask[idx] for idx = i*n2 + j:
    //   0 = outside domain, 1 = interior, 2 = boundary.
    std::vector<std::uint8_t> mask;
    std::vector<BoundaryNode> boundary;

    int index(int i, int j) const { return i * n2 + j; }
    bool is_interior(int i, int j) const { return mask[index(i, j)] == 1; }
    bool is_boundary(int i, int j) const { return mask[index(i, j)] == 2; }
    bool in_domain(int i, int j) const { return mask[index(i, j)] != 0; }

    double x1(int i) const { return origin_x + i * h; }
    double x2(int j) const { return origin_y + j * h; }
    double origin_x = 0.0, origin_y = 0.0;

    double diameter() const;
    double area() const;

    /// Sum of per-node cell areas (h^2, halved on faces, quartered on
    /// rectangle corners). Used by the volume audit.
    double cell_area_sum() const;
};

/// Full space-time discretization of (0,T) x omega x [-X3, X3].
struct Grid4 {
    CrossSection cs;
    double x3_half_width = 3.5;  // X3
    double h_x3 = 1.0 / 16.0;
    double T = 2.0;
    double dt = 0.0;
    double cfl_factor = 0.4;
    int n_t = 0;   // number of time levels (steps + 1)
    int n_x3 = 0;  // number of x3 nodes

    double x3(int k) const { return -x3_half_width + k * h_x3; }
    double t(int m) const { return m * dt; }
    int steps() const { return n_t - 1; }

    std::size_t spatial_nodes() const {
        return static_cast<std::size_t>(cs.n1) * cs.n2 * n_x3;
    }
};

struct GridConfig {
    CrossSectionShape shape = CrossSectionShape::rectangle;
    double lx = 1.0, ly = 1.0;
    double radius = 0.5;
    double h = 1.0 / 32.0;
    double h_x3 = 1.0 / 16.0;
    double x3_half_width = 3.5;
    double T = 2.0;
    double cfl_factor = 0.4;
    double probe_support_radius = 0.5;
};

/// Thrown for invalid grid/pipeline configurations (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a solve goes unstable or a numerical stage fails
/// (CLI exit code 3).
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

CrossSection build_cross_section(const GridConfig& cfg);
Grid4 build_grid(const GridConfig& cfg);

/// Recompute outward unit normals for every boundary node.
std::vector<Vec2> normals(const CrossSection& cs);

/// Set of light-ray directions theta in S^1 plus the offset / slice grids
/// the ray scan walks over.
struct DirectionSet {
    std::vector<Vec2> thetas;
    std::vector<double> offsets_x;  // uniform y' grid, both axes share it
    std::vector<double> offsets_y;
    std::vector<double> slices;  // y3 values
    double offset_spacing = 0.0;
};

DirectionSet make_direction_set(int n_theta, double offset_lo, double offset_hi,
                                double offset_spacing, const std::vector<double>& slices);

}  // namespace wginv
