#include <doctest.h>

#include <cmath>

#include "wginv/geometry.hpp"

using namespace wginv;

namespace {

GridConfig quick_config() {
    GridConfig c;
    c.h = 1.0 / 8.0;
    c.h_x3 = 1.0 / 8.0;
    c.T = 1.5;
    c.x3_half_width = 2.5;
    c.probe_support_radius = 0.5;
    return c;
}

}  // namespace

TEST_CASE("build_grid arithmetic matches the documented example") {
    GridConfig c;
    c.h = 1.0 / 32.0;
    c.h_x3 = 1.0 / 16.0;
    c.T = 2.0;
    c.cfl_factor = 0.4;
    c.x3_half_width = 3.5;
    c.probe_support_radius = 0.5;
    Grid4 g = build_grid(c);
    CHECK(g.dt == doctest::Approx(0.0125).epsilon(1e-12));
    CHECK(g.n_t == 161);
    CHECK(g.cs.n1 == 33);
    CHECK(g.cs.n2 == 33);
}

TEST_CASE("T below the cross-section diameter is rejected") {
    GridConfig c = quick_config();
    c.T = 0.5;
    CHECK_THROWS_WITH_AS(build_grid(c), doctest::Contains("T <= diam"), ConfigError);
}

TEST_CASE("minimal admissible X3 is reported") {
    GridConfig c = quick_config();
    c.probe_support_radius = 1.0;
    c.T = 2.0;
    c.h_x3 = 1.0 / 16.0;
    c.x3_half_width = 3.0;
    try {
        build_grid(c);
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("3.125") != std::string::npos);
    }
}

TEST_CASE("CFL factor bound is enforced") {
    GridConfig c = quick_config();
    c.cfl_factor = 0.8;  // above 1/sqrt(3)
    CHECK_THROWS_AS(build_grid(c), ConfigError);
}

TEST_CASE("rectangle normals: faces and corner tie-break") {
    Grid4 g = build_grid(quick_config());
    const CrossSection& cs = g.cs;
    bool saw_left = false, saw_corner = false, saw_bottom = false;
    for (const auto& b : cs.boundary) {
        CHECK(std::abs(std::hypot(b.normal.x, b.normal.y) - 1.0) < 1e-12);
        if (b.i == 0 && b.j == 4) {
            saw_left = true;
            CHECK(b.normal.x == -1.0);
            CHECK(b.normal.y == 0.0);
        }
        if (b.i == 0 && b.j == 0) {
            saw_corner = true;  // x1 faces own corners
            CHECK(b.normal.x == -1.0);
            CHECK(b.normal.y == 0.0);
        }
        if (b.j == 0 && b.i == 4) {
            saw_bottom = true;
            CHECK(b.normal.y == -1.0);
        }
    }
    CHECK(saw_left);
    CHECK(saw_corner);
    CHECK(saw_bottom);
}

TEST_CASE("disk normals are radial and unit length") {
    GridConfig c = quick_config();
    c.shape = CrossSectionShape::disk;
    c.radius = 0.5;
    c.h = 1.0 / 16.0;
    CrossSection cs = build_cross_section(c);
    REQUIRE(cs.boundary.size() > 8);
    for (const auto& b : cs.boundary) {
        double x = cs.x1(b.i), y = cs.x2(b.j);
        double r = std::hypot(x, y);
        if (r < 1e-9) continue;
        // normal parallel to the radius vector
        double cross = b.normal.x * y - b.normal.y * x;
        CHECK(std::abs(cross) / r < 1e-9);
        CHECK(std::abs(std::hypot(b.normal.x, b.normal.y) - 1.0) < 1e-12);
    }
    // node at angle 0 (rightmost on the x-axis)
    bool found = false;
    for (const auto& b : cs.boundary) {
        if (std::abs(cs.x2(b.j)) < 1e-12 && cs.x1(b.i) > 0.45) {
            found = true;
            CHECK(b.normal.x == doctest::Approx(1.0));
            CHECK(b.normal.y == doctest::Approx(0.0));
        }
    }
    CHECK(found);
}

TEST_CASE("normals are unchanged under refinement at coincident nodes") {
    GridConfig c = quick_config();
    Grid4 coarse = build_grid(c);
    c.h /= 2.0;
    Grid4 fine = build_grid(c);
    for (const auto& b : coarse.cs.boundary) {
        for (const auto& bf : fine.cs.boundary) {
            if (bf.i == 2 * b.i && bf.j == 2 * b.j) {
                CHECK(bf.normal.x == b.normal.x);
                CHECK(bf.normal.y == b.normal.y);
            }
        }
    }
}

TEST_CASE("cell volumes sum to the domain volume") {
    Grid4 g = build_grid(quick_config());
    double v = g.cs.cell_area_sum() * 2.0 * g.x3_half_width;
    CHECK(v == doctest::Approx(1.0 * 2.0 * 2.5).epsilon(1e-10));

    GridConfig c = quick_config();
    c.shape = CrossSectionShape::disk;
    c.radius = 0.5;
    c.h = 1.0 / 32.0;
    CrossSection disk = build_cross_section(c);
    CHECK(disk.cell_area_sum() ==
          doctest::Approx(M_PI * 0.25).epsilon(0.02));  // embedded boundary
}

TEST_CASE("CFL bound holds after build_grid") {
    for (double h : {1.0 / 8, 1.0 / 12, 1.0 / 20}) {
        GridConfig c = quick_config();
        c.h = h;
        Grid4 g = build_grid(c);
        CHECK(g.dt <= c.cfl_factor * std::min(c.h, c.h_x3) + 1e-12);
    }
}

TEST_CASE("direction set invariants") {
    DirectionSet ds = make_direction_set(16, -2.0, 3.0, 0.25, {0.0});
    CHECK(ds.thetas.size() == 16);
    for (const auto& t : ds.thetas)
        CHECK(std::abs(std::hypot(t.x, t.y) - 1.0) < 1e-12);
    CHECK(ds.offsets_x.front() == doctest::Approx(-2.0));
    CHECK(ds.offsets_x.back() == doctest::Approx(3.0));
}
