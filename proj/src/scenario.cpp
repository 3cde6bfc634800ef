#include "wginv/scenario.hpp"

#include <cmath>

namespace wginv {

double bump1(double u) {
    double u2 = u * u;
    if (u2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u2));
}

namespace {

// Normalized space-time bump: peak value `amp` at (tc, cx, cy, 0), factor
// widths (wt, wx radial in x', w3).
struct Bump {
    double amp = 1.0;
    double tc = 1.0, wt = 0.8;
    double cx = 0.5, cy = 0.5, wx = 0.35;
    double c3 = 0.0, w3 = 0.3;
    double osc = 0.0;  // cos(osc * (t - tc)) modulation

    double operator()(double t, double x1, double x2, double x3) const {
        double rt = (t - tc) / wt;
        double rx = std::hypot(x1 - cx, x2 - cy) / wx;
        double r3 = (x3 - c3) / w3;
        double v = bump1(rt) * bump1(rx) * bump1(r3);
        if (v == 0.0) return 0.0;
        double peak = bump1(0.0);
        v *= amp / (peak * peak * peak);
        if (osc != 0.0) v *= std::cos(osc * (t - tc));
        return v;
    }
};

AnalyticPotential make_potential(std::vector<std::pair<int, Bump>> comps, int n) {
    AnalyticPotential p;
    p.n = n;
    p.eval = [comps, n](double t, double x1, double x2, double x3, double* out) {
        for (int e = 0; e < n * n; ++e) out[e] = 0.0;
        for (const auto& [e, b] : comps) out[e] += b(t, x1, x2, x3);
    };
    return p;
}

}  // namespace

Scenario get_scenario(const std::string& name) {
    Scenario s;
    s.name = name;
    s.n = 2;
    s.M = 2.0;
    s.r = 0.5;

    if (name == "entry-bump") {
        // Single off-diagonal perturbation at entry (1,2) of a 2x2 system.
        Bump b;
        b.amp = 1.0;
        s.q1 = make_potential({{0 * 2 + 1, b}}, 2);
        s.q2 = AnalyticPotential{};  // zero reference
        return s;
    }
    if (name == "smooth-field") {
        // Nonzero symmetric reference, full-matrix smooth difference.
        Bump r00{0.40, 1.0, 1.2, 0.45, 0.55, 0.45, 0.0, 0.45, 0.0};
        Bump r01{0.25, 1.0, 1.2, 0.55, 0.45, 0.45, 0.0, 0.45, 0.0};
        Bump r11{0.35, 1.0, 1.2, 0.50, 0.50, 0.45, 0.0, 0.45, 0.0};
        Bump d00{0.80, 0.9, 0.85, 0.45, 0.50, 0.34, 0.0, 0.30, 0.0};
        Bump d01{0.65, 1.1, 0.85, 0.55, 0.55, 0.34, 0.0, 0.30, 0.0};
        Bump d10{-0.70, 1.0, 0.85, 0.50, 0.45, 0.34, 0.0, 0.30, 0.0};
        Bump d11{0.55, 1.0, 0.85, 0.45, 0.55, 0.34, 0.0, 0.30, 0.0};
        s.q2 = make_potential({{0, r00}, {1, r01}, {2, r01}, {3, r11}}, 2);
        s.q1 = make_potential(
            {{0, r00}, {1, r01}, {2, r01}, {3, r11}, {0, d00}, {1, d01}, {2, d10}, {3, d11}},
            2);
        return s;
    }
    if (name == "time-osc") {
        Bump d;
        d.amp = 1.0;
        d.osc = 3.0;
        d.wt = 1.0;
        s.q1 = make_potential({{1 * 2 + 0, d}}, 2);
        s.q2 = AnalyticPotential{};
        return s;
    }
    if (name == "null") {
        Bump b{0.60, 1.0, 1.0, 0.5, 0.5, 0.35, 0.0, 0.35, 0.0};
        s.q1 = make_potential({{0, b}, {3, b}}, 2);
        s.q2 = s.q1;
        return s;
    }
    throw ConfigError("unknown scenario '" + name +
                      "' (known: entry-bump, smooth-field, time-osc, null)");
}

std::vector<std::string> scenario_names() {
    return {"entry-bump", "smooth-field", "time-osc", "null"};
}

}  // namespace wginv
