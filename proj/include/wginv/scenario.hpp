#pragma once

#include <string>
#include <vector>

#include "wginv/potential.hpp"

namespace wginv {

/// Pinned (q1, q2) pair for reconstruction experiments. q1 plays the
/// unknown, q2 the known reference; the reconstruction target is q1 - q2.
struct Scenario {
    std::string name;
    int n = 2;
    double M = 2.0;  // declared sup bound
    double r = 0.5;  // x3 support half-width of q1 - q2
    AnalyticPotential q1, q2;
    bool q1_time_independent = false;
    bool q2_time_independent = false;

    AnalyticPotential difference() const { return potential_difference(q1, q2); }
};

/// Library: "entry-bump" (single off-diagonal bump, q2 = 0),
/// "smooth-field" (full-matrix smooth difference over a nonzero q2),
/// "time-osc" (time-oscillatory bump), "null" (q1 == q2 != 0).
Scenario get_scenario(const std::string& name);
std::vector<std::string> scenario_names();

/// Smooth separable factor helpers shared by scenarios and tests.
double bump1(double u);  // exp(-1/(1-u^2)) on |u| < 1

}  // namespace wginv
