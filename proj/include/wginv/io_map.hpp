#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "wginv/rng.hpp"
#include "wginv/solver.hpp"

namespace wginv {

/// Blinded access to the IO map of the unknown potential: reconstruction
/// consumes only what this interface returns, never interior fields.
class IoMapOracle {
  public:
    virtual ~IoMapOracle() = default;
    virtual ComplexIOOutput apply(const ComplexBoundaryTriple& data, IOMode mode) = 0;
    virtual int system_size() const = 0;
};

/// Production oracle wrapping a solver run for a known potential.
class SolverOracle : public IoMapOracle {
  public:
    SolverOracle(const Grid4& g, MatrixPotential q) : g_(g), q_(std::move(q)) {}
    ComplexIOOutput apply(const ComplexBoundaryTriple& data, IOMode mode) override {
        return apply_io_map_c(g_, q_, data, mode);
    }
    int system_size() const override { return q_.n == 0 ? 2 : q_.n; }
    /// Overwrite the potential samples (sentinel tests).
    void poison() {
        for (auto& v : q_.vals) v = std::numeric_limits<double>::quiet_NaN();
        q_.analytic = AnalyticPotential{};
    }

  private:
    const Grid4& g_;
    MatrixPotential q_;
};

/// Per-probe difference of the two IO maps applied to the same datum.
struct IODifferenceEntry {
    ComplexIOOutput diff;  // Lambda_{q2}(d) - Lambda_{q1}(d)
    double proxy = 0.0;    // proxy norm of the datum
    IOMode mode;
};

IODifferenceEntry io_difference(const Grid4& g, const MatrixPotential& q1,
                                const MatrixPotential& q2, const ComplexBoundaryTriple& d,
                                IOMode mode = {});

/// Componentwise a - b for IO outputs (shapes must match).
IOOutput io_subtract(const IOOutput& a, const IOOutput& b);
ComplexIOOutput io_subtract_c(const ComplexIOOutput& a, const ComplexIOOutput& b);

/// Max over probes of ||Lambda_{q2}(d) - Lambda_{q1}(d)|| / proxy_norm(d):
/// a Rayleigh-quotient lower bound of the discrete operator norm.
struct OpNormEstimate {
    double value = 0.0;
    int probe_count = 0;
    int best_probe = -1;
    IOMode mode;
};

OpNormEstimate opnorm_estimate(const Grid4& g, const MatrixPotential& q1,
                               const MatrixPotential& q2,
                               const std::vector<ComplexBoundaryTriple>& probes,
                               IOMode mode = {});

/// Add seeded i.i.d. uniform noise of relative L2 amplitude delta to each
/// of the three output components (noise normalized then scaled, so the
/// per-component relative perturbation is exactly delta).
void inject_noise(const Grid4& g, IOOutput& out, double delta, std::uint64_t seed);
void inject_noise_c(const Grid4& g, ComplexIOOutput& out, double delta,
                    std::uint64_t seed);

/// The unit-amplitude noise direction used by inject_noise:
/// inject_noise(out, delta, seed) == out += delta * noise_like(out, seed).
/// Each component is i.i.d. uniform, normalized to the reference
/// component's own L2 size.
IOOutput noise_like(const Grid4& g, const IOOutput& ref, std::uint64_t seed);
ComplexIOOutput noise_like_c(const Grid4& g, const ComplexIOOutput& ref,
                             std::uint64_t seed);

}  // namespace wginv
