#include "wginv/io_map.hpp"

#include <cmath>
#include <limits>

namespace wginv {

IOOutput io_subtract(const IOOutput& a, const IOOutput& b) {
    IOOutput d = a;
    if (!d.final_value.empty() && !b.final_value.empty())
        d.final_value.axpy(-1.0, b.final_value);
    if (!d.final_velocity.empty() && !b.final_velocity.empty())
        d.final_velocity.axpy(-1.0, b.final_velocity);
    if (!d.neumann.empty() && !b.neumann.empty()) {
        for (std::size_t s = 0; s < d.neumann.size(); ++s)
            d.neumann.data()[s] -= b.neumann.data()[s];
    }
    return d;
}

ComplexIOOutput io_subtract_c(const ComplexIOOutput& a, const ComplexIOOutput& b) {
    return {io_subtract(a.re, b.re), io_subtract(a.im, b.im)};
}

IODifferenceEntry io_difference(const Grid4& g, const MatrixPotential& q1,
                                const MatrixPotential& q2, const ComplexBoundaryTriple& d,
                                IOMode mode) {
    IODifferenceEntry e;
    e.mode = mode;
    ComplexIOOutput o1 = apply_io_map_c(g, q1, d, mode);
    ComplexIOOutput o2 = apply_io_map_c(g, q2, d, mode);
    e.diff = io_subtract_c(o2, o1);
    e.proxy = proxy_norm_c(g, d);
    return e;
}

OpNormEstimate opnorm_estimate(const Grid4& g, const MatrixPotential& q1,
                               const MatrixPotential& q2,
                               const std::vector<ComplexBoundaryTriple>& probes,
                               IOMode mode) {
    if (probes.empty())
        throw ConfigError("opnorm_estimate: probe list must be nonempty");
    OpNormEstimate est;
    est.mode = mode;
    est.probe_count = static_cast<int>(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
        double proxy = proxy_norm_c(g, probes[p]);
        if (proxy <= 0.0)
            throw ConfigError("opnorm_estimate: probe has non-positive proxy norm");
        IODifferenceEntry e = io_difference(g, q1, q2, probes[p], mode);
        double quot =
            io_output_norm_c(g, e.diff, mode.partial ? mode.R : -1.0) / proxy;
        if (quot > est.value) {
            est.value = quot;
            est.best_probe = static_cast<int>(p);
        }
    }
    return est;
}

namespace {

// Unit noise direction for one field component: i.i.d. uniform scaled so
// its weighted L2 norm equals that of the reference field.
SpatialField field_noise_unit(const Grid4& g, const SpatialField& ref, Rng& rng) {
    SpatialField noise(ref.ncomp(), ref.n1(), ref.n2(), ref.n3());
    if (ref.empty()) return noise;
    for (std::size_t s = 0; s < noise.size(); ++s) noise.data()[s] = rng.next_symmetric();
    double nn = l2_norm(g, noise);
    double fn = l2_norm(g, ref);
    double sc = (nn == 0.0) ? 0.0 : fn / nn;
    noise.scale(sc);
    return noise;
}

BoundaryField trace_noise_unit(const Grid4& g, const BoundaryField& ref, Rng& rng) {
    if (ref.empty()) return {};
    BoundaryField noise(ref.n_t(), ref.ncomp(), ref.n_bnodes(), ref.k3_lo(), ref.k3_hi());
    for (std::size_t s = 0; s < noise.size(); ++s) noise.data()[s] = rng.next_symmetric();
    double nn = sigma_l2_norm(g, noise);
    double fn = sigma_l2_norm(g, ref);
    double sc = (nn == 0.0) ? 0.0 : fn / nn;
    for (std::size_t s = 0; s < noise.size(); ++s) noise.data()[s] *= sc;
    return noise;
}

}  // namespace

IOOutput noise_like(const Grid4& g, const IOOutput& ref, std::uint64_t seed) {
    Rng r1(derive_seed(seed, 1, 0));
    Rng r2(derive_seed(seed, 2, 0));
    Rng r3(derive_seed(seed, 3, 0));
    IOOutput n;
    n.final_value = field_noise_unit(g, ref.final_value, r1);
    n.final_velocity = field_noise_unit(g, ref.final_velocity, r2);
    n.neumann = trace_noise_unit(g, ref.neumann, r3);
    return n;
}

ComplexIOOutput noise_like_c(const Grid4& g, const ComplexIOOutput& ref,
                             std::uint64_t seed) {
    ComplexIOOutput n;
    n.re = noise_like(g, ref.re, derive_seed(seed, 10, 0));
    n.im = noise_like(g, ref.im, derive_seed(seed, 11, 0));
    return n;
}

void inject_noise(const Grid4& g, IOOutput& out, double delta, std::uint64_t seed) {
    if (delta < 0.0) throw ConfigError("inject_noise: delta must be >= 0");
    if (delta == 0.0) return;
    IOOutput n = noise_like(g, out, seed);
    if (!out.final_value.empty()) out.final_value.axpy(delta, n.final_value);
    if (!out.final_velocity.empty()) out.final_velocity.axpy(delta, n.final_velocity);
    if (!out.neumann.empty())
        for (std::size_t s = 0; s < out.neumann.size(); ++s)
            out.neumann.data()[s] += delta * n.neumann.data()[s];
}

void inject_noise_c(const Grid4& g, ComplexIOOutput& out, double delta,
                    std::uint64_t seed) {
    if (delta < 0.0) throw ConfigError("inject_noise: delta must be >= 0");
    if (delta == 0.0) return;
    ComplexIOOutput n = noise_like_c(g, out, seed);
    if (!out.re.final_value.empty()) out.re.final_value.axpy(delta, n.re.final_value);
    if (!out.re.final_velocity.empty())
        out.re.final_velocity.axpy(delta, n.re.final_velocity);
    if (!out.re.neumann.empty())
        for (std::size_t s = 0; s < out.re.neumann.size(); ++s)
            out.re.neumann.data()[s] += delta * n.re.neumann.data()[s];
    if (!out.im.final_value.empty()) out.im.final_value.axpy(delta, n.im.final_value);
    if (!out.im.final_velocity.empty())
        out.im.final_velocity.axpy(delta, n.im.final_velocity);
    if (!out.im.neumann.empty())
        for (std::size_t s = 0; s < out.im.neumann.size(); ++s)
            out.im.neumann.data()[s] += delta * n.im.neumann.data()[s];
}

}  // namespace wginv
