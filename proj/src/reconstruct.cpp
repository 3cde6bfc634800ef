#include "wginv/reconstruct.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

namespace wginv {

void PipelineConfig::validate(const Scenario& sc) const {
    check_resolution_guard(build_grid(grid), rho);
    if (rho_pair_extrapolation && rho / 2.0 <= 1.0)
        throw ConfigError("rho/2 must exceed 1 for pair extrapolation");
    if (mode.partial) {
        if (mode.R <= sc.r) {
            std::ostringstream os;
            os << "partial-data mode requires R > r (x3 support bound of the "
                  "potential difference): R = "
               << mode.R << ", r = " << sc.r;
            throw ConfigError(os.str());
        }
        for (double y3 : slices) {
            if (std::abs(y3) + eps >= mode.R) {
                std::ostringstream os;
                os << "probe at slice y3 = " << y3 << " with eps = " << eps
                   << " does not lie in the admissible data space (|x3| < R = " << mode.R
                   << ")";
                throw ConfigError(os.str());
            }
        }
    }
    ConeGrid cg = cone_grid();
    double band = std::min(cg.tau_max(), cg.xi_max());
    if (alpha > band + 1e-12)
        throw ConfigError("alpha exceeds the sampled frequency band");
    if (holdout_fraction <= 0.0 || holdout_fraction >= 0.5)
        throw ConfigError("holdout fraction must lie in (0, 0.5)");
}

namespace {

// Does the mollified ray (beam of radius eps around t -> y - t theta) meet
// the cross-section within [0, T]?
bool ray_hits_domain(const Grid4& g, Vec2 theta, Vec2 y, double eps) {
    double margin = eps + g.cs.h;
    int nsteps = 256;
    for (int s = 0; s <= nsteps; ++s) {
        double t = g.T * s / nsteps;
        Vec2 p = y - t * theta;
        double dx = 0.0, dy = 0.0;
        if (g.cs.shape == CrossSectionShape::rectangle) {
            dx = std::max({0.0, g.cs.origin_x - p.x, p.x - (g.cs.origin_x + g.cs.lx)});
            dy = std::max({0.0, g.cs.origin_y - p.y, p.y - (g.cs.origin_y + g.cs.ly)});
        } else {
            double r = std::hypot(p.x, p.y);
            dx = std::max(0.0, r - g.cs.radius);
        }
        if (std::hypot(dx, dy) <= margin) return true;
    }
    return false;
}

void run_indexed(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int nw = std::min(threads, count);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

struct GeometryResult {
    // identity values per mode, per delta, per (row, col)
    std::vector<std::vector<std::vector<std::complex<double>>>> vals;
    std::vector<std::vector<double>> quot;  // [mode][delta], norm probes only
    bool is_norm_probe = false;
};

// Identity values for one geometry at one rho: n forward solves, all
// entries, all noise levels by linearity of the pairing in the output.
void scan_geometry(const Grid4& g, const PipelineConfig& cfg, IoMapOracle& oracle,
                   const MatrixPotential& q2, const ScanGeometry& geo, double rho,
                   const std::vector<double>& deltas, const std::vector<IOMode>& modes,
                   std::uint64_t noise_stream, bool norm_probe, GeometryResult& out) {
    const int n = oracle.system_size();
    ProbeProfile prof =
        make_profile(g, ProfileShape::bump, geo.y, geo.y3, cfg.eps);

    GOProbe vp;
    vp.theta = geo.theta;
    vp.rho = rho;
    vp.sign = -1;
    vp.K.assign(n, 0.0);
    vp.profile = prof;

    out.vals.assign(modes.size(), {});
    out.quot.assign(modes.size(), {});
    for (auto& per_mode : out.vals)
        per_mode.assign(deltas.size(),
                        std::vector<std::complex<double>>(static_cast<std::size_t>(n) * n,
                                                          {0.0, 0.0}));
    for (auto& per_mode : out.quot) per_mode.assign(deltas.size(), 0.0);
    out.is_norm_probe = norm_probe;

    for (int c = 0; c < n; ++c) {
        GOProbe fw;
        fw.theta = geo.theta;
        fw.rho = rho;
        fw.sign = +1;
        fw.K.assign(n, 0.0);
        fw.K[c] = 1.0;
        fw.profile = prof;
        ComplexBoundaryTriple data = probe_boundary_data(g, fw);
        ComplexIOOutput o1 = oracle.apply(data, IOMode::full());
        ComplexIOOutput o2 = apply_io_map_c(g, q2, data, IOMode::full());
        ComplexIOOutput diff = io_subtract_c(o2, o1);
        ComplexIOOutput noise1 = noise_like_c(g, o1, derive_seed(noise_stream, 1, c));
        ComplexIOOutput noise2 = noise_like_c(g, o2, derive_seed(noise_stream, 2, c));
        double proxy = norm_probe ? proxy_norm_c(g, data) : 0.0;

        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
            const IOMode& mode = modes[mi];
            auto p_clean = identity_rhs_components(g, diff, vp, mode);
            auto p_n1 = identity_rhs_components(g, noise1, vp, mode);
            auto p_n2 = identity_rhs_components(g, noise2, vp, mode);
            for (std::size_t d = 0; d < deltas.size(); ++d) {
                double delta = deltas[d];
                for (int r = 0; r < n; ++r) {
                    // measurement noise enters each map separately
                    std::complex<double> v =
                        p_clean[r] + delta * (p_n2[r] - p_n1[r]);
                    out.vals[mi][d][static_cast<std::size_t>(r) * n + c] = v;
                }
            }
            if (norm_probe && c == 0) {
                double restrict = mode.partial ? mode.R : -1.0;
                for (std::size_t d = 0; d < deltas.size(); ++d) {
                    double delta = deltas[d];
                    ComplexIOOutput noisy = diff;
                    if (delta > 0.0) {
                        // diff_noisy = (o2 + d n2) - (o1 + d n1)
                        auto addsc = [&](IOOutput& dst, const IOOutput& a, double s) {
                            if (!dst.final_value.empty())
                                dst.final_value.axpy(s, a.final_value);
                            if (!dst.final_velocity.empty())
                                dst.final_velocity.axpy(s, a.final_velocity);
                            if (!dst.neumann.empty())
                                for (std::size_t q = 0; q < dst.neumann.size(); ++q)
                                    dst.neumann.data()[q] += s * a.neumann.data()[q];
                        };
                        addsc(noisy.re, noise2.re, delta);
                        addsc(noisy.im, noise2.im, delta);
                        addsc(noisy.re, noise1.re, -delta);
                        addsc(noisy.im, noise1.im, -delta);
                    }
                    double q = io_output_norm_c(g, noisy, restrict) / proxy;
                    out.quot[mi][d] = std::max(out.quot[mi][d], q);
                }
            }
        }
    }
}

}  // namespace

std::vector<RayScan> run_ray_scan_modes(const Grid4& g, const PipelineConfig& cfg,
                                        IoMapOracle& q1_oracle, const MatrixPotential& q2,
                                        const std::vector<IOMode>& modes) {
    const int n = q1_oracle.system_size();
    check_resolution_guard(g, cfg.rho);
    if (cfg.rho_pair_extrapolation) check_resolution_guard(g, cfg.rho / 2.0);

    DirectionSet ds = make_direction_set(cfg.n_theta, cfg.offset_lo, cfg.offset_hi,
                                         cfg.offset_spacing, cfg.slices);

    std::vector<RayScan> scans(modes.size());
    std::vector<ScanGeometry> geoms;
    for (int si = 0; si < static_cast<int>(cfg.slices.size()); ++si) {
        for (int ti = 0; ti < cfg.n_theta; ++ti) {
            for (std::size_t oy = 0; oy < ds.offsets_y.size(); ++oy) {
                for (std::size_t ox = 0; ox < ds.offsets_x.size(); ++ox) {
                    ScanGeometry geo;
                    geo.theta_idx = ti;
                    geo.theta = ds.thetas[ti];
                    geo.y = {ds.offsets_x[ox], ds.offsets_y[oy]};
                    geo.slice_idx = si;
                    geo.y3 = cfg.slices[si];
                    geo.solved = ray_hits_domain(g, geo.theta, geo.y, cfg.eps);
                    geoms.push_back(geo);
                }
            }
        }
    }

    std::vector<double> deltas = cfg.deltas();
    const int ng = static_cast<int>(geoms.size());
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
        scans[mi].n = n;
        scans[mi].deltas = deltas;
        scans[mi].geoms = geoms;
        scans[mi].values.assign(deltas.size(),
                                std::vector<std::complex<double>>(
                                    static_cast<std::size_t>(ng) * n * n, {0.0, 0.0}));
        scans[mi].opnorm.assign(deltas.size(), 0.0);
    }

    // Norm-probe subset: a deterministic spread over solved geometries.
    std::vector<int> solved_ids;
    for (int i = 0; i < ng; ++i)
        if (geoms[i].solved) solved_ids.push_back(i);
    for (auto& s : scans) s.solved_count = static_cast<int>(solved_ids.size());
    std::vector<bool> is_norm(ng, false);
    int want = std::max(1, cfg.norm_probe_count / (cfg.rho_pair_extrapolation ? 2 : 1));
    if (!solved_ids.empty()) {
        int stride = std::max<std::size_t>(1, solved_ids.size() / want);
        for (std::size_t s = 0; s < solved_ids.size(); s += stride)
            is_norm[solved_ids[s]] = true;
    }

    std::vector<GeometryResult> res_main(ng), res_half(ng);
    run_indexed(ng, cfg.threads, [&](int gi) {
        if (!geoms[gi].solved) return;
        scan_geometry(g, cfg, q1_oracle, q2, geoms[gi], cfg.rho, deltas, modes,
                      derive_seed(cfg.seed, 100, gi), is_norm[gi], res_main[gi]);
        if (cfg.rho_pair_extrapolation) {
            scan_geometry(g, cfg, q1_oracle, q2, geoms[gi], cfg.rho / 2.0, deltas, modes,
                          derive_seed(cfg.seed, 200, gi), is_norm[gi], res_half[gi]);
        }
    });

    for (int gi = 0; gi < ng; ++gi) {
        if (!geoms[gi].solved) continue;
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
            for (std::size_t d = 0; d < deltas.size(); ++d) {
                for (int e = 0; e < n * n; ++e) {
                    std::complex<double> v = res_main[gi].vals[mi][d][e];
                    if (cfg.rho_pair_extrapolation) {
                        // two-point Richardson in 1/rho
                        v = 2.0 * v - res_half[gi].vals[mi][d][e];
                    }
                    scans[mi].values[d][static_cast<std::size_t>(gi) * n * n + e] = v;
                }
                if (res_main[gi].is_norm_probe) {
                    scans[mi].opnorm[d] =
                        std::max(scans[mi].opnorm[d], res_main[gi].quot[mi][d]);
                    if (cfg.rho_pair_extrapolation)
                        scans[mi].opnorm[d] =
                            std::max(scans[mi].opnorm[d], res_half[gi].quot[mi][d]);
                }
            }
        }
    }
    return scans;
}

RayScan run_ray_scan(const Grid4& g, const PipelineConfig& cfg, IoMapOracle& q1_oracle,
                     const MatrixPotential& q2) {
    return run_ray_scan_modes(g, cfg, q1_oracle, q2, {cfg.mode})[0];
}

namespace {

// Assemble the cone spectrum for one (slice, entry) from scan values.
ConeSpectrum build_spectrum(const PipelineConfig& cfg, const RayScan& scan, int delta_idx,
                            int slice_idx, int row, int col) {
    ConeSpectrum cs;
    cs.init(cfg.cone_grid());
    cs.row = row;
    cs.col = col;
    cs.y3 = cfg.slices[slice_idx];

    for (int ti = 0; ti < cfg.n_theta; ++ti) {
        std::vector<RaySample> rays;
        Vec2 theta;
        for (std::size_t gi = 0; gi < scan.geoms.size(); ++gi) {
            const ScanGeometry& geo = scan.geoms[gi];
            if (geo.slice_idx != slice_idx || geo.theta_idx != ti) continue;
            theta = geo.theta;
            if (!geo.solved) continue;  // identically zero off the footprint
            RaySample r;
            r.row = row;
            r.col = col;
            r.theta = geo.theta;
            r.y = geo.y;
            r.y3 = geo.y3;
            r.value = scan.value(delta_idx, static_cast<int>(gi), row, col);
            r.eps = cfg.eps;
            r.rho = cfg.rho;
            r.source = RaySample::Source::identity_extraction;
            rays.push_back(r);
        }
        auto samples = fourier_slice(cs.cg, theta, rays);
        add_cone_samples(cs, samples);
    }
    return cs;
}

// Hold-out residual of a candidate cutoff: predict excluded samples from
// the kept-sample extension (zero outside the ball).
double holdout_residual(const ConeSpectrum& fit, const std::vector<ExactSample>& held,
                        double alpha) {
    const ConeGrid& g = fit.cg;
    double acc = 0.0;
    for (const auto& s : held) {
        double xi1 = g.xi(s.m1), xi2 = g.xi(s.m2);
        double rad = std::sqrt(s.tau * s.tau + xi1 * xi1 + xi2 * xi2);
        std::complex<double> pred{0.0, 0.0};
        if (rad < alpha) {
            int j = static_cast<int>(std::lround(s.tau / g.dtau())) + g.n_tau / 2;
            if (j >= 0 && j < g.n_tau) pred = fit.grid_vals[g.index(j, s.m1, s.m2)];
        }
        acc += std::norm(pred - s.v);
    }
    return acc;
}

}  // namespace

ReconstructionResult assemble_and_invert(const PipelineConfig& cfg, const RayScan& scan,
                                         int delta_idx) {
    ReconstructionResult res;
    res.delta = scan.deltas[delta_idx];
    res.opnorm = scan.opnorm[delta_idx];
    const int n = scan.n;
    double delta = scan.deltas[delta_idx];
    double lambda = std::max(cfg.lambda, cfg.lambda_noise * delta * delta);

    for (int si = 0; si < static_cast<int>(cfg.slices.size()); ++si) {
        for (int row = 0; row < n; ++row) {
            for (int col = 0; col < n; ++col) {
                ConeSpectrum cs = build_spectrum(cfg, scan, delta_idx, si, row, col);

                double alpha = cfg.alpha;
                double best_res = 0.0;
                if (alpha <= 0.0) {
                    // Deterministic 10% hold-out on the sample list.
                    ConeSpectrum kept;
                    kept.init(cs.cg);
                    kept.row = row;
                    kept.col = col;
                    std::vector<ExactSample> held;
                    std::vector<ExactSample> keep;
                    for (std::size_t s = 0; s < cs.samples.size(); ++s) {
                        std::uint64_t hsh = derive_seed(cfg.seed, 777, s);
                        if ((hsh % 1000) < static_cast<std::uint64_t>(
                                               cfg.holdout_fraction * 1000.0))
                            held.push_back(cs.samples[s]);
                        else
                            keep.push_back(cs.samples[s]);
                    }
                    add_cone_samples(kept, keep);
                    extend_spectrum(kept, lambda, cfg.cond_threshold);
                    double band = std::min(cs.cg.tau_max(), cs.cg.xi_max());
                    alpha = cfg.alpha_candidates.front();
                    best_res = -1.0;
                    for (double cand : cfg.alpha_candidates) {
                        if (cand > band) continue;
                        double r = holdout_residual(kept, held, cand);
                        if (best_res < 0.0 || r < best_res) {
                            best_res = r;
                            alpha = cand;
                        }
                    }
                }

                extend_spectrum(cs, lambda, cfg.cond_threshold);
                EntryEstimate ee;
                ee.row = row;
                ee.col = col;
                ee.y3 = cfg.slices[si];
                ee.alpha_used = alpha;
                ee.holdout_residual = best_res;
                ee.inv = invert_spectrum(cs, alpha, cfg.grid.T, nullptr);
                res.entries.push_back(std::move(ee));
            }
        }
    }
    return res;
}

ReconstructionResult reconstruct(const Grid4& g, const PipelineConfig& cfg,
                                 IoMapOracle& q1_oracle, const MatrixPotential& q2) {
    PipelineConfig c = cfg;
    c.noise_levels.clear();
    RayScan scan = run_ray_scan(g, c, q1_oracle, q2);
    return assemble_and_invert(c, scan, 0);
}

double score_against_truth(const PipelineConfig& cfg, ReconstructionResult& res,
                           const AnalyticPotential& truth_diff) {
    ConeGrid cg = cfg.cone_grid();
    double worst_err = 0.0, worst_ref = 0.0;
    for (auto& e : res.entries) {
        SliceField ref = sample_reference(cg, truth_diff, e.row, e.col, e.y3, cfg.grid.T);
        FieldErrors fe = compare_fields(cg, e.inv.field, ref);
        e.inv.linf_err = fe.linf;
        e.inv.linf_rel = fe.linf_rel;
        e.inv.hminus1_err = fe.hminus1;
        worst_err = std::max(worst_err, fe.linf);
        worst_ref = std::max(worst_ref, ref.max_abs());
    }
    return worst_ref > 0.0 ? worst_err / worst_ref : worst_err;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return 0.0;
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0u);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t k = 0; k < idx.size();) {
            std::size_t j = k;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[k]]) ++j;
            double avg = 0.5 * (k + j) + 1.0;
            for (std::size_t s = k; s <= j; ++s) r[idx[s]] = avg;
            k = j + 1;
        }
        return r;
    };
    std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0) return 0.0;
    return num / std::sqrt(dx * dy);
}

TwoTermFit fit_two_term(const std::vector<double>& nu, const std::vector<double>& err,
                        double mu) {
    TwoTermFit f;
    f.mu = mu;
    const std::size_t n = nu.size();
    // Linear least squares in (A, B) for err = A nu^{mu/2} + B |log nu|^{-1}.
    double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = std::pow(nu[i], mu / 2.0);
        double l = 1.0 / std::max(std::abs(std::log(nu[i])), 1e-12);
        s11 += p * p;
        s12 += p * l;
        s22 += l * l;
        r1 += p * err[i];
        r2 += l * err[i];
    }
    double det = s11 * s22 - s12 * s12;
    if (std::abs(det) < 1e-300) return f;
    f.A = (r1 * s22 - r2 * s12) / det;
    f.B = (s11 * r2 - s12 * r1) / det;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = std::pow(nu[i], mu / 2.0);
        double l = 1.0 / std::max(std::abs(std::log(nu[i])), 1e-12);
        double m = f.A * p + f.B * l;
        acc += (m - err[i]) * (m - err[i]);
    }
    f.residual = std::sqrt(acc / n);
    return f;
}

PowerFit fit_power(const std::vector<double>& nu, const std::vector<double>& err) {
    PowerFit best;
    best.residual = -1.0;
    const std::size_t n = nu.size();
    auto eval = [&](double b) {
        // optimal a for fixed exponent, residual in linear space
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double p = std::pow(nu[i], b);
            num += p * err[i];
            den += p * p;
        }
        double a = den > 0.0 ? num / den : 0.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double m = a * std::pow(nu[i], b);
            acc += (m - err[i]) * (m - err[i]);
        }
        return std::make_pair(a, std::sqrt(acc / n));
    };
    for (double b = 0.01; b <= 3.0; b += 0.01) {
        auto [a, r] = eval(b);
        if (best.residual < 0.0 || r < best.residual) {
            best.a = a;
            best.b = b;
            best.residual = r;
        }
    }
    // local golden-section refinement around the grid minimum
    double lo = std::max(0.001, best.b - 0.01), hi = std::min(3.0, best.b + 0.01);
    for (int it = 0; it < 40; ++it) {
        double m1 = lo + 0.382 * (hi - lo), m2 = lo + 0.618 * (hi - lo);
        if (eval(m1).second < eval(m2).second)
            hi = m2;
        else
            lo = m1;
    }
    auto [a, r] = eval(0.5 * (lo + hi));
    if (r < best.residual) {
        best.a = a;
        best.b = 0.5 * (lo + hi);
        best.residual = r;
    }
    return best;
}

StabilityCurve stability_sweep(const Grid4& g, const PipelineConfig& cfg,
                               IoMapOracle& q1_oracle, const MatrixPotential& q2,
                               const AnalyticPotential& truth_diff,
                               const RayScan* precomputed) {
    // Gate: the pipeline must work noiselessly before sweeping.
    RayScan scan =
        precomputed ? *precomputed : run_ray_scan(g, cfg, q1_oracle, q2);
    StabilityCurve curve;
    for (std::size_t d = 0; d < scan.deltas.size(); ++d) {
        ReconstructionResult r = assemble_and_invert(cfg, scan, static_cast<int>(d));
        double rel = score_against_truth(cfg, r, truth_diff);
        StabilityRow row;
        row.delta = scan.deltas[d];
        row.opnorm = r.opnorm;
        row.linf_rel = rel;
        double amax = 0.0, hmax = 0.0, aused = 0.0;
        for (const auto& e : r.entries) {
            amax = std::max(amax, e.inv.linf_err);
            hmax = std::max(hmax, e.inv.hminus1_err);
            aused = std::max(aused, e.alpha_used);
        }
        row.linf_abs = amax;
        row.hminus1 = hmax;
        row.alpha = aused;
        curve.rows.push_back(row);
    }
    std::sort(curve.rows.begin(), curve.rows.end(),
              [](const StabilityRow& a, const StabilityRow& b) { return a.delta < b.delta; });

    std::vector<double> deltas, errs, nus;
    for (const auto& r : curve.rows) {
        deltas.push_back(r.delta);
        errs.push_back(r.linf_rel);
        nus.push_back(r.opnorm);
    }
    curve.spearman = spearman_rho(deltas, errs);
    curve.two_term = fit_two_term(nus, errs, cfg.mu);
    curve.power = fit_power(nus, errs);
    return curve;
}

StabilityCurve partial_data_run(const Grid4& g, PipelineConfig cfg,
                                IoMapOracle& q1_oracle, const MatrixPotential& q2,
                                const Scenario& sc, const AnalyticPotential& truth_diff) {
    if (!cfg.mode.partial) throw ConfigError("partial_data_run requires partial mode");
    cfg.validate(sc);
    return stability_sweep(g, cfg, q1_oracle, q2, truth_diff);
}

namespace {

// Exact cone samples of the truth difference via separable fine-grid DFT.
struct TruthSpectrum {
    // G[t_index][xi_index]: spatial transform per fine time node
    std::vector<std::complex<double>> G;
    std::vector<double> tgrid, twt;
    int n_xi2 = 0;

    std::complex<double> at(double tau, int xi_flat) const {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < tgrid.size(); ++i) {
            double ph = -tau * tgrid[i];
            acc += twt[i] * std::complex<double>(std::cos(ph), std::sin(ph)) *
                   G[i * n_xi2 + xi_flat];
        }
        return acc;
    }
};

TruthSpectrum truth_spectrum(const PipelineConfig& cfg, const AnalyticPotential& truth,
                             int row, int col, double y3) {
    ConeGrid cg = cfg.cone_grid();
    TruthSpectrum ts;
    const int nfx = 96, nft = 128;
    const double T = cfg.grid.T;
    double dxf = 1.0 / nfx;  // fine x' grid over the unit cross-section box
    double dtf = T / nft;
    ts.n_xi2 = cg.n_xi * cg.n_xi;
    ts.G.assign(static_cast<std::size_t>(nft + 1) * ts.n_xi2, {0.0, 0.0});
    ts.tgrid.resize(nft + 1);
    ts.twt.resize(nft + 1);
    std::vector<double> e(static_cast<std::size_t>(truth.n) * truth.n);
    // Per-axis phase tables
    for (int it = 0; it <= nft; ++it) {
        ts.tgrid[it] = it * dtf;
        ts.twt[it] = (it == 0 || it == nft) ? 0.5 * dtf : dtf;
    }
    std::vector<std::complex<double>> px(static_cast<std::size_t>(cg.n_xi) * (nfx + 1));
    for (int m = 0; m < cg.n_xi; ++m)
        for (int b = 0; b <= nfx; ++b) {
            double ph = -cg.xi(m) * (b * dxf);
            px[static_cast<std::size_t>(m) * (nfx + 1) + b] = {std::cos(ph), std::sin(ph)};
        }
    for (int it = 0; it <= nft; ++it) {
        double t = ts.tgrid[it];
        // row of spatial values, then separable DFT
        std::vector<double> vals(static_cast<std::size_t>(nfx + 1) * (nfx + 1));
        for (int b1 = 0; b1 <= nfx; ++b1)
            for (int b2 = 0; b2 <= nfx; ++b2) {
                truth.eval(t, b1 * dxf, b2 * dxf, y3, e.data());
                vals[static_cast<std::size_t>(b1) * (nfx + 1) + b2] =
                    e[static_cast<std::size_t>(row) * truth.n + col];
            }
        // partial transform over b2 first
        std::vector<std::complex<double>> half(static_cast<std::size_t>(nfx + 1) *
                                               cg.n_xi);
        for (int b1 = 0; b1 <= nfx; ++b1) {
            for (int m2 = 0; m2 < cg.n_xi; ++m2) {
                std::complex<double> acc{0.0, 0.0};
                for (int b2 = 0; b2 <= nfx; ++b2) {
                    double w = (b2 == 0 || b2 == nfx) ? 0.5 * dxf : dxf;
                    acc += w * vals[static_cast<std::size_t>(b1) * (nfx + 1) + b2] *
                           px[static_cast<std::size_t>(m2) * (nfx + 1) + b2];
                }
                half[static_cast<std::size_t>(b1) * cg.n_xi + m2] = acc;
            }
        }
        for (int m1 = 0; m1 < cg.n_xi; ++m1)
            for (int m2 = 0; m2 < cg.n_xi; ++m2) {
                std::complex<double> acc{0.0, 0.0};
                for (int b1 = 0; b1 <= nfx; ++b1) {
                    double w = (b1 == 0 || b1 == nfx) ? 0.5 * dxf : dxf;
                    acc += w * half[static_cast<std::size_t>(b1) * cg.n_xi + m2] *
                           px[static_cast<std::size_t>(m1) * (nfx + 1) + b1];
                }
                ts.G[static_cast<std::size_t>(it) * ts.n_xi2 + m1 * cg.n_xi + m2] = acc;
            }
    }
    return ts;
}

}  // namespace

ErrorBudget error_budget(const Grid4& g, const PipelineConfig& cfg, const RayScan& scan,
                         const AnalyticPotential& truth_diff, int delta_idx) {
    ErrorBudget bud;
    Scenario sc = get_scenario(cfg.scenario);
    MatrixPotential q_truth = sample_potential(g, truth_diff, sc.r, 4.0 * sc.M);
    ConeGrid cg = cfg.cone_grid();

    // Stage A: the real pipeline (fixes alpha for the whole ladder).
    ReconstructionResult real = assemble_and_invert(cfg, scan, delta_idx);

    PipelineConfig fixed = cfg;

    double worst_total = 0.0, worst_extract = 0.0, worst_slice = 0.0, worst_extrap = 0.0,
           worst_cutoff = 0.0, worst_invonly = 0.0, ref_sup = 0.0;

    for (const auto& ee : real.entries) {
        fixed.alpha = ee.alpha_used;
        int row = ee.row, col = ee.col;
        double y3 = ee.y3;
        int si = 0;
        for (std::size_t s = 0; s < cfg.slices.size(); ++s)
            if (cfg.slices[s] == y3) si = static_cast<int>(s);

        // Oracle-ray scan clone: replace identity values by lrt_direct.
        RayScan oracle_scan = scan;
        for (std::size_t gi = 0; gi < scan.geoms.size(); ++gi) {
            const auto& geo = scan.geoms[gi];
            if (geo.slice_idx != si) continue;
            double v = geo.solved ? lrt_direct(g, q_truth, row, col, geo.theta, geo.y, geo.y3)
                                  : 0.0;
            oracle_scan.values[delta_idx][gi * scan.n * scan.n + row * scan.n + col] = v;
        }
        ReconstructionResult est_orays = assemble_and_invert(fixed, oracle_scan, delta_idx);
        const EntryEstimate* eo = nullptr;
        for (const auto& e2 : est_orays.entries)
            if (e2.row == row && e2.col == col && e2.y3 == y3) eo = &e2;

        // Oracle-spectrum pipeline: exact cone samples, then extension+cutoff.
        TruthSpectrum ts = truth_spectrum(cfg, truth_diff, row, col, y3);
        ConeSpectrum cs_oracle;
        cs_oracle.init(cg);
        cs_oracle.row = row;
        cs_oracle.col = col;
        ConeSpectrum cs_probe = build_spectrum(cfg, scan, delta_idx, si, row, col);
        std::vector<ExactSample> osamples;
        for (const auto& s : cs_probe.samples) {
            ExactSample o = s;
            o.v = ts.at(s.tau, s.m1 * cg.n_xi + s.m2);
            osamples.push_back(o);
        }
        add_cone_samples(cs_oracle, osamples);
        double lambda = std::max(cfg.lambda, cfg.lambda_noise * scan.deltas[delta_idx] *
                                                 scan.deltas[delta_idx]);
        extend_spectrum(cs_oracle, lambda, cfg.cond_threshold);
        InversionResult inv_ospec = invert_spectrum(cs_oracle, ee.alpha_used, cfg.grid.T);

        // Full oracle spectrum inside the ball (no extension involved).
        ConeSpectrum cs_full;
        cs_full.init(cg);
        for (int j = 0; j < cg.n_tau; ++j)
            for (int m1 = 0; m1 < cg.n_xi; ++m1)
                for (int m2 = 0; m2 < cg.n_xi; ++m2) {
                    double tau = cg.tau(j);
                    double r2 = tau * tau + cg.xi(m1) * cg.xi(m1) + cg.xi(m2) * cg.xi(m2);
                    if (r2 >= ee.alpha_used * ee.alpha_used) continue;
                    cs_full.grid_vals[cg.index(j, m1, m2)] =
                        ts.at(tau, m1 * cg.n_xi + m2);
                }
        InversionResult inv_full = invert_spectrum(cs_full, ee.alpha_used, cfg.grid.T);

        SliceField ref = sample_reference(cg, truth_diff, row, col, y3, cfg.grid.T);
        ref_sup = std::max(ref_sup, ref.max_abs());

        auto ldiff = [](const SliceField& a, const SliceField& b) {
            double m = 0.0;
            for (std::size_t s = 0; s < a.v.size(); ++s)
                m = std::max(m, std::abs(a.v[s] - b.v[s]));
            return m;
        };
        worst_total = std::max(worst_total, ldiff(ee.inv.field, ref));
        if (eo) {
            worst_extract = std::max(worst_extract, ldiff(ee.inv.field, eo->inv.field));
            worst_slice = std::max(worst_slice, ldiff(eo->inv.field, inv_ospec.field));
            worst_invonly = std::max(worst_invonly, ldiff(eo->inv.field, ref));
        }
        worst_extrap = std::max(worst_extrap, ldiff(inv_ospec.field, inv_full.field));
        worst_cutoff = std::max(worst_cutoff, ldiff(inv_full.field, ref));
    }

    double sup = ref_sup > 0.0 ? ref_sup : 1.0;
    bud.total = worst_total / sup;
    bud.extraction = worst_extract / sup;
    bud.slice_assembly = worst_slice / sup;
    bud.extrapolation = worst_extrap / sup;
    bud.cutoff_bias = worst_cutoff / sup;
    bud.inversion_only = worst_invonly / sup;
    return bud;
}

}  // namespace wginv
