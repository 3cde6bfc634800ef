#include "wginv/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace wginv {

const std::vector<ConfigKeyDoc>& config_key_docs() {
    static const std::vector<ConfigKeyDoc> docs = {
        {"grid", "shape", "-", "rectangle", "cross-section shape: rectangle | disk"},
        {"grid", "lx", "length", "1.0", "rectangle side along x1"},
        {"grid", "ly", "length", "1.0", "rectangle side along x2"},
        {"grid", "radius", "length", "0.5", "disk radius"},
        {"grid", "h", "length", "0.03125", "cross-section grid spacing"},
        {"grid", "h_x3", "length", "0.0625", "axial grid spacing"},
        {"grid", "x3_half_width", "length", "3.5", "axial truncation half-width X3"},
        {"grid", "T", "time", "2.0", "final time (must exceed diam(omega))"},
        {"grid", "cfl_factor", "-", "0.4", "dt = cfl_factor * min(h, h_x3), <= 1/sqrt(3)"},
        {"grid", "probe_support_radius", "length", "0.5",
         "largest |x3| support of any probe; bounds the admissible X3"},
        {"potentials", "scenario", "-", "entry-bump",
         "scenario name: entry-bump | smooth-field | time-osc | null"},
        {"probes", "n_theta", "-", "24", "number of ray directions on the circle"},
        {"probes", "offset_lo", "length", "-2.6", "offset grid start (both axes)"},
        {"probes", "offset_hi", "length", "3.6", "offset grid end"},
        {"probes", "offset_spacing", "length", "0.166666...", "offset grid spacing"},
        {"probes", "slices", "length", "0.0", "comma list of y3 slice positions"},
        {"probes", "rho", "1/length", "8.0", "probe frequency"},
        {"probes", "eps", "length", "0.3", "mollifier width"},
        {"probes", "rho_pair", "-", "true",
         "two-frequency extrapolation of the identity values (rho and rho/2)"},
        {"pipeline", "n_tau", "-", "256", "tau grid size"},
        {"pipeline", "t_dom", "time", "32.0", "tau-dual time window (>> T)"},
        {"pipeline", "n_xi", "-", "12", "xi grid size per axis"},
        {"pipeline", "x_dom", "length", "2.0", "xi-dual box length per axis"},
        {"pipeline", "x_lo", "length", "-0.5", "xi-dual box start per axis"},
        {"pipeline", "alpha", "1/length", "0", "frequency cutoff; 0 = hold-out auto"},
        {"pipeline", "alpha_candidates", "1/length", "4,6,8,10,12,14,16",
         "auto-selection ladder"},
        {"pipeline", "lambda", "-", "1e-8", "extension ridge parameter (relative)"},
        {"pipeline", "lambda_noise", "-", "25.0",
         "noise-adaptive ridge: lambda(delta) = max(lambda, lambda_noise*delta^2)"},
        {"pipeline", "holdout_fraction", "-", "0.1", "cone samples held out for alpha"},
        {"pipeline", "cond_threshold", "-", "1e12",
         "row-fit condition limit before partial extension"},
        {"pipeline", "mu", "-", "0.5", "Holder exponent used in the two-term error fit"},
        {"pipeline", "partial_R", "length", "0",
         "0 = full data; > 0 restricts the trace to |x3| < R"},
        {"pipeline", "norm_probes", "-", "24", "probe family size for the norm proxy"},
        {"noise", "levels", "-", "", "comma list of relative noise amplitudes"},
        {"noise", "seed", "-", "20240801", "master seed"},
        {"forward", "mode", "-", "manufactured",
         "forward command scenario: zero | manufactured | scenario"},
        {"forward", "h_list", "length", "0.0625,0.03125",
         "spacings for the convergence table"},
        {"output", "format", "-", "csv", "artifact format: csv | csv+svg"},
        {"output", "dir", "-", "out", "output directory"},
    };
    return docs;
}

namespace {

bool known_key(const std::string& sec, const std::string& key) {
    for (const auto& d : config_key_docs())
        if (d.section == sec && d.key == key) return true;
    return false;
}

double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" +
                          v + "'");
    }
}

std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::string tok;
    std::istringstream is(v);
    while (std::getline(is, tok, ',')) {
        // trim
        auto b = tok.find_first_not_of(" \t");
        auto e = tok.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(parse_double(tok.substr(b, e - b + 1), line));
    }
    return out;
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("line " + std::to_string(line) + ": expected true/false, got '" + v +
                      "'");
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
    RunConfig rc;
    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        // strip comments
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        std::string s = line.substr(b, e - b + 1);
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError(origin + ": line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = s.substr(1, s.size() - 2);
            bool ok = false;
            for (const auto& d : config_key_docs()) ok = ok || d.section == section;
            if (!ok)
                throw ConfigError(origin + ": line " + std::to_string(lineno) +
                                  ": unknown section [" + section + "]");
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ": line " + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = s.substr(0, eq);
        std::string val = s.substr(eq + 1);
        auto trim = [](std::string& t) {
            auto tb = t.find_first_not_of(" \t");
            auto te = t.find_last_not_of(" \t");
            t = (tb == std::string::npos) ? "" : t.substr(tb, te - tb + 1);
        };
        trim(key);
        trim(val);
        if (!known_key(section, key))
            throw ConfigError(origin + ": line " + std::to_string(lineno) +
                              ": unknown key '" + key + "' in section [" + section + "]");

        PipelineConfig& p = rc.pipe;
        if (section == "grid") {
            if (key == "shape") {
                if (val == "rectangle")
                    p.grid.shape = CrossSectionShape::rectangle;
                else if (val == "disk")
                    p.grid.shape = CrossSectionShape::disk;
                else
                    throw ConfigError(origin + ": line " + std::to_string(lineno) +
                                      ": shape must be rectangle or disk");
            } else if (key == "lx")
                p.grid.lx = parse_double(val, lineno);
            else if (key == "ly")
                p.grid.ly = parse_double(val, lineno);
            else if (key == "radius")
                p.grid.radius = parse_double(val, lineno);
            else if (key == "h")
                p.grid.h = parse_double(val, lineno);
            else if (key == "h_x3")
                p.grid.h_x3 = parse_double(val, lineno);
            else if (key == "x3_half_width")
                p.grid.x3_half_width = parse_double(val, lineno);
            else if (key == "T")
                p.grid.T = parse_double(val, lineno);
            else if (key == "cfl_factor")
                p.grid.cfl_factor = parse_double(val, lineno);
            else if (key == "probe_support_radius")
                p.grid.probe_support_radius = parse_double(val, lineno);
        } else if (section == "potentials") {
            if (key == "scenario") p.scenario = val;
        } else if (section == "probes") {
            if (key == "n_theta")
                p.n_theta = static_cast<int>(parse_double(val, lineno));
            else if (key == "offset_lo")
                p.offset_lo = parse_double(val, lineno);
            else if (key == "offset_hi")
                p.offset_hi = parse_double(val, lineno);
            else if (key == "offset_spacing")
                p.offset_spacing = parse_double(val, lineno);
            else if (key == "slices")
                p.slices = parse_list(val, lineno);
            else if (key == "rho")
                p.rho = parse_double(val, lineno);
            else if (key == "eps")
                p.eps = parse_double(val, lineno);
            else if (key == "rho_pair")
                p.rho_pair_extrapolation = parse_bool(val, lineno);
        } else if (section == "pipeline") {
            if (key == "n_tau")
                p.n_tau = static_cast<int>(parse_double(val, lineno));
            else if (key == "t_dom")
                p.t_dom = parse_double(val, lineno);
            else if (key == "n_xi")
                p.n_xi = static_cast<int>(parse_double(val, lineno));
            else if (key == "x_dom")
                p.x_dom = parse_double(val, lineno);
            else if (key == "x_lo")
                p.x_lo = parse_double(val, lineno);
            else if (key == "alpha")
                p.alpha = parse_double(val, lineno);
            else if (key == "alpha_candidates")
                p.alpha_candidates = parse_list(val, lineno);
            else if (key == "lambda")
                p.lambda = parse_double(val, lineno);
            else if (key == "lambda_noise")
                p.lambda_noise = parse_double(val, lineno);
            else if (key == "holdout_fraction")
                p.holdout_fraction = parse_double(val, lineno);
            else if (key == "cond_threshold")
                p.cond_threshold = parse_double(val, lineno);
            else if (key == "mu")
                p.mu = parse_double(val, lineno);
            else if (key == "partial_R") {
                double R = parse_double(val, lineno);
                p.mode = R > 0.0 ? IOMode::partial_data(R) : IOMode::full();
            } else if (key == "norm_probes")
                p.norm_probe_count = static_cast<int>(parse_double(val, lineno));
        } else if (section == "noise") {
            if (key == "levels")
                p.noise_levels = parse_list(val, lineno);
            else if (key == "seed")
                p.seed = static_cast<std::uint64_t>(parse_double(val, lineno));
        } else if (section == "forward") {
            if (key == "mode") {
                if (val != "zero" && val != "manufactured" && val != "scenario")
                    throw ConfigError(origin + ": line " + std::to_string(lineno) +
                                      ": forward mode must be zero | manufactured | "
                                      "scenario");
                rc.forward_mode = val;
            } else if (key == "h_list")
                rc.forward_h = parse_list(val, lineno);
        } else if (section == "output") {
            if (key == "format") {
                if (val != "csv" && val != "csv+svg")
                    throw ConfigError(origin + ": line " + std::to_string(lineno) +
                                      ": format must be csv or csv+svg");
                rc.format = val;
            } else if (key == "dir")
                rc.out_dir = val;
        }
    }
    return rc;
}

RunConfig parse_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config_text(ss.str(), path);
}

std::string config_help_text() {
    std::ostringstream os;
    os << "Configuration keys (key = value under [section]):\n";
    std::string last;
    for (const auto& d : config_key_docs()) {
        if (d.section != last) {
            os << "\n[" << d.section << "]\n";
            last = d.section;
        }
        os << "  " << d.key << " (unit: " << d.unit << ", default: " << d.def << ") - "
           << d.desc << "\n";
    }
    return os.str();
}

}  // namespace wginv
