#include "omnoise/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "omnoise/analytic.hpp"

namespace omnoise {

namespace {

constexpr const char* kPaperDevice = R"(# silicon-nitride membrane device, dilution-fridge operation
omega_m_hz = 9.22e6
gamma_hz   = 120
kappa_hz   = 1.06e6
g0_hz      = 39
n_th       = 100
n_max      = 1e10
)";

// Same device seen through the probe tone: broadened mechanical line and
// the occupancy measured there.
constexpr const char* kPaperDeviceProbe = R"(omega_m_hz = 9.22e6
gamma_hz   = 220
kappa_hz   = 1.06e6
g0_hz      = 39
n_th       = 12.1
n_max      = 1e10
)";

const char* builtin_text(const std::string& name) {
    if (name == "paper_device") return kPaperDevice;
    if (name == "paper_device_probe") return kPaperDeviceProbe;
    return nullptr;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

const std::vector<std::string> kRequired = {"omega_m_hz", "gamma_hz", "kappa_hz",
                                            "g0_hz",      "n_th",     "n_max"};
const std::vector<std::string> kOptional = {"n_ba"};

void parse_text(std::istream& in, ConfigReport& rep) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            rep.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const bool known =
            std::find(kRequired.begin(), kRequired.end(), key) != kRequired.end() ||
            std::find(kOptional.begin(), kOptional.end(), key) != kOptional.end();
        if (!known) {
            rep.warnings.push_back("unknown key '" + key + "' ignored");
            continue;
        }
        double v = 0.0;
        if (!parse_double(val, v)) {
            rep.errors.push_back("key '" + key + "': cannot parse '" + val + "' as a number");
            continue;
        }
        if (rep.values.count(key))
            rep.warnings.push_back("key '" + key + "' given twice; last value wins");
        rep.values[key] = v;
    }
}

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
    char buf[200];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

}  // namespace

bool is_builtin_params(const std::string& name) { return builtin_text(name) != nullptr; }

std::vector<std::string> builtin_params_names() { return {"paper_device", "paper_device_probe"}; }

ConfigReport params_from_values(const std::map<std::string, double>& values) {
    ConfigReport rep;
    rep.values = values;

    for (const auto& key : kRequired)
        if (!rep.values.count(key)) rep.errors.push_back("missing required key '" + key + "'");
    for (const auto& [key, v] : rep.values)
        if (!std::isfinite(v)) rep.errors.push_back("key '" + key + "' is not finite");
    if (!rep.errors.empty()) return rep;

    const double omega_m = hz_to_rad(rep.values.at("omega_m_hz"));
    const double gamma = hz_to_rad(rep.values.at("gamma_hz"));
    const double kappa = hz_to_rad(rep.values.at("kappa_hz"));
    const double g0 = hz_to_rad(rep.values.at("g0_hz"));
    const double n_th = rep.values.at("n_th");
    const double n_max = rep.values.at("n_max");
    std::optional<double> n_ba;
    if (rep.values.count("n_ba")) n_ba = rep.values.at("n_ba");

    try {
        rep.params.emplace(omega_m, gamma, kappa, g0, n_th, n_ba, n_max);
    } catch (const std::exception& e) {
        rep.errors.push_back(e.what());
        return rep;
    }

    const PhysParams& p = *rep.params;
    rep.echo.push_back(fmt("omega_m = %.9g Hz  (%.9g rad/s)", rep.values.at("omega_m_hz"),
                           p.omega_m()));
    rep.echo.push_back(fmt("gamma   = %.9g Hz  (%.9g rad/s)", rep.values.at("gamma_hz"),
                           p.gamma()));
    rep.echo.push_back(fmt("kappa   = %.9g Hz  (%.9g rad/s)", rep.values.at("kappa_hz"),
                           p.kappa()));
    rep.echo.push_back(fmt("g0      = %.9g Hz  (%.9g rad/s)", rep.values.at("g0_hz"), p.g0()));
    rep.echo.push_back(fmt("n_th    = %.9g     n_max = %.9g", p.n_th(), p.n_max()));
    rep.echo.push_back(fmt("n_ba    = %.9g     (kappa/(4 omega_m))^2 default = %.9g", p.n_ba(),
                           (p.kappa() * p.kappa()) / (16.0 * p.omega_m() * p.omega_m())));
    if (p.resolved_sideband()) {
        rep.echo.push_back(fmt("threshold n0* = %.9g photons   (gamma kappa / 4 g0^2)",
                               self_oscillation_threshold_photons(p)));
    }
    rep.echo.push_back(fmt("q(red) = %.9g s   q(blue) = %.9g s",
                           q_parameter(p, Sideband::Red), q_parameter(p, Sideband::Blue)));
    rep.echo.push_back(fmt("langevin step bound: dt <= %.6g s  (min of 0.1/kappa, 0.2/omega_m)",
                           std::min(0.1 / p.kappa(), 0.2 / p.omega_m())));

    if (!p.resolved_sideband())
        rep.warnings.push_back("kappa >= omega_m: not sideband-resolved; analytic layer refuses");
    else if (p.kappa() > 0.5 * p.omega_m())
        rep.warnings.push_back("kappa > omega_m/2: sideband resolution is marginal");
    if (p.g0() == 0.0) rep.warnings.push_back("g0 = 0: no optomechanical coupling");
    return rep;
}

ConfigReport parse_params_source(const std::string& name_or_path) {
    ConfigReport rep;
    if (const char* text = builtin_text(name_or_path)) {
        std::istringstream in(text);
        parse_text(in, rep);
    } else {
        std::ifstream in(name_or_path);
        if (!in) {
            rep.errors.push_back("cannot open parameter file '" + name_or_path +
                                 "' (and it is not a builtin name)");
            return rep;
        }
        parse_text(in, rep);
    }
    if (!rep.errors.empty()) return rep;
    auto built = params_from_values(rep.values);
    built.warnings.insert(built.warnings.begin(), rep.warnings.begin(), rep.warnings.end());
    return built;
}

PhysParams load_params(const std::string& name_or_path) {
    const ConfigReport rep = parse_params_source(name_or_path);
    if (!rep.ok()) {
        std::string msg = "invalid parameter set '" + name_or_path + "':";
        for (const auto& e : rep.errors) msg += "\n  - " + e;
        throw std::runtime_error(msg);
    }
    return *rep.params;
}

}  // namespace omnoise
