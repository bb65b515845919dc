/// @file config.cpp

#include "thermodelay/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace thermodelay {

namespace {

const std::vector<std::pair<std::string, std::string>>& known_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"model.alpha", "1"},
        {"model.beta", ""},
        {"model.gamma", "1"},
        {"model.kappa", "1"},
        {"model.tau", "1"},
        {"model.ell", "1"},
        {"model.theta_bc", "neumann"},
        {"grid.nx", "32"},
        {"grid.nrho", "32"},
        {"time.t_end", "10"},
        {"time.dt", ""},
        {"time.delay_mode", "ring"},
        {"time.weight", "0.5"},
        {"time.backward_euler_start", "true"},
        {"time.transport_weight", "0.5"},
        {"time.record_every", "1"},
        {"lyapunov.lambda", ""},
        {"lyapunov.lambda_grid", "0.5:8:0.25"},
        {"lyapunov.xi_factor", "2"},
        {"lyapunov.poincare", "half_length_sq"},
        {"initial.u0", "sine(1)"},
        {"initial.u1", "zero"},
        {"initial.theta0", "cosine(1)"},
        {"initial.f0", "constant_history"},
        {"initial.u0_amplitude", "1"},
        {"initial.u1_amplitude", "1"},
        {"initial.theta0_amplitude", "1"},
        {"initial.project_theta_mean", "true"},
        {"output.fit_t_lo", ""},
        {"output.fit_t_hi", ""},
        {"output.refine_count", "10"},
        {"output.dissipativity_trials", "1000"},
        {"output.seed", "20240601"},
        {"sweep.beta", ""},
        {"sweep.tau", ""},
        {"sweep.lambda", ""},
        {"sweep.nx", ""},
        {"sweep.simulate", "true"},
        {"sweep.spectrum", "false"},
    };
    return keys;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError("'" + what + "': cannot read '" + text + "' as a number");
    return v;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::vector<double> parse_list(const std::string& text) {
    const std::string t = trim(text);
    std::vector<double> out;
    if (t.empty()) return out;
    if (t.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(t);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw ConfigError("range '" + text + "' must read lo:hi:step");
        const double lo = parse_double(parts[0], text), hi = parse_double(parts[1], text);
        const double step = parse_double(parts[2], text);
        if (!(step > 0.0) || hi < lo) throw ConfigError("range '" + text + "' needs step > 0 and hi >= lo");
        const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        if (n > 1000000) throw ConfigError("range '" + text + "' has too many points");
        for (long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
        return out;
    }
    std::stringstream ss(t);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_double(p, text));
    return out;
}

Config::Config() {
    for (const auto& [k, v] : known_keys()) values_[k] = v;
}

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    it->second = trim(value);
}

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must read section.key=value");
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

Config Config::parse(std::string_view text, const std::string& origin) {
    Config c;
    const std::string body = trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const std::exception& e) {
            throw ConfigError(origin + ": invalid JSON: " + e.what());
        }
        if (!j.contains("config") || !j["config"].is_object()) throw ConfigError(origin + ": no 'config' object");
        for (const auto& [k, v] : j["config"].items()) {
            if (!v.is_string()) throw ConfigError(origin + ": config value for '" + k + "' must be a string");
            c.set(k, v.get<std::string>());
        }
        return c;
    }

    std::string section;
    std::istringstream in{std::string(text)};
    int lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        const auto hash = raw.find_first_of("#;");
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        if (section.empty()) throw ConfigError(where + ": key outside of any [section]");
        try {
            c.set(section + "." + trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path.string());
}

bool Config::is_set(const std::string& key) const { return !get(key).empty(); }

const std::string& Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key) const { return parse_double(get(key), key); }

int Config::get_int(const std::string& key) const {
    const std::string& t = get(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError("'" + key + "': cannot read '" + t + "' as an integer");
    return v;
}

bool Config::get_bool(const std::string& key) const {
    const std::string& t = get(key);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("'" + key + "': expected true or false, got '" + t + "'");
}

std::vector<double> Config::get_list(const std::string& key) const { return parse_list(get(key)); }

std::string Config::to_ini() const {
    std::ostringstream out;
    std::string section;
    for (const auto& [k, v] : values_) {
        const auto dot = k.find('.');
        const std::string s = k.substr(0, dot);
        if (s != section) {
            out << (section.empty() ? "" : "\n") << "[" << s << "]\n";
            section = s;
        }
        out << k.substr(dot + 1) << " = " << v << "\n";
    }
    return out.str();
}

PhysParams physical_params(const Config& c) {
    PhysParams p;
    try {
        p.alpha = c.get_double("model.alpha");
        p.beta = c.is_set("model.beta") ? c.get_double("model.beta") : 1.0;
        p.gamma = c.get_double("model.gamma");
        p.kappa = c.get_double("model.kappa");
        p.tau = c.get_double("model.tau");
        p.ell = c.get_double("model.ell");
        p.theta_bc = theta_bc_from_string(c.get("model.theta_bc"));
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

LyapunovOptions lyapunov_options(const Config& c) {
    LyapunovOptions o;
    o.xi_factor = c.get_double("lyapunov.xi_factor");
    const std::string& pc = c.get("lyapunov.poincare");
    if (pc == "half_length_sq") o.poincare = PoincareChoice::half_length_sq;
    else if (pc == "sharp") o.poincare = PoincareChoice::sharp;
    else throw ConfigError("lyapunov.poincare must be half_length_sq or sharp");
    if (!(o.xi_factor > 1.0)) throw ConfigError("lyapunov.xi_factor must exceed 1");
    return o;
}

SimulationConfig simulation_config(const Config& c) {
    SimulationConfig s;
    s.params = physical_params(c);
    s.nx = c.get_int("grid.nx");
    s.nrho = c.get_int("grid.nrho");
    if (s.nx < 3 || s.nrho < 2) throw ConfigError("grid needs nx >= 3 and nrho >= 2");
    s.t_end = c.get_double("time.t_end");
    if (!(s.t_end >= 0.0)) throw ConfigError("time.t_end must be nonnegative");
    s.stepper.dt = c.is_set("time.dt") ? c.get_double("time.dt") : 0.0;
    if (s.stepper.dt < 0.0) throw ConfigError("time.dt must be positive");
    try {
        s.stepper.mode = delay_mode_from_string(c.get("time.delay_mode"));
        history_preset_from_string(c.get("initial.f0"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    s.stepper.weight = c.get_double("time.weight");
    if (s.stepper.weight < 0.5 || s.stepper.weight > 1.0) throw ConfigError("time.weight must lie in [0.5, 1]");
    s.stepper.backward_euler_start = c.get_bool("time.backward_euler_start");
    s.stepper.transport_weight = c.get_double("time.transport_weight");
    if (s.stepper.transport_weight < 0.0 || s.stepper.transport_weight > 1.0)
        throw ConfigError("time.transport_weight must lie in [0, 1]");
    const int every = c.get_int("time.record_every");
    if (every < 1) throw ConfigError("time.record_every must be at least 1");
    s.record_every = static_cast<std::size_t>(every);
    s.lambda = c.is_set("lyapunov.lambda") ? c.get_double("lyapunov.lambda") : 0.0;
    s.lyapunov = lyapunov_options(c);
    s.initial.u0 = c.get("initial.u0");
    s.initial.u1 = c.get("initial.u1");
    s.initial.theta0 = c.get("initial.theta0");
    s.initial.f0 = c.get("initial.f0");
    s.initial.u0_amplitude = c.get_double("initial.u0_amplitude");
    s.initial.u1_amplitude = c.get_double("initial.u1_amplitude");
    s.initial.theta0_amplitude = c.get_double("initial.theta0_amplitude");
    s.initial.project_theta_mean = c.get_bool("initial.project_theta_mean");
    return s;
}

}  // namespace thermodelay
