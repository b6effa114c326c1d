#include "irstt/config.hpp"

#include "irstt/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace irstt {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(trim(item));
    }
    return out;
}

double to_real(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        throw ValidationError(key, "expected a number, got '" + v + "'");
    }
    return out;
}

long long to_int(const std::string& key, const std::string& v)
{
    long long out = 0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ValidationError(key, "expected an integer, got '" + v + "'");
    }
    return out;
}

Index to_positive(const std::string& key, const std::string& v)
{
    const long long n = to_int(key, v);
    if (n < 1) {
        throw ValidationError(key, "must be >= 1, got " + v);
    }
    return static_cast<Index>(n);
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "0" || v == "false" || v == "no" || v == "off") {
        return false;
    }
    throw ValidationError(key, "expected a boolean, got '" + v + "'");
}

template <class F>
auto map_list(const std::string& key, const std::string& v, F f)
{
    std::vector<decltype(f(key, v))> out;
    for (const auto& item : split_list(v)) {
        out.push_back(f(key, item));
    }
    if (out.empty()) {
        throw ValidationError(key, "empty list");
    }
    return out;
}

void apply(RunConfig& rc, std::vector<Index>& n_list, const std::string& key, const std::string& v)
{
    SweepSpec& s = rc.sweep;
    SystemConfig& c = s.base;
    if (key == "L") {
        c.L = to_positive(key, v);
    } else if (key == "P") {
        c.P = to_positive(key, v);
    } else if (key == "U") {
        c.U = to_positive(key, v);
    } else if (key == "M") {
        c.M = to_positive(key, v);
    } else if (key == "UM") {
        c.U = 1;
        c.M = to_positive(key, v);
    } else if (key == "LP") {
        c.P = 1;
        c.L = to_positive(key, v);
    } else if (key == "N") {
        n_list = map_list(key, v, to_positive);
    } else if (key == "K") {
        c.K = to_positive(key, v);
    } else if (key == "T") {
        c.T = to_positive(key, v);
    } else if (key == "D") {
        c.D = to_positive(key, v);
    } else if (key == "noise_var") {
        c.noise_var = to_real(key, v);
        if (c.noise_var < 0.0) {
            throw ValidationError(key, "must be >= 0");
        }
    } else if (key == "trials") {
        s.trials = to_positive(key, v);
    } else if (key == "seed") {
        const long long n = to_int(key, v);
        if (n < 0) {
            throw ValidationError(key, "must be >= 0");
        }
        s.master_seed = static_cast<std::uint64_t>(n);
    } else if (key == "sweep_param") {
        s.param = v;
    } else if (key == "values") {
        s.values = map_list(key, v, to_real);
    } else if (key == "solvers") {
        s.solvers = split_list(v);
    } else if (key == "pilot") {
        try {
            s.pilot = PilotKind::parse(v);
        } catch (const ConfigError& e) {
            throw ValidationError(key, e.what());
        }
    } else if (key == "phase_policy") {
        try {
            s.policy = parse_phase_policy(v);
        } catch (const ConfigError& e) {
            throw ValidationError(key, e.what());
        }
    } else if (key == "als_iters") {
        s.settings.als_iters = to_positive(key, v);
    } else if (key == "agd_iters") {
        s.settings.agd_iters = to_positive(key, v);
    } else if (key == "agd_step") {
        s.settings.agd_steps = map_list(key, v, to_real);
        for (double mu : s.settings.agd_steps) {
            if (!(mu > 0.0)) {
                throw ValidationError(key, "steps must be > 0");
            }
        }
    } else if (key == "stop_tol") {
        s.settings.stop_tol = to_real(key, v);
        if (s.settings.stop_tol < 0.0) {
            throw ValidationError(key, "must be >= 0");
        }
    } else if (key == "pinv_tol") {
        s.settings.pinv_tol = to_real(key, v);
        if (!(s.settings.pinv_tol >= 0.0)) {
            throw ValidationError(key, "must be >= 0");
        }
    } else if (key == "rank_limits") {
        if (v.empty() || v == "none") {
            s.settings.rank_limits.reset();
        } else {
            s.settings.rank_limits = map_list(key, v, to_positive);
        }
    } else if (key == "threads") {
        const long long n = to_int(key, v);
        if (n < 0) {
            throw ValidationError(key, "must be >= 0");
        }
        s.threads = static_cast<unsigned>(n);
    } else if (key == "strict") {
        rc.strict = to_bool(key, v);
    } else if (key == "record_wall_time") {
        rc.record_wall_time = to_bool(key, v);
    } else if (key == "rip_samples") {
        rc.rip_samples = to_positive(key, v);
    } else if (key == "out") {
        if (v.empty()) {
            throw ValidationError(key, "must be nonempty");
        }
        rc.out = v;
    }
}

// Cross-key checks once every source has been applied.
void finish(RunConfig& rc, const std::vector<Index>& n_list, bool values_set)
{
    SweepSpec& s = rc.sweep;
    SystemConfig& c = s.base;
    if (n_list.size() == 1) {
        c.irs_sizes.assign(static_cast<std::size_t>(c.D), n_list.front());
    } else if (!n_list.empty()) {
        if (static_cast<Index>(n_list.size()) != c.D) {
            throw ValidationError("N", "lists " + std::to_string(n_list.size()) + " sizes but D = " +
                                           std::to_string(c.D));
        }
        c.irs_sizes = n_list;
    } else {
        c.irs_sizes.resize(static_cast<std::size_t>(c.D), c.irs_sizes.empty() ? 10 : c.irs_sizes.back());
    }
    static const std::vector<std::string> params{"T", "UM", "LP", "N", "K", "noise_var", "D"};
    if (std::find(params.begin(), params.end(), s.param) == params.end()) {
        throw ValidationError("sweep_param", "unknown parameter '" + s.param + "'");
    }
    if (!values_set) {
        // Without a value list the sweep is the single base point.
        const std::map<std::string, double> base{
            {"T", static_cast<double>(c.T)},    {"UM", static_cast<double>(c.um())},
            {"LP", static_cast<double>(c.lp())}, {"N", static_cast<double>(c.irs_sizes.front())},
            {"K", static_cast<double>(c.K)},    {"noise_var", c.noise_var},
            {"D", static_cast<double>(c.D)}};
        s.values = {base.at(s.param)};
    }
    if (s.solvers.empty()) {
        throw ValidationError("solvers", "at least one solver is required");
    }
    for (const auto& name : s.solvers) {
        if (std::find(kSolvers.begin(), kSolvers.end(), name) == kSolvers.end()) {
            throw ValidationError("solvers", "unknown solver '" + name + "'");
        }
    }
    try {
        s.validate();
    } catch (const ConfigError& e) {
        throw ValidationError("values", e.what());
    }
    for (double v : s.values) {
        const SystemConfig at = s.config_at(v);
        if (s.pilot.family == PilotKind::Family::Dft && at.T < at.um()) {
            throw ValidationError("pilot", "dft pilots need T >= UM (T = " + std::to_string(at.T) +
                                               ", UM = " + std::to_string(at.um()) + ")");
        }
        if (s.settings.rank_limits && static_cast<Index>(s.settings.rank_limits->size()) != at.D + 1) {
            throw ValidationError("rank_limits", "needs D + 1 entries");
        }
        if (std::find(s.solvers.begin(), s.solvers.end(), "agd") != s.solvers.end() &&
            at.D > static_cast<Index>(s.settings.agd_steps.size())) {
            throw ValidationError("agd_step", "no step size for D = " + std::to_string(at.D));
        }
    }
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "L", "P", "U", "M", "UM", "LP", "N", "K", "T", "D", "noise_var", "trials", "seed",
        "sweep_param", "values", "solvers", "pilot", "phase_policy", "als_iters", "agd_iters",
        "agd_step", "stop_tol", "pinv_tol", "rank_limits", "threads", "strict",
        "record_wall_time", "rip_samples", "out"};
    return keys;
}

KeyValue split_assignment(std::string_view s)
{
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
        throw ParseError("expected KEY=VALUE, got '" + std::string(s) + "'", 0, trim(s));
    }
    return {trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
}

RunConfig parse_config(std::string_view text, const std::vector<KeyValue>& overrides)
{
    const auto& keys = config_keys();
    auto known = [&](const std::string& k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };

    RunConfig rc;
    std::vector<Index> n_list;
    bool values_set = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string body = trim(std::string_view(raw).substr(0, raw.find('#')));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ParseError("line " + std::to_string(line) + ": expected key = value", line, "");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (!known(key)) {
            throw ParseError("line " + std::to_string(line) + ": unknown key '" + key + "'", line, key);
        }
        apply(rc, n_list, key, trim(std::string_view(body).substr(eq + 1)));
        values_set = values_set || key == "values";
    }
    for (const auto& [key, value] : overrides) {
        if (!known(key)) {
            throw ParseError("unknown key '" + key + "'", 0, key);
        }
        apply(rc, n_list, key, value);
        values_set = values_set || key == "values";
    }
    finish(rc, n_list, values_set);
    return rc;
}

RunConfig load_config(const std::string& path, const std::vector<KeyValue>& overrides)
{
    std::ifstream f(path);
    if (!f) {
        throw IoError("cannot read config '" + path + "'");
    }
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str(), overrides);
}

} // namespace irstt
