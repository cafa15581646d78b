#include "noma/config.hpp"

#include "noma/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace noma::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view text, int line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError("cannot parse '" + std::string(text) + "' as a real number for " + std::string(key),
                          std::string(key), line);
    }
    return v;
}

int parse_int(std::string_view key, std::string_view text, int line) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("cannot parse '" + std::string(text) + "' as an integer for " + std::string(key),
                          std::string(key), line);
    }
    return v;
}

// Maps the leading field name of a SystemConfig::validate message to the
// configuration key that sets it.
std::string blame_key(const std::string& message) {
    static const std::pair<const char*, const char*> table[] = {
        {"n_tx", "n_tx"},
        {"n_rx", "n_rx"},
        {"n_streams", "n_streams"},
        {"group_cap", "group_cap"},
        {"intensity", "intensity_per_m2"},
        {"radius", "radius_m"},
        {"path_loss_exp", "path_loss_exp"},
        {"path_loss_ref", "path_loss_ref"},
        {"fading_power", "fading_power"},
        {"noise_power", "noise_power"},
        {"avg_snr", "snr_db"},
        {"corr_coeff", "corr_coeff"},
        {"alloc_eps", "alloc_eps"},
        {"rate", "rate_bps_hz"},
        {"all rates", "rate_bps_hz"},
    };
    std::string best;
    std::size_t best_len = 0;
    for (const auto& [prefix, key] : table) {
        const std::string_view p(prefix);
        if (message.compare(0, p.size(), p) == 0 && p.size() > best_len) {
            best = key;
            best_len = p.size();
        }
    }
    return best;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "n_tx",   "n_rx",     "n_streams",        "group_cap",   "alloc_eps",     "corr_coeff",   "snr_db",
        "radius_m", "intensity_per_m2", "rate_bps_hz", "path_loss_exp", "path_loss_ref", "fading_power",
        "noise_power"};
    return keys;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

void apply_setting(ConfigSource& src, std::string_view key, std::string_view value, int line) {
    SystemConfig& c = src.cfg;
    const std::string k(key);
    if (value.empty()) throw ConfigError("missing value for " + k, k, line);

    const RMatrix old_rates = c.rates;
    if (k == "n_tx") c.n_tx = parse_int(k, value, line);
    else if (k == "n_rx") c.n_rx = parse_int(k, value, line);
    else if (k == "n_streams") c.n_streams = parse_int(k, value, line);
    else if (k == "group_cap") c.group_cap = parse_int(k, value, line);
    else if (k == "alloc_eps") c.alloc_eps = parse_real(k, value, line);
    else if (k == "corr_coeff") c.corr_coeff = parse_real(k, value, line);
    else if (k == "snr_db") c.avg_snr = db_to_linear(parse_real(k, value, line));
    else if (k == "radius_m") c.radius = parse_real(k, value, line);
    else if (k == "intensity_per_m2") c.intensity = parse_real(k, value, line);
    else if (k == "rate_bps_hz") c.set_uniform_rate(parse_real(k, value, line));
    else if (k == "path_loss_exp") c.path_loss_exp = parse_real(k, value, line);
    else if (k == "path_loss_ref") c.path_loss_ref = parse_real(k, value, line);
    else if (k == "fading_power") c.fading_power = parse_real(k, value, line);
    else if (k == "noise_power") c.noise_power = parse_real(k, value, line);
    else throw ConfigError("unknown configuration key '" + k + "'", k, line);

    // The rate matrix tracks the stream and group dimensions.
    if ((k == "n_streams" || k == "group_cap") && old_rates.size() > 0) {
        c.set_uniform_rate(old_rates(0, 0));
    }
    src.lines[k] = line;
}

ConfigSource parse_config(std::istream& in) {
    ConfigSource src;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text(raw);
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected 'key = value' on line " + std::to_string(line), std::string(text), line);
        }
        const std::string_view key = trim(text.substr(0, eq));
        const std::string_view value = trim(text.substr(eq + 1));
        if (src.lines.count(std::string(key))) {
            throw ConfigError("duplicate key '" + std::string(key) + "'", std::string(key), line);
        }
        apply_setting(src, key, value, line);
    }
    return src;
}

ConfigSource parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'", "", 0);
    return parse_config(in);
}

void apply_overrides(ConfigSource& src, const std::vector<std::string>& assignments) {
    for (const std::string& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw ConfigError("override must be key=value: '" + a + "'", a, 0);
        apply_setting(src, trim(std::string_view(a).substr(0, eq)), trim(std::string_view(a).substr(eq + 1)), 0);
    }
}

void finalize(const ConfigSource& src) {
    try {
        src.cfg.validate();
    } catch (const ParameterDomainError& e) {
        const std::string key = blame_key(e.what());
        const auto it = src.lines.find(key);
        throw ConfigError(e.what(), key, it == src.lines.end() ? 0 : it->second);
    }
}

}  // namespace noma::cli
