#include "leocov/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace leocov {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct Entry {
    std::string value;
    int line;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

Sections parse_sections(const std::string& text, const std::string& origin) {
    Sections sections;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                      ": unterminated section header",
                                  line_no);
            }
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name",
                                  line_no);
            }
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value",
                              line_no);
        }
        if (section.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside any section",
                              line_no);
        }
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key", line_no);
        }
        sections[section][key] = Entry{value, line_no};
    }
    return sections;
}

class Reader {
public:
    Reader(Sections sections, std::string origin)
        : sections_(std::move(sections)), origin_(std::move(origin)) {}

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    double number(const std::string& section, const std::string& key, double fallback) const {
        const Entry* e = find(section, key);
        if (!e) return fallback;
        return parse_number(e->value, e->line);
    }

    double required_number(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e) {
            throw ConfigError(origin_ + ": missing required key [" + section + "] " + key, 0);
        }
        return parse_number(e->value, e->line);
    }

    long integer(const std::string& section, const std::string& key, long fallback) const {
        const Entry* e = find(section, key);
        if (!e) return fallback;
        const double v = parse_number(e->value, e->line);
        if (std::abs(v - std::llround(v)) > 1e-9) {
            fail(*e, "[" + section + "] " + key + " must be an integer");
        }
        return std::llround(v);
    }

    std::uint64_t unsigned64(const std::string& section, const std::string& key,
                             std::uint64_t fallback) const {
        const Entry* e = find(section, key);
        if (!e) return fallback;
        std::uint64_t out = 0;
        const std::string v = trim(e->value);
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
            fail(*e, "[" + section + "] " + key + " must be an unsigned integer");
        }
        return out;
    }

    std::string word(const std::string& section, const std::string& key,
                     const std::string& fallback) const {
        const Entry* e = find(section, key);
        if (!e) return fallback;
        return lower(e->value);
    }

    std::vector<double> number_list(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e) return {};
        std::vector<double> out;
        std::string item;
        std::string normalized = e->value;
        std::replace(normalized.begin(), normalized.end(), ',', ' ');
        std::istringstream in(normalized);
        while (in >> item) out.push_back(parse_number(item, e->line));
        return out;
    }

    std::vector<std::string> word_list(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e) return {};
        std::vector<std::string> out;
        std::string normalized = e->value;
        std::replace(normalized.begin(), normalized.end(), ',', ' ');
        std::istringstream in(normalized);
        std::string item;
        while (in >> item) out.push_back(lower(item));
        return out;
    }

    int line_of(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        return e ? e->line : 0;
    }

    void check_known(const std::map<std::string, std::vector<std::string>>& schema) const {
        for (const auto& [section, keys] : sections_) {
            auto it = schema.find(section);
            if (it == schema.end()) {
                const int line = keys.empty() ? 0 : keys.begin()->second.line;
                throw ConfigError(origin_ + ": unknown section [" + section + "]", line);
            }
            for (const auto& [key, entry] : keys) {
                if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
                    fail(entry, "unknown key [" + section + "] " + key);
                }
            }
        }
    }

    [[noreturn]] void fail(const Entry& e, const std::string& message) const {
        throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": " + message, e.line);
    }

    [[noreturn]] void fail_at(const std::string& section, const std::string& key,
                              const std::string& message) const {
        const Entry* e = find(section, key);
        if (e) fail(*e, message);
        throw ConfigError(origin_ + ": " + message, 0);
    }

private:
    const Entry* find(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        return &k->second;
    }

    double parse_number(const std::string& value, int line) const {
        const std::string v = trim(value);
        char* end = nullptr;
        const double out = std::strtod(v.c_str(), &end);
        if (end != v.c_str() + v.size() || v.empty()) {
            throw ConfigError(origin_ + ":" + std::to_string(line) + ": not a number: " + v, line);
        }
        return out;
    }

    Sections sections_;
    std::string origin_;
};

FadingModel fading_from_word(const Reader& r, const std::string& section,
                             const std::string& key, const std::string& word) {
    if (word == "rayleigh") return FadingModel::rayleigh();
    if (word == "nonfading" || word == "non_fading" || word == "none") {
        return FadingModel::non_fading();
    }
    r.fail_at(section, key, "fading must be rayleigh or nonfading");
}

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"geometry", {"earth_radius_km", "altitude_km"}},
        {"radio",
         {"p_serve_w", "p_interf_w", "noise_dbm", "alpha", "serving_fading",
          "interfering_fading", "pathloss_ref_km", "threshold_db"}},
        {"network", {"n_sats", "n_channels"}},
        {"walker",
         {"inclination_deg", "n_planes", "sats_per_plane", "phasing", "user_latitude_deg"}},
        {"mc", {"n_trials", "seed", "n_workers"}},
        {"sweep", {"variable", "values", "outputs", "kinds"}},
        {"numerics", {"abs_tol", "rel_tol", "max_subdivisions", "normalization", "decomposition"}},
    };
    return s;
}

} // namespace

void SweepSpec::validate() const {
    if (values.empty()) {
        throw std::invalid_argument("sweep: values must not be empty");
    }
    for (size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            throw std::invalid_argument("sweep: values must be strictly increasing");
        }
    }
    if (outputs.empty()) {
        throw std::invalid_argument("sweep: at least one output required");
    }
    if (!kind_bpp && !kind_walker) {
        throw std::invalid_argument("sweep: at least one constellation kind required");
    }
}

LoadedConfig load_config_text(const std::string& text, const std::string& origin) {
    Reader r(parse_sections(text, origin), origin);
    r.check_known(schema());

    LoadedConfig out;

    const double earth_km = r.number("geometry", "earth_radius_km", 6371.0);
    const double altitude_km = r.required_number("geometry", "altitude_km");
    try {
        out.scenario.geom = GeometryParams::from_km(earth_km, altitude_km);
    } catch (const std::invalid_argument& err) {
        r.fail_at("geometry", "altitude_km", err.what());
    }

    RadioParams radio;
    radio.p_serve_w = r.required_number("radio", "p_serve_w");
    radio.p_interf_w = r.number("radio", "p_interf_w", radio.p_serve_w);
    radio.noise_w = dbm_to_watt(r.required_number("radio", "noise_dbm"));
    radio.alpha = r.required_number("radio", "alpha");
    radio.serving_fading =
        fading_from_word(r, "radio", "serving_fading", r.word("radio", "serving_fading", "rayleigh"));
    radio.interfering_fading = fading_from_word(
        r, "radio", "interfering_fading", r.word("radio", "interfering_fading", "rayleigh"));
    radio.path_loss_ref_m = r.number("radio", "pathloss_ref_km", 1.0) * 1e3;
    try {
        radio.validate();
    } catch (const std::invalid_argument& err) {
        r.fail_at("radio", "alpha", err.what());
    }
    out.scenario.radio = radio;
    out.fixed_threshold = SinrThreshold::from_db(r.number("radio", "threshold_db", 0.0));

    const double n_sats = r.required_number("network", "n_sats");
    const long n_channels = r.integer("network", "n_channels", 1);
    try {
        out.scenario.net = NetworkParams(n_sats, static_cast<int>(n_channels));
    } catch (const std::invalid_argument& err) {
        r.fail_at("network", "n_channels", err.what());
    }

    out.walker.inclination_deg = r.number("walker", "inclination_deg", 90.0);
    out.walker.n_planes = static_cast<int>(r.integer("walker", "n_planes", 20));
    out.walker.sats_per_plane = static_cast<int>(r.integer("walker", "sats_per_plane", 36));
    out.walker.phasing = static_cast<int>(r.integer("walker", "phasing", 1));
    out.walker.altitude_m = out.scenario.geom.altitude_m;
    try {
        out.walker.validate();
    } catch (const std::invalid_argument& err) {
        r.fail_at("walker", "inclination_deg", err.what());
    }
    out.user_latitude_deg = r.number("walker", "user_latitude_deg", 0.0);
    if (std::abs(out.user_latitude_deg) > 90.0) {
        r.fail_at("walker", "user_latitude_deg", "|latitude| must be <= 90");
    }

    out.mc.n_trials = r.integer("mc", "n_trials", 100000);
    if (out.mc.n_trials < 1) r.fail_at("mc", "n_trials", "n_trials must be >= 1");
    out.mc.seed = r.unsigned64("mc", "seed", 1);
    out.mc.n_workers = static_cast<int>(r.integer("mc", "n_workers", 1));
    if (out.mc.n_workers < 1) r.fail_at("mc", "n_workers", "n_workers must be >= 1");

    QuadratureSpec quad;
    quad.abs_tol = r.number("numerics", "abs_tol", quad.abs_tol);
    quad.rel_tol = r.number("numerics", "rel_tol", quad.rel_tol);
    quad.max_subdivisions =
        static_cast<int>(r.integer("numerics", "max_subdivisions", quad.max_subdivisions));
    try {
        quad.validate();
    } catch (const std::invalid_argument& err) {
        r.fail_at("numerics", "abs_tol", err.what());
    }
    out.scenario.quad = quad;

    const std::string norm = r.word("numerics", "normalization", "conditional");
    if (norm == "conditional" || norm == "conditional_normalized") {
        out.scenario.normalization = LaplaceNormalization::ConditionalNormalized;
    } else if (norm == "paper_literal" || norm == "literal") {
        out.scenario.normalization = LaplaceNormalization::PaperLiteral;
    } else {
        r.fail_at("numerics", "normalization", "normalization must be conditional or literal");
    }
    const std::string dec = r.word("numerics", "decomposition", "inside");
    if (dec == "inside" || dec == "inside_integral") {
        out.scenario.decomposition = Decomposition::InsideIntegral;
    } else if (dec == "factored" || dec == "factored_outside") {
        out.scenario.decomposition = Decomposition::FactoredOutsideIntegral;
    } else {
        r.fail_at("numerics", "decomposition", "decomposition must be inside or factored");
    }

    const std::string var = r.word("sweep", "variable", "threshold_db");
    if (var == "threshold_db") {
        out.sweep.variable = SweepVariable::ThresholdDb;
    } else if (var == "n_channels") {
        out.sweep.variable = SweepVariable::NChannels;
    } else if (var == "altitude_km") {
        out.sweep.variable = SweepVariable::AltitudeKm;
    } else if (var == "user_latitude_deg") {
        out.sweep.variable = SweepVariable::UserLatitudeDeg;
    } else {
        r.fail_at("sweep", "variable", "unknown sweep variable: " + var);
    }
    out.sweep.values = r.number_list("sweep", "values");

    out.sweep.outputs.clear();
    std::vector<std::string> words = r.word_list("sweep", "outputs");
    if (words.empty()) words = {"analytic_coverage"};
    auto add_output = [&](SweepOutput o) {
        if (std::find(out.sweep.outputs.begin(), out.sweep.outputs.end(), o) ==
            out.sweep.outputs.end()) {
            out.sweep.outputs.push_back(o);
        }
    };
    for (const auto& w : words) {
        if (w == "analytic_coverage") add_output(SweepOutput::AnalyticCoverage);
        else if (w == "analytic_rate") add_output(SweepOutput::AnalyticRate);
        else if (w == "mc_coverage") add_output(SweepOutput::McCoverage);
        else if (w == "mc_rate") add_output(SweepOutput::McRate);
        else r.fail_at("sweep", "outputs", "unknown output: " + w);
    }
    std::sort(out.sweep.outputs.begin(), out.sweep.outputs.end());

    std::vector<std::string> kinds = r.word_list("sweep", "kinds");
    if (kinds.empty()) kinds = {"bpp"};
    out.sweep.kind_bpp = false;
    out.sweep.kind_walker = false;
    for (const auto& k : kinds) {
        if (k == "bpp") out.sweep.kind_bpp = true;
        else if (k == "walker") out.sweep.kind_walker = true;
        else r.fail_at("sweep", "kinds", "unknown constellation kind: " + k);
    }

    if (r.has("sweep", "values")) {
        try {
            out.sweep.validate();
        } catch (const std::invalid_argument& err) {
            r.fail_at("sweep", "values", err.what());
        }
    }
    try {
        out.scenario.validate();
    } catch (const std::invalid_argument& err) {
        r.fail_at("network", "n_sats", err.what());
    }
    return out;
}

LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_config_text(buf.str(), path);
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

const char* fading_word(const FadingModel& f) {
    return f.kind == Fading::Rayleigh ? "rayleigh" : "nonfading";
}

} // namespace

std::string emit_config(const LoadedConfig& cfg) {
    std::ostringstream out;
    const ScenarioConfig& sc = cfg.scenario;
    out << "[geometry]\n";
    out << "earth_radius_km = " << format_double(sc.geom.earth_radius_m / 1e3) << "\n";
    out << "altitude_km = " << format_double(sc.geom.altitude_m / 1e3) << "\n";
    out << "\n[radio]\n";
    out << "p_serve_w = " << format_double(sc.radio.p_serve_w) << "\n";
    out << "p_interf_w = " << format_double(sc.radio.p_interf_w) << "\n";
    out << "noise_dbm = " << format_double(watt_to_dbm(sc.radio.noise_w)) << "\n";
    out << "alpha = " << format_double(sc.radio.alpha) << "\n";
    out << "serving_fading = " << fading_word(sc.radio.serving_fading) << "\n";
    out << "interfering_fading = " << fading_word(sc.radio.interfering_fading) << "\n";
    out << "pathloss_ref_km = " << format_double(sc.radio.path_loss_ref_m / 1e3) << "\n";
    out << "threshold_db = " << format_double(cfg.fixed_threshold.db()) << "\n";
    out << "\n[network]\n";
    out << "n_sats = " << format_double(sc.net.n_sats) << "\n";
    out << "n_channels = " << sc.net.n_channels << "\n";
    out << "\n[walker]\n";
    out << "inclination_deg = " << format_double(cfg.walker.inclination_deg) << "\n";
    out << "n_planes = " << cfg.walker.n_planes << "\n";
    out << "sats_per_plane = " << cfg.walker.sats_per_plane << "\n";
    out << "phasing = " << cfg.walker.phasing << "\n";
    out << "user_latitude_deg = " << format_double(cfg.user_latitude_deg) << "\n";
    out << "\n[mc]\n";
    out << "n_trials = " << cfg.mc.n_trials << "\n";
    out << "seed = " << cfg.mc.seed << "\n";
    out << "n_workers = " << cfg.mc.n_workers << "\n";
    out << "\n[numerics]\n";
    out << "abs_tol = " << format_double(sc.quad.abs_tol) << "\n";
    out << "rel_tol = " << format_double(sc.quad.rel_tol) << "\n";
    out << "max_subdivisions = " << sc.quad.max_subdivisions << "\n";
    out << "normalization = "
        << (sc.normalization == LaplaceNormalization::ConditionalNormalized ? "conditional"
                                                                            : "literal")
        << "\n";
    out << "decomposition = "
        << (sc.decomposition == Decomposition::InsideIntegral ? "inside" : "factored") << "\n";
    out << "\n[sweep]\n";
    const char* var = "threshold_db";
    switch (cfg.sweep.variable) {
        case SweepVariable::ThresholdDb: var = "threshold_db"; break;
        case SweepVariable::NChannels: var = "n_channels"; break;
        case SweepVariable::AltitudeKm: var = "altitude_km"; break;
        case SweepVariable::UserLatitudeDeg: var = "user_latitude_deg"; break;
    }
    out << "variable = " << var << "\n";
    if (!cfg.sweep.values.empty()) {
        out << "values =";
        for (double v : cfg.sweep.values) out << " " << format_double(v);
        out << "\n";
    }
    out << "outputs =";
    for (SweepOutput o : cfg.sweep.outputs) {
        switch (o) {
            case SweepOutput::AnalyticCoverage: out << " analytic_coverage"; break;
            case SweepOutput::AnalyticRate: out << " analytic_rate"; break;
            case SweepOutput::McCoverage: out << " mc_coverage"; break;
            case SweepOutput::McRate: out << " mc_rate"; break;
        }
    }
    out << "\n";
    out << "kinds =";
    if (cfg.sweep.kind_bpp) out << " bpp";
    if (cfg.sweep.kind_walker) out << " walker";
    out << "\n";
    return out.str();
}

std::uint64_t config_fingerprint(const LoadedConfig& cfg) {
    const std::string text = emit_config(cfg);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

} // namespace leocov
