#include <sspa/harness.hpp>

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <system_error>

namespace sspa::harness {

namespace {

std::string_view trim(std::string_view s) noexcept
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text)
{
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(fmt::format("{}: cannot parse '{}' as a number", key, text));
    }
    return value;
}

std::vector<double> parse_real_list(std::string_view key, std::string_view text)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? text.size() - pos
                                                                             : comma - pos);
        out.push_back(parse_number<double>(key, item));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

std::array<double, 4> parse_four(std::string_view key, std::string_view text)
{
    const auto v = parse_real_list(key, text);
    if (v.size() != 4) {
        throw ConfigError(fmt::format("{}: expected 4 comma-separated values, got {}", key,
                                      v.size()));
    }
    return {v[0], v[1], v[2], v[3]};
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

const std::map<std::string_view, Setter>& setters()
{
    static const std::map<std::string_view, Setter> table{
        {"modulation",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             const auto m = modem::parse_modulation(trim(v));
             if (!m) {
                 throw ConfigError(fmt::format("{}: unknown modulation '{}' "
                                               "(expected bpsk, qpsk, psk8 or qam16)",
                                               k, trim(v)));
             }
             c.modulation = *m;
         }},
        {"symbols", [](ExperimentConfig& c, auto k, auto v) {
             c.n_symbols = parse_number<std::size_t>(k, v);
         }},
        {"sps", [](ExperimentConfig& c, auto k, auto v) {
             c.pulse.sps = parse_number<std::size_t>(k, v);
         }},
        {"rolloff", [](ExperimentConfig& c, auto k, auto v) {
             c.pulse.rolloff = parse_number<double>(k, v);
         }},
        {"span", [](ExperimentConfig& c, auto k, auto v) {
             c.pulse.span_symbols = parse_number<std::size_t>(k, v);
         }},
        {"drive", [](ExperimentConfig& c, auto k, auto v) { c.drive = parse_number<double>(k, v); }},
        {"pa",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             v = trim(v);
             if (v == "ghorbani") {
                 c.amplifier = AmplifierKind::Ghorbani;
             } else if (v == "poly") {
                 c.amplifier = AmplifierKind::Polynomial;
             } else {
                 throw ConfigError(fmt::format("{}: expected ghorbani or poly, got '{}'", k, v));
             }
         }},
        {"pa-poly",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             try {
                 c.poly.a = parse_complex_list(v);
             } catch (const ConfigError& e) {
                 throw ConfigError(fmt::format("{}: {}", k, e.what()));
             }
         }},
        {"ghorbani-x", [](ExperimentConfig& c, auto k, auto v) { c.ghorbani.x = parse_four(k, v); }},
        {"ghorbani-y", [](ExperimentConfig& c, auto k, auto v) { c.ghorbani.y = parse_four(k, v); }},
        {"phase-unit",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             v = trim(v);
             if (v == "degrees") {
                 c.ghorbani.phase_unit = pa::PhaseUnit::Degrees;
             } else if (v == "radians") {
                 c.ghorbani.phase_unit = pa::PhaseUnit::Radians;
             } else {
                 throw ConfigError(fmt::format("{}: expected degrees or radians, got '{}'", k, v));
             }
         }},
        {"dpd-order", [](ExperimentConfig& c, auto k, auto v) {
             c.dpd.order_k = parse_number<std::size_t>(k, v);
         }},
        {"mu", [](ExperimentConfig& c, auto k, auto v) { c.dpd.mu = parse_number<double>(k, v); }},
        {"eps", [](ExperimentConfig& c, auto k, auto v) { c.dpd.eps = parse_number<double>(k, v); }},
        {"passes", [](ExperimentConfig& c, auto k, auto v) {
             c.dpd.passes = parse_number<std::size_t>(k, v);
         }},
        {"gate", [](ExperimentConfig& c, auto k, auto v) {
             c.dpd.min_amplitude_fraction = parse_number<double>(k, v);
         }},
        {"target-gain", [](ExperimentConfig& c, auto k, auto v) {
             c.dpd.target_gain = parse_number<double>(k, v);
         }},
        {"segment-len", [](ExperimentConfig& c, auto k, auto v) {
             c.welch.segment_len = parse_number<std::size_t>(k, v);
         }},
        {"overlap", [](ExperimentConfig& c, auto k, auto v) {
             c.welch.overlap_fraction = parse_number<double>(k, v);
         }},
        {"channel-width", [](ExperimentConfig& c, auto k, auto v) {
             auto p = c.channel_plan();
             p.channel_width = parse_number<double>(k, v);
             c.plan = p;
         }},
        {"adjacent-offset", [](ExperimentConfig& c, auto k, auto v) {
             auto p = c.channel_plan();
             p.adjacent_offset = parse_number<double>(k, v);
             c.plan = p;
         }},
        {"seed-train", [](ExperimentConfig& c, auto k, auto v) {
             c.seed_train = parse_number<std::uint64_t>(k, v);
         }},
        {"seed-eval", [](ExperimentConfig& c, auto k, auto v) {
             c.seed_eval = parse_number<std::uint64_t>(k, v);
         }},
        {"bins", [](ExperimentConfig& c, auto k, auto v) {
             c.curve_bins = parse_number<std::size_t>(k, v);
         }},
        {"noise", [](ExperimentConfig& c, auto k, auto v) {
             c.identify_noise = parse_number<double>(k, v);
         }},
        {"truth",
         [](ExperimentConfig& c, std::string_view k, std::string_view v) {
             try {
                 c.identify_truth = parse_complex_list(v);
             } catch (const ConfigError& e) {
                 throw ConfigError(fmt::format("{}: {}", k, e.what()));
             }
         }},
        {"identify-order", [](ExperimentConfig& c, auto k, auto v) {
             const auto n = parse_number<std::size_t>(k, v);
             if (n == 0) {
                 throw ConfigError(fmt::format("{}: must be >= 1", k));
             }
             c.identify_order = n;
         }},
        {"out", [](ExperimentConfig& c, auto, auto v) {
             c.outputs.out = std::filesystem::path(std::string(trim(v)));
         }},
        {"spectra-out", [](ExperimentConfig& c, auto, auto v) {
             c.outputs.spectra = std::filesystem::path(std::string(trim(v)));
         }},
    };
    return table;
}

} // namespace

std::vector<cplx> parse_complex_list(std::string_view text)
{
    const auto v = parse_real_list("coefficients", text);
    if (v.size() % 2 != 0) {
        throw ConfigError(fmt::format("expected re,im pairs, got {} values", v.size()));
    }
    std::vector<cplx> out;
    for (std::size_t i = 0; i < v.size(); i += 2) {
        out.emplace_back(v[i], v[i + 1]);
    }
    return out;
}

const std::vector<std::string_view>& setting_keys()
{
    static const std::vector<std::string_view> keys = [] {
        std::vector<std::string_view> k;
        for (const auto& [name, _] : setters()) {
            k.push_back(name);
        }
        return k;
    }();
    return keys;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value)
{
    const auto it = setters().find(trim(key));
    if (it == setters().end()) {
        throw ConfigError(fmt::format("unknown setting '{}'", trim(key)));
    }
    it->second(cfg, it->first, value);
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(fmt::format("config line {}: missing key", line_no));
        }
        out.emplace_back(std::string(key), std::string(value));
    }
    return out;
}

void load_config_file(ExperimentConfig& cfg, const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    for (const auto& [k, v] : parse_config_text(ss.str())) {
        apply_setting(cfg, k, v);
    }
}

} // namespace sspa::harness
