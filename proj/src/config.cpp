#include "sgf/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace sgf {

namespace {

struct Entry {
    std::string value;
    std::size_t line = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

/// Thrown by value parsers; rewrapped with file, line and key.
struct BadValue {
    std::string what;
};

template <typename T>
T parse_integer(std::string_view s) {
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw BadValue{"expected an integer, got \"" + std::string(s) + "\""};
    }
    return v;
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw BadValue{"expected a number, got \"" + std::string(s) + "\""};
    }
    return v;
}

bool parse_bool(std::string_view s) {
    if (s == "true" || s == "1") {
        return true;
    }
    if (s == "false" || s == "0") {
        return false;
    }
    throw BadValue{"expected true or false, got \"" + std::string(s) + "\""};
}

std::vector<int> parse_int_list(std::string_view s) {
    std::vector<int> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(parse_integer<int>(trim(s.substr(0, comma))));
        if (comma == std::string_view::npos) {
            break;
        }
        s.remove_prefix(comma + 1);
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string format_list(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + std::to_string(v[i]);
    }
    return out;
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Key integer_key(std::string name, std::function<T&(RunConfig&)> field) {
    auto get = [field](const RunConfig& c) { return std::to_string(field(const_cast<RunConfig&>(c))); };
    auto set = [field](RunConfig& c, std::string_view v) { field(c) = parse_integer<T>(v); };
    return {std::move(name), set, get};
}

Key double_key(std::string name, std::function<double&(RunConfig&)> field) {
    auto get = [field](const RunConfig& c) { return format_double(field(const_cast<RunConfig&>(c))); };
    auto set = [field](RunConfig& c, std::string_view v) { field(c) = parse_double(v); };
    return {std::move(name), set, get};
}

Key list_key(std::string name, std::function<std::vector<int>&(RunConfig&)> field) {
    auto get = [field](const RunConfig& c) { return format_list(field(const_cast<RunConfig&>(c))); };
    auto set = [field](RunConfig& c, std::string_view v) { field(c) = parse_int_list(v); };
    return {std::move(name), set, get};
}

void add_stcore(std::vector<Key>& keys, const std::string& section,
                stcore::STCoreParams NetworkLayout::*member) {
    auto st = [member](RunConfig& c) -> stcore::STCoreParams& { return c.network.*member; };
    keys.push_back(integer_key<int>(section + ".delta_s", [st](RunConfig& c) -> int& { return st(c).delta_s; }));
    keys.push_back(integer_key<int>(section + ".theta_s", [st](RunConfig& c) -> int& { return st(c).theta_s; }));
    keys.push_back(integer_key<int>(section + ".delta_t", [st](RunConfig& c) -> int& { return st(c).delta_t; }));
    keys.push_back(integer_key<int>(section + ".theta_t", [st](RunConfig& c) -> int& { return st(c).theta_t; }));
    keys.push_back({section + ".signed_sum",
                    [st](RunConfig& c, std::string_view v) { st(c).signed_sum = parse_bool(v); },
                    [st](const RunConfig& c) {
                        return std::string(st(const_cast<RunConfig&>(c)).signed_sum ? "true" : "false");
                    }});
}

void add_bank(std::vector<Key>& keys, const std::string& section, spatial::BankLayout NetworkLayout::*member) {
    auto bank = [member](RunConfig& c) -> spatial::BankLayout& { return c.network.*member; };
    keys.push_back(integer_key<std::uint32_t>(section + ".cols", [bank](RunConfig& c) -> std::uint32_t& { return bank(c).cols; }));
    keys.push_back(integer_key<std::uint32_t>(section + ".rows", [bank](RunConfig& c) -> std::uint32_t& { return bank(c).rows; }));
    keys.push_back(integer_key<std::uint32_t>(section + ".tile_width",
                                              [bank](RunConfig& c) -> std::uint32_t& { return bank(c).tile_width; }));
    keys.push_back(integer_key<std::uint32_t>(section + ".tile_height",
                                              [bank](RunConfig& c) -> std::uint32_t& { return bank(c).tile_height; }));
    keys.push_back(integer_key<int>(section + ".theta_i", [bank](RunConfig& c) -> int& { return bank(c).theta_i; }));
    keys.push_back(integer_key<int>(section + ".theta_a", [bank](RunConfig& c) -> int& { return bank(c).theta_a; }));
}

const std::vector<Key>& key_table() {
    static const std::vector<Key> keys = [] {
        std::vector<Key> k;
        k.push_back(integer_key<std::size_t>("geometry.spikes_per_frame",
                                             [](RunConfig& c) -> std::size_t& { return c.network.spikes_per_frame; }));
        k.push_back({"model.similarity",
                     [](RunConfig& c, std::string_view v) {
                         auto s = parse_similarity(v);
                         if (!s) {
                             throw BadValue{"expected nor or xnor, got \"" + std::string(v) + "\""};
                         }
                         c.network.similarity = *s;
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.network.similarity)); }});
        add_stcore(k, "stcore.a", &NetworkLayout::stcore_a);
        add_stcore(k, "stcore.b", &NetworkLayout::stcore_b);
        add_stcore(k, "stcore.c", &NetworkLayout::stcore_c);
        add_bank(k, "bank.ad", &NetworkLayout::ad);
        add_bank(k, "bank.bc", &NetworkLayout::bc);
        k.push_back(list_key("bank.ef.delta_t", [](RunConfig& c) -> std::vector<int>& { return c.network.ef.delta_t; }));
        k.push_back(list_key("bank.ef.theta_l", [](RunConfig& c) -> std::vector<int>& { return c.network.ef.theta_l; }));
        k.push_back(list_key("bank.ef.theta_te", [](RunConfig& c) -> std::vector<int>& { return c.network.ef.theta_te; }));
        k.push_back(list_key("bank.ef.min_run", [](RunConfig& c) -> std::vector<int>& { return c.network.ef.min_run; }));
        k.push_back(integer_key<std::uint32_t>("bank.ef.overlap",
                                               [](RunConfig& c) -> std::uint32_t& { return c.network.ef.overlap; }));
        k.push_back(integer_key<int>("bank.hijk.delta_t", [](RunConfig& c) -> int& { return c.network.hijk.delta_t; }));
        k.push_back(integer_key<int>("bank.hijk.theta_l", [](RunConfig& c) -> int& { return c.network.hijk.theta_l; }));
        k.push_back(integer_key<int>("bank.hijk.theta_te", [](RunConfig& c) -> int& { return c.network.hijk.theta_te; }));
        k.push_back(integer_key<int>("bank.hijk.min_run", [](RunConfig& c) -> int& { return c.network.hijk.min_run; }));
        k.push_back(integer_key<std::size_t>("pipeline.fifo_capacity", [](RunConfig& c) -> std::size_t& { return c.fifo_capacity; }));
        k.push_back(integer_key<unsigned>("pipeline.jobs", [](RunConfig& c) -> unsigned& { return c.jobs; }));
        k.push_back(double_key("synthetic.noise_density", [](RunConfig& c) -> double& { return c.synthetic.noise_density; }));
        k.push_back(integer_key<std::uint32_t>("synthetic.min_frames",
                                               [](RunConfig& c) -> std::uint32_t& { return c.synthetic.min_frames; }));
        k.push_back(integer_key<std::uint32_t>("synthetic.max_frames",
                                               [](RunConfig& c) -> std::uint32_t& { return c.synthetic.max_frames; }));
        k.push_back(double_key("synthetic.center_jitter", [](RunConfig& c) -> double& { return c.synthetic.center_jitter; }));
        k.push_back(double_key("synthetic.blob_radius", [](RunConfig& c) -> double& { return c.synthetic.blob_radius; }));
        k.push_back(integer_key<std::uint32_t>("synthetic.blob_rate",
                                               [](RunConfig& c) -> std::uint32_t& { return c.synthetic.blob_rate; }));
        k.push_back(integer_key<std::uint64_t>("run.seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }));
        return k;
    }();
    return keys;
}

std::string section_of(const std::string& key) { return key.substr(0, key.rfind('.')); }

std::string format_g(const spatial::SpatialSNNParams& g) {
    return std::to_string(g.region.x) + "," + std::to_string(g.region.y) + "," + std::to_string(g.region.width) +
           "," + std::to_string(g.region.height) + "," + std::to_string(g.theta_i) + "," +
           std::to_string(g.theta_a);
}

spatial::SpatialSNNParams parse_g(const std::string& id, std::string_view v) {
    const auto f = parse_int_list(v);
    if (f.size() != 6) {
        throw BadValue{"expected x,y,width,height,theta_i,theta_a"};
    }
    for (int x : f) {
        if (x < 0) {
            throw BadValue{"values must be non-negative"};
        }
    }
    spatial::SpatialSNNParams p;
    p.feature_id = id;
    p.region = {static_cast<std::uint32_t>(f[0]), static_cast<std::uint32_t>(f[1]),
                static_cast<std::uint32_t>(f[2]), static_cast<std::uint32_t>(f[3])};
    p.theta_i = f[4];
    p.theta_a = f[5];
    p.archetype = spatial::SpatialArchetype::LocationSpecific;
    return p;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& source) {
    std::map<std::string, Entry> entries;
    std::vector<std::string> order;
    std::string section;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError(where + ": malformed section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where + ": expected key = value");
        }
        const std::string name = std::string(trim(line.substr(0, eq)));
        if (name.empty()) {
            throw ConfigError(where + ": missing key before '='");
        }
        const std::string key = section.empty() ? name : section + "." + name;
        if (entries.count(key)) {
            throw ConfigError(where + ": " + key + ": duplicate key (first set on line " +
                              std::to_string(entries[key].line) + ")");
        }
        entries[key] = {std::string(trim(line.substr(eq + 1))), line_no};
        order.push_back(key);
    }

    auto fail = [&](const std::string& key, const std::string& what) {
        return ConfigError(source + ":" + std::to_string(entries.at(key).line) + ": " + key + ": " + what);
    };

    // Geometry first: bank defaults scale with it.
    Geometry geometry{64, 64};
    for (auto [key, field] : {std::pair{"geometry.width", &geometry.width}, std::pair{"geometry.height", &geometry.height}}) {
        if (auto it = entries.find(key); it != entries.end()) {
            try {
                *field = parse_integer<std::uint32_t>(it->second.value);
            } catch (const BadValue& e) {
                throw fail(key, e.what);
            }
            if (*field == 0 || *field > 128) {
                throw fail(key, "must be between 1 and 128");
            }
        }
    }
    RunConfig config;
    config.network = default_layout(geometry);
    config.synthetic.geometry = geometry;

    bool g_seen = false;
    for (const auto& key : order) {
        if (key == "geometry.width" || key == "geometry.height") {
            continue;
        }
        const std::string& value = entries.at(key).value;
        try {
            if (key.starts_with("bank.g.")) {
                if (!g_seen) {
                    config.network.g.clear();
                    g_seen = true;
                }
                config.network.g.push_back(parse_g(key.substr(7), value));
                continue;
            }
            const auto& table = key_table();
            const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == key; });
            if (it == table.end()) {
                throw fail(key, "unknown key");
            }
            it->set(config, value);
        } catch (const BadValue& e) {
            throw fail(key, e.what);
        }
    }

    // Semantic checks, reported against the key that caused them.
    auto check = [&](bool ok, const std::string& key, const std::string& what) {
        if (!ok) {
            if (entries.count(key)) {
                throw fail(key, what);
            }
            throw ConfigError(source + ": " + key + ": " + what);
        }
    };
    const auto& s = config.synthetic;
    check(s.noise_density >= 0.0 && s.noise_density <= 1.0, "synthetic.noise_density", "must be in [0, 1]");
    check(s.min_frames >= 1, "synthetic.min_frames", "must be >= 1");
    check(s.max_frames >= s.min_frames, "synthetic.max_frames", "must be >= synthetic.min_frames");
    check(s.blob_radius > 0.0, "synthetic.blob_radius", "must be > 0");
    check(s.center_jitter >= 0.0, "synthetic.center_jitter", "must be >= 0");
    check(config.fifo_capacity >= 1, "pipeline.fifo_capacity", "must be >= 1");
    check(config.jobs >= 1, "pipeline.jobs", "must be >= 1");
    for (const char* list : {"bank.ef.delta_t", "bank.ef.theta_l", "bank.ef.theta_te", "bank.ef.min_run"}) {
        const auto& table = key_table();
        const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == list; });
        check(!it->get(config).empty(), list, "list must not be empty");
    }
    for (const auto& [key, st] : {std::pair{"stcore.a", &config.network.stcore_a},
                                  std::pair{"stcore.b", &config.network.stcore_b},
                                  std::pair{"stcore.c", &config.network.stcore_c}}) {
        try {
            stcore::validate(*st);
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            const std::string field = msg.substr(0, msg.find(':'));
            check(false, std::string(key) + "." + field, msg.substr(msg.find(':') + 2));
        }
    }
    try {
        config.build();
    } catch (const Error& e) {
        // Bank errors name a feature id; point at the section that made it.
        const std::string msg = e.what();
        std::string bank;
        switch (msg.empty() ? ' ' : msg.front()) {
            case 'A': case 'D': bank = "bank.ad"; break;
            case 'B': case 'C': bank = "bank.bc"; break;
            case 'G': bank = "bank.g"; break;
            case 'E': case 'F': bank = "bank.ef"; break;
            case 'H': case 'I': case 'J': case 'K': bank = "bank.hijk"; break;
            default: break;
        }
        throw ConfigError(source + ": " + (bank.empty() ? "" : bank + ".") + msg);
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open configuration file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string format_config(const RunConfig& config) {
    std::ostringstream out;
    out << "[geometry]\n";
    out << "width = " << config.network.geometry.width << "\n";
    out << "height = " << config.network.geometry.height << "\n";
    std::string section = "geometry";
    for (const auto& k : key_table()) {
        const std::string sec = section_of(k.name);
        if (sec != section) {
            if (section == "bank.bc") {
                out << "\n[bank.g]\n";
                for (const auto& g : config.network.g) {
                    out << g.feature_id << " = " << format_g(g) << "\n";
                }
            }
            out << "\n[" << sec << "]\n";
            section = sec;
        }
        out << k.name.substr(sec.size() + 1) << " = " << k.get(config) << "\n";
    }
    return out.str();
}

}  // namespace sgf
