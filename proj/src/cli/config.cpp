#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pauliflow/cli.hpp"
#include "pauliflow/constants.hpp"
#include "pauliflow/errors.hpp"

namespace pauliflow {

ConfigError::ConfigError(std::size_t line, std::string key, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", key '" + key + "': " + what
                                  : "key '" + key + "': " + what),
      line_(line),
      key_(std::move(key))
{
}

namespace {

struct Value {
    enum class Kind { Number, String, Array };
    Kind kind = Kind::Number;
    double number = 0.0;
    std::string text;
    std::vector<Value> items;
};

struct Entry {
    Value value;
    std::size_t line = 0;
};

// One [section] or one [[packet]] block.
struct Table {
    std::string name;
    std::size_t line = 0;
    std::map<std::string, Entry> entries;
};

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool is_bare_key(std::string_view key)
{
    return !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-';
    });
}

class LineParser {
public:
    LineParser(std::string_view text, std::size_t line, std::string key) : s_(text), line_(line), key_(std::move(key)) {}

    Value parse_value()
    {
        skip_space();
        if (pos_ >= s_.size()) {
            fail("missing value");
        }
        const char c = s_[pos_];
        if (c == '"') {
            return parse_string();
        }
        if (c == '[') {
            return parse_array();
        }
        return parse_number();
    }

    void expect_end()
    {
        skip_space();
        if (pos_ < s_.size() && s_[pos_] != '#') {
            fail("unexpected text after value");
        }
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(line_, key_, what); }

    void skip_space()
    {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) {
            ++pos_;
        }
    }

    Value parse_string()
    {
        Value v;
        v.kind = Value::Kind::String;
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            char c = s_[pos_++];
            if (c == '\\') {
                if (pos_ >= s_.size()) {
                    break;
                }
                c = s_[pos_++];
                switch (c) {
                case '"':
                case '\\': break;
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                default: fail(std::string("unsupported escape \\") + c);
                }
            }
            v.text.push_back(c);
        }
        if (pos_ >= s_.size()) {
            fail("unterminated string");
        }
        ++pos_;
        return v;
    }

    Value parse_array()
    {
        Value v;
        v.kind = Value::Kind::Array;
        ++pos_;
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            return v;
        }
        while (true) {
            Value item = parse_value();
            if (item.kind == Value::Kind::Array) {
                fail("nested arrays are not supported");
            }
            v.items.push_back(std::move(item));
            skip_space();
            if (pos_ >= s_.size()) {
                fail("unterminated array");
            }
            if (s_[pos_] == ',') {
                ++pos_;
                skip_space();
                if (pos_ < s_.size() && s_[pos_] == ']') {
                    ++pos_;
                    return v;
                }
                continue;
            }
            if (s_[pos_] == ']') {
                ++pos_;
                return v;
            }
            fail("expected ',' or ']' in array");
        }
    }

    Value parse_number()
    {
        std::size_t end = pos_;
        while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && s_[end] != '#' && s_[end] != ' ' &&
               s_[end] != '\t' && s_[end] != '\r') {
            ++end;
        }
        std::string_view token = s_.substr(pos_, end - pos_);
        if (!token.empty() && token.front() == '+') {
            token.remove_prefix(1);
        }
        Value v;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v.number);
        if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v.number)) {
            fail("expected a number, string or array, got '" + std::string(s_.substr(pos_, end - pos_)) + "'");
        }
        pos_ = end;
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::string key_;
};

std::vector<Table> tokenize(std::string_view text)
{
    std::vector<Table> tables(1); // root table
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        const std::string_view raw = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        if (line.front() == '[') {
            const bool array_table = line.size() > 1 && line[1] == '[';
            const std::string_view close = array_table ? "]]" : "]";
            const std::size_t open_len = array_table ? 2 : 1;
            const std::size_t close_at = line.find(close, open_len);
            if (close_at == std::string_view::npos) {
                throw ConfigError(line_no, std::string(line), "unterminated table header");
            }
            const std::string_view rest = trim(line.substr(close_at + close.size()));
            if (!rest.empty() && rest.front() != '#') {
                throw ConfigError(line_no, std::string(line), "unexpected text after table header");
            }
            const std::string name(trim(line.substr(open_len, close_at - open_len)));
            if (array_table && name != "packet") {
                throw ConfigError(line_no, name, "unknown array of tables (only [[packet]] is allowed)");
            }
            if (!array_table && name == "packet") {
                throw ConfigError(line_no, name, "packets are declared with [[packet]]");
            }
            if (!array_table) {
                for (const auto& t : tables) {
                    if (t.name == name) {
                        throw ConfigError(line_no, name, "duplicate section");
                    }
                }
            }
            tables.push_back(Table{name, line_no, {}});
        } else {
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError(line_no, std::string(line), "expected 'key = value'");
            }
            const std::string key(trim(line.substr(0, eq)));
            if (!is_bare_key(key)) {
                throw ConfigError(line_no, key, "invalid key");
            }
            LineParser parser(line.substr(eq + 1), line_no, key);
            Entry entry{parser.parse_value(), line_no};
            parser.expect_end();
            if (!tables.back().entries.emplace(key, std::move(entry)).second) {
                throw ConfigError(line_no, key, "duplicate key");
            }
        }
        if (end == text.size()) {
            break;
        }
    }
    return tables;
}

// Typed access to one table; every key read is marked, leftovers are rejected.
class Reader {
public:
    explicit Reader(const Table& table) : table_(table) {}

    const Entry* find(const std::string& key)
    {
        const auto it = table_.entries.find(key);
        if (it == table_.entries.end()) {
            return nullptr;
        }
        used_.insert(key);
        return &it->second;
    }

    std::optional<double> number(const std::string& key)
    {
        const Entry* e = find(key);
        if (e == nullptr) {
            return std::nullopt;
        }
        if (e->value.kind != Value::Kind::Number) {
            throw ConfigError(e->line, key, "expected a number");
        }
        return e->value.number;
    }

    std::optional<double> positive(const std::string& key)
    {
        const auto v = number(key);
        if (v && !(*v > 0.0)) {
            throw ConfigError(line_of(key), key, "must be > 0");
        }
        return v;
    }

    std::optional<std::size_t> count(const std::string& key, std::size_t minimum)
    {
        const auto v = number(key);
        if (!v) {
            return std::nullopt;
        }
        if (*v != std::floor(*v) || *v < static_cast<double>(minimum) || *v > 1e15) {
            throw ConfigError(line_of(key), key, "must be an integer >= " + std::to_string(minimum));
        }
        return static_cast<std::size_t>(*v);
    }

    std::optional<std::string> string(const std::string& key)
    {
        const Entry* e = find(key);
        if (e == nullptr) {
            return std::nullopt;
        }
        if (e->value.kind != Value::Kind::String) {
            throw ConfigError(e->line, key, "expected a string");
        }
        return e->value.text;
    }

    std::optional<std::vector<double>> numbers(const std::string& key)
    {
        const Entry* e = find(key);
        if (e == nullptr) {
            return std::nullopt;
        }
        if (e->value.kind != Value::Kind::Array) {
            throw ConfigError(e->line, key, "expected an array of numbers");
        }
        std::vector<double> out;
        for (const auto& item : e->value.items) {
            if (item.kind != Value::Kind::Number) {
                throw ConfigError(e->line, key, "expected an array of numbers");
            }
            out.push_back(item.number);
        }
        return out;
    }

    std::optional<std::vector<std::string>> strings(const std::string& key)
    {
        const Entry* e = find(key);
        if (e == nullptr) {
            return std::nullopt;
        }
        if (e->value.kind != Value::Kind::Array) {
            throw ConfigError(e->line, key, "expected an array of strings");
        }
        std::vector<std::string> out;
        for (const auto& item : e->value.items) {
            if (item.kind != Value::Kind::String) {
                throw ConfigError(e->line, key, "expected an array of strings");
            }
            out.push_back(item.text);
        }
        return out;
    }

    std::size_t line_of(const std::string& key) const
    {
        const auto it = table_.entries.find(key);
        return it == table_.entries.end() ? table_.line : it->second.line;
    }

    std::size_t table_line() const { return table_.line; }

    void reject_unknown() const
    {
        for (const auto& [key, entry] : table_.entries) {
            if (used_.count(key) == 0) {
                const std::string where = table_.name.empty() ? "top level" : "[" + table_.name + "]";
                throw ConfigError(entry.line, key, "unknown key in " + where);
            }
        }
    }

private:
    const Table& table_;
    std::set<std::string> used_;
};

Spin parse_spin(const std::string& text, std::size_t line)
{
    const std::string s = lower(text);
    if (s == "up") {
        return Spin::Up;
    }
    if (s == "down") {
        return Spin::Down;
    }
    throw ConfigError(line, "spin", "expected \"up\" or \"down\", got \"" + text + "\"");
}

GaussianPacket read_packet(Reader& r)
{
    GaussianPacket p;
    const auto x0 = r.number("x0_nm");
    const auto sigma = r.number("sigma_nm");
    const auto spin = r.string("spin");
    if (!x0) {
        throw ConfigError(r.table_line(), "x0_nm", "required in [[packet]]");
    }
    if (!sigma) {
        throw ConfigError(r.table_line(), "sigma_nm", "required in [[packet]]");
    }
    if (!spin) {
        throw ConfigError(r.table_line(), "spin", "required in [[packet]]");
    }
    if (!(*sigma > 0.0)) {
        throw ConfigError(r.line_of("sigma_nm"), "sigma_nm", "packet width must be > 0");
    }
    p.x0 = *x0 * kNanometre;
    p.sigma = *sigma * kNanometre;
    p.k0 = r.number("k0_per_nm").value_or(0.0) / kNanometre;
    p.spin = parse_spin(*spin, r.line_of("spin"));
    r.reject_unknown();
    return p;
}

void read_sweep(Reader& r, ScenarioConfig& cfg, std::size_t n)
{
    const auto index = r.count("particle_index", 1);
    const auto from = r.number("from_nm");
    const auto to = r.number("to_nm");
    const auto steps = r.count("steps", 1);
    const auto d_values = r.numbers("d_values");
    const auto x_probe = r.number("x_probe_nm");
    r.reject_unknown();

    const bool positional = index || from || to || steps;
    const bool distance = d_values || x_probe;
    if (positional && distance) {
        const std::string key = d_values ? "d_values" : "x_probe_nm";
        throw ConfigError(r.line_of(key), key, "a sweep is either positional (particle_index, from_nm, to_nm, "
                                               "steps) or by distance (d_values, x_probe_nm), not both");
    }
    if (distance) {
        DistanceSweepSpec spec;
        spec.x_probe = x_probe ? *x_probe * kNanometre : cfg.packets.front().x0;
        if (d_values) {
            if (d_values->empty()) {
                throw ConfigError(r.line_of("d_values"), "d_values", "must not be empty");
            }
            for (std::size_t k = 0; k < d_values->size(); ++k) {
                if (!((*d_values)[k] >= 0.0) || (k > 0 && !((*d_values)[k] > (*d_values)[k - 1]))) {
                    throw ConfigError(r.line_of("d_values"), "d_values", "must be >= 0 and strictly increasing");
                }
            }
            spec.distances = *d_values;
        }
        cfg.distance_sweep = spec;
        cfg.position_sweep.reset();
        return;
    }
    PositionSweepSpec spec;
    if (index) {
        if (*index > n) {
            throw ConfigError(r.line_of("particle_index"), "particle_index",
                              "must be between 1 and the number of packets (" + std::to_string(n) + ")");
        }
        spec.particle = *index - 1;
    }
    if (from) {
        spec.from = *from * kNanometre;
    }
    if (to) {
        spec.to = *to * kNanometre;
    }
    if (steps) {
        spec.steps = *steps;
    }
    if (spec.steps > 1 && !(spec.to > spec.from)) {
        throw ConfigError(r.line_of("to_nm"), "to_nm", "must be greater than from_nm");
    }
    cfg.position_sweep = spec;
    cfg.distance_sweep.reset();
}

void read_limits(Reader& r, Limits& limits)
{
    if (const auto v = r.count("permsum_max_n", 1)) {
        limits.permsum_max_n = *v;
    }
    if (const auto v = r.count("assignment_max", 1)) {
        limits.assignment_max = *v;
    }
    if (const auto v = r.count("bruteforce_norm_max_n", 1)) {
        limits.bruteforce_norm_max_n = *v;
    }
    if (const auto v = r.number("epsilon_node_log")) {
        if (!(*v < 0.0)) {
            throw ConfigError(r.line_of("epsilon_node_log"), "epsilon_node_log", "must be < 0");
        }
        limits.epsilon_node_log = *v;
    }
    r.reject_unknown();
}

void read_trajectory(Reader& r, TrajectorySpec& spec, std::size_t n)
{
    if (const auto v = r.positive("dt_fs")) {
        spec.dt = *v * kFemtosecond;
    }
    if (const auto v = r.positive("t_max_fs")) {
        spec.t_max = *v * kFemtosecond;
    }
    if (const auto v = r.string("method")) {
        const std::string m = lower(*v);
        if (m == "exact") {
            spec.method = VelocityMethod::Exact;
        } else if (m == "factorized") {
            spec.method = VelocityMethod::Factorized;
        } else {
            throw ConfigError(r.line_of("method"), "method", "expected \"exact\" or \"factorized\"");
        }
    }
    if (const auto v = r.numbers("offsets_sigma")) {
        if (v->size() != n) {
            throw ConfigError(r.line_of("offsets_sigma"), "offsets_sigma",
                              "needs one entry per packet (" + std::to_string(n) + ")");
        }
        spec.offsets_sigma = *v;
    }
    r.reject_unknown();
}

void read_metric(Reader& r, ScenarioConfig& cfg)
{
    if (const auto v = r.positive("position_scale")) {
        cfg.metric.position_scale = *v;
    }
    if (const auto v = r.positive("wavevector_scale")) {
        cfg.metric.wavevector_scale = *v;
    }
    if (const auto v = r.string("geometry")) {
        const std::string g = lower(*v);
        if (g == "diagonal") {
            cfg.geometry = GeometryRule::Diagonal;
        } else if (g == "axis") {
            cfg.geometry = GeometryRule::Axis;
        } else if (g == "split") {
            cfg.geometry = GeometryRule::Split;
        } else {
            throw ConfigError(r.line_of("geometry"), "geometry", "expected \"diagonal\", \"axis\" or \"split\"");
        }
    }
    r.reject_unknown();
}

void read_methods(Reader& r, MethodSet& methods)
{
    const auto names = r.strings("methods");
    if (!names) {
        return;
    }
    const std::size_t line = r.line_of("methods");
    if (names->empty()) {
        throw ConfigError(line, "methods", "must list at least one method");
    }
    methods = MethodSet{false, false, false};
    for (const auto& name : *names) {
        const std::string m = lower(name);
        bool* flag = m == "exact" ? &methods.exact
            : m == "factorized"   ? &methods.factorized
            : m == "independent"  ? &methods.independent
                                  : nullptr;
        if (flag == nullptr) {
            throw ConfigError(line, "methods", "unknown method \"" + name + "\"");
        }
        if (*flag) {
            throw ConfigError(line, "methods", "method \"" + name + "\" listed twice");
        }
        *flag = true;
    }
}

std::string quoted(std::string_view s)
{
    return "\"" + std::string(s) + "\"";
}

} // namespace

PhysicalConstants ScenarioConfig::constants() const
{
    PhysicalConstants c;
    c.mass = kElectronMass * mass_ratio;
    return c;
}

ManyBodySystem ScenarioConfig::system() const
{
    return ManyBodySystem(packets, constants());
}

ClusterTemplate ScenarioConfig::cluster() const
{
    ClusterTemplate c;
    c.probe = packets.at(0);
    for (const auto& p : packets) {
        c.spin_pattern.push_back(p.spin);
    }
    c.geometry = geometry;
    c.metric = metric;
    c.constants = constants();
    return c;
}

std::string ScenarioConfig::echo() const
{
    std::ostringstream out;
    out << "mass = " << format_double(mass_ratio) << '\n';
    out << "time_fs = " << format_double(t / kFemtosecond) << '\n';
    out << "methods = [";
    const char* sep = "";
    for (const auto& [on, name] : {std::pair{methods.exact, "exact"}, std::pair{methods.factorized, "factorized"},
                                   std::pair{methods.independent, "independent"}}) {
        if (on) {
            out << sep << quoted(name);
            sep = ", ";
        }
    }
    out << "]\n";
    for (const auto& p : packets) {
        out << "\n[[packet]]\n"
            << "x0_nm = " << format_double(p.x0 / kNanometre) << '\n'
            << "k0_per_nm = " << format_double(p.k0 * kNanometre) << '\n'
            << "sigma_nm = " << format_double(p.sigma / kNanometre) << '\n'
            << "spin = " << quoted(to_string(p.spin)) << '\n';
    }
    if (position_sweep && !distance_sweep) {
        out << "\n[sweep]\n"
            << "particle_index = " << position_sweep->particle + 1 << '\n'
            << "from_nm = " << format_double(position_sweep->from / kNanometre) << '\n'
            << "to_nm = " << format_double(position_sweep->to / kNanometre) << '\n'
            << "steps = " << position_sweep->steps << '\n';
    } else if (distance_sweep && !position_sweep) {
        out << "\n[sweep]\nd_values = [";
        for (std::size_t k = 0; k < distance_sweep->distances.size(); ++k) {
            out << (k > 0 ? ", " : "") << format_double(distance_sweep->distances[k]);
        }
        out << "]\nx_probe_nm = " << format_double(distance_sweep->x_probe / kNanometre) << '\n';
    }
    out << "\n[limits]\n"
        << "permsum_max_n = " << limits.permsum_max_n << '\n'
        << "assignment_max = " << limits.assignment_max << '\n'
        << "bruteforce_norm_max_n = " << limits.bruteforce_norm_max_n << '\n'
        << "epsilon_node_log = " << format_double(limits.epsilon_node_log) << '\n';
    out << "\n[trajectory]\n"
        << "dt_fs = " << format_double(trajectory.dt / kFemtosecond) << '\n'
        << "t_max_fs = " << format_double(trajectory.t_max / kFemtosecond) << '\n'
        << "method = " << quoted(to_string(trajectory.method)) << '\n';
    if (!trajectory.offsets_sigma.empty()) {
        out << "offsets_sigma = [";
        for (std::size_t k = 0; k < trajectory.offsets_sigma.size(); ++k) {
            out << (k > 0 ? ", " : "") << format_double(trajectory.offsets_sigma[k]);
        }
        out << "]\n";
    }
    out << "\n[metric]\n"
        << "position_scale = " << format_double(metric.position_scale) << '\n'
        << "wavevector_scale = " << format_double(metric.wavevector_scale) << '\n'
        << "geometry = " << quoted(to_string(geometry)) << '\n';
    return out.str();
}

ScenarioConfig parse_config(std::string_view text)
{
    const std::vector<Table> tables = tokenize(text);
    ScenarioConfig cfg;

    Reader root(tables.front());
    if (const auto v = root.positive("mass")) {
        cfg.mass_ratio = *v;
    }
    if (const auto v = root.number("time_fs")) {
        if (*v < 0.0) {
            throw ConfigError(root.line_of("time_fs"), "time_fs", "must be >= 0");
        }
        cfg.t = *v * kFemtosecond;
    }
    read_methods(root, cfg.methods);
    root.reject_unknown();

    for (const auto& table : tables) {
        if (table.name == "packet") {
            Reader r(table);
            cfg.packets.push_back(read_packet(r));
        }
    }
    if (cfg.packets.empty()) {
        throw ConfigError(0, "packet", "at least one [[packet]] is required");
    }

    cfg.position_sweep = PositionSweepSpec{};
    cfg.distance_sweep = DistanceSweepSpec{};
    cfg.distance_sweep->x_probe = cfg.packets.front().x0;

    for (const auto& table : tables) {
        if (table.name.empty() || table.name == "packet") {
            continue;
        }
        Reader r(table);
        if (table.name == "sweep") {
            read_sweep(r, cfg, cfg.packets.size());
        } else if (table.name == "limits") {
            read_limits(r, cfg.limits);
        } else if (table.name == "trajectory") {
            read_trajectory(r, cfg.trajectory, cfg.packets.size());
        } else if (table.name == "metric") {
            read_metric(r, cfg);
        } else {
            throw ConfigError(table.line, table.name, "unknown section");
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

ScenarioConfig default_scenario()
{
    const ClusterTemplate cluster = default_cluster_template();
    ScenarioConfig cfg;
    cfg.packets = build_cluster(cluster, default_distances().front()).packets();
    cfg.geometry = cluster.geometry;
    cfg.metric = cluster.metric;
    cfg.position_sweep = PositionSweepSpec{};
    cfg.distance_sweep = DistanceSweepSpec{};
    cfg.distance_sweep->x_probe = cluster.probe.x0;
    return cfg;
}

} // namespace pauliflow
