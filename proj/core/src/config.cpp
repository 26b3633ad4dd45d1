#include "heatmem/config.hpp"

#include "heatmem/nonlinearity.hpp"
#include "heatmem/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace heatmem {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::optional<double> to_double(const std::string& s)
{
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
        return std::nullopt;
    return v;
}

template <class Int>
std::optional<Int> to_integer(const std::string& s)
{
    Int v{};
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        return std::nullopt;
    return v;
}

std::optional<std::vector<double>> to_list(const std::string& s)
{
    std::string spaced = s;
    for (char& c : spaced)
        if (c == ',')
            c = ' ';
    std::istringstream in(spaced);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        const auto v = to_double(token);
        if (!v)
            return std::nullopt;
        out.push_back(*v);
    }
    return out;
}

std::optional<bool> to_bool(const std::string& s)
{
    if (s == "true" || s == "yes" || s == "on" || s == "1")
        return true;
    if (s == "false" || s == "no" || s == "off" || s == "0")
        return false;
    return std::nullopt;
}

std::string join(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? " " : "") + format_double(v[i]);
    return out;
}

// Each setter returns an error message, or nothing on success.
using Setter = std::function<std::optional<std::string>(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct KeySpec {
    Setter set;
    Getter get;
};

template <class Member>
KeySpec real_field(Member member)
{
    return {[member](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                const auto x = to_double(v);
                if (!x)
                    return "expected a real number, got '" + v + "'";
                member(c) = *x;
                return std::nullopt;
            },
            [member](const RunConfig& c) { return format_double(member(c)); }};
}

template <class Int, class Member>
KeySpec int_field(Member member)
{
    return {[member](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                const auto x = to_integer<Int>(v);
                if (!x)
                    return "expected an integer, got '" + v + "'";
                member(c) = *x;
                return std::nullopt;
            },
            [member](const RunConfig& c) { return std::to_string(member(c)); }};
}

template <class Member>
KeySpec list_field(Member member)
{
    return {[member](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                const auto x = to_list(v);
                if (!x)
                    return "expected a list of real numbers, got '" + v + "'";
                member(c) = *x;
                return std::nullopt;
            },
            [member](const RunConfig& c) { return join(member(c)); }};
}

template <class Member>
KeySpec bool_field(Member member)
{
    return {[member](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                const auto x = to_bool(v);
                if (!x)
                    return "expected true or false, got '" + v + "'";
                member(c) = *x;
                return std::nullopt;
            },
            [member](const RunConfig& c) { return std::string(member(c) ? "true" : "false"); }};
}

template <class Enum, class Member>
KeySpec enum_field(Member member, std::vector<std::pair<std::string, Enum>> names)
{
    return {[member, names](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                std::string options;
                for (const auto& [name, value] : names) {
                    if (name == v) {
                        member(c) = value;
                        return std::nullopt;
                    }
                    options += (options.empty() ? "" : ", ") + name;
                }
                return "expected one of {" + options + "}, got '" + v + "'";
            },
            [member, names](const RunConfig& c) {
                for (const auto& [name, value] : names)
                    if (member(c) == value)
                        return name;
                return std::string{};
            }};
}

template <class Member>
KeySpec string_field(Member member)
{
    return {[member](RunConfig& c, const std::string& v) -> std::optional<std::string> {
                if (v.empty())
                    return "expected a nonempty string";
                member(c) = v;
                return std::nullopt;
            },
            [member](const RunConfig& c) { return member(c); }};
}

#define HM_MEMBER(path) [](auto& c) -> auto& { return c.path; }

const std::vector<std::pair<std::string, KeySpec>>& schema()
{
    static const std::vector<std::pair<std::string, KeySpec>> table = {
        {"grid.nx", int_field<int>(HM_MEMBER(grid.nx))},
        {"grid.ny", int_field<int>(HM_MEMBER(grid.ny))},
        {"grid.lx", real_field(HM_MEMBER(grid.lx))},
        {"grid.ly", real_field(HM_MEMBER(grid.ly))},
        {"kernel.bulk.weights", list_field(HM_MEMBER(bulk_kernel.weights))},
        {"kernel.bulk.rates", list_field(HM_MEMBER(bulk_kernel.rates))},
        {"kernel.boundary.weights", list_field(HM_MEMBER(boundary_kernel.weights))},
        {"kernel.boundary.rates", list_field(HM_MEMBER(boundary_kernel.rates))},
        {"physics.alpha", real_field(HM_MEMBER(physics.alpha))},
        {"physics.beta", real_field(HM_MEMBER(physics.beta))},
        {"physics.nu", real_field(HM_MEMBER(physics.nu))},
        {"physics.omega", real_field(HM_MEMBER(physics.omega))},
        {"physics.r", real_field(HM_MEMBER(physics.r))},
        {"nonlinearity.f", list_field(HM_MEMBER(nonlinearity.f))},
        {"nonlinearity.g", list_field(HM_MEMBER(nonlinearity.g))},
        {"integration.dt", real_field(HM_MEMBER(integration.dt))},
        {"integration.t_final", real_field(HM_MEMBER(integration.t_final))},
        {"integration.report_stride", int_field<int>(HM_MEMBER(integration.report_stride))},
        {"integration.snapshot_stride", int_field<int>(HM_MEMBER(integration.snapshot_stride))},
        {"integration.history",
         enum_field<HistoryMode>(HM_MEMBER(integration.history),
                                 {{"modes", HistoryMode::modes}, {"direct", HistoryMode::direct}})},
        {"integration.window_tol", real_field(HM_MEMBER(integration.window_tol))},
        {"initial.kind", enum_field<InitialKind>(HM_MEMBER(initial.kind), {{"bandlimited", InitialKind::bandlimited},
                                                                         {"mode", InitialKind::mode},
                                                                         {"constant", InitialKind::constant},
                                                                         {"zero", InitialKind::zero}})},
        {"initial.seed", int_field<std::uint64_t>(HM_MEMBER(initial.seed))},
        {"initial.amplitude", real_field(HM_MEMBER(initial.amplitude))},
        {"initial.x_modes", int_field<int>(HM_MEMBER(initial.x_modes))},
        {"initial.y_degree", int_field<int>(HM_MEMBER(initial.y_degree))},
        {"initial.kx", int_field<int>(HM_MEMBER(initial.kx))},
        {"initial.py", int_field<int>(HM_MEMBER(initial.py))},
        {"initial.history", enum_field<ProfileKind>(HM_MEMBER(initial.history), {{"zero", ProfileKind::zero},
                                                                               {"ramp", ProfileKind::ramp},
                                                                               {"saturating", ProfileKind::saturating}})},
        {"initial.history_level", real_field(HM_MEMBER(initial.history_level))},
        {"initial.history_scale", real_field(HM_MEMBER(initial.history_scale))},
        {"output.directory", string_field(HM_MEMBER(output.directory))},
        {"output.csv", bool_field(HM_MEMBER(output.csv))},
        {"output.json", bool_field(HM_MEMBER(output.json))},
        {"experiment.perturbations", list_field(HM_MEMBER(experiment.perturbations))},
        {"experiment.pairs", int_field<int>(HM_MEMBER(experiment.pairs))},
        {"experiment.lambdas", list_field(HM_MEMBER(experiment.lambdas))},
        {"experiment.dirac_horizon", real_field(HM_MEMBER(experiment.dirac_horizon))},
        {"experiment.dirac_reduction",
         enum_field<DiracReduction>(HM_MEMBER(experiment.dirac_reduction),
                                    {{"weak", DiracReduction::weak_limit}, {"literal", DiracReduction::literal}})},
        {"experiment.pilot_time", real_field(HM_MEMBER(experiment.pilot_time))},
        {"experiment.oracle_steps", int_field<int>(HM_MEMBER(experiment.oracle_steps))},
        {"experiment.decay_margin", real_field(HM_MEMBER(experiment.decay_margin))},
    };
    return table;
}

#undef HM_MEMBER

const KeySpec* find_field(const std::string& key)
{
    for (const auto& [name, field] : schema())
        if (name == key)
            return &field;
    return nullptr;
}

struct Entry {
    std::string value;
    int line = 0;
};

void validate(const RunConfig& c, std::vector<ConfigIssue>& issues)
{
    auto fail = [&](std::string key, std::string message) { issues.push_back({std::move(key), 0, std::move(message)}); };

    if (c.grid.nx < 4)
        fail("grid.nx", "must be at least 4");
    if (c.grid.ny < 4)
        fail("grid.ny", "must be at least 4");
    if (!(c.grid.lx > 0.0))
        fail("grid.lx", "must be positive");
    if (!(c.grid.ly > 0.0))
        fail("grid.ly", "must be positive");

    const auto& p = c.physics;
    if (!(p.alpha >= 0.0))
        fail("physics.alpha", "must be nonnegative");
    if (!(p.beta >= 0.0))
        fail("physics.beta", "must be nonnegative");
    if (!(p.nu > 0.0 && p.nu < 1.0))
        fail("physics.nu", "must lie in the open interval (0,1)");
    if (!(p.omega > 0.0 && p.omega < 1.0))
        fail("physics.omega", "must lie in the open interval (0,1)");
    if (!(p.r >= 2.0))
        fail("physics.r", "must be at least 2");

    const bool omega_ok = p.omega > 0.0 && p.omega < 1.0;
    for (Region r : {Region::bulk, Region::boundary}) {
        const KernelConfig& k = r == Region::bulk ? c.bulk_kernel : c.boundary_kernel;
        const std::string prefix = "kernel." + to_string(r) + ".";
        if (k.weights.size() != k.rates.size() || k.weights.empty()) {
            fail(prefix + "weights", "weights and rates must be nonempty lists of equal length");
            continue;
        }
        if (!omega_ok)
            continue;
        try {
            (void)c.make_kernel(r);
        } catch (const KernelError& e) {
            const bool on_rates = e.kind() == KernelError::Kind::nonpositive_rate;
            fail(prefix + (on_rates ? "rates" : "weights"), e.what());
        }
    }

    for (const auto* key : {"nonlinearity.f", "nonlinearity.g"}) {
        const auto& coeffs = std::string(key) == "nonlinearity.f" ? c.nonlinearity.f : c.nonlinearity.g;
        const Polynomial poly(coeffs);
        if (poly.is_zero())
            continue;
        if (poly.leading() <= 0.0)
            fail(key, "leading coefficient must be positive");
        else if (poly.degree() % 2 == 0)
            fail(key, "degree must be odd");
    }

    const auto& in = c.integration;
    if (!(in.dt > 0.0))
        fail("integration.dt", "must be positive");
    if (!(in.t_final > 0.0))
        fail("integration.t_final", "must be positive");
    if (in.report_stride < 1)
        fail("integration.report_stride", "must be at least 1");
    if (in.snapshot_stride < 0)
        fail("integration.snapshot_stride", "must be nonnegative");
    if (!(in.window_tol > 0.0 && in.window_tol < 1.0))
        fail("integration.window_tol", "must lie in (0,1)");

    const auto& init = c.initial;
    if (!(init.amplitude >= 0.0))
        fail("initial.amplitude", "must be nonnegative");
    if (init.x_modes < 0)
        fail("initial.x_modes", "must be nonnegative");
    if (init.y_degree < 0)
        fail("initial.y_degree", "must be nonnegative");
    if (init.kx < 0)
        fail("initial.kx", "must be nonnegative");
    if (init.py < 0)
        fail("initial.py", "must be nonnegative");
    if (!(init.history_level > 0.0))
        fail("initial.history_level", "must be positive");

    const auto& ex = c.experiment;
    if (ex.perturbations.empty())
        fail("experiment.perturbations", "must list at least one size");
    for (double e : ex.perturbations)
        if (!(e > 0.0)) {
            fail("experiment.perturbations", "sizes must be positive");
            break;
        }
    if (ex.pairs < 1)
        fail("experiment.pairs", "must be at least 1");
    if (ex.lambdas.empty())
        fail("experiment.lambdas", "must list at least one rate");
    for (double l : ex.lambdas)
        if (!(l > 0.0)) {
            fail("experiment.lambdas", "rates must be positive");
            break;
        }
    if (!(ex.dirac_horizon > 0.0))
        fail("experiment.dirac_horizon", "must be positive");
    if (!(ex.pilot_time > 0.0))
        fail("experiment.pilot_time", "must be positive");
    if (ex.oracle_steps < 1)
        fail("experiment.oracle_steps", "must be at least 1");
    if (!(ex.decay_margin >= 1.0))
        fail("experiment.decay_margin", "must be at least 1");
}

std::string describe(const ConfigIssue& i)
{
    std::string where = i.key.empty() ? "config" : i.key;
    if (i.line > 0)
        where += " (line " + std::to_string(i.line) + ")";
    return where + ": " + i.message;
}

std::string summarize(const std::vector<ConfigIssue>& issues)
{
    std::string out = std::to_string(issues.size()) + " configuration error(s)";
    for (const auto& i : issues)
        out += "\n  " + describe(i);
    return out;
}

}  // namespace

MemoryKernel RunConfig::make_kernel(Region r) const
{
    const KernelConfig& k = r == Region::bulk ? bulk_kernel : boundary_kernel;
    return make_exponential_kernel(r, k.weights, k.rates, physics.omega);
}

SmallnessFlags RunConfig::smallness() const
{
    return check_smallness(make_kernel(Region::boundary), physics.omega, physics.nu);
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(summarize(issues)), issues_(std::move(issues))
{
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides)
{
    std::vector<ConfigIssue> issues;
    std::map<std::string, Entry> entries;

    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos)
            line.erase(comment);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back({"", line_no, "malformed section header '" + line + "'"});
                continue;
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back({"", line_no, "expected 'key = value', got '" + line + "'"});
            continue;
        }
        const std::string key = (section.empty() ? "" : section + ".") + trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (const auto it = entries.find(key); it != entries.end()) {
            issues.push_back({key, line_no,
                              "duplicate key (first defined on line " + std::to_string(it->second.line) +
                                  ", repeated on line " + std::to_string(line_no) + ")"});
            continue;
        }
        entries[key] = {value, line_no};
    }

    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            issues.push_back({"", 0, "override must have the form section.key=value, got '" + o + "'"});
            continue;
        }
        entries[trim(std::string_view(o).substr(0, eq))] = {trim(std::string_view(o).substr(eq + 1)), 0};
    }

    RunConfig config;
    for (const auto& [key, entry] : entries) {
        const KeySpec* field = find_field(key);
        if (!field) {
            issues.push_back({key, entry.line, "unknown key"});
            continue;
        }
        if (const auto err = field->set(config, entry.value))
            issues.push_back({key, entry.line, *err});
    }

    std::vector<ConfigIssue> constraint_issues;
    validate(config, constraint_issues);
    for (auto& i : constraint_issues) {
        if (const auto it = entries.find(i.key); it != entries.end())
            i.line = it->second.line;
        issues.push_back(std::move(i));
    }

    if (!issues.empty())
        throw ConfigError(std::move(issues));
    return config;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
    std::ifstream file(path);
    if (!file)
        throw ConfigError({{"", 0, "cannot open " + path.string()}});
    std::ostringstream text;
    text << file.rdbuf();
    return parse_config(text.str(), overrides);
}

std::string render_config(const RunConfig& config)
{
    std::string out;
    std::string section;
    for (const auto& [name, field] : schema()) {
        const auto dot = name.rfind('.');
        const std::string sec = name.substr(0, dot);
        if (sec != section) {
            out += (section.empty() ? "" : "\n") + std::string("[") + sec + "]\n";
            section = sec;
        }
        out += name.substr(dot + 1) + " = " + field.get(config) + "\n";
    }
    return out;
}

std::vector<std::string> config_warnings(const RunConfig& config)
{
    std::vector<std::string> out;
    const SmallnessFlags flags = config.smallness();
    const double k0 = config.make_kernel(Region::boundary).k0();
    if (!flags.absorbing)
        out.push_back("boundary kernel violates k_G(0) <= 4/(1-omega) (k_G(0) = " + format_double(k0) +
                      "); decay assertions are out of hypothesis");
    if (!flags.contraction)
        out.push_back("boundary kernel violates k_G(0) < 2/(1-nu) (k_G(0) = " + format_double(k0) +
                      "); contraction assertions are out of hypothesis");
    const Nonlinearity n(Polynomial(config.nonlinearity.f), Polynomial(config.nonlinearity.g),
                         config.physics.omega, config.physics.beta, config.physics.r);
    if (!n.is_linear() && !n.constants().weak_class)
        out.push_back("nonlinearity does not satisfy the growth and dissipativity conditions");
    return out;
}

}  // namespace heatmem
