#include "sbqcp/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "sbqcp/ansatz_degenerate.hpp"
#include "sbqcp/ansatz_sh.hpp"
#include "sbqcp/ansatz_superposed.hpp"
#include "sbqcp/errors.hpp"
#include "sbqcp/oracle_ed.hpp"
#include "sbqcp/qcp.hpp"

namespace sbqcp::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw UsageError(key + ": not a number: '" + text + "'");
    return v;
}

int to_int(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw UsageError(key + ": not an integer: '" + text + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw UsageError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty()) out.push_back(to_double(key, item));
    return out;
}

std::string join(const std::vector<std::string>& v, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

std::string num(double x) { return format_number(x); }

}  // namespace

std::vector<double> GridSpec::values() const
{
    std::vector<double> out;
    if (count == 1) return {start};
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / (count - 1);
        if (log)
            out.push_back(std::exp(std::log(start) + t * (std::log(stop) - std::log(start))));
        else
            out.push_back(start + t * (stop - start));
    }
    out.front() = start;
    out.back() = stop;
    return out;
}

std::string GridSpec::str() const
{
    if (count == 1 && start == stop && !log) return format_number(start);
    return format_number(start) + ":" + format_number(stop) + ":" + std::to_string(count) + (log ? ":log" : "");
}

GridSpec parse_grid(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    GridSpec g;
    if (parts.size() == 1) {
        g.start = g.stop = to_double("alpha", parts[0]);
        return g;
    }
    if (parts.size() < 3 || parts.size() > 4) throw UsageError("alpha: grid must be start:stop:count[:log]");
    g.start = to_double("alpha", parts[0]);
    g.stop = to_double("alpha", parts[1]);
    g.count = to_int("alpha", parts[2]);
    if (parts.size() == 4) {
        if (parts[3] != "log") throw UsageError("alpha: unknown grid suffix '" + parts[3] + "'");
        g.log = true;
    }
    if (g.count < 1) throw UsageError("alpha: grid count must be >= 1");
    if (g.count > 1 && !(g.stop > g.start)) throw UsageError("alpha: grid must be strictly increasing");
    if (g.log && !(g.start > 0.0)) throw UsageError("alpha: log grid needs start > 0");
    return g;
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "command", "s",        "alpha",   "delta",  "omega_c", "panels", "nodes",          "output",      "format",
        "strict",  "modes",    "nmax",    "scheme", "lambda",  "s_list", "method",         "ohmic_sh_delta",
        "sensitivity", "eps_rho", "deterministic"};
    return keys;
}

const std::vector<std::string>& commands()
{
    static const std::vector<std::string> c{"sh-solve", "deg-solve", "sup-solve", "scan",
                                            "figure2",  "qcp",       "table1",    "oracle-check"};
    return c;
}

std::string format_number(double x)
{
    if (std::isnan(x)) return {};
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

KeyValues RunConfig::to_map() const
{
    return {{"command", command},
            {"s", num(s)},
            {"alpha", alpha},
            {"delta", num(delta)},
            {"omega_c", num(omega_c)},
            {"panels", std::to_string(panels)},
            {"nodes", std::to_string(nodes)},
            {"output", output},
            {"format", format},
            {"strict", strict ? "true" : "false"},
            {"modes", std::to_string(modes)},
            {"nmax", std::to_string(nmax)},
            {"scheme", scheme},
            {"lambda", num(lambda)},
            {"s_list", s_list},
            {"method", method},
            {"ohmic_sh_delta", num(ohmic_sh_delta)},
            {"sensitivity", sensitivity},
            {"eps_rho", num(eps_rho)},
            {"deterministic", deterministic ? "true" : "false"}};
}

RunConfig RunConfig::from_map(const KeyValues& kv)
{
    RunConfig c;
    for (const auto& [k, v] : kv) {
        if (k == "command") c.command = trim(v);
        else if (k == "s") c.s = to_double(k, v);
        else if (k == "alpha") c.alpha = trim(v);
        else if (k == "delta") c.delta = to_double(k, v);
        else if (k == "omega_c") c.omega_c = to_double(k, v);
        else if (k == "panels") c.panels = to_int(k, v);
        else if (k == "nodes") c.nodes = to_int(k, v);
        else if (k == "output") c.output = trim(v);
        else if (k == "format") c.format = trim(v);
        else if (k == "strict") c.strict = to_bool(k, v);
        else if (k == "modes") c.modes = to_int(k, v);
        else if (k == "nmax") c.nmax = to_int(k, v);
        else if (k == "scheme") c.scheme = trim(v);
        else if (k == "lambda") c.lambda = to_double(k, v);
        else if (k == "s_list") c.s_list = trim(v);
        else if (k == "method") c.method = trim(v);
        else if (k == "ohmic_sh_delta") c.ohmic_sh_delta = to_double(k, v);
        else if (k == "sensitivity") c.sensitivity = trim(v);
        else if (k == "eps_rho") c.eps_rho = to_double(k, v);
        else if (k == "deterministic") c.deterministic = to_bool(k, v);
        else throw UsageError("unknown key '" + k + "'");
    }
    return c;
}

void RunConfig::validate() const
{
    if (std::find(commands().begin(), commands().end(), command) == commands().end())
        throw UsageError("command: unknown command '" + command + "'");
    if (!(s > 0.0) || !std::isfinite(s)) throw UsageError("s must be > 0");
    if (!(delta >= 0.0) || delta > 1.0) throw UsageError("delta must lie in [0, 1]");
    if (omega_c != 1.0) throw UsageError("omega_c must equal 1");
    for (const double a : parse_grid(alpha).values())
        if (!(a >= 0.0) || !std::isfinite(a)) throw UsageError("alpha must be >= 0");
    if (panels < 1) throw UsageError("panels must be >= 1");
    if (nodes < 2) throw UsageError("nodes must be >= 2");
    if (format != "csv" && format != "json") throw UsageError("format must be csv or json");
    if (modes < 1) throw UsageError("modes must be >= 1");
    if (nmax < 1) throw UsageError("nmax must be >= 1");
    if (scheme != "linear" && scheme != "log") throw UsageError("scheme must be linear or log");
    if (!(lambda > 1.0)) throw UsageError("lambda must be > 1");
    for (const double x : to_list("s_list", s_list))
        if (!(x > 0.0)) throw UsageError("s_list entries must be > 0");
    if (method != "sh" && method != "deg" && method != "sup" && method != "all")
        throw UsageError("method must be sh, deg, sup or all");
    if (!(ohmic_sh_delta > 0.0) || ohmic_sh_delta > 1.0) throw UsageError("ohmic_sh_delta must lie in (0, 1]");
    for (const double d : to_list("sensitivity", sensitivity))
        if (!(d > 0.0) || d > 1.0) throw UsageError("sensitivity entries must lie in (0, 1]");
    if (!(eps_rho > 0.0) || eps_rho >= 1.0) throw UsageError("eps_rho must lie in (0, 1)");
    if (!deterministic) throw UsageError("deterministic must be true");
}

KeyValues read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open '" + path + "'");
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config: line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            throw UsageError("unknown key '" + key + "'");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

RunConfig parse_config(int argc, const char* const* argv)
{
    CLI::App app{"Variational ground states and critical couplings of the spin-boson model", "sbqcp"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1, 1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value configuration file");
    std::map<std::string, std::string> flags;
    for (const auto& key : config_keys()) {
        if (key == "command") continue;
        std::string names = "--" + key;
        if (key.find('_') != std::string::npos) {
            std::string dashed = key;
            std::replace(dashed.begin(), dashed.end(), '_', '-');
            names += ",--" + dashed;
        }
        app.add_option(names, flags[key]);
    }
    static const std::map<std::string, std::string> about{
        {"sh-solve", "Silbey-Harris renormalization eta0 and energy"},
        {"deg-solve", "degenerate ansatz, both branches"},
        {"sup-solve", "superposed ansatz at the optimal tau"},
        {"scan", "superposed observables over an alpha grid"},
        {"figure2", "energy difference superposed minus degenerate"},
        {"qcp", "critical coupling for the chosen method"},
        {"table1", "critical couplings for every s in s_list"},
        {"oracle-check", "exact diagonalization against the variational energies"}};
    for (const auto& c : commands()) app.add_subcommand(c, about.at(c))->fallthrough();

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        throw InfoRequest{app.help()};
    } catch (const CLI::CallForAllHelp&) {
        throw InfoRequest{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::CallForVersion&) {
        throw InfoRequest{std::string(kVersion) + '\n'};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    KeyValues kv = RunConfig{}.to_map();
    if (!config_path.empty())
        for (const auto& [k, v] : read_config_file(config_path)) kv[k] = v;
    for (const auto& key : config_keys()) {
        if (key == "command") continue;
        std::string opt_name = "--" + key;
        if (app.get_option(opt_name)->count() > 0) kv[key] = flags[key];
    }
    kv["command"] = app.get_subcommands().front()->get_name();
    RunConfig cfg = RunConfig::from_map(kv);
    cfg.validate();
    return cfg;
}

std::string to_csv(const Table& t)
{
    std::string out = join(t.header, ',') + '\n';
    for (const auto& r : t.rows) out += join(r, ',') + '\n';
    return out;
}

std::string to_json(const Table& t)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < t.header.size(); ++i) {
            const std::string& cell = i < r.size() ? r[i] : std::string();
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty())
                obj[t.header[i]] = nullptr;
            else if (ec == std::errc() && ptr == cell.data() + cell.size())
                obj[t.header[i]] = v;
            else
                obj[t.header[i]] = cell;
        }
        arr.push_back(obj);
    }
    return arr.dump(2) + '\n';
}

void write_atomic(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

void emit_csv(const Table& t, const std::string& path) { write_atomic(path, to_csv(t)); }

namespace {

struct Outcome {
    Table table;
    std::vector<std::string> failures;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();
    bool hard_failure{false};
};

QuadratureConfig quad_of(const RunConfig& c)
{
    QuadratureConfig q;
    q.panels = c.panels;
    q.nodes_per_panel = c.nodes;
    return q;
}

BathParams params_of(const RunConfig& c, double alpha)
{
    BathParams p;
    p.s = c.s;
    p.alpha = alpha;
    p.delta = c.delta;
    p.omega_c = c.omega_c;
    return p;
}

QcpOptions qcp_options(const RunConfig& c)
{
    QcpOptions o;
    o.quad = quad_of(c);
    o.eps_rho = c.eps_rho;
    return o;
}

double single_alpha(const RunConfig& c)
{
    const auto g = parse_grid(c.alpha);
    if (g.count != 1) throw UsageError("alpha: " + c.command + " takes a single value");
    return g.start;
}

Outcome cmd_sh(const RunConfig& c)
{
    Outcome o;
    o.table.header = {"s", "alpha", "delta", "eta0", "energy", "converged"};
    for (const double a : parse_grid(c.alpha).values()) {
        const auto sol = solve_sh(params_of(c, a), quad_of(c));
        o.table.rows.push_back({num(c.s), num(a), num(c.delta), num(sol.eta0), num(sol.energy),
                                sol.converged ? "true" : "false"});
        if (!sol.converged) o.failures.push_back("alpha=" + num(a) + ": not converged");
    }
    return o;
}

Outcome cmd_deg(const RunConfig& c)
{
    Outcome o;
    o.table.header = {"s", "alpha", "delta", "branch", "eta", "M", "W", "energy"};
    for (const double a : parse_grid(c.alpha).values()) {
        const auto p = params_of(c, a);
        const ContinuumSums bath(p, quad_of(c));
        const auto sol = degenerate_ground(bath, p.delta);
        o.table.rows.push_back({num(c.s), num(a), num(c.delta), to_string(sol.branch), num(sol.eta), num(sol.M),
                                num(sol.W), num(sol.energy)});
    }
    return o;
}

Outcome cmd_sup(const RunConfig& c)
{
    Outcome o;
    o.table.header = {"s", "alpha", "delta", "tau", "rho", "delta_shift", "M", "W", "eta", "energy", "E_sh", "E_deg",
                      "flags"};
    for (const double a : parse_grid(c.alpha).values()) {
        const auto p = params_of(c, a);
        const ContinuumSums bath(p, quad_of(c));
        const auto t = minimize_tau(bath, p.delta, p.s);
        const auto& st = t.has_nondegenerate ? t.nondegenerate : t.best;
        std::vector<std::string> flags;
        if (!t.has_nondegenerate) flags.push_back("no_nondegenerate");
        if (t.best.collapsed && t.best.energy < st.energy) flags.push_back("degenerate_lower");
        if (t.multiple_minima) flags.push_back("multiple_minima");
        o.table.rows.push_back({num(c.s), num(a), num(c.delta), num(st.tau), num(st.rho), num(st.delta_shift),
                                num(st.M), num(st.W), num(st.eta), num(t.best.energy),
                                num(solve_sh(bath, p.delta).energy), num(degenerate_ground(bath, p.delta).energy),
                                join(flags, '|')});
    }
    return o;
}

Outcome cmd_scan(const RunConfig& c)
{
    Outcome o;
    o.table.header = {"alpha", "tau", "rho", "M", "W", "eta", "E_sh", "E_deg", "E_sup", "flags"};
    const auto recs = scan_alpha(params_of(c, 0.0), parse_grid(c.alpha).values(), qcp_options(c));
    for (const auto& r : recs) {
        o.table.rows.push_back({num(r.alpha), num(r.tau_star), num(r.rho), num(r.M), num(r.W), num(r.eta),
                                num(r.E_sh), num(r.E_deg), num(r.E_sup), r.flags});
        if (r.flags.find("error:") != std::string::npos) o.failures.push_back("alpha=" + num(r.alpha) + ": " + r.flags);
    }
    return o;
}

Outcome cmd_figure2(const RunConfig& c)
{
    Outcome o;
    o.table.header = {"alpha", "dE"};
    const auto curve = energy_difference_curve(params_of(c, 0.0), parse_grid(c.alpha).values(), qcp_options(c));
    for (const auto& d : curve) {
        o.table.rows.push_back({num(d.alpha), num(d.dE)});
        if (!d.flags.empty()) o.failures.push_back("alpha=" + num(d.alpha) + ": " + d.flags);
    }
    return o;
}

nlohmann::ordered_json qcp_json(const QcpResult& r)
{
    nlohmann::ordered_json j;
    auto val = [](double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(); };
    j["method"] = to_string(r.method);
    j["s"] = r.s;
    j["delta"] = r.delta;
    j["alpha_c"] = val(r.alpha_c);
    j["alpha_lo"] = val(r.alpha_lo);
    j["alpha_hi"] = val(r.alpha_hi);
    j["alpha_c_threshold"] = val(r.alpha_c_threshold);
    j["alpha_c_extrapolated"] = val(r.alpha_c_extrapolated);
    j["alpha_c_cross_check"] = val(r.alpha_c_cross_check);
    j["criterion"] = r.criterion;
    j["note"] = r.note;
    return j;
}

Outcome cmd_qcp(const RunConfig& c)
{
    Outcome o;
    o.table.header = {"s", "delta", "method", "alpha_c", "alpha_lo", "alpha_hi", "alpha_c_threshold",
                      "alpha_c_extrapolated", "alpha_c_cross_check", "criterion"};
    std::vector<Method> methods;
    if (c.method == "sh" || c.method == "all") methods.push_back(Method::SH);
    if (c.method == "deg" || c.method == "all") methods.push_back(Method::Degenerate);
    if (c.method == "sup" || c.method == "all") methods.push_back(Method::Superposed);
    for (const Method m : methods) {
        try {
            const auto r = locate_alpha_c(params_of(c, 0.0), m, qcp_options(c));
            o.table.rows.push_back({num(r.s), num(r.delta), to_string(m), num(r.alpha_c), num(r.alpha_lo),
                                    num(r.alpha_hi), num(r.alpha_c_threshold), num(r.alpha_c_extrapolated),
                                    num(r.alpha_c_cross_check), r.criterion});
            o.details[to_string(m)] = qcp_json(r);
        } catch (const NoTransition& e) {
            o.table.rows.push_back({num(c.s), num(c.delta), to_string(m), "", "", "", "", "", "", "no_transition"});
            o.failures.push_back(std::string(to_string(m)) + ": " + e.what());
            o.hard_failure = true;
        }
    }
    return o;
}

Outcome cmd_table1(const RunConfig& c)
{
    Outcome o;
    o.table.header = {"s", "alpha_c_sh", "alpha_c_deg", "alpha_c_sup"};
    Table1Options opt;
    opt.qcp = qcp_options(c);
    opt.ohmic_sh_delta = c.ohmic_sh_delta;
    const auto rows = table1_report(c.delta, to_list("s_list", c.s_list), opt);
    nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        o.table.rows.push_back({num(r.s), r.sh_ok ? num(r.sh.alpha_c) : "", r.deg_ok ? num(r.deg.alpha_c) : "",
                                r.sup_ok ? num(r.sup.alpha_c) : ""});
        if (!r.flags.empty()) o.failures.push_back("s=" + num(r.s) + ": " + r.flags);
        nlohmann::ordered_json j;
        j["s"] = r.s;
        if (r.sh_ok) j["sh"] = qcp_json(r.sh);
        if (r.deg_ok) j["deg"] = qcp_json(r.deg);
        if (r.sup_ok) j["sup"] = qcp_json(r.sup);
        ReferenceValues ref{};
        if (reference_values(r.s, ref))
            j["reference"] = {{"sh", ref.sh},   {"deg", ref.degenerate}, {"sup", ref.superposed}, {"nrg", ref.nrg},
                              {"qmc", ref.qmc}, {"sparse_polynomial", ref.sparse_polynomial},
                              {"coherent_state", ref.coherent_state}};
        j["flags"] = r.flags;
        rows_json.push_back(j);
    }
    o.details["rows"] = rows_json;
    const auto deltas = to_list("sensitivity", c.sensitivity);
    if (!deltas.empty()) {
        std::vector<double> sub;
        for (const double s : to_list("s_list", c.s_list))
            if (s < 1.0) sub.push_back(s);
        nlohmann::ordered_json sens = nlohmann::ordered_json::array();
        for (const auto& r : delta_sensitivity(sub, deltas, opt.qcp)) {
            nlohmann::ordered_json j{{"s", r.s}, {"delta", r.delta}};
            j["alpha_c_sup"] = r.ok ? nlohmann::ordered_json(r.alpha_c) : nlohmann::ordered_json();
            ReferenceValues ref{};
            if (r.ok && reference_values(r.s, ref))
                j["rel_err"] = std::abs(r.alpha_c - ref.superposed) / ref.superposed;
            sens.push_back(j);
        }
        o.details["delta_sensitivity"] = sens;
    }
    return o;
}

Outcome cmd_oracle(const RunConfig& c)
{
    Outcome o;
    o.table.header = {"ansatz", "E_var", "E_ed", "gap"};
    const double a = single_alpha(c);
    const auto p = params_of(c, a);
    EdInstance inst{discretize_bath(p, c.scheme == "log" ? Scheme::logarithmic : Scheme::linear, c.modes, c.lambda),
                    c.delta, c.nmax};
    const auto rows = upper_bound_report(inst, {c.s, a});
    for (const auto& r : rows) {
        o.table.rows.push_back({to_string(r.ansatz), num(r.E_var), num(r.E_ed), num(r.gap)});
        if (!r.ok) {
            o.failures.push_back(std::string(to_string(r.ansatz)) + ": " + r.error);
        } else if (r.gap < -1e-9) {
            o.failures.push_back(std::string(to_string(r.ansatz)) + ": variational bound violated");
            o.hard_failure = true;
        }
    }
    o.details["dim"] = inst.dim();
    return o;
}

nlohmann::ordered_json tolerances(const RunConfig& c)
{
    return {{"quadrature_rel_tol", QuadratureConfig{}.rel_tol},
            {"quadrature_panels", c.panels},
            {"quadrature_nodes", c.nodes},
            {"sh_tol", ShOptions{}.tol},
            {"inner_tol", InnerOptions{}.tol},
            {"tau_tol", TauOptions{}.tau_tol},
            {"bisection_width", QcpOptions{}.bracket_width},
            {"eps_rho", c.eps_rho},
            {"lanczos_tol", LanczosOptions{}.tol}};
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        cfg.validate();
        if (cfg.command == "sh-solve") o = cmd_sh(cfg);
        else if (cfg.command == "deg-solve") o = cmd_deg(cfg);
        else if (cfg.command == "sup-solve") o = cmd_sup(cfg);
        else if (cfg.command == "scan") o = cmd_scan(cfg);
        else if (cfg.command == "figure2") o = cmd_figure2(cfg);
        else if (cfg.command == "qcp") o = cmd_qcp(cfg);
        else if (cfg.command == "table1") o = cmd_table1(cfg);
        else if (cfg.command == "oracle-check") o = cmd_oracle(cfg);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    const std::string body = cfg.format == "json" ? to_json(o.table) : to_csv(o.table);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        if (cfg.output.empty()) {
            out << body;
        } else {
            write_atomic(cfg.output, body);
            nlohmann::ordered_json m;
            nlohmann::ordered_json conf;
            for (const auto& [k, v] : cfg.to_map()) conf[k] = v;
            m["config"] = conf;
            m["version"] = kVersion;
            m["tolerances"] = tolerances(cfg);
            m["wall_time_s"] = wall;
            m["failures"] = o.failures;
            m["details"] = o.details;
            write_atomic(cfg.output + ".manifest.json", m.dump(2) + '\n');
        }
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return 1;
    }
    for (const auto& f : o.failures) err << "flag: " << f << '\n';
    if (o.hard_failure) return 1;
    if (cfg.strict && !o.failures.empty()) return 1;
    return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    try {
        if (const char* env = std::getenv("SBQCP_THREADS")) {
            const int n = to_int("SBQCP_THREADS", env);
            if (n < 1) throw UsageError("SBQCP_THREADS must be >= 1");
            omp_set_num_threads(n);
        }
        cfg = parse_config(argc, argv);
    } catch (const InfoRequest& r) {
        out << r.text;
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    return run_command(cfg, out, err);
}

}  // namespace sbqcp::cli
