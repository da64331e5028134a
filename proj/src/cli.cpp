#include "effham/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "effham/effham_table.hpp"
#include "effham/errors.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/homog.hpp"
#include "effham/numflux.hpp"
#include "json.hpp"

namespace effham::cli {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int exit_code_for(const std::string& code) {
    if (code == "ConfigError" || code == "UnknownName" || code == "IrrationalSlope" ||
        code == "IncompatiblePeriods" || code == "GridTooCoarse" ||
        code == "MissingLipschitzConstant")
        return kConfigError;
    if (code == "IoError" || code == "FormatError") return kIoError;
    return kSolverError;
}

// ---------------------------------------------------------------------------
// History output

void emit_history(const CellSolution& s, std::ostream& os, const std::vector<std::string>& header,
                  Statistic stat) {
    if (s.history.empty()) throw ConfigError({"history is empty (zero-step run)"});
    for (const auto& line : header) os << "# " << line << "\n";
    os << "tau,stat,scaled_stat,lambda_estimate,node_minus_" << to_string(stat) << "\n";
    for (const auto& h : s.history) {
        os << format_double(h.tau) << ',' << format_double(h.stat) << ',' << format_double(h.scaled)
           << ',' << format_double(-h.scaled) << ',' << format_double(h.node_minus_stat) << "\n";
    }
}

void emit_history(const CellSolution& s, const std::filesystem::path& path,
                  const std::vector<std::string>& header, Statistic stat) {
    std::ostringstream buf;
    emit_history(s, buf, header, stat);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    os << buf.str();
    if (!os) throw IoError("write to '" + path.string() + "' failed");
}

namespace {

// ---------------------------------------------------------------------------
// Option table and resolved values

enum class Kind { text, number, count, flag };

struct Key {
    std::string name;
    Kind kind;
    std::string def;  // empty: no default
    std::string help;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<Key> keys;
};

std::vector<Key> with_common(std::vector<Key> keys) {
    keys.push_back({"out", Kind::text, "", "output path"});
    keys.push_back({"wall-time", Kind::flag, "", "record wall time in the provenance header"});
    return keys;
}

std::vector<Key> longtime_keys() {
    return {
        {"tau-max", Kind::number, "60", "final time of the long-time march"},
        {"tol", Kind::number, "0", "stop when the scaled statistic varies <= tol over the window"},
        {"window", Kind::number, "5", "trailing window in tau"},
        {"stat", Kind::text, "median", "statistic: median or mean"},
        {"record-every", Kind::number, "0.01", "history spacing in tau"},
        {"weno-eps", Kind::number, "1e-6", "WENO regularisation"},
    };
}

std::vector<Command> commands() {
    auto cat = [](std::vector<Key> a, const std::vector<Key>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    Command cell{"cell", "solve one cell problem and print lambda",
                 cat({
                         {"hamiltonian", Kind::text, "first_case", "builtin hamiltonian"},
                         {"method", Kind::text, "barles", "barles, im, discounted or longtime"},
                         {"p", Kind::text, "", "slope p (comma separated in 2D)"},
                         {"py", Kind::number, "-1", "p_y for discounted and longtime"},
                         {"nx", Kind::count, "400", "nodes along x"},
                         {"nx2", Kind::count, "0", "nodes along the second x axis (0: nx)"},
                         {"ny", Kind::count, "100", "nodes along y"},
                         {"nodes-per-unit", Kind::count, "400", "Imbert-Monneau nodes per unit length"},
                         {"dt", Kind::number, "0.001", "time step (<= 0: CFL)"},
                         {"alpha", Kind::number, "0.01", "discount for the discounted method"},
                         {"scheme", Kind::text, "auto",
                          "implicit-euler, explicit-euler or rk3-weno5 (auto: implicit for discounted)"},
                         {"flux", Kind::text, "godunov", "godunov or lax-friedrichs"},
                         {"lf-sigma", Kind::text, "", "Lax-Friedrichs sigma per axis"},
                         {"period-tol", Kind::number, "1e-9", "discounted periodic-orbit tolerance"},
                         {"max-periods", Kind::count, "100000", "discounted period limit"},
                         {"full-y-period", Kind::flag, "", "use y in [0, 1] instead of [0, u_period]"},
                         {"field-out", Kind::text, "", "write the final field as CSV"},
                     },
                     longtime_keys())};
    Command tab{"tabulate", "tabulate the effective hamiltonian over a p-set",
                cat({
                        {"hamiltonian", Kind::text, "first_case", "builtin hamiltonian"},
                        {"method", Kind::text, "barles", "barles, im or discounted"},
                        {"p-set", Kind::text, "", "p-set (1D mini-language; 2D: <set>x<set>)"},
                        {"nx", Kind::count, "200", "nodes along x"},
                        {"nx2", Kind::count, "0", "nodes along the second x axis (0: nx)"},
                        {"ny", Kind::count, "50", "nodes along y"},
                        {"nodes-per-unit", Kind::count, "100", "Imbert-Monneau nodes per unit"},
                        {"dt", Kind::number, "0.002", "time step (<= 0: CFL)"},
                        {"alpha", Kind::number, "0.01", "discount for the discounted method"},
                        {"scheme", Kind::text, "explicit-euler", "time scheme"},
                        {"flux", Kind::text, "godunov", "godunov or lax-friedrichs"},
                        {"period-tol", Kind::number, "1e-9", "discounted periodic-orbit tolerance"},
                        {"max-periods", Kind::count, "100000", "discounted period limit"},
                        {"workers", Kind::count, "0", "parallel vertex solves (0: all cores)"},
                        {"csv", Kind::text, "", "also export the table as CSV"},
                    },
                    longtime_keys())};
    Command rate{"rate", "oscillatory versus homogenized error as eps -> 0",
                 {
                     {"hamiltonian", Kind::text, "first_case", "builtin hamiltonian"},
                     {"u0", Kind::text, "affine:1.3", "initial datum: affine:p or sin[:amp]"},
                     {"eps", Kind::text, "0.2,0.1,0.05,0.025", "decreasing eps values"},
                     {"T", Kind::number, "0.5", "final time"},
                     {"domain", Kind::number, "1", "domain period"},
                     {"nodes-per-eps", Kind::count, "50", "grid nodes per eps"},
                     {"dt", Kind::number, "0", "time step (<= 0: CFL)"},
                     {"flux", Kind::text, "godunov", "flux of the oscillatory solver"},
                     {"table", Kind::text, "", "effective hamiltonian table (default: tabulate)"},
                     {"table-out", Kind::text, "", "save the tabulated table"},
                     {"p-step", Kind::number, "0.25", "vertex spacing of the default table"},
                     {"tau-max", Kind::number, "60", "long-time horizon of the default table"},
                     {"workers", Kind::count, "1", "concurrent eps runs"},
                 }};
    Command check{"check", "run the flux and hamiltonian property suites",
                  {
                      {"hamiltonian", Kind::text, "first_case", "builtin hamiltonian"},
                      {"flux", Kind::text, "godunov", "godunov or lax-friedrichs"},
                      {"lf-sigma", Kind::text, "", "Lax-Friedrichs sigma per axis"},
                      {"samples", Kind::count, "10000", "random samples"},
                      {"range", Kind::number, "10", "sampling range of the gradient slots"},
                      {"seed", Kind::count, "7", "random seed"},
                      {"assumptions", Kind::flag, "", "also spot-check the hamiltonian assumptions"},
                      {"table", Kind::text, "", "verify a table file instead"},
                      {"f-lip", Kind::number, "0", "Lipschitz bound for table checks (0: flux C1)"},
                  }};
    Command solve{"solve", "solve the homogenized problem with a tabulated hamiltonian",
                  {
                      {"table", Kind::text, "", "effective hamiltonian table"},
                      {"u0", Kind::text, "sin", "initial datum: affine:p or sin[:amp]"},
                      {"domain", Kind::number, "1", "domain period"},
                      {"n", Kind::count, "200", "grid nodes"},
                      {"T", Kind::number, "0.5", "final time"},
                      {"dt", Kind::number, "0", "time step (<= 0: CFL)"},
                      {"record-every", Kind::number, "0", "frame spacing in time (0: final only)"},
                  }};
    std::vector<Command> all{cell, tab, rate, check, solve};
    for (auto& c : all) c.keys = with_common(std::move(c.keys));
    return all;
}

std::string normalize_key(std::string k) {
    std::replace(k.begin(), k.end(), '_', '-');
    return k;
}

std::string json_to_text(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_number()) return v.dump();
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + json_to_text(v[i]);
        return s;
    }
    return v.dump();
}

/// Resolved option values with typed accessors that collect violations.
class Values {
public:
    Values(const Command& cmd, std::map<std::string, std::string> raw)
        : cmd_(cmd), raw_(std::move(raw)) {}

    std::vector<std::string>& violations() { return bad_; }
    bool has(const std::string& k) const { return raw_.count(k) && !raw_.at(k).empty(); }

    std::string text(const std::string& k) const { return has(k) ? raw_.at(k) : std::string(); }

    std::string required(const std::string& k) {
        if (!has(k)) bad_.push_back("--" + k + " is required");
        return text(k);
    }

    double number(const std::string& k) {
        const std::string s = text(k);
        double v = 0.0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
            bad_.push_back("--" + k + " must be a finite number, got '" + s + "'");
            return 0.0;
        }
        return v;
    }

    double positive(const std::string& k) {
        const std::size_t before = bad_.size();
        const double v = number(k);
        if (bad_.size() == before && !(v > 0.0)) bad_.push_back("--" + k + " must be positive");
        return v;
    }

    std::size_t count(const std::string& k) {
        const std::string s = text(k);
        unsigned long long v = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
            bad_.push_back("--" + k + " must be a non-negative integer, got '" + s + "'");
            return 0;
        }
        return static_cast<std::size_t>(v);
    }

    bool flag(const std::string& k) const { return text(k) == "true"; }

    std::vector<double> list(const std::string& k) {
        std::vector<double> out;
        std::stringstream ss(text(k));
        std::string item;
        while (std::getline(ss, item, ',')) {
            double v = 0.0;
            const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
            if (item.empty() || r.ec != std::errc() || r.ptr != item.data() + item.size() ||
                !std::isfinite(v)) {
                bad_.push_back("--" + k + ": '" + item + "' is not a number");
                continue;
            }
            out.push_back(v);
        }
        return out;
    }

    template <class F>
    auto parse(const std::string& k, F&& fn) -> decltype(fn(std::string())) {
        try {
            return fn(text(k));
        } catch (const Error& e) {
            bad_.push_back("--" + k + ": " + e.what());
            return {};
        }
    }

    void finish() {
        if (!bad_.empty()) throw ConfigError(bad_);
    }

    /// Resolved configuration, in option order.
    ordered_json echo() const {
        ordered_json j;
        for (const auto& key : cmd_.keys) {
            if (key.name == "wall-time" || !has(key.name)) continue;
            j[key.name] = text(key.name);
        }
        return j;
    }

private:
    const Command& cmd_;
    std::map<std::string, std::string> raw_;
    std::vector<std::string> bad_;
};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw IoError("cannot open '" + p.string() + "' for reading");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw IoError("cannot open '" + p.string() + "' for writing");
    os << content;
    if (!os) throw IoError("write to '" + p.string() + "' failed");
}

std::map<std::string, std::string> merge_config(const Command& cmd, const std::string& path,
                                                const std::map<std::string, std::string>& flags) {
    std::map<std::string, std::string> raw;
    for (const auto& k : cmd.keys)
        if (!k.def.empty()) raw[k.name] = k.def;
    std::vector<std::string> bad;
    if (!path.empty()) {
        const std::string text = read_file(path);
        ordered_json j;
        try {
            j = ordered_json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
            const auto line = 1 + static_cast<std::size_t>(std::count(
                                      text.begin(),
                                      text.begin() + static_cast<std::ptrdiff_t>(upto ? upto - 1 : 0),
                                      '\n'));
            throw FormatError("config '" + path + "' line " + std::to_string(line) + ": " + e.what(),
                              line);
        }
        if (!j.is_object()) throw ConfigError({"config '" + path + "' must hold a JSON object"});
        for (const auto& [key, value] : j.items()) {
            const std::string k = normalize_key(key);
            const auto it = std::find_if(cmd.keys.begin(), cmd.keys.end(),
                                         [&](const Key& x) { return x.name == k; });
            if (it == cmd.keys.end()) {
                bad.push_back("unknown config key '" + key + "' for '" + cmd.name + "'");
                continue;
            }
            if (value.is_null() || value.is_object()) {
                bad.push_back("config key '" + key + "' must be a scalar or an array");
                continue;
            }
            raw[k] = json_to_text(value);
        }
    }
    if (!bad.empty()) throw ConfigError(bad);
    for (const auto& [k, v] : flags) raw[k] = v;
    return raw;
}

// ---------------------------------------------------------------------------
// Shared helpers

struct Provenance {
    std::string command;
    ordered_json config;
    bool wall_time = false;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    std::vector<std::string> header(const std::vector<std::string>& extra = {}) const {
        std::vector<std::string> h{std::string("effham ") + kVersion + " " + command,
                                   "config: " + config.dump()};
        h.insert(h.end(), extra.begin(), extra.end());
        if (wall_time) {
            const double s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            h.push_back("wall_time_s: " + format_double(s));
        }
        return h;
    }
};

std::string comment_block(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += "# " + l + "\n";
    return s;
}

std::vector<double> lf_sigma(Values& v) {
    return v.has("lf-sigma") ? v.list("lf-sigma") : std::vector<double>{};
}

LongTimeOptions longtime_options(Values& v) {
    LongTimeOptions o;
    o.tau_max = v.positive("tau-max");
    o.tol = v.number("tol");
    o.window = v.positive("window");
    o.stat = v.parse("stat", [](const std::string& s) { return parse_statistic(s); });
    o.record_every = v.positive("record-every");
    o.weno_eps = v.positive("weno-eps");
    return o;
}

std::vector<std::size_t> barles_nodes(Values& v, std::size_t dim) {
    const std::size_t nx = v.count("nx"), ny = v.count("ny");
    std::size_t nx2 = v.count("nx2");
    if (nx2 == 0) nx2 = nx;
    if (nx == 0 || ny == 0) v.violations().push_back("--nx and --ny must be positive");
    if (dim == 2) return {nx, nx2, ny};
    return {nx, ny};
}

std::string summary_line(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string s;
    for (const auto& [k, val] : kv) s += (s.empty() ? "" : " ") + k + "=" + val;
    return s;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_cell(Values& v, const Provenance& prov, std::ostream& out) {
    const auto H = v.parse("hamiltonian", [](const std::string& s) { return builtin(s); });
    const std::string method = v.text("method");
    if (method != "barles" && method != "im" && method != "discounted" && method != "longtime")
        v.violations().push_back("--method must be barles, im, discounted or longtime, got '" +
                                 method + "'");
    const std::string p_text = v.required("p");
    std::vector<std::string> p_items;
    {
        std::stringstream ss(p_text);
        std::string item;
        while (std::getline(ss, item, ',')) p_items.push_back(item);
    }
    std::vector<double> p = v.list("p");
    if (H.eval && p.size() != H.dim)
        v.violations().push_back("--p needs " + std::to_string(H.dim) + " components");
    const std::string scheme_name = v.text("scheme");
    Scheme scheme = method == "discounted" ? Scheme::implicit_euler : Scheme::explicit_euler;
    if (scheme_name != "auto")
        scheme = v.parse("scheme", [](const std::string& s) { return parse_scheme(s); });
    const FluxKind flux = v.parse("flux", [](const std::string& s) { return parse_flux_kind(s); });
    const auto sigma = lf_sigma(v);
    const double dt = v.number("dt");
    const double py = v.number("py");
    const LongTimeOptions lt = longtime_options(v);
    const auto nodes = barles_nodes(v, H.eval ? H.dim : 1);
    const std::size_t npu = v.count("nodes-per-unit");
    const double alpha = v.number("alpha");
    const double period_tol = v.number("period-tol");
    const std::size_t max_periods = v.count("max-periods");
    const bool full_y = v.flag("full-y-period");
    std::vector<Rational> pr;
    if (method == "im") {
        for (const auto& item : p_items) {
            try {
                pr.push_back(parse_rational(item));
            } catch (const Error& e) {
                v.violations().push_back(std::string("--p: ") + e.what() +
                                         " (use --method barles for irrational slopes)");
            }
        }
    }
    v.finish();

    CellSolution s;
    if (method == "barles") {
        s = solve_barles(H, p, nodes, dt, scheme, lt, flux, full_y);
    } else if (method == "im") {
        s = solve_imbert_monneau(H, pr, npu, dt, scheme, lt, flux, sigma);
    } else {
        std::vector<Axis> axes;
        for (std::size_t k = 0; k < H.dim; ++k) axes.push_back({nodes[k], H.x_period[k]});
        axes.push_back({nodes[H.dim], full_y ? 1.0 : H.u_period});
        CellProblemSpec spec;
        spec.flux = make_flux(H, flux, sigma);
        spec.P = p;
        spec.P.push_back(py);
        spec.grid = PeriodicGrid(axes);
        spec.scheme = scheme;
        if (method == "discounted") {
            double step = dt;
            if (!(step > 0.0)) {
                double rate = 0.0;
                for (const auto& a : axes) rate += 2.0 * spec.flux.lip_C1t() / a.step();
                step = 1.0 / rate;
            }
            const auto Nt =
                static_cast<std::size_t>(std::ceil(H.time_period / step * (1.0 - 1e-12)));
            spec.time = {H.time_period / static_cast<double>(Nt), Nt};
            spec.alpha = alpha;
            s = solve_discounted(spec, period_tol, max_periods);
        } else {
            spec.time = {dt, 1};
            s = solve_longtime(spec, GridFunction(spec.grid, 0.0), lt);
        }
    }

    const std::vector<std::string> result{
        "method: " + s.method, "lambda: " + format_double(s.lambda),
        "error_bar: " + format_double(s.lambda_error_bar),
        "residual: " + format_double(s.residual), "dt: " + format_double(s.dt),
        "substeps: " + std::to_string(s.substeps)};
    if (v.has("out")) {
        if (method == "discounted") {
            std::string csv = comment_block(prov.header(result)) + "n,t,mean_alpha_w,oscillation\n";
            for (std::size_t n = 0; n < s.W.size(); ++n) {
                csv += std::to_string(n) + "," + format_double(static_cast<double>(n) * s.dt) + "," +
                       format_double(alpha * mean(s.W[n])) + "," +
                       format_double(oscillation(s.W[n])) + "\n";
            }
            write_file(v.text("out"), csv);
        } else {
            emit_history(s, std::filesystem::path(v.text("out")), prov.header(result), lt.stat);
        }
    }
    if (v.has("field-out")) {
        std::ostringstream os;
        write_csv(s.W.front(), os);
        write_file(v.text("field-out"), os.str());
    }
    out << summary_line({{"lambda", format_double(s.lambda)},
                         {"error_bar", format_double(s.lambda_error_bar)},
                         {"residual", format_double(s.residual)},
                         {"method", s.method}})
        << "\n";
    return kOk;
}

std::vector<std::vector<double>> parse_p_set_nd(const std::string& text, std::size_t dim) {
    if (dim == 1) {
        std::vector<std::vector<double>> out;
        for (double p : parse_p_set(text)) out.push_back({p});
        return out;
    }
    const auto x = text.find('x');
    if (x == std::string::npos)
        throw ConfigError({"2D p-set needs the form <set>x<set>, got '" + text + "'"});
    const auto a = parse_p_set(text.substr(0, x));
    const auto b = parse_p_set(text.substr(x + 1));
    std::vector<std::vector<double>> out;
    for (double u : a)
        for (double w : b) out.push_back({u, w});
    return out;
}

int cmd_tabulate(Values& v, const Provenance& prov, std::ostream& out, std::ostream& err) {
    const auto H = v.parse("hamiltonian", [](const std::string& s) { return builtin(s); });
    TabulateParams prm;
    prm.method = v.parse("method", [](const std::string& s) { return parse_table_method(s); });
    const std::string ps = v.required("p-set");
    std::vector<std::vector<double>> p_set;
    if (H.eval && !ps.empty())
        p_set = v.parse("p-set", [&](const std::string& s) { return parse_p_set_nd(s, H.dim); });
    prm.nodes = barles_nodes(v, H.eval ? H.dim : 1);
    prm.nodes_per_unit = v.count("nodes-per-unit");
    prm.dt = v.number("dt");
    prm.alpha = v.number("alpha");
    prm.scheme = v.parse("scheme", [](const std::string& s) { return parse_scheme(s); });
    prm.flux = v.parse("flux", [](const std::string& s) { return parse_flux_kind(s); });
    prm.period_tol = v.number("period-tol");
    prm.max_periods = v.count("max-periods");
    prm.workers = v.count("workers");
    prm.longtime = longtime_options(v);
    const std::string path = v.required("out");
    v.finish();

    const EffHamTable t = tabulate(H, p_set, prm);
    save(t, path);
    if (v.has("csv")) {
        std::ostringstream os;
        os << comment_block(prov.header());
        export_csv(t, os);
        write_file(v.text("csv"), os.str());
    }
    out << summary_line({{"table", path},
                         {"vertices", std::to_string(t.size())},
                         {"failures", std::to_string(t.failures.size())}})
        << "\n";
    if (t.partial()) {
        ordered_json e;
        e["error"] = "PartialTable";
        e["message"] = std::to_string(t.failures.size()) + " vertex solves failed";
        ordered_json f = ordered_json::array();
        for (const auto& x : t.failures) f.push_back({{"p", x.p}, {"code", x.code}, {"message", x.message}});
        e["failures"] = std::move(f);
        err << e.dump() << "\n";
        return kSolverError;
    }
    return kOk;
}

int cmd_rate(Values& v, const Provenance& prov, std::ostream& out) {
    const auto H = v.parse("hamiltonian", [](const std::string& s) { return builtin(s); });
    const auto u0 = v.parse("u0", [](const std::string& s) { return parse_initial_datum(s); });
    const auto eps = v.list("eps");
    RateOptions opt;
    opt.T = v.positive("T");
    opt.domain = {v.positive("domain")};
    opt.nodes_per_eps = v.count("nodes-per-eps");
    opt.dt = v.number("dt");
    opt.flux = v.parse("flux", [](const std::string& s) { return parse_flux_kind(s); });
    opt.workers = v.count("workers");
    const double p_step = v.positive("p-step");
    const double tau_max = v.positive("tau-max");
    if (H.eval && H.dim != 1) v.violations().push_back("rate supports one-dimensional hamiltonians");
    if (H.eval && u0.dim() != H.dim) v.violations().push_back("--u0 dimension differs from --hamiltonian");
    v.finish();
    if (opt.domain.size() != H.dim) opt.domain.assign(H.dim, opt.domain.front());

    EffHamTable table;
    if (v.has("table")) {
        table = load(v.text("table"));
    } else {
        std::vector<std::vector<double>> ps;
        for (double p : rate_p_set(u0, p_step)) ps.push_back({p});
        TabulateParams prm;
        prm.method = TableMethod::imbert_monneau;
        prm.nodes_per_unit = opt.nodes_per_eps;
        prm.dt = 0.0;
        prm.longtime.tau_max = tau_max;
        prm.workers = 0;
        table = tabulate(H, ps, prm);
        if (table.partial())
            throw NotConverged("default table has " + std::to_string(table.failures.size()) +
                                   " failed vertices",
                               CellSolution{});
        if (v.has("table-out")) save(table, v.text("table-out"));
    }
    const RateReport rep = rate_experiment(H, table, u0, eps, opt);
    if (v.has("out")) {
        std::string csv = comment_block(prov.header({"slope: " + format_double(rep.slope),
                                                     "flagged: " + std::string(rep.flagged ? "true" : "false")}));
        csv += "eps,h,dt,sup_error,pair_slope\n";
        for (const auto& r : rep.rows) {
            csv += format_double(r.eps) + "," + format_double(r.h) + "," + format_double(r.dt) + "," +
                   format_double(r.sup_error) + "," +
                   (std::isnan(r.pair_slope) ? std::string() : format_double(r.pair_slope)) + "\n";
        }
        write_file(v.text("out"), csv);
    }
    out << summary_line({{"slope", format_double(rep.slope)},
                         {"flagged", rep.flagged ? "true" : "false"}})
        << "\n";
    return kOk;
}

ordered_json property_json(const PropertyResult& r) {
    return {{"pass", r.pass}, {"worst", r.worst}};
}

int cmd_check(Values& v, const Provenance& prov, std::ostream& out) {
    const auto H = v.parse("hamiltonian", [](const std::string& s) { return builtin(s); });
    const FluxKind kind = v.parse("flux", [](const std::string& s) { return parse_flux_kind(s); });
    const auto sigma = lf_sigma(v);
    const std::size_t samples = v.count("samples");
    const double range = v.positive("range");
    const std::size_t seed = v.count("seed");
    const double f_lip = v.number("f-lip");
    if (samples == 0) v.violations().push_back("--samples must be positive");
    v.finish();

    ordered_json rep;
    rep["config"] = prov.config;
    bool pass = true;
    if (v.has("table")) {
        const EffHamTable t = load(v.text("table"));
        const double lip = f_lip > 0.0 ? f_lip : make_flux(H, kind, sigma).lip_C1t();
        const TableReport tr = verify_table(t, lip);
        rep["table"] = {{"max_edge_slope", tr.max_edge_slope},
                        {"lipschitz_bound", lip},
                        {"lipschitz_violations", tr.lipschitz_violations},
                        {"lipschitz_pass", tr.lipschitz_pass},
                        {"coercivity_checked", tr.coercivity_checked},
                        {"coercivity_C2", tr.coercivity_C2},
                        {"coercivity_pass", tr.coercivity_pass},
                        {"second_differences", tr.second_differences}};
        pass = tr.all_pass();
    } else {
        const NumericalHamiltonian g = make_flux(H, kind, sigma);
        const FluxPropertyReport fr = check_flux_properties(g, samples, range, seed);
        rep["flux"] = {{"kind", g.kind_name()},
                       {"samples", fr.samples},
                       {"monotonicity", property_json(fr.monotonicity)},
                       {"consistency", property_json(fr.consistency)},
                       {"periodicity", property_json(fr.periodicity)},
                       {"lipschitz", property_json(fr.lipschitz)},
                       {"coercivity", property_json(fr.coercivity)},
                       {"y_independence", property_json(fr.y_independence)}};
        pass = fr.all_pass();
        if (v.flag("assumptions")) {
            const AssumptionReport ar = check_assumptions(H, samples, seed);
            auto one = [](const AssumptionCheck& c) {
                return ordered_json{{"pass", c.pass}, {"observed", c.observed}, {"detail", c.detail}};
            };
            rep["assumptions"] = {{"periodicity", one(ar.periodicity)},
                                  {"regularity", one(ar.regularity)},
                                  {"coercivity", one(ar.coercivity)},
                                  {"geometric", one(ar.geometric)}};
            pass = pass && ar.all_pass();
        }
    }
    rep["pass"] = pass;
    if (v.has("out")) write_file(v.text("out"), rep.dump(1) + "\n");
    out << summary_line({{"check", pass ? "pass" : "fail"}}) << "\n";
    return pass ? kOk : kCheckFailed;
}

int cmd_solve(Values& v, const Provenance& prov, std::ostream& out) {
    const std::string table_path = v.required("table");
    const auto u0 = v.parse("u0", [](const std::string& s) { return parse_initial_datum(s); });
    const double L = v.positive("domain");
    const std::size_t n = v.count("n");
    const double T = v.number("T");
    MarchOptions mo;
    mo.dt = v.number("dt");
    mo.record_every = v.number("record-every");
    if (n == 0) v.violations().push_back("--n must be positive");
    if (T < 0.0) v.violations().push_back("--T must be >= 0");
    v.finish();

    const EffHamTable table = load(table_path);
    std::vector<Axis> axes(table.dim, Axis{n, L});
    const Trajectory tr = solve_homogenized(table, u0, PeriodicGrid(axes), T, mo);
    if (v.has("out")) {
        std::string csv = comment_block(prov.header({"dt: " + format_double(tr.dt)})) + "t,";
        for (std::size_t k = 0; k < tr.grid.dim(); ++k) csv += "x" + std::to_string(k) + ",";
        csv += "u\n";
        std::vector<double> x(tr.grid.dim());
        for (std::size_t f = 0; f < tr.frames.size(); ++f) {
            const GridFunction u = tr.full(f);
            for (std::size_t l = 0; l < u.size(); ++l) {
                tr.grid.coordinates(l, x);
                csv += format_double(tr.times[f]) + ",";
                for (double c : x) csv += format_double(c) + ",";
                csv += format_double(u[l]) + "\n";
            }
        }
        write_file(v.text("out"), csv);
    }
    const GridFunction u = tr.full(tr.frames.size() - 1);
    const auto [lo, hi] = std::minmax_element(u.values().begin(), u.values().end());
    out << summary_line({{"T", format_double(T)},
                         {"min", format_double(*lo)},
                         {"max", format_double(*hi)},
                         {"steps", std::to_string(tr.steps)}})
        << "\n";
    return kOk;
}

void print_error(std::ostream& err, const std::string& code, const std::string& message,
                 ordered_json extra = ordered_json::object()) {
    ordered_json e;
    e["error"] = code;
    e["message"] = message;
    e["exit_code"] = exit_code_for(code);
    for (auto& [k, val] : extra.items()) e[k] = val;
    err << e.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto cmds = commands();
    CLI::App app{"Effective Hamiltonians of oscillating Hamilton-Jacobi equations", "effham"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("effham ") + kVersion);
    std::map<std::string, std::map<std::string, std::string>> flag_values;
    std::map<std::string, std::string> config_path;
    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const auto& c : cmds) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path[c.name], "JSON run configuration; flags override it");
        for (const auto& k : c.keys) {
            auto& slot = flag_values[c.name][k.name];
            std::string help = k.help + (k.def.empty() ? "" : " [" + k.def + "]");
            if (k.kind == Kind::flag) {
                sub->add_flag_callback("--" + k.name, [&slot] { slot = "true"; }, help);
            } else {
                sub->add_option("--" + k.name, slot, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
            }
        }
        subs.emplace_back(sub, &c);
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        print_error(err, "ConfigError", e.what());
        return kConfigError;
    }

    for (const auto& [sub, cmd] : subs) {
        if (!sub->parsed()) continue;
        try {
            std::map<std::string, std::string> flags;
            for (const auto& k : cmd->keys) {
                if (sub->count("--" + k.name) > 0) flags[k.name] = flag_values[cmd->name][k.name];
            }
            Values values(*cmd, merge_config(*cmd, config_path[cmd->name], flags));
            Provenance prov;
            prov.command = cmd->name;
            prov.config = values.echo();
            prov.wall_time = values.flag("wall-time");
            if (cmd->name == "cell") return cmd_cell(values, prov, out);
            if (cmd->name == "tabulate") return cmd_tabulate(values, prov, out, err);
            if (cmd->name == "rate") return cmd_rate(values, prov, out);
            if (cmd->name == "check") return cmd_check(values, prov, out);
            if (cmd->name == "solve") return cmd_solve(values, prov, out);
        } catch (const ConfigError& e) {
            print_error(err, e.code(), e.what(), {{"violations", e.violations()}});
            return kConfigError;
        } catch (const FormatError& e) {
            print_error(err, e.code(), e.what(), {{"line", e.line()}});
            return kIoError;
        } catch (const OutOfHull& e) {
            print_error(err, e.code(), e.what(), {{"nearest_vertex", e.nearest_vertex()}});
            return kSolverError;
        } catch (const GradientOutOfHull& e) {
            print_error(err, e.code(), e.what(), {{"slope", e.slope()}});
            return kSolverError;
        } catch (const MaxPeriodsExceeded& e) {
            print_error(err, e.code(), e.what(), {{"defect", e.defect()}});
            return kSolverError;
        } catch (const InnerIterationDiverged& e) {
            print_error(err, e.code(), e.what(), {{"defect", e.defect()}});
            return kSolverError;
        } catch (const Error& e) {
            print_error(err, e.code(), e.what());
            return exit_code_for(e.code());
        } catch (const std::exception& e) {
            print_error(err, "InternalError", e.what());
            return kSolverError;
        }
    }
    return kConfigError;
}

}  // namespace effham::cli
