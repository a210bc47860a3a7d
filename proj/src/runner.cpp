#include "hybell/runner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "hybell/wigner.hpp"

namespace hybell {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

ConfigValue parse_value(const std::string& raw) {
    const std::string v = trim(raw);
    if (v.empty()) throw ConfigError("empty config value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw ConfigError("unterminated string: " + v);
        return v.substr(1, v.size() - 2);
    }
    if (v.front() == '[') {
        if (v.back() != ']') throw ConfigError("unterminated list: " + v);
        std::vector<double> items;
        std::string body = v.substr(1, v.size() - 2);
        std::stringstream ss(body);
        std::string part;
        while (std::getline(ss, part, ',')) {
            part = trim(part);
            if (part.empty()) continue;
            double num;
            if (!parse_number(part, num))
                throw ConfigError("list item is not a number: " + part);
            items.push_back(num);
        }
        return items;
    }
    double num;
    if (parse_number(v, num)) return num;
    return v;  // bare word, treated as a string
}

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double ExperimentConfig::number(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw ConfigError("missing config key: " + key);
    if (const double* d = std::get_if<double>(&it->second)) return *d;
    throw ConfigError("config key is not a number: " + key);
}

double ExperimentConfig::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

int ExperimentConfig::integer_or(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double d = number(key);
    const int i = static_cast<int>(std::llround(d));
    if (std::abs(d - i) > 1e-9) throw ConfigError("config key is not an integer: " + key);
    return i;
}

std::string ExperimentConfig::text_or(const std::string& key,
                                      const std::string& fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
    throw ConfigError("config key is not a string: " + key);
}

std::vector<double> ExperimentConfig::list_or(const std::string& key,
                                              std::vector<double> fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (const auto* l = std::get_if<std::vector<double>>(&it->second)) return *l;
    if (const double* d = std::get_if<double>(&it->second)) return {*d};
    throw ConfigError("config key is not a list: " + key);
}

nlohmann::json ExperimentConfig::echo() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    for (const auto& [key, value] : values) {
        std::visit([&](const auto& v) { j["values"][key] = v; }, value);
    }
    return j;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("bad section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
        const ConfigValue value = parse_value(line.substr(eq + 1));
        if (section.empty() && key == "experiment") {
            if (const std::string* s = std::get_if<std::string>(&value)) {
                config.experiment = *s;
                continue;
            }
            throw ConfigError("experiment must be a string");
        }
        const std::string full = section.empty() ? key : section + "." + key;
        config.values[full] = value;
    }
    return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be key=value: " + assignment);
    const std::string key = trim(assignment.substr(0, eq));
    if (key == "experiment") {
        config.experiment = trim(assignment.substr(eq + 1));
        return;
    }
    config.values[key] = parse_value(assignment.substr(eq + 1));
}

void ResultTable::add_row(const std::vector<double>& row) {
    if (row.size() != columns.size()) throw ShapeError("row width != column count");
    if (data.size() != columns.size()) data.resize(columns.size());
    for (std::size_t c = 0; c < row.size(); ++c) data[c].push_back(row[c]);
}

void ResultTable::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    const std::size_t n = rows();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << format_double(data[c][r]) << (c + 1 < columns.size() ? "," : "\n");
    }
}

ResultTable ResultTable::read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    ResultTable table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV: " + path.string());
    std::stringstream hs(trim(line));
    std::string cell;
    while (std::getline(hs, cell, ',')) table.columns.push_back(cell);
    table.data.resize(table.columns.size());
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::stringstream rs(line);
        std::size_t c = 0;
        while (std::getline(rs, cell, ',')) {
            double v;
            if (!parse_number(cell, v)) throw ConfigError("bad CSV cell: " + cell);
            if (c >= table.columns.size()) throw ConfigError("ragged CSV row");
            table.data[c++].push_back(v);
        }
        if (c != table.columns.size()) throw ConfigError("ragged CSV row");
    }
    return table;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2) throw ShapeError("linspace needs at least 2 points");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / double(n - 1);
    return out;
}

double spearman_rank_correlation(const std::vector<double>& a,
                                 const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw ShapeError("rank correlation needs two equal series");
    auto ranks = [](const std::vector<double>& x) {
        const std::size_t n = x.size();
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
            const double avg = 0.5 * (i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double n = double(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va <= 0 || vb <= 0) return 0.0;
    return cov / std::sqrt(va * vb);
}

std::vector<std::size_t> local_maxima(const std::vector<double>& s) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i)
        if (s[i] > s[i - 1] && s[i] >= s[i + 1]) out.push_back(i);
    return out;
}

// ---------------------------------------------------------------------------
// Experiment drivers

namespace {

struct CommonParams {
    double lambda;
    double omega0;
    Picture picture;
    int cutoff;
    int q_lo, q_hi;
    unsigned threads;
    std::vector<double> times;
};

Picture parse_picture(const std::string& name) {
    if (name == "interaction") return Picture::Interaction;
    if (name == "schroedinger" || name == "schrodinger") return Picture::Schroedinger;
    throw ConfigError("unknown picture: " + name);
}

CommonParams common_params(const ExperimentConfig& c, double default_tmax,
                           int default_tpoints) {
    CommonParams p;
    p.lambda = c.number_or("dynamics.lambda", 1.0);
    p.omega0 = c.number_or("dynamics.omega0", 0.0);
    p.picture = parse_picture(c.text_or("dynamics.picture", "interaction"));
    p.cutoff = c.integer_or("numerics.cutoff", 0);
    p.q_lo = c.integer_or("numerics.q_lo", 0);
    p.q_hi = c.integer_or("numerics.q_hi", 5);
    p.threads = static_cast<unsigned>(c.integer_or("numerics.threads", 0));
    const double t_min = c.number_or("grid.t_min", 0.0);
    const double t_max = c.number_or("grid.t_max", default_tmax);
    const int t_points = c.integer_or("grid.t_points", default_tpoints);
    p.times = linspace(t_min, t_max, t_points);
    return p;
}

DisorderSpec disorder_spec_of(const ExperimentConfig& c, double sigma_override = -1.0) {
    DisorderSpec d;
    d.lambda_bar = c.number_or("disorder.lambda_bar", 1.0);
    d.sigma_lambda = sigma_override >= 0.0 ? sigma_override
                                           : c.number_or("disorder.sigma_lambda", 0.1);
    d.n_realizations = c.integer_or("disorder.n_realizations", 7000);
    d.seed = static_cast<std::uint64_t>(c.number_or("disorder.seed", 12345));
    return d;
}

ExperimentOutput run_fock_dynamics(const ExperimentConfig& c) {
    const CommonParams p = common_params(c, 10.0, 200);
    const std::vector<double> ks = c.list_or("state.k_list", {0, 4, 8});
    ExperimentOutput out;
    out.table.columns = {"k", "t", "bell_max", "entropy"};
    out.column_schema = {{"k", "initial Fock level"},
                         {"t", "dimensionless time"},
                         {"bell_max", "maximal CHSH value"},
                         {"entropy", "entanglement entropy of the qubit"}};
    for (double kd : ks) {
        const int k = static_cast<int>(kd);
        const FockProduct spec{k, QubitVector::excited()};
        const int cutoff = p.cutoff > 0 ? p.cutoff : std::max(16, k + 8);
        const JCParams params{p.lambda, p.omega0, p.picture};
        for (double t : p.times) {
            const HybridState st = evolve_product(ProductSpec{spec}, params, t, cutoff);
            const BellResult r = maximize_bell(st, p.q_lo, p.q_hi);
            out.table.add_row({double(k), t, r.value, entanglement_entropy(st)});
        }
    }
    return out;
}

ExperimentOutput run_smsv_dynamics(const ExperimentConfig& c) {
    const CommonParams p = common_params(c, 10.0, 400);
    const std::vector<double> rs = c.list_or("state.r_list", {0.2, 1.0});
    const double theta = c.number_or("state.theta", 0.0);
    ExperimentOutput out;
    out.table.columns = {"r", "t", "bell_max", "bell_closed_form", "entropy"};
    out.column_schema = {{"r", "squeezing magnitude"},
                         {"t", "dimensionless time"},
                         {"bell_max", "generic eigenvalue-route optimum"},
                         {"bell_closed_form", "closed-form SMSV optimum"},
                         {"entropy", "entanglement entropy of the qubit"}};
    for (double r : rs) {
        const SmsvProduct spec{r, theta, QubitVector::excited()};
        const int cutoff = p.cutoff > 0 ? p.cutoff : smsv_cutoff(r);
        const JCParams params{p.lambda, p.omega0, p.picture};
        for (double t : p.times) {
            const HybridState st = evolve_product(ProductSpec{spec}, params, t, cutoff);
            const BellResult generic = maximize_bell(st, p.q_lo, p.q_hi);
            const BellResult closed = smsv_closed_form(st);
            out.table.add_row(
                {r, t, generic.value, closed.value, entanglement_entropy(st)});
        }
    }
    return out;
}

ExperimentOutput run_heatmap(const ExperimentConfig& c, bool cat) {
    const CommonParams p = common_params(c, 10.0, 200);
    const double a_min = c.number_or("state.alpha_min", 0.05);
    const double a_max = c.number_or("state.alpha_max", 2.0);
    const int a_points = c.integer_or("state.alpha_points", 40);
    const std::vector<double> alphas = linspace(a_min, a_max, a_points);
    ExperimentOutput out;
    out.table.columns = {"alpha", "t", "bell_max"};
    out.column_schema = {{"alpha", "displacement magnitude"},
                         {"t", "dimensionless time"},
                         {"bell_max", "maximal CHSH value"}};
    const JCParams params{p.lambda, p.omega0, p.picture};
    std::vector<std::vector<double>> values(alphas.size());
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        const double alpha = alphas[ai];
        const int cutoff = p.cutoff > 0 ? p.cutoff : coherent_cutoff(alpha);
        values[ai].resize(p.times.size());
        for (std::size_t ti = 0; ti < p.times.size(); ++ti) {
            const double t = p.times[ti];
            HybridState st =
                cat ? evolve_cat(CatState{alpha, M_SQRT1_2, M_SQRT1_2}, params, t, cutoff)
                    : evolve_product(ProductSpec{CoherentProduct{alpha}}, params, t,
                                     cutoff);
            const BellResult r = maximize_bell(st, p.q_lo, p.q_hi);
            values[ai][ti] = r.value;
            out.table.add_row({alpha, t, r.value});
        }
    }
    if (cat) {
        // Connected non-violating cells: the low-alpha river vs high alpha.
        std::vector<std::pair<std::size_t, std::size_t>> low;
        std::size_t high_count = 0;
        for (std::size_t ai = 0; ai < alphas.size(); ++ai)
            for (std::size_t ti = 0; ti < p.times.size(); ++ti) {
                if (values[ai][ti] >= 2.0) continue;
                if (alphas[ai] <= 0.4) low.emplace_back(ai, ti);
                if (alphas[ai] >= 1.0) ++high_count;
            }
        // Flood fill on the low-alpha non-violating cells.
        std::size_t largest = 0;
        std::map<std::pair<std::size_t, std::size_t>, bool> seen;
        for (const auto& cell : low) seen[cell] = false;
        for (const auto& cell : low) {
            if (seen[cell]) continue;
            std::size_t size = 0;
            std::vector<std::pair<std::size_t, std::size_t>> stack{cell};
            seen[cell] = true;
            while (!stack.empty()) {
                auto [ai, ti] = stack.back();
                stack.pop_back();
                ++size;
                const std::pair<std::size_t, std::size_t> nbrs[4] = {
                    {ai + 1, ti}, {ai - 1, ti}, {ai, ti + 1}, {ai, ti - 1}};
                for (const auto& nb : nbrs) {
                    auto it = seen.find(nb);
                    if (it != seen.end() && !it->second) {
                        it->second = true;
                        stack.push_back(nb);
                    }
                }
            }
            largest = std::max(largest, size);
        }
        out.extras["river"] = {{"nonviolating_cells_low_alpha", low.size()},
                               {"largest_connected_component", largest},
                               {"nonviolating_cells_high_alpha", high_count}};
    }
    return out;
}

ExperimentOutput run_classical_mixture(const ExperimentConfig& c) {
    const CommonParams p = common_params(c, 15.0, 400);
    const std::vector<double> alphas = c.list_or("state.alpha_list", {0.2, 1.3});
    const std::vector<double> ps = c.list_or("state.p_list", {0.2, 0.5, 0.8});
    ExperimentOutput out;
    out.table.columns = {"alpha", "p", "t", "bell_max"};
    out.column_schema = {{"alpha", "displacement magnitude"},
                         {"p", "weight of the |e, alpha> branch"},
                         {"t", "dimensionless time"},
                         {"bell_max", "maximal CHSH value"}};
    const JCParams params{p.lambda, p.omega0, p.picture};
    for (double alpha : alphas) {
        const int cutoff = p.cutoff > 0 ? p.cutoff : coherent_cutoff(alpha);
        for (double pw : ps) {
            for (double t : p.times) {
                const HybridMixedState st =
                    evolve_mixture(ClassicalMixture{alpha, pw}, params, t, cutoff);
                const BellResult r = maximize_bell(st, p.q_lo, p.q_hi);
                out.table.add_row({alpha, pw, t, r.value});
            }
        }
    }
    return out;
}

ExperimentOutput run_cat_dynamics(const ExperimentConfig& c) {
    const CommonParams p = common_params(c, 10.0, 400);
    const std::vector<double> alphas = c.list_or("state.alpha_list", {0.2, 1.0});
    const double a1 = c.number_or("state.a1", M_SQRT1_2);
    const double a2 = c.number_or("state.a2", M_SQRT1_2);
    ExperimentOutput out;
    out.table.columns = {"alpha", "t", "bell_max", "entropy"};
    out.column_schema = {{"alpha", "displacement magnitude"},
                         {"t", "dimensionless time"},
                         {"bell_max", "maximal CHSH value"},
                         {"entropy", "entanglement entropy of the qubit"}};
    const JCParams params{p.lambda, p.omega0, p.picture};
    for (double alpha : alphas) {
        const int cutoff = p.cutoff > 0 ? p.cutoff : coherent_cutoff(alpha);
        for (double t : p.times) {
            const HybridState st = evolve_cat(CatState{alpha, a1, a2}, params, t, cutoff);
            const BellResult r = maximize_bell(st, p.q_lo, p.q_hi);
            out.table.add_row({alpha, t, r.value, entanglement_entropy(st)});
        }
    }
    return out;
}

ExperimentOutput run_disorder_oracle(const ExperimentConfig& c) {
    const CommonParams p = common_params(c, 40.0, 400);
    const std::string family = c.text_or("state.family", "fock");
    const std::size_t window = static_cast<std::size_t>(c.integer_or("detection.window", 50));
    const double tol = c.number_or("detection.tol", 0.02);
    QuenchOptions opts;
    opts.q_lo = p.q_lo;
    opts.q_hi = p.q_hi;
    opts.threads = p.threads;

    ExperimentOutput out;
    out.table.columns = {"param",    "t",    "q_oracle", "stderr",
                         "q_oracle_gh", "saturated", "t_cr", "sat_value"};
    out.column_schema = {
        {"param", "family parameter: Fock level k or displacement alpha"},
        {"t", "dimensionless time"},
        {"q_oracle", "quenched oracle-strategy Bell value (Monte Carlo)"},
        {"stderr", "Monte Carlo standard error"},
        {"q_oracle_gh", "Gauss-Hermite value (Fock family; -1 otherwise)"},
        {"saturated", "1 when the saturation detector fired"},
        {"t_cr", "saturation onset time (-1 when not saturated)"},
        {"sat_value", "mean over the saturated window (-1 when not saturated)"}};

    std::vector<double> sweep;
    bool is_fock = family == "fock";
    if (is_fock) {
        sweep = c.list_or("state.k_list", {0, 4, 8});
    } else if (family == "coherent") {
        sweep = c.list_or("state.alpha_list", {c.number_or("state.alpha", 0.2)});
    } else {
        throw ConfigError("disorder_oracle family must be fock or coherent");
    }

    std::vector<double> sat_alphas, sat_values;
    nlohmann::json per_param = nlohmann::json::array();
    for (double param : sweep) {
        InitialStateSpec spec;
        if (is_fock)
            spec = FockProduct{static_cast<int>(param), QubitVector::excited()};
        else
            spec = CoherentProduct{param, QubitVector::excited()};
        const EvolvingFamily fam(spec, p.omega0, p.picture, p.cutoff);
        const DisorderSpec dspec = disorder_spec_of(c);
        const QuenchPart oracle = quenched_oracle(fam, dspec, p.times, opts);
        const auto sat = detect_saturation(p.times, oracle.mean, window, tol);
        nlohmann::json entry = {{"param", param}, {"saturated", sat.has_value()}};
        if (sat) {
            entry["t_cr"] = sat->t_cr;
            entry["sat_value"] = sat->sat_value;
            if (!is_fock) {
                sat_alphas.push_back(param);
                sat_values.push_back(sat->sat_value);
            }
        }
        per_param.push_back(entry);
        for (std::size_t ti = 0; ti < p.times.size(); ++ti) {
            const double gh = is_fock
                                  ? gauss_hermite_oracle(static_cast<int>(param),
                                                         dspec.lambda_bar,
                                                         dspec.sigma_lambda, p.times[ti])
                                  : -1.0;
            out.table.add_row({param, p.times[ti], oracle.mean[ti], oracle.stderr_[ti],
                               gh, sat ? 1.0 : 0.0, sat ? sat->t_cr : -1.0,
                               sat ? sat->sat_value : -1.0});
        }
    }
    out.extras["per_param"] = per_param;
    if (sat_alphas.size() >= 5) {
        const FitResult fit = fit_quartic_even(sat_alphas, sat_values);
        out.extras["quartic_fit"] = {{"a", fit.params[0]},
                                     {"b", fit.params[1]},
                                     {"c", fit.params[2]},
                                     {"residual", fit.residual}};
        // Crossing of the fitted saturation value with the bound 2.
        const double qa = fit.params[2], qb = fit.params[1], qc = fit.params[0] - 2.0;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0 && std::abs(qa) > 1e-12) {
            const double x1 = (-qb - std::sqrt(disc)) / (2.0 * qa);
            const double x2 = (-qb + std::sqrt(disc)) / (2.0 * qa);
            double x = std::numeric_limits<double>::quiet_NaN();
            for (double cand : {std::min(x1, x2), std::max(x1, x2)})
                if (cand > 0.0 && std::isnan(x)) x = cand;
            if (!std::isnan(x)) out.extras["alpha_cr"] = std::sqrt(x);
        }
    }
    return out;
}

ExperimentOutput run_disorder_realistic(const ExperimentConfig& c) {
    const CommonParams p = common_params(c, 40.0, 400);
    const double alpha = c.number_or("state.alpha", 0.2);
    const std::vector<double> sigmas =
        c.list_or("disorder.sigma_list", {0.04, 0.06, 0.08, 0.1, 0.2});
    const std::size_t window = static_cast<std::size_t>(c.integer_or("detection.window", 50));
    const double tol = c.number_or("detection.tol", 0.02);
    QuenchOptions opts;
    opts.q_lo = p.q_lo;
    opts.q_hi = p.q_hi;
    opts.threads = p.threads;

    ExperimentOutput out;
    out.table.columns = {"sigma",  "t", "q_real", "stderr_real", "q_oracle",
                         "stderr_oracle", "lost", "t_cr"};
    out.column_schema = {
        {"sigma", "disorder strength sigma_lambda"},
        {"t", "dimensionless time"},
        {"q_real", "quenched realistic-strategy Bell value"},
        {"stderr_real", "Monte Carlo standard error (realistic)"},
        {"q_oracle", "quenched oracle-strategy Bell value"},
        {"stderr_oracle", "Monte Carlo standard error (oracle)"},
        {"lost", "1 when the violation is permanently lost on the grid"},
        {"t_cr", "last down-crossing of 2 (-1 when still violating)"}};

    std::vector<double> tcr_sigmas_real, tcr_real, tcr_sigmas_orc, tcr_orc;
    nlohmann::json per_sigma = nlohmann::json::array();
    for (double sigma : sigmas) {
        const EvolvingFamily fam(CoherentProduct{alpha, QubitVector::excited()},
                                 p.omega0, p.picture, p.cutoff);
        const DisorderSpec dspec = disorder_spec_of(c, sigma);
        const QuenchSeries series = quenched_series(fam, dspec, p.times, opts);
        const auto lost = detect_violation_loss(p.times, series.q_realistic);
        const auto sat = detect_saturation(p.times, series.q_oracle, window, tol);
        nlohmann::json entry = {{"sigma", sigma}, {"lost", lost.has_value()}};
        if (lost) {
            entry["t_cr_realistic"] = *lost;
            tcr_sigmas_real.push_back(sigma);
            tcr_real.push_back(*lost);
        }
        if (sat) {
            entry["t_cr_oracle"] = sat->t_cr;
            entry["sat_value_oracle"] = sat->sat_value;
            tcr_sigmas_orc.push_back(sigma);
            tcr_orc.push_back(sat->t_cr);
        }
        per_sigma.push_back(entry);
        for (std::size_t ti = 0; ti < p.times.size(); ++ti)
            out.table.add_row({sigma, p.times[ti], series.q_realistic[ti],
                               series.q_realistic_stderr[ti], series.q_oracle[ti],
                               series.q_oracle_stderr[ti], lost ? 1.0 : 0.0,
                               lost ? *lost : -1.0});
    }
    out.extras["per_sigma"] = per_sigma;
    const double x0 = c.number_or("fit.x0", 0.01);
    if (tcr_real.size() >= 5) {
        const FitResult fit = fit_shifted_exponential(tcr_sigmas_real, tcr_real, x0);
        out.extras["realistic_tcr_fit"] = {{"b", fit.params[0]},
                                           {"c", fit.params[1]},
                                           {"d", fit.params[2]},
                                           {"residual", fit.residual}};
    }
    if (tcr_orc.size() >= 5) {
        const FitResult fit = fit_shifted_exponential(tcr_sigmas_orc, tcr_orc, x0);
        out.extras["oracle_tcr_fit"] = {{"b", fit.params[0]},
                                        {"c", fit.params[1]},
                                        {"d", fit.params[2]},
                                        {"residual", fit.residual}};
    }
    return out;
}

ExperimentOutput run_wigner_comparison(const ExperimentConfig& c) {
    const CommonParams p = common_params(c, 10.0, 60);
    const double alpha = c.number_or("state.alpha", 1.0);
    const int cutoff = p.cutoff > 0 ? p.cutoff : coherent_cutoff(alpha);
    WignerGridSpec grid = WignerGridSpec::for_alpha(alpha);
    grid.radius = c.number_or("wigner.radius", grid.radius);
    grid.n_radial = c.integer_or("wigner.n_radial", grid.n_radial);
    grid.n_beta_phi = c.integer_or("wigner.n_beta_phi", grid.n_beta_phi);
    grid.n_qubit_theta = c.integer_or("wigner.n_qubit_theta", grid.n_qubit_theta);
    grid.n_qubit_phi = c.integer_or("wigner.n_qubit_phi", grid.n_qubit_phi);
    grid.quad_tol = c.number_or("wigner.quad_tol", grid.quad_tol);

    ExperimentOutput out;
    out.table.columns = {"t", "bell_max", "bell_excess", "v_n", "norm_residual"};
    out.column_schema = {{"t", "dimensionless time"},
                         {"bell_max", "maximal CHSH value"},
                         {"bell_excess", "max(bell_max - 2, 0)"},
                         {"v_n", "Wigner negativity volume"},
                         {"norm_residual", "quadrature normalization minus 1"}};
    const JCParams params{p.lambda, p.omega0, p.picture};
    std::vector<double> bell_series, vn_series;
    for (double t : p.times) {
        const HybridState st =
            evolve_cat(CatState{alpha, M_SQRT1_2, M_SQRT1_2}, params, t, cutoff);
        const BellResult r = maximize_bell(st, p.q_lo, p.q_hi);
        const NegativityResult nv = negativity_volume(st, grid);
        bell_series.push_back(r.value);
        vn_series.push_back(nv.volume);
        out.table.add_row({t, r.value, std::max(r.value - 2.0, 0.0), nv.volume,
                           nv.normalization - 1.0});
    }
    // Optional full-grid dump of W at a chosen time, for external plotting.
    const std::string dump_path = c.text_or("wigner.grid_dump_path", "");
    if (!dump_path.empty()) {
        const double t_dump = c.number_or("wigner.grid_dump_t", 0.0);
        const HybridState st =
            evolve_cat(CatState{alpha, M_SQRT1_2, M_SQRT1_2}, params, t_dump, cutoff);
        std::ofstream dump(dump_path);
        if (!dump) throw ConfigError("cannot write " + dump_path);
        write_wigner_grid_csv(st, grid, dump);
        out.extras["grid_dump"] = dump_path;
    }
    std::vector<double> excess(bell_series.size());
    for (std::size_t i = 0; i < bell_series.size(); ++i)
        excess[i] = std::max(bell_series[i] - 2.0, 0.0);
    out.extras["spearman_vn_vs_excess"] = spearman_rank_correlation(vn_series, excess);
    out.extras["vn_maxima"] = local_maxima(vn_series);
    out.extras["excess_maxima"] = local_maxima(excess);
    out.extras["extrema_coincide"] =
        local_maxima(vn_series) == local_maxima(excess);
    return out;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
    static const std::vector<ExperimentInfo> catalog = {
        {"fock_dynamics", "fig2", "Bell optimum and entropy for initial Fock states",
         "configs/fock_dynamics.toml"},
        {"smsv_dynamics", "fig3", "SMSV input: generic vs closed-form optimum",
         "configs/smsv_dynamics.toml"},
        {"coherent_heatmap", "fig4", "Bell optimum over the (alpha, t) plane",
         "configs/coherent_heatmap.toml"},
        {"classical_mixture", "fig5", "classically correlated inputs",
         "configs/classical_mixture.toml"},
        {"cat_dynamics", "fig6", "cat-state Bell optimum and entropy",
         "configs/cat_dynamics.toml"},
        {"cat_heatmap", "fig7", "cat-state (alpha, t) plane and non-violating river",
         "configs/cat_heatmap.toml"},
        {"disorder_oracle", "fig8", "quenched oracle strategy and saturation",
         "configs/disorder_oracle.toml"},
        {"disorder_realistic", "fig9", "frozen-settings strategy and loss of violation",
         "configs/disorder_realistic.toml"},
        {"wigner_comparison", "fig10", "negativity volume vs Bell violation",
         "configs/wigner_comparison.toml"},
    };
    return catalog;
}

ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    auto set = [&](const std::string& k, ConfigValue v) { c.values[k] = std::move(v); };
    set("dynamics.lambda", 1.0);
    set("dynamics.omega0", 0.0);
    set("dynamics.picture", std::string("interaction"));
    set("numerics.cutoff", 0.0);
    set("numerics.q_lo", 0.0);
    set("numerics.q_hi", 5.0);
    set("numerics.threads", 0.0);
    set("grid.t_min", 0.0);
    if (experiment == "fock_dynamics") {
        set("state.k_list", std::vector<double>{0, 4, 8});
        set("grid.t_max", 10.0);
        set("grid.t_points", 200.0);
    } else if (experiment == "smsv_dynamics") {
        set("state.r_list", std::vector<double>{0.2, 1.0});
        set("state.theta", 0.0);
        set("grid.t_max", 10.0);
        set("grid.t_points", 400.0);
    } else if (experiment == "coherent_heatmap" || experiment == "cat_heatmap") {
        set("state.alpha_min", 0.05);
        set("state.alpha_max", 2.0);
        set("state.alpha_points", 40.0);
        set("grid.t_max", 10.0);
        set("grid.t_points", 200.0);
    } else if (experiment == "classical_mixture") {
        set("state.alpha_list", std::vector<double>{0.2, 1.3});
        set("state.p_list", std::vector<double>{0.2, 0.5, 0.8});
        set("grid.t_max", 15.0);
        set("grid.t_points", 400.0);
    } else if (experiment == "cat_dynamics") {
        set("state.alpha_list", std::vector<double>{0.2, 1.0});
        set("state.a1", M_SQRT1_2);
        set("state.a2", M_SQRT1_2);
        set("grid.t_max", 10.0);
        set("grid.t_points", 400.0);
    } else if (experiment == "disorder_oracle") {
        set("state.family", std::string("fock"));
        set("state.k_list", std::vector<double>{0, 4, 8});
        set("state.alpha", 0.2);
        set("disorder.lambda_bar", 1.0);
        set("disorder.sigma_lambda", 0.1);
        set("disorder.n_realizations", 7000.0);
        set("disorder.seed", 12345.0);
        set("detection.window", 50.0);
        set("detection.tol", 0.02);
        set("grid.t_max", 40.0);
        set("grid.t_points", 400.0);
    } else if (experiment == "disorder_realistic") {
        set("state.alpha", 0.2);
        set("disorder.lambda_bar", 1.0);
        set("disorder.sigma_list", std::vector<double>{0.04, 0.06, 0.08, 0.1, 0.2});
        set("disorder.n_realizations", 7000.0);
        set("disorder.seed", 12345.0);
        set("detection.window", 50.0);
        set("detection.tol", 0.02);
        set("fit.x0", 0.01);
        set("grid.t_max", 40.0);
        set("grid.t_points", 400.0);
    } else if (experiment == "wigner_comparison") {
        set("state.alpha", 1.0);
        set("grid.t_max", 10.0);
        set("grid.t_points", 60.0);
        set("wigner.n_radial", 96.0);
        set("wigner.n_beta_phi", 96.0);
        set("wigner.n_qubit_theta", 32.0);
        set("wigner.n_qubit_phi", 32.0);
        set("wigner.quad_tol", 1e-6);
    } else {
        throw ConfigError("unknown experiment: " + experiment);
    }
    return c;
}

void validate_config(const ExperimentConfig& config) {
    const ExperimentConfig defaults = default_config(config.experiment);
    for (const auto& [key, value] : config.values) {
        (void)value;
        static const std::set<std::string> extra_keys = {
            "disorder.sigma_lambda", "state.alpha_list", "grid.t_min",
            "disorder.sigma_list", "wigner.radius", "wigner.grid_dump_path",
            "wigner.grid_dump_t", "numerics.tail_tol"};
        if (!defaults.has(key) && !extra_keys.count(key))
            throw ConfigError("unknown config key for " + config.experiment + ": " + key);
    }
    if (config.integer_or("grid.t_points", 2) < 2)
        throw ConfigError("grid.t_points must be >= 2");
    if (config.number_or("grid.t_max", 1.0) <= config.number_or("grid.t_min", 0.0))
        throw ConfigError("grid.t_max must exceed grid.t_min");
    if (config.integer_or("numerics.q_hi", 5) < config.integer_or("numerics.q_lo", 0))
        throw ConfigError("numerics.q_hi must be >= numerics.q_lo");
    if (config.integer_or("disorder.n_realizations", 1) < 1)
        throw ConfigError("disorder.n_realizations must be >= 1");
    if (config.number_or("disorder.sigma_lambda", 0.0) < 0.0)
        throw ConfigError("disorder.sigma_lambda must be >= 0");
    if (config.integer_or("state.alpha_points", 2) < 2)
        throw ConfigError("state.alpha_points must be >= 2");
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
    validate_config(config);
    const std::string& name = config.experiment;
    if (name == "fock_dynamics") return run_fock_dynamics(config);
    if (name == "smsv_dynamics") return run_smsv_dynamics(config);
    if (name == "coherent_heatmap") return run_heatmap(config, false);
    if (name == "cat_heatmap") return run_heatmap(config, true);
    if (name == "classical_mixture") return run_classical_mixture(config);
    if (name == "cat_dynamics") return run_cat_dynamics(config);
    if (name == "disorder_oracle") return run_disorder_oracle(config);
    if (name == "disorder_realistic") return run_disorder_realistic(config);
    if (name == "wigner_comparison") return run_wigner_comparison(config);
    throw ConfigError("unknown experiment: " + name);
}

void write_output(const ExperimentOutput& output, const ExperimentConfig& config,
                  const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    output.table.write_csv(out_dir / (config.experiment + "_results.csv"));

    nlohmann::json meta;
    meta["experiment"] = config.experiment;
    meta["version"] = kVersion;
    meta["config"] = config.echo();
    meta["extras"] = output.extras;
    std::ofstream mf(out_dir / (config.experiment + "_metadata.json"));
    mf << meta.dump(2) << "\n";

    nlohmann::json schema;
    schema["columns"] = output.column_schema;
    schema["order"] = output.table.columns;
    std::ofstream sf(out_dir / (config.experiment + "_schema.json"));
    sf << schema.dump(2) << "\n";
}

}  // namespace hybell
