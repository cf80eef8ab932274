#include "degensolve/config.hpp"

#include <fstream>
#include <sstream>

#include "degensolve/coefficient_field.hpp"
#include "degensolve/expr.hpp"

namespace degensolve {

std::string to_string(Command c) {
    switch (c) {
        case Command::solve: return "solve";
        case Command::check_conditions: return "check-conditions";
        case Command::oracle: return "oracle";
        case Command::barrier: return "barrier";
        case Command::convergence: return "convergence";
        case Command::report: return "report";
    }
    return "unknown";
}

StructuredGrid GridSpec::build() const {
    if (dim != static_cast<int>(lows.size()) || dim != static_cast<int>(highs.size()) ||
        dim != static_cast<int>(counts.size()))
        throw ConfigError("grid: lows/highs/counts must all have length `grid.dim`");
    std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};
    std::array<int, 3> ct{1, 1, 1};
    for (int d = 0; d < dim; ++d) {
        lo[static_cast<std::size_t>(d)] = lows[static_cast<std::size_t>(d)];
        hi[static_cast<std::size_t>(d)] = highs[static_cast<std::size_t>(d)];
        ct[static_cast<std::size_t>(d)] = counts[static_cast<std::size_t>(d)];
    }
    return StructuredGrid(dim, lo, hi, ct);
}

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& path, const std::string& why) {
    throw ConfigError("config key '" + path + "': " + why);
}

struct Walker {
    const json& doc;

    void expect_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) const {
        if (!obj.is_object()) bad_key(path, "expected a table");
        for (const auto& [key, _] : obj.items()) {
            bool ok = false;
            for (const char* a : allowed)
                if (key == a) ok = true;
            if (!ok) bad_key(path.empty() ? key : path + "." + key, "unknown key");
        }
    }

    template <typename T>
    T get(const json& obj, const std::string& path, const std::string& key, T fallback) const {
        if (!obj.contains(key)) return fallback;
        try {
            return obj.at(key).get<T>();
        } catch (const json::exception&) {
            bad_key(path + "." + key, "type mismatch");
        }
    }
};

std::vector<double> as_doubles(const json& j, const std::string& path) {
    if (!j.is_array()) bad_key(path, "expected an array");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) bad_key(path, "expected numeric entries");
        v.push_back(e.get<double>());
    }
    return v;
}

}  // namespace

RunConfig config_from_json(const json& doc) {
    Walker w{doc};
    w.expect_keys(doc, "",
                  {"command", "out", "seed", "threads", "family", "grid", "dirichlet", "solver", "conditions",
                   "oracle", "barrier", "checks", "convergence"});

    RunConfig cfg;
    const std::string cmd = w.get<std::string>(doc, "", "command", "solve");
    if (cmd == "solve") cfg.command = Command::solve;
    else if (cmd == "check-conditions") cfg.command = Command::check_conditions;
    else if (cmd == "oracle") cfg.command = Command::oracle;
    else if (cmd == "barrier") cfg.command = Command::barrier;
    else if (cmd == "convergence") cfg.command = Command::convergence;
    else if (cmd == "report") cfg.command = Command::report;
    else bad_key("command", "unknown command '" + cmd + "'");

    cfg.out_dir = w.get<std::string>(doc, "", "out", "out");
    cfg.seed = w.get<std::uint64_t>(doc, "", "seed", 0);
    cfg.threads = w.get<int>(doc, "", "threads", 1);
    if (cfg.threads < 1) bad_key("threads", "must be >= 1");

    if (doc.contains("family")) {
        const json& f = doc.at("family");
        w.expect_keys(f, "family", {"name", "params"});
        cfg.family.name = w.get<std::string>(f, "family", "name", "identity");
        if (f.contains("params")) cfg.family.params = as_doubles(f.at("params"), "family.params");
        try {
            make_builtin_family(cfg.family.name, cfg.family.params);
        } catch (const ParameterError& e) {
            bad_key("family.name", e.what());
        }
    }

    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        w.expect_keys(g, "grid", {"dim", "lows", "highs", "counts"});
        if (g.contains("lows")) cfg.grid.lows = as_doubles(g.at("lows"), "grid.lows");
        if (g.contains("highs")) cfg.grid.highs = as_doubles(g.at("highs"), "grid.highs");
        if (g.contains("counts")) {
            cfg.grid.counts.clear();
            for (double v : as_doubles(g.at("counts"), "grid.counts")) cfg.grid.counts.push_back(static_cast<int>(v));
        }
        cfg.grid.dim = w.get<int>(g, "grid", "dim", static_cast<int>(cfg.grid.lows.size()));
        try {
            cfg.grid.build();
        } catch (const std::exception& e) {
            bad_key("grid", e.what());
        }
    }

    if (doc.contains("dirichlet")) {
        const json& d = doc.at("dirichlet");
        w.expect_keys(d, "dirichlet", {"name", "expr", "value"});
        cfg.dirichlet.name = w.get<std::string>(d, "dirichlet", "name", "");
        cfg.dirichlet.expr = w.get<std::string>(d, "dirichlet", "expr", "");
        cfg.dirichlet.value = w.get<double>(d, "dirichlet", "value", 0.0);
        if (cfg.dirichlet.name.empty() && cfg.dirichlet.expr.empty())
            bad_key("dirichlet", "needs either `name` or `expr`");
        if (!cfg.dirichlet.expr.empty()) {
            try {
                Expression::parse(cfg.dirichlet.expr);
            } catch (const std::exception& e) {
                bad_key("dirichlet.expr", e.what());
            }
        } else {
            const std::string& n = cfg.dirichlet.name;
            if (n != "zero" && n != "constant" && n != "oracle" && n != "sine" && n != "saddle" &&
                n != "cubic_harmonic")
                bad_key("dirichlet.name", "unknown datum '" + n + "'");
            if (n == "oracle" && cfg.family.name != "sharpness")
                bad_key("dirichlet.name", "'oracle' datum requires the sharpness family");
        }
    }

    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        w.expect_keys(s, "solver",
                      {"eps_ladder", "eps_first", "eps_last", "newton_tol", "max_newton_iters", "M"});
        if (s.contains("eps_ladder")) {
            cfg.solver.eps_ladder = as_doubles(s.at("eps_ladder"), "solver.eps_ladder");
        } else if (s.contains("eps_first") || s.contains("eps_last")) {
            const double first = w.get<double>(s, "solver", "eps_first", 1.0);
            const double last = w.get<double>(s, "solver", "eps_last", std::ldexp(1.0, -20));
            cfg.solver.eps_ladder.clear();
            for (double e = first; e >= last * (1.0 - 1e-12); e *= 0.5) cfg.solver.eps_ladder.push_back(e);
        }
        cfg.solver.newton_tol = w.get<double>(s, "solver", "newton_tol", cfg.solver.newton_tol);
        cfg.solver.max_newton_iters = w.get<int>(s, "solver", "max_newton_iters", cfg.solver.max_newton_iters);
        if (s.contains("M")) cfg.solver.M = w.get<double>(s, "solver", "M", 0.0);
        try {
            cfg.solver.validate();
        } catch (const ParameterError& e) {
            bad_key("solver.eps_ladder", e.what());
        }
    }

    if (doc.contains("conditions")) {
        const json& c = doc.at("conditions");
        w.expect_keys(c, "conditions",
                      {"flags", "region_center", "region_half", "z_lo", "z_hi", "lambda_bound", "sample_density",
                       "super_exponent", "bound"});
        if (c.contains("flags")) {
            cfg.conditions.flags.clear();
            for (const auto& f : c.at("flags")) {
                const std::string name = f.get<std::string>();
                if (name != "diagonal" && name != "subordinate" && name != "super_subordinate" &&
                    name != "subunit" && name != "drift_super_subordinate" && name != "wirtinger")
                    bad_key("conditions.flags", "unknown condition '" + name + "'");
                cfg.conditions.flags.push_back(name);
            }
        }
        if (c.contains("region_center"))
            cfg.conditions.region_center = as_doubles(c.at("region_center"), "conditions.region_center");
        if (c.contains("region_half"))
            cfg.conditions.region_half = as_doubles(c.at("region_half"), "conditions.region_half");
        cfg.conditions.z_lo = w.get<double>(c, "conditions", "z_lo", cfg.conditions.z_lo);
        cfg.conditions.z_hi = w.get<double>(c, "conditions", "z_hi", cfg.conditions.z_hi);
        cfg.conditions.lambda_bound = w.get<double>(c, "conditions", "lambda_bound", cfg.conditions.lambda_bound);
        cfg.conditions.sample_density = w.get<int>(c, "conditions", "sample_density", cfg.conditions.sample_density);
        cfg.conditions.super_exponent = w.get<double>(c, "conditions", "super_exponent", cfg.conditions.super_exponent);
        if (c.contains("bound")) cfg.conditions.bound = w.get<double>(c, "conditions", "bound", 0.0);
    }

    if (doc.contains("oracle")) {
        const json& o = doc.at("oracle");
        w.expect_keys(o, "oracle", {"m", "exclusion_radius"});
        cfg.oracle.m = w.get<int>(o, "oracle", "m", 1);
        cfg.oracle.exclusion_radius = w.get<double>(o, "oracle", "exclusion_radius", 0.1);
        if (cfg.oracle.m < 1) bad_key("oracle.m", "must be a positive integer");
        if (!(cfg.oracle.exclusion_radius > 0.0)) bad_key("oracle.exclusion_radius", "must be positive");
    }

    if (doc.contains("barrier")) {
        const json& b = doc.at("barrier");
        w.expect_keys(b, "barrier",
                      {"omega", "omega_coeff", "omega_power", "rbar", "kappa0", "m0", "K", "nu", "budget",
                       "verify_samples", "sigma", "x0"});
        cfg.barrier.omega = w.get<std::string>(b, "barrier", "omega", "sqrt");
        if (cfg.barrier.omega != "sqrt" && cfg.barrier.omega != "linear" && cfg.barrier.omega != "power")
            bad_key("barrier.omega", "unknown modulus '" + cfg.barrier.omega + "'");
        cfg.barrier.omega_coeff = w.get<double>(b, "barrier", "omega_coeff", 1.0);
        cfg.barrier.omega_power = w.get<double>(b, "barrier", "omega_power", 0.5);
        cfg.barrier.rbar = w.get<double>(b, "barrier", "rbar", 1.0);
        cfg.barrier.kappa0 = w.get<double>(b, "barrier", "kappa0", 1.0);
        cfg.barrier.m0 = w.get<double>(b, "barrier", "m0", 1.0);
        cfg.barrier.K = w.get<double>(b, "barrier", "K", 1.0);
        cfg.barrier.nu = w.get<double>(b, "barrier", "nu", 0.5);
        cfg.barrier.budget = w.get<int>(b, "barrier", "budget", 4096);
        cfg.barrier.verify_samples = w.get<int>(b, "barrier", "verify_samples", 40);
        cfg.barrier.sigma = w.get<double>(b, "barrier", "sigma", 0.05);
        if (b.contains("x0")) cfg.barrier.x0 = as_doubles(b.at("x0"), "barrier.x0");
        if (!(cfg.barrier.kappa0 > 0.0)) bad_key("barrier.kappa0", "must be positive");
    }

    if (doc.contains("checks")) {
        const json& c = doc.at("checks");
        w.expect_keys(c, "checks", {"maximum", "comparison", "interior", "boundary", "shrink", "kappa", "dirichlet1_expr"});
        cfg.checks.maximum = w.get<bool>(c, "checks", "maximum", false);
        cfg.checks.comparison = w.get<bool>(c, "checks", "comparison", false);
        cfg.checks.interior = w.get<bool>(c, "checks", "interior", false);
        cfg.checks.boundary = w.get<bool>(c, "checks", "boundary", false);
        cfg.checks.shrink = w.get<double>(c, "checks", "shrink", 0.5);
        cfg.checks.kappa = w.get<double>(c, "checks", "kappa", 0.0);
        cfg.checks.dirichlet1_expr = w.get<std::string>(c, "checks", "dirichlet1_expr", "");
        if (!cfg.checks.dirichlet1_expr.empty()) {
            try {
                Expression::parse(cfg.checks.dirichlet1_expr);
            } catch (const std::exception& e) {
                bad_key("checks.dirichlet1_expr", e.what());
            }
        }
    }

    if (doc.contains("convergence")) {
        const json& c = doc.at("convergence");
        w.expect_keys(c, "convergence", {"grid_counts"});
        if (c.contains("grid_counts")) {
            cfg.convergence.grid_counts.clear();
            for (double v : as_doubles(c.at("grid_counts"), "convergence.grid_counts"))
                cfg.convergence.grid_counts.push_back(static_cast<int>(v));
        }
        for (int n : cfg.convergence.grid_counts)
            if (n < 5) bad_key("convergence.grid_counts", "grids must have at least 5 nodes per axis");
    }

    return cfg;
}

nlohmann::json RunConfig::echo() const {
    json j;
    j["command"] = to_string(command);
    j["seed"] = seed;
    j["threads"] = threads;
    j["family"] = {{"name", family.name}, {"params", family.params}};
    j["grid"] = {{"dim", grid.dim}, {"lows", grid.lows}, {"highs", grid.highs}, {"counts", grid.counts}};
    j["dirichlet"] = {{"name", dirichlet.name}, {"expr", dirichlet.expr}, {"value", dirichlet.value}};
    j["solver"] = {{"eps_ladder", solver.eps_ladder},
                   {"newton_tol", solver.newton_tol},
                   {"max_newton_iters", solver.max_newton_iters}};
    if (solver.M) j["solver"]["M"] = *solver.M;
    j["conditions"] = {{"flags", conditions.flags},
                       {"region_center", conditions.region_center},
                       {"region_half", conditions.region_half},
                       {"z_lo", conditions.z_lo},
                       {"z_hi", conditions.z_hi},
                       {"lambda_bound", conditions.lambda_bound},
                       {"sample_density", conditions.sample_density},
                       {"super_exponent", conditions.super_exponent}};
    j["oracle"] = {{"m", oracle.m}, {"exclusion_radius", oracle.exclusion_radius}};
    j["barrier"] = {{"omega", barrier.omega},   {"omega_coeff", barrier.omega_coeff},
                    {"omega_power", barrier.omega_power}, {"rbar", barrier.rbar},
                    {"kappa0", barrier.kappa0}, {"m0", barrier.m0},
                    {"K", barrier.K},           {"nu", barrier.nu},
                    {"budget", barrier.budget}, {"sigma", barrier.sigma}};
    j["checks"] = {{"maximum", checks.maximum},
                   {"comparison", checks.comparison},
                   {"interior", checks.interior},
                   {"boundary", checks.boundary},
                   {"shrink", checks.shrink},
                   {"kappa", checks.kappa}};
    j["convergence"] = {{"grid_counts", convergence.grid_counts}};
    return j;
}

namespace {

std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

json parse_toml_scalar(const std::string& text, int line_no) {
    const std::string v = trim(text);
    if (v.empty()) throw ConfigError("toml line " + std::to_string(line_no) + ": empty value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw ConfigError("toml line " + std::to_string(line_no) + ": unterminated string");
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '[') {
        if (v.back() != ']') throw ConfigError("toml line " + std::to_string(line_no) + ": unterminated array");
        json arr = json::array();
        std::string body = v.substr(1, v.size() - 2);
        std::string cur;
        int depth = 0;
        bool in_str = false;
        for (char c : body) {
            if (c == '"') in_str = !in_str;
            if (!in_str && c == '[') ++depth;
            if (!in_str && c == ']') --depth;
            if (c == ',' && depth == 0 && !in_str) {
                if (!trim(cur).empty()) arr.push_back(parse_toml_scalar(cur, line_no));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!trim(cur).empty()) arr.push_back(parse_toml_scalar(cur, line_no));
        return arr;
    }
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        if (v.find_first_of(".eE") == std::string::npos &&
            d == static_cast<double>(static_cast<long long>(d)))
            return static_cast<long long>(d);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("toml line " + std::to_string(line_no) + ": cannot parse value '" + v + "'");
    }
}

json* descend(json& root, const std::string& dotted, int line_no) {
    json* node = &root;
    std::stringstream ss(dotted);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        part = trim(part);
        if (part.empty()) throw ConfigError("toml line " + std::to_string(line_no) + ": bad key '" + dotted + "'");
        parts.push_back(part);
    }
    for (const auto& p : parts) {
        if (!node->contains(p)) (*node)[p] = json::object();
        node = &(*node)[p];
    }
    return node;
}

}  // namespace

json toml_to_json(const std::string& text) {
    json root = json::object();
    json* table = &root;
    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("toml line " + std::to_string(line_no) + ": bad table header");
            table = descend(root, line.substr(1, line.size() - 2), line_no);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("toml line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        json* slot = key.find('.') == std::string::npos ? &(*table)[key] : descend(*table, key, line_no);
        *slot = parse_toml_scalar(line.substr(eq + 1), line_no);
    }
    return root;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    json doc;
    if (path.extension() == ".json") {
        try {
            doc = json::parse(buf.str());
        } catch (const json::exception& e) {
            throw ConfigError("config JSON parse error: " + std::string(e.what()));
        }
    } else {
        doc = toml_to_json(buf.str());
    }
    return config_from_json(doc);
}

}  // namespace degensolve
