#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degensolve/solver.hpp"

namespace degensolve {

enum class Command { solve, check_conditions, oracle, barrier, convergence, report };

std::string to_string(Command c);

struct FamilySpec {
    std::string name = "identity";
    std::vector<double> params;
};

struct GridSpec {
    int dim = 2;
    std::vector<double> lows{-1.0, -1.0};
    std::vector<double> highs{1.0, 1.0};
    std::vector<int> counts{33, 33};

    StructuredGrid build() const;
};

struct DirichletSpec {
    std::string name;          // named datum, or empty when expr is set
    std::string expr;          // expression over x1..x3
    double value = 0.0;        // parameter of "constant"
};

struct ConditionsSpec {
    std::vector<std::string> flags{"diagonal"};
    std::vector<double> region_center{0.0, 0.0};
    std::vector<double> region_half{1.0, 1.0};
    double z_lo = -1.0;
    double z_hi = 1.0;
    double lambda_bound = 10.0;
    int sample_density = 8;
    double super_exponent = 1.0;
    std::optional<double> bound;
};

struct OracleSpec {
    int m = 1;
    double exclusion_radius = 0.1;
};

struct BarrierSpec {
    std::string omega = "sqrt";  // named modulus: sqrt | linear | power
    double omega_coeff = 1.0;
    double omega_power = 0.5;
    double rbar = 1.0;
    double kappa0 = 1.0;
    double m0 = 1.0;
    double K = 1.0;
    double nu = 0.5;
    int budget = 4096;
    int verify_samples = 40;
    double sigma = 0.05;
    std::vector<double> x0;  // boundary point for the modulus check (optional)
};

struct ChecksSpec {
    bool maximum = false;
    bool comparison = false;
    bool interior = false;
    bool boundary = false;
    double shrink = 0.5;
    double kappa = 0.0;
    std::string dirichlet1_expr;  // second datum of the comparison check
};

struct ConvergenceSpec {
    std::vector<int> grid_counts{33, 65};
};

struct RunConfig {
    Command command = Command::solve;
    FamilySpec family;
    GridSpec grid;
    DirichletSpec dirichlet;
    SolverConfig solver = SolverConfig::defaults();
    ConditionsSpec conditions;
    OracleSpec oracle;
    BarrierSpec barrier;
    ChecksSpec checks;
    ConvergenceSpec convergence;
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 0;
    int threads = 1;

    nlohmann::json echo() const;  // defaults filled, for the run manifest
};

/// Parses a TOML (subset: tables, dotted keys, scalars, same-line arrays,
/// comments) or JSON config file, validates every key and cross-reference,
/// and fills defaults. Throws ConfigError naming the offending key path.
RunConfig parse_config(const std::filesystem::path& path);

/// Same validation applied to an already-loaded JSON document.
RunConfig config_from_json(const nlohmann::json& doc);

/// The TOML-subset reader, exposed for tests.
nlohmann::json toml_to_json(const std::string& text);

}  // namespace degensolve
