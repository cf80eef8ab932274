#pragma once

#include <functional>
#include <map>

#include "degensolve/config.hpp"
#include "degensolve/io.hpp"

namespace degensolve {

struct RunResult {
    nlohmann::json manifest;
    std::map<std::string, std::string> files;  // file name -> content (manifest.json included)
    bool all_hold = true;
    int exit_code() const { return all_hold ? 0 : 1; }
};

/// Resolves the dirichlet spec into a coordinate function.
std::function<double(const Eigen::VectorXd&)> resolve_dirichlet(const DirichletSpec& spec,
                                                                const FamilySpec& family);

/// Executes the configured command; all outputs are produced in memory so the
/// emitter can stay transactional.
RunResult execute_run(const RunConfig& cfg);

/// Writes result.files under out_dir (fail-fast: nothing is kept on error).
void emit_report(const RunResult& result, const std::filesystem::path& out_dir);

}  // namespace degensolve
