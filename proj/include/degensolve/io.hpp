#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "degensolve/solver.hpp"

namespace degensolve {

/// Shortest round-trip decimal form of a double (to_chars), so emitted files
/// are stable across runs.
std::string format_double(double v);

/// CSV of a nodal field: header x,y[,z],w with comma separators and LF endings.
std::string solution_csv(const StructuredGrid& grid, const Eigen::VectorXd& values);

/// Sorted-key UTF-8 JSON with LF ending.
std::string manifest_text(const nlohmann::json& manifest);

/// Writes the file set under out_dir, creating it if needed. On any IO
/// failure the files written so far are removed and EmissionError is thrown.
void write_files(const std::filesystem::path& out_dir, const std::map<std::string, std::string>& files);

/// FNV-1a hash of a string, hex-encoded (manifest determinism checks).
std::string content_hash(const std::string& text);

}  // namespace degensolve
