#include "degensolve/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>

#include "degensolve/errors.hpp"

namespace degensolve {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string solution_csv(const StructuredGrid& grid, const Eigen::VectorXd& values) {
    if (values.size() != grid.num_nodes()) throw ParameterError("csv: values size does not match grid");
    std::string out = grid.dim() == 2 ? "x,y,w\n" : "x,y,z,w\n";
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i) {
        const Eigen::VectorXd x = grid.node(i);
        for (int d = 0; d < grid.dim(); ++d) {
            out += format_double(x[d]);
            out += ',';
        }
        out += format_double(values[i]);
        out += '\n';
    }
    return out;
}

std::string manifest_text(const nlohmann::json& manifest) { return manifest.dump(2) + "\n"; }

void write_files(const std::filesystem::path& out_dir, const std::map<std::string, std::string>& files) {
    std::vector<std::filesystem::path> written;
    try {
        std::filesystem::create_directories(out_dir);
        for (const auto& [name, content] : files) {
            const auto path = out_dir / name;
            std::ofstream out(path, std::ios::binary);
            if (!out) throw EmissionError("cannot open " + path.string());
            out << content;
            if (!out) throw EmissionError("write failed for " + path.string());
            written.push_back(path);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) std::filesystem::remove(p, ec);
        throw;
    }
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace degensolve
