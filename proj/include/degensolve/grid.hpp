#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace degensolve {

/// Axis-aligned box domain sampled on a uniform node lattice. The outer
/// shell of nodes is the Dirichlet boundary.
class StructuredGrid {
  public:
    StructuredGrid(int dim,
                   std::array<double, 3> lows,
                   std::array<double, 3> highs,
                   std::array<int, 3> counts);

    static StructuredGrid square(double lo, double hi, int n) {
        return StructuredGrid(2, {lo, lo, 0.0}, {hi, hi, 0.0}, {n, n, 1});
    }

    int dim() const { return dim_; }
    int count(int axis) const { return counts_[axis]; }
    double low(int axis) const { return lows_[axis]; }
    double high(int axis) const { return highs_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }

    std::int64_t num_nodes() const { return total_; }
    std::int64_t num_interior() const { return interior_count_; }

    std::int64_t index(const std::array<int, 3>& m) const {
        std::int64_t idx = m[0];
        for (int d = 1; d < dim_; ++d) idx = idx * counts_[d] + m[d];
        return idx;
    }
    std::array<int, 3> multi_index(std::int64_t idx) const {
        std::array<int, 3> m{0, 0, 0};
        for (int d = dim_ - 1; d >= 0; --d) {
            m[d] = static_cast<int>(idx % counts_[d]);
            idx /= counts_[d];
        }
        return m;
    }
    /// Flat index of the node shifted by `step` along `axis` (caller keeps it in range).
    std::int64_t neighbor(std::int64_t idx, int axis, int step) const { return idx + step * strides_[axis]; }

    bool is_boundary(std::int64_t idx) const { return boundary_mask_[static_cast<std::size_t>(idx)]; }
    const std::vector<bool>& boundary_mask() const { return boundary_mask_; }

    Eigen::VectorXd node(std::int64_t idx) const;
    double coordinate(int axis, int i) const { return lows_[axis] + spacing_[axis] * i; }

    Eigen::VectorXd center() const;
    double diameter() const;

  private:
    int dim_;
    std::array<double, 3> lows_;
    std::array<double, 3> highs_;
    std::array<int, 3> counts_;
    std::array<double, 3> spacing_;
    std::array<std::int64_t, 3> strides_;
    std::int64_t total_ = 0;
    std::int64_t interior_count_ = 0;
    std::vector<bool> boundary_mask_;
};

}  // namespace degensolve
