#include "degensolve/grid.hpp"

#include "degensolve/errors.hpp"

namespace degensolve {

StructuredGrid::StructuredGrid(int dim,
                               std::array<double, 3> lows,
                               std::array<double, 3> highs,
                               std::array<int, 3> counts)
    : dim_(dim), lows_(lows), highs_(highs), counts_(counts) {
    if (dim != 2 && dim != 3) throw ParameterError("grid: dim must be 2 or 3");
    total_ = 1;
    for (int d = 0; d < dim_; ++d) {
        if (counts_[d] < 3) throw ParameterError("grid: counts must be >= 3 per axis");
        if (!(highs_[d] > lows_[d])) throw ParameterError("grid: highs must exceed lows");
        spacing_[d] = (highs_[d] - lows_[d]) / (counts_[d] - 1);
        total_ *= counts_[d];
    }
    for (int d = dim_; d < 3; ++d) {
        counts_[d] = 1;
        spacing_[d] = 0.0;
    }
    strides_[dim_ - 1] = 1;
    for (int d = dim_ - 2; d >= 0; --d) strides_[d] = strides_[d + 1] * counts_[d + 1];

    boundary_mask_.assign(static_cast<std::size_t>(total_), false);
    for (std::int64_t i = 0; i < total_; ++i) {
        const auto m = multi_index(i);
        bool b = false;
        for (int d = 0; d < dim_; ++d)
            if (m[d] == 0 || m[d] == counts_[d] - 1) b = true;
        boundary_mask_[static_cast<std::size_t>(i)] = b;
        if (!b) ++interior_count_;
    }
}

Eigen::VectorXd StructuredGrid::node(std::int64_t idx) const {
    const auto m = multi_index(idx);
    Eigen::VectorXd x(dim_);
    for (int d = 0; d < dim_; ++d) x[d] = coordinate(d, m[d]);
    return x;
}

Eigen::VectorXd StructuredGrid::center() const {
    Eigen::VectorXd c(dim_);
    for (int d = 0; d < dim_; ++d) c[d] = 0.5 * (lows_[d] + highs_[d]);
    return c;
}

double StructuredGrid::diameter() const {
    double s = 0.0;
    for (int d = 0; d < dim_; ++d) s += (highs_[d] - lows_[d]) * (highs_[d] - lows_[d]);
    return std::sqrt(s);
}

}  // namespace degensolve
