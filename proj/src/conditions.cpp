#include "degensolve/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "degensolve/errors.hpp"

namespace degensolve {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Sample {
    Vec x;
    double z;
};

std::vector<double> axis_lattice(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    if (n == 1) {
        v[0] = 0.5 * (lo + hi);
        return v;
    }
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return v;
}

std::vector<Sample> lattice_samples(const BoxRegion& region, Interval z_range, int density) {
    if (density < 2) throw ParameterError("condition sweep: sample_density must be >= 2 per axis");
    const int n = region.dim();
    std::vector<std::vector<double>> axes;
    for (int d = 0; d < n; ++d)
        axes.push_back(axis_lattice(region.center[d] - region.half_lengths[d],
                                    region.center[d] + region.half_lengths[d], density));
    const auto zs = axis_lattice(z_range.lo, z_range.hi, density);

    std::vector<Sample> out;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        Vec x(n);
        for (int d = 0; d < n; ++d) x[d] = axes[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
        for (double z : zs) out.push_back({x, z});
        int d = n - 1;
        while (d >= 0 && ++idx[d] == density) { idx[d] = 0; --d; }
        if (d < 0) break;
    }
    return out;
}

void require_symmetric(const Mat& a) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DataError("coefficient matrix is not symmetric at a sample");
}

/// Smallest B^2 with M <= B^2 * S for symmetric PSD M, S; +inf when S is
/// singular in a direction M does not annihilate (witness recorded).
double generalized_sup(const Mat& m, const Mat& s, Vec* witness) {
    const int n = static_cast<int>(m.rows());
    const double ms = m.cwiseAbs().maxCoeff();
    const double ss = s.cwiseAbs().maxCoeff();
    if (ss <= 1e-300) {
        if (ms <= 1e-13 * std::max(1.0, ms)) return 0.0;
        if (ms <= 1e-300) return 0.0;
        if (witness) *witness = Vec::Ones(n).normalized();
        return kInf;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(s);
    const Vec lam = es.eigenvalues();
    const Mat v = es.eigenvectors();
    const double cut = 1e-13 * std::max(lam.maxCoeff(), 1e-30);
    std::vector<int> pos, null;
    for (int i = 0; i < n; ++i) (lam[i] > cut ? pos : null).push_back(i);
    for (int i : null) {
        const Vec dir = v.col(i);
        if (dir.dot(m * dir) > 1e-12 * std::max(1.0, ms)) {
            if (witness) *witness = dir;
            return kInf;
        }
    }
    if (pos.empty()) return 0.0;
    Mat vp(n, static_cast<int>(pos.size()));
    Vec lp(static_cast<int>(pos.size()));
    for (std::size_t j = 0; j < pos.size(); ++j) {
        vp.col(static_cast<int>(j)) = v.col(pos[j]);
        lp[static_cast<int>(j)] = lam[pos[j]];
    }
    const Mat scaled = lp.cwiseSqrt().cwiseInverse().asDiagonal() * (vp.transpose() * m * vp) *
                       lp.cwiseSqrt().cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> es2((scaled + scaled.transpose()) / 2.0);
    return std::max(0.0, es2.eigenvalues().maxCoeff());
}

/// Smallest Lambda with Lambda*diag(k) >= A (as forms); +inf if infeasible.
double smallest_lambda(const Mat& a, const Vec& k) {
    const int n = static_cast<int>(a.rows());
    const double as = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double kc = 1e-13 * std::max(1.0, k.maxCoeff());
    std::vector<int> pos;
    for (int i = 0; i < n; ++i) {
        if (k[i] > kc) {
            pos.push_back(i);
            continue;
        }
        for (int j = 0; j < n; ++j)
            if (std::abs(a(i, j)) > 1e-12 * as) return kInf;
    }
    if (pos.empty()) return 1.0;
    Mat ap(static_cast<int>(pos.size()), static_cast<int>(pos.size()));
    Vec kp(static_cast<int>(pos.size()));
    for (std::size_t r = 0; r < pos.size(); ++r) {
        kp[static_cast<int>(r)] = k[pos[r]];
        for (std::size_t c = 0; c < pos.size(); ++c) ap(static_cast<int>(r), static_cast<int>(c)) = a(pos[r], pos[c]);
    }
    const Mat g = kp.cwiseSqrt().cwiseInverse().asDiagonal() * ap * kp.cwiseSqrt().cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> es((g + g.transpose()) / 2.0);
    return es.eigenvalues().maxCoeff();
}

bool matrix_is_diagonal(const Mat& a) {
    const double s = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j && std::abs(a(i, j)) > 1e-12 * s) return false;
    return true;
}

}  // namespace

std::string to_string(ConditionName c) {
    switch (c) {
        case ConditionName::diagonal: return "diagonal";
        case ConditionName::subordinate: return "subordinate";
        case ConditionName::super_subordinate: return "super_subordinate";
        case ConditionName::subunit: return "subunit";
        case ConditionName::drift_super_subordinate: return "drift_super_subordinate";
        case ConditionName::wirtinger: return "wirtinger";
        case ConditionName::nondegeneracy: return "nondegeneracy";
    }
    return "unknown";
}

nlohmann::json ConditionReport::to_json() const {
    nlohmann::json j;
    j["condition_name"] = to_string(condition_name);
    j["holds"] = holds;
    j["best_constant"] = best_constant;
    j["worst_point"] = std::vector<double>(worst_point.data(), worst_point.data() + worst_point.size());
    j["worst_z"] = worst_z;
    j["samples"] = samples;
    if (bound) j["bound"] = *bound;
    if (!note.empty()) j["note"] = note;
    return j;
}

ConditionReport check_diagonal_equivalence(const CoefficientField& field,
                                           const BoxRegion& region,
                                           Interval z_range,
                                           double lambda_bound,
                                           int sample_density) {
    if (lambda_bound < 1.0) throw ParameterError("diagonal check: lambda_bound must be >= 1");
    if (region.dim() != field.dim) throw ParameterError("diagonal check: region/field dimension mismatch");
    const auto samples = lattice_samples(region, z_range, sample_density);

    ConditionReport rep;
    rep.condition_name = ConditionName::diagonal;
    rep.bound = lambda_bound;
    rep.samples = static_cast<long>(samples.size());
    rep.best_constant = 1.0;
    rep.worst_point = region.center;
    rep.worst_z = 0.5 * (z_range.lo + z_range.hi);
    bool lower_ok = true;

    for (const auto& s : samples) {
        const Mat a = field.matrix(s.x, s.z);
        require_symmetric(a);
        const Vec k = field.k(s.x, s.z);
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());

        Eigen::SelfAdjointEigenSolver<Mat> lo(a - Mat(k.asDiagonal()));
        if (lo.eigenvalues().minCoeff() < -1e-10 * scale) {
            lower_ok = false;
            rep.worst_point = s.x;
            rep.worst_z = s.z;
            rep.note = "lower bound sum k^i xi_i^2 <= xi^t A xi fails";
        }
        const double lam = smallest_lambda(a, k);
        if (lam > rep.best_constant) {
            rep.best_constant = lam;
            if (lower_ok) {
                rep.worst_point = s.x;
                rep.worst_z = s.z;
            }
        }
    }
    rep.holds = lower_ok && rep.best_constant <= lambda_bound * (1.0 + 1e-12);
    return rep;
}

std::vector<ConditionReport> check_subordination_suite(const CoefficientField& field,
                                                       const BoxRegion& region,
                                                       Interval z_range,
                                                       const std::set<ConditionName>& flags,
                                                       const SubordinationOptions& opts) {
    if (flags.empty()) throw ParameterError("subordination suite: empty flag set");
    if (region.dim() != field.dim) throw ParameterError("subordination suite: region/field dimension mismatch");
    const int n = field.dim;
    const auto samples = lattice_samples(region, z_range, opts.sample_density);

    std::vector<ConditionReport> out;
    for (ConditionName flag : flags) {
        ConditionReport rep;
        rep.condition_name = flag;
        rep.bound = opts.bound;
        rep.samples = static_cast<long>(samples.size());
        rep.best_constant = 0.0;
        rep.worst_point = region.center;
        rep.worst_z = 0.5 * (z_range.lo + z_range.hi);

        if (flag == ConditionName::wirtinger) {
            // |grad_{x,z} k| <= C { ||grad^2 k||^{1/2} + dist^{-1/2} } sqrt(k),
            // derivatives by centered differences on k_eval values.
            Vec steps(n + 1);
            for (int d = 0; d < n; ++d) steps[d] = 2e-3 * region.half_lengths[d];
            steps[n] = 1e-3 * std::max(z_range.hi - z_range.lo, 1e-6);

            // The C^2 probe forces an odd density so axis midpoints (where
            // kinks like |x| sit) are part of the lattice.
            const auto probe = lattice_samples(region, z_range, opts.sample_density | 1);
            auto kcomp = [&](int comp, const Vec& x, double z) { return field.k(x, z)[comp]; };
            auto hess_sup = [&](int comp, double shrink) {
                double sup = 0.0;
                for (const auto& s : probe) {
                    for (int a = 0; a < n + 1; ++a)
                        for (int b = a; b < n + 1; ++b) {
                            const double ha = steps[a] * shrink, hb = steps[b] * shrink;
                            auto eval = [&](double da, double db) {
                                Vec x = s.x;
                                double z = s.z;
                                if (a < n) x[a] += da; else z += da;
                                if (b < n) x[b] += db; else z += db;
                                return kcomp(comp, x, z);
                            };
                            double d2;
                            if (a == b)
                                d2 = (eval(ha, 0) - 2.0 * eval(0, 0) + eval(-ha, 0)) / (ha * ha);
                            else
                                d2 = (eval(ha, hb) - eval(ha, -hb) - eval(-ha, hb) + eval(-ha, -hb)) / (4.0 * ha * hb);
                            sup = std::max(sup, std::abs(d2));
                        }
                }
                return sup;
            };

            for (int comp = 0; comp < n; ++comp) {
                const double h1 = hess_sup(comp, 1.0);
                const double h2 = hess_sup(comp, 0.5);
                if (h2 > 1.6 * h1 + 1e-6)
                    throw ParameterError("wirtinger check: k component " + std::to_string(comp) +
                                         " is not C^2 (finite-difference Hessian diverges under refinement)");
                const double hs = std::max(h1, h2);
                for (const auto& s : samples) {
                    double dist = kInf;
                    for (int d = 0; d < n; ++d) {
                        dist = std::min(dist, region.half_lengths[d] - std::abs(s.x[d] - region.center[d]) + steps[d]);
                    }
                    dist = std::min({dist, s.z - z_range.lo + steps[n], z_range.hi - s.z + steps[n]});
                    dist = std::max(dist, 1e-12);
                    Vec grad(n + 1);
                    for (int d = 0; d < n; ++d) {
                        Vec xp = s.x, xm = s.x;
                        xp[d] += steps[d];
                        xm[d] -= steps[d];
                        grad[d] = (kcomp(comp, xp, s.z) - kcomp(comp, xm, s.z)) / (2.0 * steps[d]);
                    }
                    grad[n] = (kcomp(comp, s.x, s.z + steps[n]) - kcomp(comp, s.x, s.z - steps[n])) / (2.0 * steps[n]);
                    const double kv = std::max(kcomp(comp, s.x, s.z), 0.0);
                    const double denom = (std::sqrt(hs) + 1.0 / std::sqrt(dist)) * std::sqrt(kv);
                    double ratio;
                    if (denom <= 1e-300)
                        ratio = grad.norm() <= 1e-9 * (1.0 + std::sqrt(hs)) ? 0.0 : kInf;
                    else
                        ratio = grad.norm() / denom;
                    if (ratio > rep.best_constant) {
                        rep.best_constant = ratio;
                        rep.worst_point = s.x;
                        rep.worst_z = s.z;
                    }
                }
            }
        } else {
            for (const auto& s : samples) {
                const Mat a = field.matrix(s.x, s.z);
                require_symmetric(a);
                double val = 0.0;
                Vec witness;
                if (flag == ConditionName::subordinate) {
                    Mat m = Mat::Zero(n, n);
                    for (int i = 0; i < n; ++i) {
                        const Mat ai = field.matrix_dx(s.x, s.z, i);
                        m += ai.transpose() * ai;
                    }
                    const Mat az = field.matrix_dz(s.x, s.z);
                    m += az.transpose() * az;
                    val = std::sqrt(generalized_sup(m, a, &witness));
                } else if (flag == ConditionName::super_subordinate) {
                    const Mat az = field.matrix_dz(s.x, s.z);
                    const Mat m = az.transpose() * az;
                    const double ks = std::max(field.kstar(s.x, s.z), 0.0);
                    const double weight = std::pow(ks, 2.0 * opts.super_exponent - 1.0);
                    val = std::sqrt(generalized_sup(m, weight * a, &witness));
                } else if (flag == ConditionName::subunit) {
                    const Vec g = field.drift(s.x, s.z);
                    if (matrix_is_diagonal(a)) {
                        const Vec k = field.k(s.x, s.z);
                        double b2 = 0.0;
                        for (int i = 0; i < n; ++i) {
                            if (k[i] <= 1e-13 * std::max(1.0, k.maxCoeff())) {
                                if (std::abs(g[i]) > 1e-12) {
                                    b2 = kInf;
                                    break;
                                }
                            } else {
                                b2 += g[i] * g[i] / a(i, i);
                            }
                        }
                        val = std::sqrt(b2);
                    } else {
                        val = std::sqrt(generalized_sup(g * g.transpose(), a, &witness));
                    }
                } else if (flag == ConditionName::drift_super_subordinate) {
                    const Vec gz = field.drift_dz(s.x, s.z);
                    const double ks = std::max(field.kstar(s.x, s.z), 0.0);
                    val = std::sqrt(generalized_sup(gz * gz.transpose(), ks * a, &witness));
                } else {
                    throw ParameterError("subordination suite: unsupported flag " + to_string(flag));
                }
                if (val > rep.best_constant) {
                    rep.best_constant = val;
                    rep.worst_point = s.x;
                    rep.worst_z = s.z;
                    if (!std::isfinite(val) && witness.size() > 0)
                        rep.note = "violation witness xi recorded at worst point";
                }
            }
        }

        rep.holds = std::isfinite(rep.best_constant) && (!opts.bound || rep.best_constant <= *opts.bound);
        out.push_back(std::move(rep));
    }
    return out;
}

NondegeneracyResult check_nondegeneracy_box(const CoefficientField& field,
                                            const Eigen::VectorXd& x,
                                            double epsilon,
                                            Interval z_range,
                                            int search_budget,
                                            int face_density) {
    if (!(epsilon > 0.0)) throw ParameterError("nondegeneracy: epsilon must be positive");
    const int n = field.dim;
    const auto zs = axis_lattice(z_range.lo, z_range.hi, std::max(face_density, 2));

    // Minimum of k^i - tol_pos over all required face samples of a candidate.
    auto candidate_margin = [&](const BoxRegion& box, Vec* bad_point, double* bad_z, int* bad_comp) {
        double margin = kInf;
        const auto face_axis = [&](int d) {
            return axis_lattice(box.center[d] - box.half_lengths[d], box.center[d] + box.half_lengths[d],
                                face_density);
        };
        std::vector<std::vector<double>> lat;
        for (int d = 0; d < n; ++d) lat.push_back(face_axis(d));
        for (int j = 0; j < n; ++j) {
            for (int side = -1; side <= 1; side += 2) {
                // face y_j = c_j +/- r_j, sampled over the other axes
                std::vector<int> idx(static_cast<std::size_t>(n), 0);
                while (true) {
                    Vec y(n);
                    for (int d = 0; d < n; ++d)
                        y[d] = (d == j) ? box.center[j] + side * box.half_lengths[j]
                                        : lat[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
                    for (double z : zs) {
                        const Vec k = field.k(y, z);
                        const double tol = 1e-12 * (1.0 + k.cwiseAbs().maxCoeff());
                        for (int i = 0; i < n; ++i) {
                            if (i == j) continue;  // this face belongs to T_i only for i != j
                            const double m = k[i] - tol;
                            if (m < margin) {
                                margin = m;
                                if (bad_point) *bad_point = y;
                                if (bad_z) *bad_z = z;
                                if (bad_comp) *bad_comp = i;
                            }
                        }
                    }
                    int d = n - 1;
                    while (d >= 0) {
                        if (d == j) { --d; continue; }
                        if (++idx[d] < face_density) break;
                        idx[d] = 0;
                        --d;
                    }
                    if (d < 0) break;
                }
            }
        }
        return margin;
    };

    // Deterministic candidate order: half-lengths eps/2, eps/4, eps/8; center
    // offsets on a step-eps/8 lattice ordered by max-norm shell then lexicographic.
    NondegeneracyResult result;
    result.report.condition_name = ConditionName::nondegeneracy;
    result.report.holds = false;
    result.report.best_constant = -kInf;
    result.report.worst_point = x;
    result.report.worst_z = z_range.lo;

    int tried = 0;
    const double step = epsilon / 8.0;
    for (double scale : {0.5, 0.25, 0.125}) {
        const double r = epsilon * scale * (1.0 - 1e-12);  // keep strictly below epsilon
        const int max_shell = 4;                           // offsets up to eps/2
        for (int shell = 0; shell <= max_shell; ++shell) {
            std::vector<Vec> offsets;
            std::vector<int> idx(static_cast<std::size_t>(n), -shell);
            while (true) {
                int linf = 0;
                for (int d = 0; d < n; ++d) linf = std::max(linf, std::abs(idx[static_cast<std::size_t>(d)]));
                if (linf == shell) {
                    Vec o(n);
                    for (int d = 0; d < n; ++d) o[d] = step * idx[static_cast<std::size_t>(d)];
                    offsets.push_back(o);
                }
                int d = n - 1;
                while (d >= 0 && ++idx[d] > shell) { idx[d] = -shell; --d; }
                if (d < 0) break;
            }
            for (const Vec& o : offsets) {
                if (o.lpNorm<Eigen::Infinity>() > r / 3.0 + 1e-15) continue;  // x must stay in (1/3)R
                if (tried >= search_budget) break;
                ++tried;
                BoxRegion box(x + o, Vec::Constant(n, r));
                Vec bad;
                double badz = 0.0;
                int badc = 0;
                const double margin = candidate_margin(box, &bad, &badz, &badc);
                if (margin > 0.0) {
                    result.box = box;
                    result.report.holds = true;
                    result.report.best_constant = margin;
                    result.report.worst_point = bad;
                    result.report.worst_z = badz;
                    result.report.samples = tried;
                    return result;
                }
                if (margin > result.report.best_constant) {
                    result.report.best_constant = margin;
                    result.report.worst_point = bad;
                    result.report.worst_z = badz;
                    result.report.note = "best failing candidate: face sample with k^" + std::to_string(badc + 1) +
                                         " below tolerance";
                }
            }
            if (tried >= search_budget) break;
        }
        if (tried >= search_budget) break;
    }
    result.report.samples = tried;
    if (result.report.note.empty()) result.report.note = "no box found within search budget";
    return result;
}

}  // namespace degensolve
