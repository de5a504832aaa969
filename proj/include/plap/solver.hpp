#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "plap/grid.hpp"
#include "plap/multigrid.hpp"

namespace plap {

struct SolveOptions {
    double delta = 1e-6;  ///< gradient regularization in (|grad u|^2 + delta^2)
    double tol = 1e-8;    ///< max-norm bound on successive-iterate change and on the scaled defect
    int max_iter = 2000;
    int threads = 1;
    bool nested = true;       ///< start from the interpolated solution of the half-resolution grid
    bool line_search = true;  ///< extrapolate each lagged step by exact line search on the energy
    int min_nested_n = 16;
};

/// Discrete p-harmonic approximation. Values are stored per lattice node;
/// exterior nodes hold NaN.
struct GridSolution {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;
    double p = 2.0;
    double delta = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> energy_history;

    const Grid& lattice() const { return *grid; }

    /// Multilinear interpolation of the node values; every corner of the
    /// enclosing cell must be interior or Dirichlet.
    double interpolate(const Vec& x) const {
        const Grid& g = *grid;
        std::vector<int> base(g.dim);
        std::vector<double> t(g.dim);
        for (int a = 0; a < g.dim; ++a) {
            const double s = (x[a] - g.origin[a]) / g.spacing;
            int i = static_cast<int>(std::floor(s));
            i = std::clamp(i, 0, g.dims[a] - 2);
            base[a] = i;
            t[a] = s - i;
            if (t[a] < -1e-9 || t[a] > 1 + 1e-9) throw std::out_of_range("interpolation point outside the lattice");
        }
        double sum = 0.0;
        for (int corner = 0; corner < (1 << g.dim); ++corner) {
            double w = 1.0;
            std::int64_t id = 0;
            for (int a = 0; a < g.dim; ++a) {
                const int bit = (corner >> a) & 1;
                w *= bit ? t[a] : 1.0 - t[a];
                id += (base[a] + bit) * g.strides[a];
            }
            if (w == 0.0) continue;
            if (g.node_class[id] == NodeClass::Exterior)
                throw std::out_of_range("interpolation cell touches an exterior node");
            sum += w * values[id];
        }
        return sum;
    }
};

namespace detail {

template <class Fn>
void parallel_blocks(int blocks, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, blocks));
    if (threads == 1) {
        for (int b = 0; b < blocks; ++b) fn(b);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int b = t; b < blocks; b += threads) fn(b);
        });
    for (auto& th : pool) th.join();
}

/// Kuhn triangulations of the lattice restricted to the cells touching the
/// domain, averaged over the reflections of the first d-1 axes so that the
/// discrete energy inherits the mirror symmetries of the lattice. Each
/// orientation splits a cell into d! simplices, one per axis ordering; inside a
/// simplex the gradient component along the k-th axis of the ordering is the
/// difference across the k-th path edge. Only axis edges appear, so the
/// weighted stiffness matrix is a weighted lattice Laplacian (an M-matrix).
class Triangulation {
public:
    explicit Triangulation(const Grid& g) : grid_(g) {
        dim_ = g.dim;
        const int orientations = 1 << std::max(0, dim_ - 1);
        for (int flip = 0; flip < orientations; ++flip) {
            std::int64_t start = 0;
            for (int a = 0; a < dim_; ++a)
                if ((flip >> a) & 1) start += g.strides[a];
            std::vector<int> perm(dim_);
            std::iota(perm.begin(), perm.end(), 0);
            do {
                Path path;
                std::int64_t off = start;
                path.offset[0] = off;
                for (int k = 0; k < dim_; ++k) {
                    const int a = perm[k];
                    path.axis[k] = a;
                    off += ((flip >> a) & 1) ? -g.strides[a] : g.strides[a];
                    path.offset[k + 1] = off;
                    path.edge[k] = std::min(path.offset[k], path.offset[k + 1]);
                }
                paths_.push_back(path);
            } while (std::next_permutation(perm.begin(), perm.end()));
        }

        std::vector<std::uint8_t> mark(g.node_count(), 0);
        for (std::int64_t id : g.unknowns) {
            for (int corner = 0; corner < (1 << dim_); ++corner) {
                std::int64_t c = id;
                for (int a = 0; a < dim_; ++a)
                    if ((corner >> a) & 1) c -= g.strides[a];
                mark[c] = 1;
            }
        }
        for (std::int64_t c = 0; c < g.node_count(); ++c)
            if (mark[c]) cells_.push_back(c);
        double fact = 1.0;
        for (int k = 2; k <= dim_; ++k) fact *= k;
        volume_ = std::pow(g.spacing, dim_) / (fact * orientations);
    }

    std::size_t simplex_count() const { return cells_.size() * paths_.size(); }
    double volume() const { return volume_; }
    int blocks() const { return kBlocks; }

    /// Calls fn(simplex index, vertex ids, axes) for simplices of one block.
    template <class Fn>
    void for_block(int block, Fn&& fn) const {
        const std::size_t n = cells_.size();
        const std::size_t begin = n * block / kBlocks, end = n * (block + 1) / kBlocks;
        for (std::size_t c = begin; c < end; ++c)
            for (std::size_t k = 0; k < paths_.size(); ++k) fn(c * paths_.size() + k, cells_[c], paths_[k]);
    }

    struct Path {
        std::array<std::int64_t, kMaxDim + 1> offset{};
        std::array<int, kMaxDim> axis{};
        std::array<std::int64_t, kMaxDim> edge{};  ///< lower endpoint of the k-th path edge
    };

    int dim() const { return dim_; }

private:
    // Fixed block count: reductions happen in block order whatever the thread count.
    static constexpr int kBlocks = 64;
    const Grid& grid_;
    int dim_;
    std::vector<Path> paths_;
    std::vector<std::int64_t> cells_;
    double volume_ = 0.0;
};

/// Lagged-diffusivity iteration state for one grid and one p.
class LaggedDiffusivity {
public:
    LaggedDiffusivity(const Grid& g, double p, const SolveOptions& opt) : g_(g), tri_(g), p_(p), opt_(opt) {
        build_pattern();
        weights_.resize(tri_.simplex_count());
        coef_.resize(static_cast<std::size_t>(g.node_count()) * g.dim);
    }

    /// Regularized energy sum over simplices of vol * (|grad u|^2 + delta^2)^{p/2}.
    double energy(const std::vector<double>& u) const {
        std::vector<double> partial(tri_.blocks(), 0.0);
        const double h = g_.spacing, d2 = opt_.delta * opt_.delta;
        detail::parallel_blocks(tri_.blocks(), opt_.threads, [&](int b) {
            double acc = 0.0;
            tri_.for_block(b, [&](std::size_t, std::int64_t c, const Triangulation::Path& path) {
                double s = d2;
                for (int k = 0; k < tri_.dim(); ++k) {
                    const double gk = (u[c + path.offset[k + 1]] - u[c + path.offset[k]]) / h;
                    s += gk * gk;
                }
                acc += std::pow(s, 0.5 * p_);
            });
            partial[b] = acc;
        });
        return tri_.volume() * std::accumulate(partial.begin(), partial.end(), 0.0);
    }

    /// Freezes weights at u and fills A, b. Returns the energy at u.
    double assemble(const std::vector<double>& u) {
        std::vector<double> partial(tri_.blocks(), 0.0);
        const double h = g_.spacing, d2 = opt_.delta * opt_.delta;
        detail::parallel_blocks(tri_.blocks(), opt_.threads, [&](int b) {
            double acc = 0.0;
            tri_.for_block(b, [&](std::size_t idx, std::int64_t c, const Triangulation::Path& path) {
                double s = d2;
                for (int k = 0; k < tri_.dim(); ++k) {
                    const double gk = (u[c + path.offset[k + 1]] - u[c + path.offset[k]]) / h;
                    s += gk * gk;
                }
                const double w = std::pow(s, 0.5 * (p_ - 2.0));
                weights_[idx] = w;
                acc += w * s;
            });
            partial[b] = acc;
        });
        std::fill(coef_.begin(), coef_.end(), 0.0);
        const double scale = tri_.volume() / (h * h);
        const int dim = g_.dim;
        for (int b = 0; b < tri_.blocks(); ++b) {
            tri_.for_block(b, [&](std::size_t idx, std::int64_t c, const Triangulation::Path& path) {
                const double w = scale * weights_[idx];
                for (int k = 0; k < dim; ++k) coef_[(c + path.edge[k]) * dim + path.axis[k]] += w;
            });
        }
        double* val = A_.valuePtr();
        rhs_.setZero(A_.rows());
        for (std::size_t row = 0; row < g_.unknowns.size(); ++row) {
            const std::int64_t id = g_.unknowns[row];
            double diag = 0.0, rhs = 0.0;
            for (int a = 0; a < dim; ++a) {
                const std::int64_t s = g_.strides[a];
                const double fwd = coef_[id * dim + a], bwd = coef_[(id - s) * dim + a];
                diag += fwd + bwd;
                if (g_.node_class[id + s] == NodeClass::Dirichlet) rhs += fwd * g_.dirichlet[id + s];
                if (g_.node_class[id - s] == NodeClass::Dirichlet) rhs += bwd * g_.dirichlet[id - s];
            }
            rhs_[static_cast<int>(row)] = rhs;
            for (int k = A_.outerIndexPtr()[row]; k < A_.outerIndexPtr()[row + 1]; ++k) {
                const std::int64_t e = slot_edge_[k];
                val[k] = e < 0 ? diag : -coef_[e];
            }
        }
        return tri_.volume() * std::accumulate(partial.begin(), partial.end(), 0.0);
    }

    const SparseMatrix& matrix() const { return A_; }
    const Eigen::VectorXd& rhs() const { return rhs_; }

    /// Max over unknowns of |(A u - b)_i| / A_ii for the currently assembled system.
    double scaled_defect(const Eigen::VectorXd& x) const {
        const Eigen::VectorXd r = A_ * x - rhs_;
        double worst = 0.0;
        for (int i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i]) / A_.coeff(i, i));
        return worst;
    }

    /// Derivative in t of energy(u + t s) divided by p.
    double directional_slope(const std::vector<double>& u, const std::vector<double>& s, double t) const {
        std::vector<double> partial(tri_.blocks(), 0.0);
        const double h = g_.spacing, d2 = opt_.delta * opt_.delta;
        detail::parallel_blocks(tri_.blocks(), opt_.threads, [&](int b) {
            double acc = 0.0;
            tri_.for_block(b, [&](std::size_t, std::int64_t c, const Triangulation::Path& path) {
                double sq = d2, dot = 0.0;
                for (int k = 0; k < tri_.dim(); ++k) {
                    const std::int64_t lo = c + path.offset[k], hi = c + path.offset[k + 1];
                    const double ds = (s[hi] - s[lo]) / h;
                    const double gk = (u[hi] - u[lo]) / h + t * ds;
                    sq += gk * gk;
                    dot += gk * ds;
                }
                acc += std::pow(sq, 0.5 * (p_ - 2.0)) * dot;
            });
            partial[b] = acc;
        });
        return tri_.volume() * std::accumulate(partial.begin(), partial.end(), 0.0);
    }

private:
    void build_pattern() {
        const auto n = static_cast<int>(g_.unknowns.size());
        const int dim = g_.dim;
        A_.resize(n, n);
        A_.reserve(Eigen::VectorXi::Constant(n, 2 * dim + 1));
        std::vector<std::pair<int, std::int64_t>> entries;
        for (int row = 0; row < n; ++row) {
            const std::int64_t id = g_.unknowns[row];
            entries.clear();
            entries.emplace_back(row, -1);
            for (int a = 0; a < dim; ++a) {
                const std::int64_t s = g_.strides[a];
                if (g_.unknown_of[id + s] >= 0) entries.emplace_back(static_cast<int>(g_.unknown_of[id + s]), id * dim + a);
                if (g_.unknown_of[id - s] >= 0)
                    entries.emplace_back(static_cast<int>(g_.unknown_of[id - s]), (id - s) * dim + a);
            }
            std::sort(entries.begin(), entries.end());
            for (const auto& [col, edge] : entries) A_.insert(row, col) = 0.0;
        }
        A_.makeCompressed();
        slot_edge_.resize(A_.nonZeros());
        for (int row = 0; row < n; ++row) {
            const std::int64_t id = g_.unknowns[row];
            for (int k = A_.outerIndexPtr()[row]; k < A_.outerIndexPtr()[row + 1]; ++k) {
                const int col = A_.innerIndexPtr()[k];
                if (col == row) {
                    slot_edge_[k] = -1;
                    continue;
                }
                const std::int64_t nb = g_.unknowns[col];
                for (int a = 0; a < dim; ++a) {
                    if (nb == id + g_.strides[a]) slot_edge_[k] = id * dim + a;
                    if (nb == id - g_.strides[a]) slot_edge_[k] = nb * dim + a;
                }
            }
        }
    }

    const Grid& g_;
    Triangulation tri_;
    double p_;
    SolveOptions opt_;
    SparseMatrix A_;
    Eigen::VectorXd rhs_;
    std::vector<std::int64_t> slot_edge_;
    std::vector<double> weights_;
    std::vector<double> coef_;
};

/// Preconditioned CG; stops when the Jacobi-scaled residual drops below tol.
inline int pcg(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, MultigridPreconditioner& M,
               double tol, int max_iter = 1000) {
    const Eigen::VectorXd diag = A.diagonal();
    auto scaled_norm = [&](const Eigen::VectorXd& r) { return (r.array() / diag.array()).abs().maxCoeff(); };
    Eigen::VectorXd r = b - A * x;
    if (scaled_norm(r) <= tol) return 0;
    Eigen::VectorXd z(r.size()), q(r.size()), Aq(r.size());
    M.apply(r, z);
    q = z;
    double rz = r.dot(z);
    for (int it = 1; it <= max_iter; ++it) {
        Aq.noalias() = A * q;
        const double alpha = rz / q.dot(Aq);
        x += alpha * q;
        r -= alpha * Aq;
        if (scaled_norm(r) <= tol) return it;
        M.apply(r, z);
        const double rz_next = r.dot(z);
        q = z + (rz_next / rz) * q;
        rz = rz_next;
    }
    return max_iter;
}

inline std::vector<double> initial_values(const Grid& g) {
    std::vector<double> u(g.node_count(), std::numeric_limits<double>::quiet_NaN());
    for (std::int64_t id = 0; id < g.node_count(); ++id) {
        if (g.node_class[id] == NodeClass::Dirichlet) u[id] = g.dirichlet[id];
        else if (g.node_class[id] == NodeClass::Interior) u[id] = 0.0;
    }
    return u;
}

/// Interpolates a coarse solution onto the interior nodes of a finer grid,
/// renormalizing over the non-exterior corners of each coarse cell.
inline void prolongate(const GridSolution& coarse, const Grid& fine, std::vector<double>& u) {
    const Grid& cg = *coarse.grid;
    for (std::int64_t id : fine.unknowns) {
        const Vec x = fine.position(id);
        std::vector<int> base(cg.dim);
        std::vector<double> t(cg.dim);
        for (int a = 0; a < cg.dim; ++a) {
            const double s = (x[a] - cg.origin[a]) / cg.spacing;
            base[a] = std::clamp(static_cast<int>(std::floor(s)), 0, cg.dims[a] - 2);
            t[a] = std::clamp(s - base[a], 0.0, 1.0);
        }
        double sum = 0.0, wsum = 0.0;
        for (int corner = 0; corner < (1 << cg.dim); ++corner) {
            double w = 1.0;
            std::int64_t cid = 0;
            for (int a = 0; a < cg.dim; ++a) {
                const int bit = (corner >> a) & 1;
                w *= bit ? t[a] : 1.0 - t[a];
                cid += (base[a] + bit) * cg.strides[a];
            }
            if (cg.node_class[cid] == NodeClass::Exterior || w == 0.0) continue;
            sum += w * coarse.values[cid];
            wsum += w;
        }
        if (wsum > 0) u[id] = sum / wsum;
    }
}

}  // namespace detail

inline GridSolution solve(std::shared_ptr<const Grid> grid, double p, const SolveOptions& opt = {});

/// Minimizes the regularized discrete p-Dirichlet energy by lagged diffusivity:
/// each step freezes the weights (|grad u_k|^2 + delta^2)^{(p-2)/2} and solves
/// the weighted Laplace problem with multigrid-preconditioned CG.
///
/// For p <= 2 each step does not increase the energy. The step is then
/// extrapolated by an exact line search on the (convex) energy and clamped to
/// the range of the boundary data; neither can increase the energy either.
inline GridSolution solve(std::shared_ptr<const Grid> grid, double p, const SolveOptions& opt) {
    if (!(p > 1 && p <= 2)) throw std::domain_error("solve: p must lie in (1, 2]");
    if (!(opt.delta > 0)) throw std::invalid_argument("solve: delta must be positive");
    if (!(opt.tol > 0)) throw std::invalid_argument("solve: tol must be positive");
    const Grid& g = *grid;

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::int64_t id = 0; id < g.node_count(); ++id)
        if (g.node_class[id] == NodeClass::Dirichlet) lo = std::min(lo, g.dirichlet[id]), hi = std::max(hi, g.dirichlet[id]);

    std::vector<double> u = detail::initial_values(g);
    if (opt.nested && g.n % 2 == 0 && g.n / 2 >= opt.min_nested_n) {
        try {
            auto coarse_grid = std::make_shared<const Grid>(discretize(g.domain, g.boundary, g.n / 2, g.mollify));
            SolveOptions copt = opt;
            copt.tol = std::max(opt.tol, 1e-6);
            const GridSolution coarse = solve(coarse_grid, p, copt);
            detail::prolongate(coarse, g, u);
        } catch (const std::runtime_error&) {
            // Coarse lattice has no interior: start from zero.
        }
    }

    detail::LaggedDiffusivity lagged(g, p, opt);
    std::vector<Coords> coords(g.unknowns.size());
    for (std::size_t i = 0; i < g.unknowns.size(); ++i) {
        const auto m = g.index_of(g.unknowns[i]);
        coords[i].fill(0);
        std::copy(m.begin(), m.end(), coords[i].begin());
    }
    MultigridPreconditioner mg(g.dim, coords);

    GridSolution sol;
    sol.grid = grid;
    sol.p = p;
    sol.delta = opt.delta;

    const auto n = static_cast<int>(g.unknowns.size());
    Eigen::VectorXd x(n);
    std::vector<double> step(g.node_count(), 0.0);
    double change = std::numeric_limits<double>::infinity();
    for (int iter = 0;; ++iter) {
        const double energy = lagged.assemble(u);
        if (!std::isfinite(energy)) throw std::runtime_error("solve: NaN encountered in the energy");
        sol.energy_history.push_back(energy);
        for (int i = 0; i < n; ++i) x[i] = u[g.unknowns[i]];
        if (iter > 0) {
            sol.residual = lagged.scaled_defect(x);
            if (change <= opt.tol && sol.residual <= opt.tol) {
                sol.converged = true;
                sol.iterations = iter;
                break;
            }
        }
        if (iter == opt.max_iter) {
            sol.iterations = iter;
            break;
        }
        mg.set_operator(lagged.matrix());
        detail::pcg(lagged.matrix(), lagged.rhs(), x, mg, 0.01 * opt.tol);
        if (!x.allFinite()) throw std::runtime_error("solve: NaN encountered in the linear solve");

        for (int i = 0; i < n; ++i) step[g.unknowns[i]] = x[i] - u[g.unknowns[i]];
        double t = 1.0;
        if (opt.line_search && p < 2) {
            const double t_max = 2.0 / (p - 1.0);
            if (lagged.directional_slope(u, step, 1.0) < 0) {
                double a = 1.0, b = 2.0;
                while (b < t_max && lagged.directional_slope(u, step, b) < 0) a = b, b *= 2;
                b = std::min(b, t_max);
                if (lagged.directional_slope(u, step, b) < 0) {
                    t = b;
                } else {
                    for (int k = 0; k < 30 && b - a > 1e-3 * a; ++k) {
                        const double mid = 0.5 * (a + b);
                        (lagged.directional_slope(u, step, mid) < 0 ? a : b) = mid;
                    }
                    t = a;
                }
            }
        }
        change = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::int64_t id = g.unknowns[i];
            const double next = std::clamp(u[id] + t * step[id], lo, hi);
            change = std::max(change, std::abs(next - u[id]));
            u[id] = next;
        }
    }
    sol.values = std::move(u);
    return sol;
}

inline GridSolution solve(const Grid& grid, double p, const SolveOptions& opt = {}) {
    return solve(std::make_shared<const Grid>(grid), p, opt);
}

/// Regularized discrete energy of arbitrary node values on the solver's triangulation.
inline double discrete_energy(const Grid& g, const std::vector<double>& values, double p, double delta) {
    SolveOptions opt;
    opt.delta = delta;
    return detail::LaggedDiffusivity(g, p, opt).energy(values);
}

/// Node-wise sol1 <= sol2 within 1e-6 on interior and Dirichlet nodes.
inline bool compare(const GridSolution& a, const GridSolution& b) {
    if (!a.grid->same_layout(*b.grid) || a.p != b.p) throw std::invalid_argument("compare: grid or p mismatch");
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.grid->node_class[i] == NodeClass::Exterior) continue;
        if (a.values[i] > b.values[i] + 1e-6) return false;
    }
    return true;
}

/// One-sided difference quotients (u(x0 + h n) - F(x0))/h for each h.
inline std::vector<double> difference_quotients(const GridSolution& sol, const Domain& dom, const Vec& x0,
                                                const std::vector<double>& h_list) {
    const auto normal = dom.inward_normal(x0);
    if (!normal) throw std::domain_error("boundary_derivative: inward normal undefined at x0");
    const Grid& g = *sol.grid;
    const double f0 = g.boundary_value(x0);
    std::vector<double> out;
    for (double h : h_list) {
        if (!(h >= 2 * g.spacing * (1 - 1e-12)))
            throw std::invalid_argument("boundary_derivative: h = " + std::to_string(h) + " is below two grid spacings");
        const Vec probe = x0 + h * *normal;
        if (!dom.inside(probe))
            throw std::out_of_range("boundary_derivative: probe at h = " + std::to_string(h) + " leaves the domain");
        out.push_back((sol.interpolate(probe) - f0) / h);
    }
    return out;
}

/// Normal derivative estimate: difference quotients at each h, then linear
/// Richardson extrapolation through the two smallest h.
inline double boundary_derivative(const GridSolution& sol, const Domain& dom, const Vec& x0,
                                  std::vector<double> h_list) {
    if (h_list.empty()) throw std::invalid_argument("boundary_derivative: empty h list");
    std::sort(h_list.begin(), h_list.end());
    const auto q = difference_quotients(sol, dom, x0, h_list);
    if (q.size() == 1 || h_list[1] == h_list[0]) return q[0];
    const double h1 = h_list[0], h2 = h_list[1];
    return (h2 * q[0] - h1 * q[1]) / (h2 - h1);
}

/// Flux defect of nodal values on a 1D radial grid: the radial weak form says
/// r^{d-1} |u'|^{p-2} u' is constant. Returns max |F_{i+1/2} - F_{i-1/2}| / max |F|.
inline double radial_flux_defect(const std::vector<double>& r, const std::vector<double>& u, double p, int d) {
    if (r.size() != u.size() || r.size() < 3) throw std::invalid_argument("radial_flux_defect: need matching r, u with >= 3 nodes");
    std::vector<double> flux(r.size() - 1);
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const double slope = (u[i + 1] - u[i]) / (r[i + 1] - r[i]);
        const double mid = 0.5 * (r[i] + r[i + 1]);
        flux[i] = std::pow(mid, d - 1) * std::pow(std::abs(slope), p - 2) * slope;
        scale = std::max(scale, std::abs(flux[i]));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < flux.size(); ++i) worst = std::max(worst, std::abs(flux[i + 1] - flux[i]));
    return scale > 0 ? worst / scale : worst;
}

/// CSV with header x,y[,z],u over interior and Dirichlet nodes in node order.
inline void write_solution_csv(std::ostream& os, const GridSolution& sol) {
    static const char* names[] = {"x", "y", "z", "x4", "x5", "x6"};
    const Grid& g = *sol.grid;
    for (int a = 0; a < g.dim; ++a) os << names[a] << ',';
    os << "u\n" << std::setprecision(17);
    for (std::int64_t id = 0; id < g.node_count(); ++id) {
        if (g.node_class[id] == NodeClass::Exterior) continue;
        const Vec x = g.position(id);
        for (int a = 0; a < g.dim; ++a) os << x[a] << ',';
        os << sol.values[id] << '\n';
    }
}

}  // namespace plap
