#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <limits>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "plap/vec.hpp"

namespace plap {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Coords = std::array<int, kMaxDim>;

/// Geometric-coarsening multigrid V-cycle used as a CG preconditioner for
/// weighted lattice Laplacians.
///
/// Coarse levels keep every other lattice node; the prolongation is
/// multilinear interpolation restricted to the fine unknowns, and coarse
/// operators are Galerkin products P^T A P. Forward Gauss-Seidel before and
/// backward Gauss-Seidel after the coarse correction keep the cycle symmetric.
class MultigridPreconditioner {
public:
    MultigridPreconditioner(int dim, const std::vector<Coords>& coords, int sweeps = 1, std::int64_t coarsest = 400)
        : dim_(dim), sweeps_(sweeps) {
        std::vector<Coords> level_coords = coords;
        while (static_cast<std::int64_t>(level_coords.size()) > coarsest && prolongations_.size() < 24) {
            std::vector<Coords> next;
            SparseMatrix P = build_prolongation(level_coords, next);
            if (next.size() * 10 > level_coords.size() * 9) break;
            prolongations_.push_back(std::move(P));
            level_coords = std::move(next);
        }
        levels_.resize(prolongations_.size() + 1);
    }

    std::size_t level_count() const { return levels_.size(); }

    void set_operator(const SparseMatrix& A) {
        levels_[0].A = A;
        for (std::size_t l = 0; l < levels_.size(); ++l) {
            Level& lev = levels_[l];
            if (l > 0) {
                const SparseMatrix& P = prolongations_[l - 1];
                const SparseMatrix AP = levels_[l - 1].A * P;
                lev.A = SparseMatrix(P.transpose()) * AP;
                lev.A.prune(0.0);
            }
            lev.inv_diag.resize(lev.A.rows());
            for (int i = 0; i < lev.A.rows(); ++i) {
                const double a = lev.A.coeff(i, i);
                lev.inv_diag[i] = a > 0 ? 1.0 / a : 0.0;
            }
            lev.x.setZero(lev.A.rows());
            lev.b.setZero(lev.A.rows());
            lev.r.setZero(lev.A.rows());
        }
        Eigen::SparseMatrix<double> coarse = levels_.back().A;
        // A tiny shift keeps the factorization defined if a coarse basis
        // function is redundant; such directions are annihilated by P anyway.
        for (int i = 0; i < coarse.rows(); ++i) coarse.coeffRef(i, i) *= 1.0 + 1e-12;
        coarse_solver_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(coarse);
        if (coarse_solver_->info() != Eigen::Success) throw std::runtime_error("multigrid: coarse factorization failed");
    }

    /// z = M^{-1} r for one V-cycle M.
    void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) {
        levels_[0].b = r;
        cycle(0);
        z = levels_[0].x;
    }

private:
    struct Level {
        SparseMatrix A;
        Eigen::VectorXd inv_diag;
        Eigen::VectorXd x, b, r;
    };

    SparseMatrix build_prolongation(const std::vector<Coords>& fine, std::vector<Coords>& coarse) const {
        Coords lo{}, hi{};
        lo.fill(std::numeric_limits<int>::max());
        hi.fill(std::numeric_limits<int>::min());
        for (const auto& c : fine)
            for (int a = 0; a < dim_; ++a) lo[a] = std::min(lo[a], c[a]), hi[a] = std::max(hi[a], c[a]);
        // Parity is taken relative to an even anchor so that coarse nodes sit on even fine nodes.
        Coords anchor{}, extent{};
        std::int64_t total = 1;
        std::array<std::int64_t, kMaxDim> stride{};
        for (int a = 0; a < dim_; ++a) {
            anchor[a] = lo[a] - (((lo[a] % 2) + 2) % 2);
            extent[a] = (hi[a] - anchor[a]) / 2 + 2;
            stride[a] = total;
            total *= extent[a];
        }
        auto parents = [&](const Coords& c, auto&& visit) {
            std::array<int, kMaxDim> base{}, count{};
            for (int a = 0; a < dim_; ++a) {
                const int rel = c[a] - anchor[a];
                base[a] = rel / 2;
                count[a] = rel % 2 == 0 ? 1 : 2;
            }
            std::array<int, kMaxDim> k{};
            while (true) {
                std::int64_t id = 0;
                double w = 1.0;
                for (int a = 0; a < dim_; ++a) {
                    id += (base[a] + k[a]) * stride[a];
                    if (count[a] == 2) w *= 0.5;
                }
                visit(id, w);
                int a = 0;
                while (a < dim_ && ++k[a] == count[a]) k[a++] = 0;
                if (a == dim_) break;
            }
        };
        std::vector<std::int64_t> index(total, -1);
        for (const auto& c : fine) parents(c, [&](std::int64_t id, double) { index[id] = 0; });
        coarse.clear();
        for (std::int64_t id = 0; id < total; ++id) {
            if (index[id] < 0) continue;
            index[id] = static_cast<std::int64_t>(coarse.size());
            Coords cc{};
            std::int64_t rest = id;
            for (int a = 0; a < dim_; ++a) {
                cc[a] = static_cast<int>(rest % extent[a]);
                rest /= extent[a];
            }
            coarse.push_back(cc);
        }
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(fine.size() * (1u << dim_));
        for (std::size_t i = 0; i < fine.size(); ++i)
            parents(fine[i], [&](std::int64_t id, double w) {
                trip.emplace_back(static_cast<int>(i), static_cast<int>(index[id]), w);
            });
        SparseMatrix P(static_cast<int>(fine.size()), static_cast<int>(coarse.size()));
        P.setFromTriplets(trip.begin(), trip.end());
        return P;
    }

    void gauss_seidel(Level& lev, bool forward) {
        const SparseMatrix& A = lev.A;
        const int n = A.rows();
        const int* outer = A.outerIndexPtr();
        const int* inner = A.innerIndexPtr();
        const double* val = A.valuePtr();
        for (int step = 0; step < n; ++step) {
            const int i = forward ? step : n - 1 - step;
            double sum = lev.b[i];
            double diag = 0.0;
            for (int k = outer[i]; k < outer[i + 1]; ++k) {
                if (inner[k] == i) diag = val[k];
                else sum -= val[k] * lev.x[inner[k]];
            }
            if (diag > 0) lev.x[i] = sum / diag;
        }
    }

    void cycle(std::size_t l) {
        Level& lev = levels_[l];
        if (l + 1 == levels_.size()) {
            lev.x = coarse_solver_->solve(lev.b);
            return;
        }
        lev.x.setZero();
        for (int s = 0; s < sweeps_; ++s) gauss_seidel(lev, true);
        lev.r = lev.b - lev.A * lev.x;
        const SparseMatrix& P = prolongations_[l];
        levels_[l + 1].b = P.transpose() * lev.r;
        cycle(l + 1);
        lev.x += P * levels_[l + 1].x;
        for (int s = 0; s < sweeps_; ++s) gauss_seidel(lev, false);
    }

    int dim_;
    int sweeps_;
    std::vector<SparseMatrix> prolongations_;
    std::vector<Level> levels_;
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> coarse_solver_;
};

}  // namespace plap
