#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "plap/domain.hpp"
#include "plap/rng.hpp"

namespace plap {

/// Constants of the cylinder hitting argument for start height h in (0, H).
inline double proof_C1(double H, double h) {
    if (!(h > 0 && h < H)) throw std::domain_error("C1: need 0 < h < H");
    return (h / 2) / (H - h / 2);
}

inline double proof_c(double H, double h, int d) {
    const double c1 = proof_C1(H, h);
    return 8 * H * d / (c1 * c1);
}

inline double proof_T0(double H, double h, double p, double c, double eps) {
    return H * (p - 1) / (proof_C1(H, h) * c * eps * eps);
}

struct GameConfig {
    double p = 1.5;
    int d = 2;  ///< ambient dimension
    double epsilon = 0.05;
    Domain domain;
    BoundaryIndicator payoff;
    Vec start;
    std::optional<double> tilt_c;  ///< player I wins a toss with probability 1/2 + c eps/(p-1)
    std::int64_t max_steps = 0;    ///< 0: 50 T0 with the proof's constants
    std::uint64_t seed = 0;

    double noise_scale() const { return std::sqrt((d - 1) / (p - 1)); }
    double margin() const { return (noise_scale() + 1) * epsilon; }
    /// 2c eps/(p-1); zero under the fair coin.
    double tilt() const { return tilt_c ? 2 * *tilt_c * epsilon / (p - 1) : 0.0; }
    double win_probability() const { return 0.5 + 0.5 * tilt(); }

    /// Height of the cylinder and of the start point, when the domain is a cylinder.
    double height() const { return domain.params.at(2); }
    double start_height() const { return start[d - 1]; }

    std::int64_t step_limit() const {
        if (max_steps > 0) return max_steps;
        if (domain.kind != DomainKind::Cylinder) throw std::invalid_argument("game: max_steps must be set off the cylinder");
        const double H = height(), h = start_height();
        const double c = tilt_c && *tilt_c > 0 ? *tilt_c : proof_c(H, h, d);
        return static_cast<std::int64_t>(std::ceil(50 * proof_T0(H, h, p, c, epsilon)));
    }

    void validate() const {
        if (!(p > 1 && p <= 2)) throw std::invalid_argument("game: p must lie in (1, 2]");
        if (d < 2) throw std::invalid_argument("game: d must be >= 2");
        if (domain.dim != d) throw std::invalid_argument("game: domain dimension differs from d");
        if (!(epsilon > 0)) throw std::invalid_argument("game: epsilon must be positive");
        if (start.size() != d) throw std::invalid_argument("game: start point has the wrong dimension");
        if (tilt_c && !(*tilt_c >= 0)) throw std::invalid_argument("game: tilt_c must be >= 0");
        if (!(win_probability() <= 1)) throw std::invalid_argument("game: tilted coin probability exceeds 1");
        double scale = std::numeric_limits<double>::infinity();
        if (domain.kind == DomainKind::Cylinder) {
            scale = std::min(domain.params[1], domain.params[2]);
        } else {
            for (int a = 0; a < d; ++a) scale = std::min(scale, 0.5 * (domain.bbox.hi[a] - domain.bbox.lo[a]));
        }
        if (!(margin() < scale / 4)) throw std::invalid_argument("game: stopping margin must be below min(R, H)/4");
        if (!domain.inside(start) || domain.distance_to_boundary(start) < margin())
            throw std::invalid_argument("game: start point must be farther than the stopping margin from the boundary");
    }
};

/// What a strategy sees: the start point and the recorded moves and noises so far.
struct History {
    const Vec& start;
    const std::vector<Vec>& moves;
    const std::vector<Vec>& noises;
    std::int64_t step() const { return static_cast<std::int64_t>(moves.size()); }
};

/// A strategy samples a move in the closed ball B(0, eps).
using Strategy = std::function<Vec(const History&, Stream&)>;

inline Strategy zero_strategy(int d) {
    return [d](const History&, Stream&) { return zeros(d); };
}

inline Strategy constant_strategy(const Vec& move) {
    return [move](const History&, Stream&) { return move; };
}

/// Always moves eps straight down the last axis.
inline Strategy pull_down_strategy(int d, double eps) { return constant_strategy(-eps * unit(d, d - 1)); }

/// Samples from another strategy and negates the result.
inline Strategy mirror_strategy(Strategy opponent) {
    return [opponent = std::move(opponent)](const History& h, Stream& rng) -> Vec { return -opponent(h, rng); };
}

/// Mixture of the mirrored opponent (weight (1-t)/(1+t)) and the push eps*up
/// (weight 2t/(1+t)), where t = 2c eps/(p-1).
inline Strategy counter_strategy(Strategy opponent, double c, double eps, double p, const Vec& up) {
    if (!(c >= 0)) throw std::invalid_argument("counter_strategy: c must be >= 0");
    const double t = 2 * c * eps / (p - 1);
    if (!(t < 1)) throw std::domain_error("tilt too large for this ε (t = " + std::to_string(t) + ")");
    const double mirror_weight = (1 - t) / (1 + t);
    const Vec push = eps * up.normalized();
    return [=, opponent = std::move(opponent)](const History& h, Stream& rng) -> Vec {
        if (mirror_weight == 1.0 || rng.uniform() < mirror_weight) return -opponent(h, rng);
        return push;
    };
}

inline std::pair<double, double> counter_weights(double c, double eps, double p) {
    const double t = 2 * c * eps / (p - 1);
    return {(1 - t) / (1 + t), 2 * t / (1 + t)};
}

/// Uniform direction in the orthogonal complement of v, scaled to
/// sqrt((d-1)/(p-1)) |v|.
inline Vec sample_noise(const Vec& v, double p, int d, Stream& rng) {
    if (d < 2) throw std::invalid_argument("sample_noise: d must be >= 2");
    const double len = v.norm();
    if (len == 0.0) return zeros(d);
    const Vec axis = v / len;
    Vec w;
    double norm = 0.0;
    do {
        w = rng.direction(d);
        w -= w.dot(axis) * axis;
        norm = w.norm();
    } while (norm < 1e-6);
    return w * (std::sqrt((d - 1) / (p - 1)) * len / norm);
}

/// log f_n = S_n/2 log((1+t)/(1-t)) + n/2 log(1-t^2).
inline double log_likelihood_ratio(std::int64_t n, std::int64_t S, double t) {
    if (t == 0.0) return 0.0;
    return 0.5 * S * (std::log1p(t) - std::log1p(-t)) + 0.5 * n * std::log1p(-t * t);
}

struct Trajectory {
    std::uint64_t index = 0;
    std::optional<double> tilt_c;
    std::vector<Vec> states;  ///< X_0 .. X_tau, then X_{tau+1} on the boundary when stopped
    std::vector<int> coins;   ///< +1 when player I wins the toss
    std::vector<Vec> moves;
    std::vector<Vec> noises;
    std::optional<std::int64_t> tau;
    bool truncated = false;
    int terminal_coin = 0;
    double payoff = 0.0;
    // Diagnostics indexed by n = 0 .. steps.
    std::vector<double> M, N, log_Q, S;

    std::int64_t steps() const { return static_cast<std::int64_t>(moves.size()); }
    double Q(std::int64_t n) const { return std::exp(log_Q.at(n)); }
};

/// Candidate exit points: projections of X_tau and of X_tau +- margin e_a
/// for the first d-1 axes, kept when within the margin of X_tau.
inline std::vector<Vec> terminal_candidates(const Domain& dom, const Vec& x, double margin) {
    std::vector<Vec> out{dom.boundary_project(x)};
    for (int a = 0; a + 1 < dom.dim; ++a) {
        for (double s : {-1.0, 1.0}) {
            const Vec b = dom.boundary_project(x + s * margin * unit(dom.dim, a));
            if ((b - x).norm() <= margin * (1 + 1e-12)) out.push_back(b);
        }
    }
    return out;
}

namespace detail {

inline void check_noise(const Vec& v, const Vec& w, double scale) {
    const double tol = 1e-10 * std::max(1.0, v.norm());
    if (std::abs(w.dot(v)) > tol * std::max(1.0, w.norm()) || std::abs(w.norm() - scale * v.norm()) > tol)
        throw std::logic_error("noise vector violates orthogonality or magnitude");
}

}  // namespace detail

/// Plays one game. Player I maximizes the payoff, player II minimizes it.
inline Trajectory run_game(const GameConfig& cfg, const Strategy& sI, const Strategy& sII, std::uint64_t traj_index) {
    cfg.validate();
    const int d = cfg.d;
    const double eps = cfg.epsilon, margin = cfg.margin(), t = cfg.tilt(), prob = cfg.win_probability();
    const double c = cfg.tilt_c.value_or(0.0);
    const double drift = 2 * c * eps * eps / (cfg.p - 1);
    const double spread = d * eps * eps / (cfg.p - 1);
    const double log_norm = std::log1p(t * t);
    const std::int64_t limit = cfg.step_limit();

    Trajectory tr;
    tr.index = traj_index;
    tr.tilt_c = cfg.tilt_c;
    Vec x = cfg.start;
    tr.states.push_back(x);
    std::int64_t S = 0;
    auto record = [&](std::int64_t n) {
        const double rho2 = x.head(d - 1).squaredNorm();
        tr.M.push_back(x[d - 1] - drift * n);
        tr.N.push_back(rho2 - spread * n);
        tr.log_Q.push_back(log_likelihood_ratio(n, S, t) - n * log_norm);
        tr.S.push_back(static_cast<double>(S));
    };
    record(0);

    for (std::int64_t n = 0;; ++n) {
        if (cfg.domain.distance_to_boundary(x) < margin) {
            tr.tau = n;
            break;
        }
        if (n == limit) {
            tr.truncated = true;
            break;
        }
        Stream coin(cfg.seed, traj_index, n, Purpose::Coin);
        const bool first = coin.bernoulli(prob);
        const History hist{cfg.start, tr.moves, tr.noises};
        Stream play(cfg.seed, traj_index, n, first ? Purpose::StrategyI : Purpose::StrategyII);
        const Vec v = first ? sI(hist, play) : sII(hist, play);
        if (v.size() != d || v.norm() > eps + 1e-12) throw std::logic_error("strategy move outside B(0, eps)");
        Stream noise(cfg.seed, traj_index, n, Purpose::Noise);
        const Vec w = sample_noise(v, cfg.p, d, noise);
        detail::check_noise(v, w, cfg.noise_scale());
        x = x + v + w;
        S += first ? 1 : -1;
        tr.coins.push_back(first ? 1 : -1);
        tr.moves.push_back(v);
        tr.noises.push_back(w);
        tr.states.push_back(x);
        record(n + 1);
    }

    if (tr.tau) {
        Stream coin(cfg.seed, traj_index, *tr.tau, Purpose::Terminal);
        const bool first = coin.bernoulli(prob);
        tr.terminal_coin = first ? 1 : -1;
        const auto cands = terminal_candidates(cfg.domain, x, margin);
        Vec best = cands.front();
        double best_val = cfg.payoff(best);
        for (const Vec& b : cands) {
            const double val = cfg.payoff(b);
            if (first ? val > best_val : val < best_val) best = b, best_val = val;
        }
        tr.states.push_back(best);
        tr.payoff = best_val;
    }
    return tr;
}

namespace detail {

/// Runs trajectories [0, count) in fixed chunks; each chunk is simulated in
/// parallel and handed to `consume` in index order.
template <class Consume>
void simulate_ordered(const GameConfig& cfg, const Strategy& sI, const Strategy& sII, std::int64_t count, int threads,
                      Consume&& consume) {
    threads = std::max(1, threads);
    constexpr std::int64_t kChunk = 1024;
    std::vector<Trajectory> chunk;
    for (std::int64_t begin = 0; begin < count; begin += kChunk) {
        const std::int64_t size = std::min(kChunk, count - begin);
        chunk.assign(size, {});
        std::vector<std::exception_ptr> errors(threads);
        auto work = [&](int tid) {
            try {
                for (std::int64_t i = tid; i < size; i += threads)
                    chunk[i] = run_game(cfg, sI, sII, static_cast<std::uint64_t>(begin + i));
            } catch (...) {
                errors[tid] = std::current_exception();
            }
        };
        if (threads == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int tid = 0; tid < threads; ++tid) pool.emplace_back(work, tid);
            for (auto& th : pool) th.join();
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
        for (auto& tr : chunk) consume(tr);
    }
}

}  // namespace detail

struct ValueEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t trajectories = 0;
    std::int64_t truncated = 0;
};

/// Summary row per trajectory, as written to CSV.
struct TrajectorySummary {
    std::uint64_t index;
    std::optional<std::int64_t> tau;
    double payoff;
    bool truncated;
    double final_Q;
};

inline ValueEstimate estimate_value(const GameConfig& cfg, const Strategy& sI, const Strategy& sII, std::int64_t n_traj,
                                    int threads = 1, std::vector<TrajectorySummary>* rows = nullptr) {
    if (n_traj < 100) throw std::invalid_argument("estimate_value: need at least 100 trajectories");
    double sum = 0.0, sum_sq = 0.0;
    ValueEstimate est;
    detail::simulate_ordered(cfg, sI, sII, n_traj, threads, [&](const Trajectory& tr) {
        sum += tr.payoff;
        sum_sq += tr.payoff * tr.payoff;
        est.truncated += tr.truncated;
        if (rows) rows->push_back({tr.index, tr.tau, tr.payoff, tr.truncated, tr.Q(tr.steps())});
    });
    est.trajectories = n_traj;
    est.mean = sum / n_traj;
    const double var = std::max(0.0, (sum_sq - n_traj * est.mean * est.mean) / (n_traj - 1));
    est.stderr_ = std::sqrt(var / n_traj);
    return est;
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySummary>& rows) {
    os << "traj,tau,payoff,truncated,final_Q\n" << std::setprecision(17);
    for (const auto& r : rows) {
        os << r.index << ',';
        if (r.tau) os << *r.tau;
        os << ',' << r.payoff << ',' << (r.truncated ? 1 : 0) << ',' << r.final_Q << '\n';
    }
}

struct MartingaleRow {
    std::int64_t checkpoint;
    double mean_M, se_M, mean_N, se_N, mean_Q, se_Q;
};

/// Streaming accumulator of M, N, Q at times n ^ tau for checkpoints n in {0, 1, 2, 4, ...}.
class MartingaleAccumulator {
public:
    MartingaleAccumulator(const GameConfig& cfg) : tilt_c_(cfg.tilt_c) {
        const std::int64_t limit = cfg.step_limit();
        checkpoints_.push_back(0);
        for (std::int64_t n = 1; n <= limit; n *= 2) checkpoints_.push_back(n);
        sums_.assign(checkpoints_.size(), {});
    }

    void add(const Trajectory& tr) {
        if (tr.tilt_c != tilt_c_) throw std::invalid_argument("martingale_report: trajectories from different measures");
        for (std::size_t k = 0; k < checkpoints_.size(); ++k) {
            const std::int64_t n = std::min(checkpoints_[k], tr.steps());
            auto& s = sums_[k];
            const double q = tr.Q(n);
            s[0] += tr.M[n], s[1] += tr.M[n] * tr.M[n];
            s[2] += tr.N[n], s[3] += tr.N[n] * tr.N[n];
            s[4] += q, s[5] += q * q;
        }
        ++count_;
    }

    std::int64_t count() const { return count_; }

    std::vector<MartingaleRow> rows() const {
        if (count_ < 2) throw std::logic_error("martingale_report: need at least two trajectories");
        std::vector<MartingaleRow> out;
        const double n = static_cast<double>(count_);
        auto stat = [&](double sum, double sq) {
            const double mean = sum / n;
            const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1));
            return std::pair{mean, std::sqrt(var / n)};
        };
        for (std::size_t k = 0; k < checkpoints_.size(); ++k) {
            const auto& s = sums_[k];
            const auto [m, sm] = stat(s[0], s[1]);
            const auto [nn, sn] = stat(s[2], s[3]);
            const auto [q, sq] = stat(s[4], s[5]);
            out.push_back({checkpoints_[k], m, sm, nn, sn, q, sq});
        }
        return out;
    }

private:
    std::optional<double> tilt_c_;
    std::vector<std::int64_t> checkpoints_;
    std::vector<std::array<double, 6>> sums_;
    std::int64_t count_ = 0;
};

inline std::vector<MartingaleRow> martingale_report(const std::vector<Trajectory>& trajs, const GameConfig& cfg) {
    MartingaleAccumulator acc(cfg);
    for (const auto& tr : trajs) acc.add(tr);
    return acc.rows();
}

inline void write_martingale_csv(std::ostream& os, const std::vector<MartingaleRow>& rows) {
    os << "checkpoint,mean_M,se_M,mean_N,se_N,mean_Q,se_Q\n" << std::setprecision(17);
    for (const auto& r : rows)
        os << r.checkpoint << ',' << r.mean_M << ',' << r.se_M << ',' << r.mean_N << ',' << r.se_N << ',' << r.mean_Q
           << ',' << r.se_Q << '\n';
}

/// Game on the cylinder B^{d-1}(0,1) x (0,1) started at (0, h) with the ramp
/// payoff on the top.
inline GameConfig lemma_game(double p, int d, double eps, double h = 0.5) {
    GameConfig cfg;
    cfg.p = p;
    cfg.d = d;
    cfg.epsilon = eps;
    cfg.domain = make_cylinder(d - 1, 1.0, 1.0);
    cfg.payoff = cylinder_ramp_indicator(cfg.domain);
    cfg.start = zeros(d);
    cfg.start[d - 1] = h;
    return cfg;
}

}  // namespace plap
