#include "mtc/annealing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include <Eigen/QR>

namespace mtc::annealing {
namespace {

using transform::TransformBasis;
using transform::TruncatedDct;

void check_inputs(std::span<const Clip> clips, std::span<const TruncatedDct> dcts) {
    if (clips.size() != dcts.size()) throw ShapeError("clip count does not match DCT count");
    for (std::size_t i = 0; i < clips.size(); ++i) {
        if (clips[i].length() != dcts[i].length) {
            throw ShapeError("clip " + std::to_string(i) + " length does not match its DCT");
        }
    }
}

// Residuals from precomputed right transforms P_i = M_i D~_i, using
// ||M_i - B S D~^T||^2 = ||M_i||^2 - ||B^T P_i||^2 for orthonormal B and D~.
Matrix residuals_from_projected(std::span<const Matrix> projected, std::span<const double> energies,
                                std::span<const TransformBasis> bases) {
    Matrix r(projected.size(), bases.size());
    for (std::size_t i = 0; i < projected.size(); ++i) {
        for (std::size_t j = 0; j < bases.size(); ++j) {
            if (bases[j].rows() != projected[i].rows()) throw ShapeError("basis rows do not match clip rows");
            const double kept = frobenius_sq(multiply_at_b(bases[j].matrix, projected[i]));
            r(i, j) = std::max(0.0, energies[i] - kept);
        }
    }
    return r;
}

double weighted_sum(const Matrix& w, const Matrix& r) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w.values()[i] * r.values()[i];
    return s;
}

std::uint64_t basis_seed(std::uint64_t seed, std::size_t j) {
    return seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(j + 1);
}

// Two bases spanning nearly the same subspace see nearly identical residuals,
// so the softmax keeps them tied as the temperature falls. The later copy is
// re-aimed at the top-k directions the pair leaves unexplained over the clips
// they share, and the move is kept only if it lowers sum_i min_j residual.
std::size_t split_duplicates(std::vector<TransformBasis>& bases, Matrix& residuals, std::span<const Matrix> projected,
                             std::span<const double> energies, const Matrix& w) {
    constexpr double overlap_threshold = 0.95;  // mean squared cosine of the principal angles
    auto hard_objective = [](const Matrix& r) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.rows(); ++i) {
            const auto row = r.row(i);
            s += *std::min_element(row.begin(), row.end());
        }
        return s;
    };
    std::size_t splits = 0;
    for (std::size_t b = 1; b < bases.size(); ++b) {
        const double k = static_cast<double>(bases[b].components());
        for (std::size_t a = 0; a < b; ++a) {
            const Matrix& ba = bases[a].matrix;
            if (frobenius_sq(multiply_at_b(ba, bases[b].matrix)) < k * overlap_threshold) continue;
            Matrix r(ba.rows(), ba.rows());
            double shared = 0.0;
            for (std::size_t i = 0; i < projected.size(); ++i) {
                const double wi = w(i, a) + w(i, b);
                if (wi == 0.0) continue;
                const Matrix q = projected[i] - multiply(ba, multiply_at_b(ba, projected[i]));
                r = r + wi * multiply_a_bt(q, q);
                shared += wi * frobenius_sq(projected[i]);
            }
            if (trace(r) <= 1e-12 * shared) continue;
            std::vector<TransformBasis> trial = bases;
            trial[b] = transform::top_eigenvectors(r, bases[b].components());
            Matrix trial_residuals = residuals_from_projected(projected, energies, trial);
            const double before = hard_objective(residuals);
            if (hard_objective(trial_residuals) >= before - 1e-12 * std::max(before, 1.0)) continue;
            bases = std::move(trial);
            residuals = std::move(trial_residuals);
            ++splits;
            break;
        }
    }
    return splits;
}

}  // namespace

Matrix residual_energies(std::span<const Clip> clips, std::span<const TruncatedDct> dcts,
                         std::span<const TransformBasis> bases) {
    check_inputs(clips, dcts);
    Matrix r(clips.size(), bases.size());
    for (std::size_t i = 0; i < clips.size(); ++i) {
        for (std::size_t j = 0; j < bases.size(); ++j) {
            const auto s = transform::project_clip(bases[j], clips[i], dcts[i]);
            r(i, j) = frobenius_sq(clips[i].data - transform::reconstruct_clip(bases[j].matrix, s.matrix, dcts[i]));
        }
    }
    return r;
}

AssignmentMatrix weights_from_residuals(const Matrix& residuals, double temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw InvalidArgument("temperature must be positive and finite");
    }
    AssignmentMatrix out{Matrix(residuals.rows(), residuals.cols()), temperature};
    for (std::size_t i = 0; i < residuals.rows(); ++i) {
        const auto row = residuals.row(i);
        const double lowest = *std::min_element(row.begin(), row.end());
        double denom = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double e = std::exp(-(row[j] - lowest) / temperature);
            out.weights(i, j) = e;
            denom += e;
        }
        for (std::size_t j = 0; j < row.size(); ++j) out.weights(i, j) /= denom;
    }
    return out;
}

AssignmentMatrix update_weights(std::span<const Clip> clips, std::span<const TruncatedDct> dcts,
                                std::span<const TransformBasis> bases, double temperature) {
    if (!(temperature > 0.0)) throw InvalidArgument("temperature must be positive");
    if (bases.empty()) throw InvalidArgument("at least one basis is required");
    return weights_from_residuals(residual_energies(clips, dcts, bases), temperature);
}

Matrix accumulate_Cj(std::span<const Clip> clips, std::span<const TruncatedDct> dcts, const AssignmentMatrix& w,
                     std::size_t j) {
    if (j >= w.bases()) {
        throw InvalidArgument("basis index " + std::to_string(j) + " out of range (K = " + std::to_string(w.bases()) +
                              ")");
    }
    if (w.clips() != clips.size()) throw ShapeError("assignment rows do not match clip count");
    std::vector<double> column(clips.size());
    for (std::size_t i = 0; i < clips.size(); ++i) column[i] = w.weights(i, j);
    return transform::accumulate_weighted(clips, dcts, column);
}

std::vector<std::size_t> hard_assign(const AssignmentMatrix& w) {
    std::vector<std::size_t> out(w.clips(), 0);
    for (std::size_t i = 0; i < w.clips(); ++i) {
        const auto row = w.weights.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < row.size(); ++j)
            if (row[j] > row[best]) best = j;
        out[i] = best;
    }
    return out;
}

Matrix random_orthonormal(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    if (cols == 0 || cols > rows) throw InvalidArgument("random_orthonormal needs 1 <= cols <= rows");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
    return from_eigen(q);
}

AnnealResult anneal(std::span<const Clip> clips, std::span<const TruncatedDct> dcts, const AnnealOptions& options) {
    check_inputs(clips, dcts);
    std::vector<Matrix> projected;
    std::vector<double> energies;
    projected.reserve(clips.size());
    energies.reserve(clips.size());
    for (std::size_t i = 0; i < clips.size(); ++i) {
        projected.push_back(transform::right_transform(clips[i], dcts[i]));
        energies.push_back(frobenius_sq(clips[i].data));
    }
    return anneal_projected(projected, energies, options);
}

namespace {

// One run of the alternating iteration; t0 (given or derived) is multiplied by temperature_scale.
AnnealResult anneal_once(std::span<const Matrix> projected, std::span<const double> energies,
                         const AnnealOptions& options, double temperature_scale) {
    const std::size_t n_clips = projected.size();
    const std::size_t n_bases = options.bases;
    const std::size_t rows = projected.front().rows();
    std::vector<TransformBasis> bases;
    bases.reserve(n_bases);
    for (std::size_t j = 0; j < n_bases; ++j) {
        bases.push_back({random_orthonormal(rows, options.components, basis_seed(options.seed, j)), {}});
    }

    Matrix residuals = residuals_from_projected(projected, energies, bases);
    double t = 0.0;
    if (options.initial_temperature) {
        t = *options.initial_temperature;
        if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("initial temperature must be positive");
    } else {
        double sum = 0.0;
        for (double v : residuals.values()) sum += v;
        t = sum / static_cast<double>(residuals.size());
        if (!(t > 0.0)) t = 1.0;
    }
    t *= temperature_scale;

    AnnealResult result;
    result.initial_temperature = t;
    AssignmentMatrix w{Matrix(n_clips, n_bases, 1.0 / static_cast<double>(n_bases)), t};
    std::vector<double> previous_objectives;

    for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
        IterationRecord rec;
        rec.temperature = t;

        AssignmentMatrix next = weights_from_residuals(residuals, t);
        rec.soft_objective_before_basis_update = weighted_sum(next.weights, residuals);

        std::vector<Matrix> weighted_c(n_bases, Matrix(rows, rows));
        for (std::size_t i = 0; i < n_clips; ++i) {
            const Matrix g = multiply_a_bt(projected[i], projected[i]);
            for (std::size_t j = 0; j < n_bases; ++j) {
                const double wij = next.weights(i, j);
                if (wij == 0.0) continue;
                auto dst = weighted_c[j].values();
                const auto src = g.values();
                for (std::size_t e = 0; e < dst.size(); ++e) dst[e] += wij * src[e];
            }
        }
        for (std::size_t j = 0; j < n_bases; ++j) {
            bases[j] = transform::top_eigenvectors(weighted_c[j], options.components);
        }

        residuals = residuals_from_projected(projected, energies, bases);
        rec.soft_objective_after_basis_update = weighted_sum(next.weights, residuals);

        std::vector<double> objectives(n_bases, 0.0);
        for (std::size_t i = 0; i < n_clips; ++i)
            for (std::size_t j = 0; j < n_bases; ++j) objectives[j] += next.weights(i, j) * residuals(i, j);

        rec.weight_change = max_abs_diff(next.weights, w.weights);
        if (previous_objectives.empty()) {
            rec.objective_change = std::numeric_limits<double>::infinity();
        } else {
            for (std::size_t j = 0; j < n_bases; ++j) {
                const double d = std::fabs(objectives[j] - previous_objectives[j]) / (1.0 + std::fabs(objectives[j]));
                rec.objective_change = std::max(rec.objective_change, d);
            }
        }

        if (rec.weight_change < options.tolerance && rec.objective_change < options.tolerance) {
            rec.splits = split_duplicates(bases, residuals, projected, energies, next.weights);
        }

        w = std::move(next);
        previous_objectives = std::move(objectives);
        result.trace.push_back(rec);
        result.iterations = iter;
        result.final_objective = rec.splits > 0 ? weighted_sum(w.weights, residuals) : rec.soft_objective_after_basis_update;

        if (rec.splits == 0 && rec.weight_change < options.tolerance && rec.objective_change < options.tolerance) {
            result.converged = true;
            break;
        }
        t /= 2.0;
    }

    result.bases = std::move(bases);
    result.assignment = std::move(w);
    result.hard_assignment = hard_assign(result.assignment);
    if (!result.converged) {
        const std::string msg = "annealing did not converge within " + std::to_string(options.max_iterations) +
                                " iterations";
        throw ConvergenceError(msg, std::move(result));
    }
    return result;
}

}  // namespace

AnnealResult anneal_projected(std::span<const Matrix> projected, std::span<const double> energies,
                              const AnnealOptions& options) {
    if (projected.size() != energies.size()) throw ShapeError("energy count does not match clip count");
    const std::size_t n_clips = projected.size();
    const std::size_t n_bases = options.bases;
    if (n_bases == 0) throw InvalidArgument("K must be at least 1");
    if (n_clips < n_bases) {
        throw InvalidArgument("more bases (K = " + std::to_string(n_bases) + ") than clips (N = " +
                              std::to_string(n_clips) + ")");
    }
    const std::size_t rows = projected.front().rows();
    for (const auto& p : projected) {
        if (p.rows() != rows) throw ShapeError("clips differ in row count");
    }
    if (options.components == 0 || options.components > rows) {
        throw InvalidArgument("k = " + std::to_string(options.components) + " must lie in [1, " +
                              std::to_string(rows) + "]");
    }
    if (!(options.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (options.max_iterations == 0) throw InvalidArgument("max_iterations must be positive");
    if (options.restarts == 0) throw InvalidArgument("restarts must be at least 1");

    std::optional<AnnealResult> best;
    std::optional<ConvergenceError> best_failure;
    for (std::size_t r = 0; r < options.restarts; ++r) {
        AnnealOptions run = options;
        run.seed = options.seed + 0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(r);
        const double scale = std::ldexp(1.0, -2 * static_cast<int>(r));
        try {
            AnnealResult res = anneal_once(projected, energies, run, scale);
            res.restart = r;
            if (!best || res.final_objective < best->final_objective) best = std::move(res);
        } catch (const ConvergenceError& e) {
            if (!best_failure || e.last_state().final_objective < best_failure->last_state().final_objective) {
                AnnealResult last = e.last_state();
                last.restart = r;
                best_failure.emplace(e.what(), std::move(last));
            }
        }
    }
    if (best) return std::move(*best);
    throw *best_failure;
}

}  // namespace mtc::annealing
