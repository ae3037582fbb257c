#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtc/error.hpp"
#include "mtc/matrix.hpp"
#include "mtc/sequence.hpp"
#include "mtc/transform.hpp"

namespace mtc::annealing {

/// Soft clip-to-basis assignment: N x K, rows on the probability simplex.
struct AssignmentMatrix {
    Matrix weights;
    double temperature = 0.0;

    std::size_t clips() const noexcept { return weights.rows(); }
    std::size_t bases() const noexcept { return weights.cols(); }
};

/// Diagnostics for one pass of the alternating iteration.
struct IterationRecord {
    double temperature = 0.0;
    /// Soft objective with the new weights and the bases they were computed from.
    double soft_objective_before_basis_update = 0.0;
    /// Same weights, bases re-solved from the weighted C_j.
    double soft_objective_after_basis_update = 0.0;
    /// max |W^(s) - W^(s-1)|
    double weight_change = 0.0;
    /// max_j |obj_j^(s) - obj_j^(s-1)| / (1 + |obj_j^(s)|)
    double objective_change = 0.0;
    /// Bases re-aimed after coinciding with a lower-indexed basis.
    std::size_t splits = 0;
};

struct AnnealResult {
    std::vector<transform::TransformBasis> bases;
    AssignmentMatrix assignment;
    std::vector<std::size_t> hard_assignment;
    std::size_t iterations = 0;
    double initial_temperature = 0.0;
    /// Soft objective sum_i sum_j W_ij ||M_i - B_j S_ij D~^T||^2 at the final state.
    double final_objective = 0.0;
    bool converged = false;
    /// Which run produced this result (0 unless restarts > 1).
    std::size_t restart = 0;
    std::vector<IterationRecord> trace;
};

struct AnnealOptions {
    std::size_t bases = 1;
    std::size_t components = 1;
    /// Defaults to the mean per-clip residual energy under the random initial bases.
    std::optional<double> initial_temperature;
    double tolerance = 1e-6;
    std::size_t max_iterations = 100;
    std::uint64_t seed = 0;
    /// Independent runs, each from fresh random bases and starting 4x cooler than the
    /// previous one (run r starts at t0 / 4^r). The lowest final objective wins.
    std::size_t restarts = 4;
};

/// Raised when max_iterations is reached before the tolerance; carries the last state.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, AnnealResult last) : Error(what), last_(std::move(last)) {}
    const AnnealResult& last_state() const noexcept { return last_; }

private:
    AnnealResult last_;
};

/// ||M_i - B_j S_ij D~_i^T||_F^2 for every clip i and basis j (N x K).
Matrix residual_energies(std::span<const Clip> clips, std::span<const transform::TruncatedDct> dcts,
                         std::span<const transform::TransformBasis> bases);

/// Softmax of -residual / t per row, evaluated in shifted log space.
AssignmentMatrix weights_from_residuals(const Matrix& residuals, double temperature);

AssignmentMatrix update_weights(std::span<const Clip> clips, std::span<const transform::TruncatedDct> dcts,
                                std::span<const transform::TransformBasis> bases, double temperature);

/// C_j = sum_i W_ij M_i D~_i D~_i^T M_i^T
Matrix accumulate_Cj(std::span<const Clip> clips, std::span<const transform::TruncatedDct> dcts,
                     const AssignmentMatrix& w, std::size_t j);

/// Argmax per row; the lowest index wins exact ties.
std::vector<std::size_t> hard_assign(const AssignmentMatrix& w);

/// Random 3n x k matrix with orthonormal columns from a seeded Gaussian draw.
Matrix random_orthonormal(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Alternating S/W/B updates with t halved each pass. Throws ConvergenceError
/// (holding the last state) when max_iterations is reached first.
AnnealResult anneal(std::span<const Clip> clips, std::span<const transform::TruncatedDct> dcts,
                    const AnnealOptions& options);

/// Same iteration on precomputed right transforms P_i = M_i D~_i and clip
/// energies ||M_i||_F^2.
AnnealResult anneal_projected(std::span<const Matrix> projected, std::span<const double> energies,
                              const AnnealOptions& options);

}  // namespace mtc::annealing
