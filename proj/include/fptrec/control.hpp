#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fptrec/fpt.hpp"
#include "fptrec/graph.hpp"
#include "fptrec/heat.hpp"
#include "fptrec/linalg.hpp"

namespace fptrec::control {

/// Boundary control steering the system toward one harmonic target.
struct ControlFunction {
    std::size_t target_index = 0;  ///< which basis function it aims at
    linalg::Vector h0;             ///< over Z_T × B, time-major
};

struct ReconstructionResult {
    graph::VertexFunction mu_interior;       ///< recovered centrality on X\B
    std::vector<ControlFunction> controls;   ///< h₀ per basis function
    linalg::Vector sv_gram;                  ///< singular values of the final-state Gram
    linalg::Vector sv_products;              ///< singular values of the product matrix
    linalg::Vector residuals;                ///< per-equation residual of the final system
    double tol_used = 0.0;
    linalg::TolMode tol_mode = linalg::TolMode::Relative;
    std::size_t rank_products = 0;           ///< rank decided for the final system
    bool projection_only = false;            ///< rank < |X\B|: answer is a projection
    bool horizon_warning = false;            ///< T < |X|: controllability not guaranteed
};

/// output(t) = input(L−1−t) on a time-major array over Z_L × B.
linalg::Vector time_reversal(const linalg::Vector& u, int L, std::size_t nb);

/// Truncation Z_{2T} → Z_T (keeps t < T).
linalg::Vector project_time(const linalg::Vector& u, int T, std::size_t nb);

/// Flatten a B-domain trajectory to a time-major vector over Z_{2T} × B.
linalg::Vector flatten_trajectory(const heat::HeatTrajectory& traj);

/// μ_B-weighted inner product on Z_T × B (time-major vectors).
double weighted_time_dot(const graph::Graph& g, const linalg::Vector& u,
                         const linalg::Vector& v);

/// Gram matrix of the final-state map: column k = P_T R_{2T−1} U^{e_k},
/// so that ⟨f, [gram] f'⟩ reproduces ⟨U^f(T), U^{f'}(T)⟩_X. T|B|×T|B|,
/// built from data alone.
linalg::Matrix final_state_gram(const fpt::FptTensor& r, int T);

/// Adjoint of the final-state map applied to a harmonic function:
/// W*φ = R_{T−1} Λ R_{T−1} (1_T ⊗ Δφ|_B) + 1_T ⊗ φ|_B. Reads μ only on
/// B. Rejects φ that fails the μ-free harmonicity residual (1e−10).
linalg::Vector final_state_adjoint_harmonic(const linalg::Matrix& lambda,
                                            const graph::Graph& g,
                                            const graph::VertexFunction& phi, int T);

/// Max deviation of the adjoint identity Λ* = R_{T−1} Λ R_{T−1} in the
/// μ_B-weighted product over `trials` random source pairs.
double adjoint_deviation(const linalg::Matrix& lambda, const graph::Graph& g, int T,
                         int trials, std::uint64_t seed);

/// Max deviation, over random source pairs, between the final-state
/// inner product ⟨U^{f₁}(T), U^{f₂}(T)⟩_X (direct solver, full μ) and
/// its data-side expression ⟨f₁, [gram] f₂⟩ on Z_T × B. Oracle check.
double final_state_gram_deviation(const graph::Graph& g, const fpt::FptTensor& r, int trials,
                                  std::uint64_t seed);

/// Numerical rank of the final-state map [W] (columns U^{e_k}(T) over X
/// from the direct solver) at threshold `rel_tol`·σ_max. Oracle check.
std::size_t final_state_rank(const graph::Graph& g, int T, double rel_tol = 1e-9);

/// Max over basis functions of ‖U^{h₀^{(j)}}(T) − φ^(j)‖_∞, with h₀
/// computed from data and U verified by the direct solver. Oracle check.
double control_target_deviation(const graph::Graph& g, const fpt::FptTensor& r, double tol,
                                linalg::TolMode mode);

/// Minimum-norm least-squares control aiming W at a prescribed adjoint
/// image: solves [gram] h = rhs with rank truncation at tol.
ControlFunction minimum_norm_control(const linalg::Matrix& gram, const linalg::Vector& rhs,
                                     double tol, linalg::TolMode mode,
                                     std::size_t target_index = 0);

/// |X\B| × |B|(|B|+1)/2 matrix whose (j,k)-th column (j ≤ k, lexicographic)
/// is the pointwise product φ^(j) ⊙ φ^(k) on the interior.
linalg::Matrix harmonic_product_matrix(const graph::Graph& g,
                                       const std::vector<graph::VertexFunction>& basis);

/// End-to-end reconstruction of μ on X\B from boundary passage data and
/// μ|_B: assembles the operators, computes the controls, and solves the
/// final linear system by the same rank-truncated least squares.
ReconstructionResult reconstruct_centrality(const fpt::FptTensor& r, const graph::Graph& g,
                                            int T, double tol,
                                            linalg::TolMode mode = linalg::TolMode::Relative);

}  // namespace fptrec::control
