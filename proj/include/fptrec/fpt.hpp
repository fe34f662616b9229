#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fptrec/graph.hpp"
#include "fptrec/linalg.hpp"

namespace fptrec::fpt {

/// Index space of a passage-time tensor: observation pairs only, or all
/// vertex pairs (the oracle form).
enum class TensorDomain { BoundaryByBoundary, FullByFull };

/// First-passage-time distributions r(t,x,y) for t ∈ {1,…,2T−1}.
/// Indices are boundary-local (B order) for BoundaryByBoundary and
/// internal vertex order for FullByFull. escape(x,y) is the mass of
/// walks that never reach y within the window.
struct FptTensor {
    TensorDomain domain = TensorDomain::BoundaryByBoundary;
    int horizon = 0;
    std::vector<linalg::Matrix> r;  ///< slice [t-1] holds r(t,·,·)
    linalg::Matrix escape;

    /// Monte Carlo provenance; absent on exact tensors.
    std::optional<std::uint64_t> seed;
    std::optional<long long> samples;

    std::size_t side() const { return r.empty() ? 0 : r.front().rows(); }
    int max_time() const { return 2 * horizon - 1; }

    /// r(t,x,y), t 1-based in {1,…,2T−1}.
    double value(int t, std::size_t x, std::size_t y) const { return r[t - 1](x, y); }
};

struct McConfig {
    long long samples_per_pair = 0;
    std::uint64_t seed = 0;
    int horizon = 0;
};

/// Exact r via the first-passage recursion r(1,x,y) = p_xy,
/// r(t,x,y) = Σ_{z≠y} p_xz r(t−1,z,y), one masked-kernel iteration per
/// target. escape comes from the independent survival recursion, so
/// Σ_t r + escape = 1 is a genuine cross-check. Needs μ on all of X.
FptTensor exact_fpt(const graph::Graph& g, int T, TensorDomain domain);

/// One observation pair simulated with its own RNG stream: N walks from
/// x, first hitting time of y binned over {1,…,2T−1}, never-hit mass in
/// the last slot. Returns 2T−1 bin frequencies followed by the escape
/// frequency.
std::vector<double> mc_pair(const linalg::Matrix& kernel, std::size_t x, std::size_t y,
                            const McConfig& cfg, std::uint64_t pair_stream);

/// Empirical tensor over B×B. Pair (i,j) in B order uses RNG stream
/// i·|B|+j derived from cfg.seed, so results are independent of the
/// order pairs are evaluated in, and the first N walks of a pair are a
/// prefix of any longer run. Needs μ on all of X.
FptTensor mc_fpt(const graph::Graph& g, const McConfig& cfg);

/// Frobenius relative norm error between tensors, in percent; escape
/// mass excluded. Shapes must match.
double frne(const FptTensor& exact, const FptTensor& empirical);

}  // namespace fptrec::fpt
