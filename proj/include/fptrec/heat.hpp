#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fptrec/fpt.hpp"
#include "fptrec/graph.hpp"
#include "fptrec/linalg.hpp"

namespace fptrec::heat {

/// Boundary source f over Z_T × B: f(t, b) with t ∈ {0,…,T−1}, b in
/// B order; implicitly zero elsewhere on Z_{2T} × X.
struct SourceField {
    int horizon = 0;
    linalg::Matrix f;  ///< horizon × |B|

    double at(int t, std::size_t b) const {
        return t >= 0 && t < horizon ? f(static_cast<std::size_t>(t), b) : 0.0;
    }
};

/// Wave U(t,·) for t ∈ Z_{2T} = {0,…,2T−1}; row t of `u`. Domain is
/// Full for direct solves, Boundary for data-driven assembly.
struct HeatTrajectory {
    graph::Domain domain = graph::Domain::Full;
    int horizon = 0;
    linalg::Matrix u;  ///< 2T × domain size; row 0 is identically zero

    double at(int t, std::size_t x) const { return u(static_cast<std::size_t>(t), x); }
};

/// Occupation probabilities u_y(t,x) = P(walk from x sits at y at time
/// t), indexed like the tensor it came from; slice [t-1] holds time t.
struct OccupationTable {
    int horizon = 0;
    std::vector<linalg::Matrix> u;

    double value(int t, std::size_t x, std::size_t y) const { return u[t - 1](x, y); }
    int max_time() const { return 2 * horizon - 1; }
};

/// Explicit Euler evolution U(t+1) = U(t) + ΔU(t) + f(t) from U(0) = 0.
/// The discrete equation is the step rule, so this is exact, not an
/// approximation. Needs μ on all of X; test/oracle path.
HeatTrajectory direct_heat_solve(const graph::Graph& g, const SourceField& f);

/// Occupation by the literal nested first-passage sum over all visit
/// sequences ending at time t. Exponential in t (the multiplication
/// count is exactly (t−1)·2^{t−2}); cross-check oracle only, t ≤ 25.
/// Indices live in the tensor's own index space. `mults`, if given,
/// accumulates the number of multiplications performed.
double occupation_naive(const fpt::FptTensor& r, int t, std::size_t x, std::size_t y,
                        unsigned long long* mults = nullptr);

/// Occupation via the renewal recursion over the last visit before t:
/// u_y(t,x) = r(t,x,y) + Σ_{s<t} u_y(s,x)·r(t−s,y,y). O(T²) per pair
/// and algebraically identical to occupation_naive.
OccupationTable occupation_renewal(const fpt::FptTensor& r);

/// Data-driven trajectory on B: U^f(0)=0, U^f(1,x)=f(0,x), and for
/// t ≥ 2, U^f(t,x) = f(t−1,x) + Σ_{s=1}^{t−1} Σ_{y∈B} f(s−1,y)·u_y(t−s,x).
/// Built entirely from the passage-time tensor; no μ involved.
HeatTrajectory assemble_uf(const fpt::FptTensor& r, const SourceField& f);

/// Same, reusing a precomputed occupation table for the tensor (callers
/// assembling many columns share one table).
HeatTrajectory assemble_uf(const fpt::FptTensor& r, const OccupationTable& occ,
                           const SourceField& f);

/// Vectorization convention for functions on Z_T × B: slot(t,b) = t·|B|+b.
inline std::size_t time_major_index(int t, std::size_t b, std::size_t nb) {
    return static_cast<std::size_t>(t) * nb + b;
}

/// The source-to-solution operator as a T|B| × T|B| matrix: column
/// k = e_k's trajectory restricted to Z_T × B, both sides in time-major
/// order. Strictly lower block-triangular in time.
linalg::Matrix assemble_lambda(const fpt::FptTensor& r, int T);

}  // namespace fptrec::heat
