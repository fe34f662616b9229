#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fptrec/linalg.hpp"

namespace fptrec::graph {

/// Where a vertex function lives. Interior = X\B, Boundary = B, Full = X.
enum class Domain { Full, Interior, Boundary };

struct VertexFunction {
    Domain domain = Domain::Full;
    linalg::Vector values;
};

struct EdgeSpec {
    std::string u;
    std::string v;
    double w = 0.0;
};

struct VertexSpec {
    std::string id;
    std::optional<double> mu;
};

/// Weighted graph with vertex centrality μ, edge weights w, and an
/// observation set B. Vertices are reindexed at construction: interior
/// vertices first (in input order), then boundary vertices (in input
/// order); every matrix downstream uses this ordering.
class Graph {
public:
    Graph(const std::vector<VertexSpec>& vertices, const std::vector<EdgeSpec>& edges,
          const std::vector<std::string>& boundary, std::optional<int> horizon);

    static Graph from_json_text(const std::string& text);
    static Graph from_json_file(const std::string& path);

    std::size_t size() const { return ids_.size(); }
    std::size_t interior_size() const { return size() - boundary_size(); }
    std::size_t boundary_size() const { return nb_; }

    const std::string& id(std::size_t i) const { return ids_[i]; }
    std::size_t index_of(const std::string& id) const;
    bool is_boundary(std::size_t i) const { return i >= interior_size(); }

    bool mu_known(std::size_t i) const { return mu_[i].has_value(); }
    bool mu_known_everywhere() const;
    /// Throws ValidationError when the value is unknown.
    double mu(std::size_t i) const;

    double weight(std::size_t i, std::size_t j) const { return w_(i, j); }
    /// Σ_y w_{xy}, the weighted degree.
    double weight_sum(std::size_t i) const { return degree_[i]; }

    /// Horizon T carried by the input document, when present.
    std::optional<int> horizon() const { return horizon_; }

    std::size_t domain_size(Domain d) const;

private:
    std::vector<std::string> ids_;
    std::vector<std::optional<double>> mu_;
    linalg::Matrix w_;
    linalg::Vector degree_;
    std::size_t nb_ = 0;
    std::optional<int> horizon_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// (Δu)(x) = (1/μ_x) Σ_{y∼x} w_{xy}(u(y) − u(x)); needs μ on all of X.
VertexFunction laplacian_apply(const Graph& g, const VertexFunction& u);

/// Δu restricted to B; reads μ only on B.
VertexFunction laplacian_on_boundary(const Graph& g, const VertexFunction& u);

/// Dense matrix of Δ in the internal vertex ordering; needs μ on X.
linalg::Matrix laplacian_matrix(const Graph& g);

/// ⟨f,h⟩_Ω = Σ_{x∈Ω} μ_x f(x) h(x); f and h must share a domain.
double weighted_inner_product(const Graph& g, const VertexFunction& f, const VertexFunction& h);

/// Row-stochastic step kernel: p_{xy} = w_{xy}/μ_x off-diagonal,
/// p_{xx} = 1 − Σ_y w_{xy}/μ_x. Throws when some p_{xx} < 0.
linalg::Matrix transition_matrix(const Graph& g);

struct AssumptionReport {
    bool substochastic = false;
    bool unique_continuation = false;
    /// Smallest singular value over B-restricted eigenspace bases; the
    /// unique-continuation margin.
    double eigen_margin = 0.0;
};

/// Validates the standing assumptions: μ_x ≥ Σ w_{xy} everywhere, and no
/// eigenvector of the (symmetrized) operator vanishing on B. vanish_tol
/// is the singular-value threshold for "vanishes".
AssumptionReport check_assumptions(const Graph& g, double vanish_tol = 1e-10);

/// Unique function harmonic on X\B with the given boundary values.
/// Reads only edge weights, never μ on X\B.
VertexFunction solve_dirichlet(const Graph& g, const VertexFunction& boundary_values);

/// φ^(j) = harmonic extension of the j-th boundary indicator, j in
/// B-vertex order.
std::vector<VertexFunction> harmonic_basis(const Graph& g);

/// Copy of the Full-domain function restricted to Interior or Boundary.
VertexFunction restrict_to(const Graph& g, const VertexFunction& full, Domain target);

}  // namespace fptrec::graph
