#include "fptrec/graph.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "fptrec/errors.hpp"

namespace fptrec::graph {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

// Slack for the substochasticity comparison μ_x ≥ Σ w_{xy}; equality is
// admitted, so only a genuine excess beyond rounding counts as a violation.
constexpr double kStochasticSlack = 1e-12;

}  // namespace

Graph::Graph(const std::vector<VertexSpec>& vertices, const std::vector<EdgeSpec>& edges,
             const std::vector<std::string>& boundary, std::optional<int> horizon)
    : horizon_(horizon) {
    require(!vertices.empty(), "graph has no vertices");
    require(!boundary.empty(), "boundary set is empty");
    if (horizon_) require(*horizon_ >= 2, "horizon must be at least 2");

    std::unordered_map<std::string, std::size_t> input_pos;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const auto& v = vertices[i];
        require(!v.id.empty(), "vertex with empty id");
        require(input_pos.emplace(v.id, i).second, "duplicate vertex id: " + v.id);
        if (v.mu) require(*v.mu > 0.0, "non-positive centrality at vertex " + v.id);
    }

    std::set<std::string> boundary_set;
    for (const auto& b : boundary) {
        require(input_pos.count(b) == 1, "boundary lists unknown vertex: " + b);
        require(boundary_set.insert(b).second, "duplicate boundary vertex: " + b);
    }

    // Internal order: interior vertices first, then boundary, each in
    // input order.
    for (const auto& v : vertices)
        if (boundary_set.count(v.id) == 0) {
            ids_.push_back(v.id);
            mu_.push_back(v.mu);
        }
    for (const auto& v : vertices)
        if (boundary_set.count(v.id) == 1) {
            require(v.mu.has_value(), "centrality unknown on boundary vertex " + v.id);
            ids_.push_back(v.id);
            mu_.push_back(v.mu);
        }
    nb_ = boundary_set.size();
    for (std::size_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);

    const std::size_t n = ids_.size();
    w_ = linalg::Matrix(n, n);
    for (const auto& e : edges) {
        require(index_.count(e.u) == 1, "edge references unknown vertex: " + e.u);
        require(index_.count(e.v) == 1, "edge references unknown vertex: " + e.v);
        require(e.u != e.v, "self-loop at vertex " + e.u);
        require(e.w > 0.0, "non-positive weight on edge " + e.u + "-" + e.v);
        const std::size_t i = index_.at(e.u);
        const std::size_t j = index_.at(e.v);
        require(w_(i, j) == 0.0, "duplicate edge " + e.u + "-" + e.v);
        w_(i, j) = w_(j, i) = e.w;
    }

    degree_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) degree_[i] += w_(i, j);

    // Connectivity via breadth-first traversal.
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const std::size_t x = frontier.front();
        frontier.pop();
        for (std::size_t y = 0; y < n; ++y)
            if (w_(x, y) > 0.0 && !seen[y]) {
                seen[y] = true;
                ++reached;
                frontier.push(y);
            }
    }
    require(reached == n, "graph is disconnected");
}

Graph Graph::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid JSON: ") + e.what());
    }

    try {
        require(doc.is_object(), "graph document must be a JSON object");
        require(doc.contains("vertices") && doc["vertices"].is_array(),
                "graph document needs a 'vertices' array");
        require(doc.contains("edges") && doc["edges"].is_array(),
                "graph document needs an 'edges' array");
        require(doc.contains("boundary") && doc["boundary"].is_array(),
                "graph document needs a 'boundary' array");

        std::vector<VertexSpec> vertices;
        for (const auto& v : doc["vertices"]) {
            require(v.is_object() && v.contains("id") && v["id"].is_string(),
                    "each vertex needs a string 'id'");
            VertexSpec spec;
            spec.id = v["id"].get<std::string>();
            if (v.contains("mu") && !v["mu"].is_null()) {
                require(v["mu"].is_number(), "vertex 'mu' must be a number or null");
                spec.mu = v["mu"].get<double>();
            }
            vertices.push_back(std::move(spec));
        }

        std::vector<EdgeSpec> edges;
        for (const auto& e : doc["edges"]) {
            require(e.is_object() && e.contains("u") && e.contains("v") && e.contains("w") &&
                        e["u"].is_string() && e["v"].is_string() && e["w"].is_number(),
                    "each edge needs string 'u','v' and numeric 'w'");
            edges.push_back({e["u"].get<std::string>(), e["v"].get<std::string>(),
                             e["w"].get<double>()});
        }

        std::vector<std::string> boundary;
        for (const auto& b : doc["boundary"]) {
            require(b.is_string(), "boundary entries must be vertex ids");
            boundary.push_back(b.get<std::string>());
        }

        std::optional<int> horizon;
        if (doc.contains("T") && !doc["T"].is_null()) {
            require(doc["T"].is_number_integer(), "'T' must be an integer");
            horizon = doc["T"].get<int>();
        }

        return Graph(vertices, edges, boundary, horizon);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid graph document: ") + e.what());
    }
}

Graph Graph::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open graph file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::size_t Graph::index_of(const std::string& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown vertex id: " + id);
    return it->second;
}

bool Graph::mu_known_everywhere() const {
    for (const auto& m : mu_)
        if (!m) return false;
    return true;
}

double Graph::mu(std::size_t i) const {
    if (!mu_[i]) throw ValidationError("centrality unknown at vertex " + ids_[i]);
    return *mu_[i];
}

std::size_t Graph::domain_size(Domain d) const {
    switch (d) {
        case Domain::Full: return size();
        case Domain::Interior: return interior_size();
        case Domain::Boundary: return boundary_size();
    }
    return 0;
}

namespace {

/// First internal index of the function's domain.
std::size_t domain_offset(const Graph& g, Domain d) {
    return d == Domain::Boundary ? g.interior_size() : 0;
}

void check_domain(const Graph& g, const VertexFunction& f, Domain expected,
                  const char* what) {
    if (f.domain != expected || f.values.size() != g.domain_size(expected))
        throw ValidationError(std::string(what) + ": vertex function has the wrong domain");
}

}  // namespace

VertexFunction laplacian_apply(const Graph& g, const VertexFunction& u) {
    check_domain(g, u, Domain::Full, "laplacian_apply");
    const std::size_t n = g.size();
    VertexFunction out{Domain::Full, linalg::Vector(n, 0.0)};
    for (std::size_t x = 0; x < n; ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            const double w = g.weight(x, y);
            if (w > 0.0) s += w * (u.values[y] - u.values[x]);
        }
        out.values[x] = s / g.mu(x);
    }
    return out;
}

VertexFunction laplacian_on_boundary(const Graph& g, const VertexFunction& u) {
    check_domain(g, u, Domain::Full, "laplacian_on_boundary");
    const std::size_t n = g.size();
    const std::size_t ni = g.interior_size();
    VertexFunction out{Domain::Boundary, linalg::Vector(g.boundary_size(), 0.0)};
    for (std::size_t x = ni; x < n; ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            const double w = g.weight(x, y);
            if (w > 0.0) s += w * (u.values[y] - u.values[x]);
        }
        out.values[x - ni] = s / g.mu(x);
    }
    return out;
}

linalg::Matrix laplacian_matrix(const Graph& g) {
    const std::size_t n = g.size();
    linalg::Matrix l(n, n);
    for (std::size_t x = 0; x < n; ++x) {
        const double mx = g.mu(x);
        for (std::size_t y = 0; y < n; ++y)
            if (y != x) l(x, y) = g.weight(x, y) / mx;
        l(x, x) = -g.weight_sum(x) / mx;
    }
    return l;
}

double weighted_inner_product(const Graph& g, const VertexFunction& f,
                              const VertexFunction& h) {
    if (f.domain != h.domain)
        throw ValidationError("weighted_inner_product: domain mismatch");
    check_domain(g, f, f.domain, "weighted_inner_product");
    check_domain(g, h, h.domain, "weighted_inner_product");
    const std::size_t off = domain_offset(g, f.domain);
    double s = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k)
        s += g.mu(off + k) * f.values[k] * h.values[k];
    return s;
}

linalg::Matrix transition_matrix(const Graph& g) {
    const std::size_t n = g.size();
    linalg::Matrix p(n, n);
    for (std::size_t x = 0; x < n; ++x) {
        const double mx = g.mu(x);
        const double ratio = g.weight_sum(x) / mx;
        if (ratio > 1.0 + kStochasticSlack)
            throw ValidationError("negative holding probability at vertex " + g.id(x) +
                                  " (centrality below total edge weight)");
        for (std::size_t y = 0; y < n; ++y)
            if (y != x) p(x, y) = g.weight(x, y) / mx;
        p(x, x) = std::max(0.0, 1.0 - ratio);
    }
    return p;
}

AssumptionReport check_assumptions(const Graph& g, double vanish_tol) {
    const std::size_t n = g.size();
    const std::size_t ni = g.interior_size();
    const std::size_t nb = g.boundary_size();

    AssumptionReport report;
    report.substochastic = true;
    for (std::size_t x = 0; x < n; ++x)
        if (g.weight_sum(x) > g.mu(x) * (1.0 + kStochasticSlack)) report.substochastic = false;

    // Symmetrized operator M^{-1/2} (D - A) M^{-1/2}, similar to -Δ.
    linalg::Matrix s(n, n);
    for (std::size_t x = 0; x < n; ++x) {
        s(x, x) = g.weight_sum(x) / g.mu(x);
        for (std::size_t y = x + 1; y < n; ++y) {
            const double w = g.weight(x, y);
            if (w > 0.0) s(x, y) = s(y, x) = -w / std::sqrt(g.mu(x) * g.mu(y));
        }
    }
    const linalg::EigenDecomposition ed = linalg::sym_eigen(s);

    // Group eigenvalues, then demand that each eigenspace has full rank
    // after restricting rows to B; otherwise some eigenvector vanishes
    // on the observation set.
    constexpr double kGroupGap = 1e-9;
    double margin = std::numeric_limits<double>::infinity();
    std::size_t lo = 0;
    while (lo < n) {
        std::size_t hi = lo + 1;
        while (hi < n && ed.values[hi] - ed.values[hi - 1] <= kGroupGap) ++hi;
        const std::size_t k = hi - lo;
        double group_margin = 0.0;
        if (k <= nb) {
            linalg::Matrix block(nb, k);
            for (std::size_t r = 0; r < nb; ++r)
                for (std::size_t c = 0; c < k; ++c) block(r, c) = ed.vectors(ni + r, lo + c);
            group_margin = linalg::singular_values(block).back();
        }
        margin = std::min(margin, group_margin);
        lo = hi;
    }
    report.eigen_margin = margin;
    report.unique_continuation = margin > vanish_tol;
    return report;
}

VertexFunction solve_dirichlet(const Graph& g, const VertexFunction& boundary_values) {
    check_domain(g, boundary_values, Domain::Boundary, "solve_dirichlet");
    const std::size_t n = g.size();
    const std::size_t ni = g.interior_size();
    const std::size_t nb = g.boundary_size();

    VertexFunction phi{Domain::Full, linalg::Vector(n, 0.0)};
    for (std::size_t b = 0; b < nb; ++b) phi.values[ni + b] = boundary_values.values[b];
    if (ni == 0) return phi;

    // μ-free interior balance: (Σ_y w_{xy}) φ(x) − Σ_{y∈X\B} w_{xy} φ(y)
    // = Σ_{b∈B} w_{xb} g(b). Reads only weights, never μ on X\B.
    linalg::Matrix k(ni, ni);
    linalg::Vector rhs(ni, 0.0);
    for (std::size_t x = 0; x < ni; ++x) {
        k(x, x) = g.weight_sum(x);
        for (std::size_t y = 0; y < ni; ++y)
            if (y != x) k(x, y) = -g.weight(x, y);
        for (std::size_t b = 0; b < nb; ++b)
            rhs[x] += g.weight(x, ni + b) * boundary_values.values[b];
    }
    const linalg::Vector interior = linalg::solve_linear(k, rhs);
    for (std::size_t x = 0; x < ni; ++x) phi.values[x] = interior[x];
    return phi;
}

std::vector<VertexFunction> harmonic_basis(const Graph& g) {
    const std::size_t nb = g.boundary_size();
    std::vector<VertexFunction> basis;
    basis.reserve(nb);
    for (std::size_t j = 0; j < nb; ++j) {
        VertexFunction delta{Domain::Boundary, linalg::Vector(nb, 0.0)};
        delta.values[j] = 1.0;
        basis.push_back(solve_dirichlet(g, delta));
    }
    return basis;
}

VertexFunction restrict_to(const Graph& g, const VertexFunction& full, Domain target) {
    check_domain(g, full, Domain::Full, "restrict_to");
    const std::size_t off = domain_offset(g, target);
    const std::size_t len = g.domain_size(target);
    VertexFunction out{target, linalg::Vector(len, 0.0)};
    for (std::size_t k = 0; k < len; ++k) out.values[k] = full.values[off + k];
    return out;
}

}  // namespace fptrec::graph
