#pragma once

#include <optional>

#include "fptrec/fpt.hpp"
#include "fptrec/graph.hpp"
#include "fptrec/linalg.hpp"

namespace fptrec::metrics {

/// Quality summary comparing a recovered centrality against the truth.
/// `frne_percent` is present only when a simulated tensor was compared
/// against its exact counterpart.
struct MetricsReport {
    std::optional<double> frne_percent;
    double l2rne_percent = 0.0;
    linalg::Vector error;  ///< per-vertex |truth − recovered|
    graph::Domain domain = graph::Domain::Interior;
};

/// ‖truth − recovered‖₂ / ‖truth‖₂ × 100. Rejects zero-norm truth.
double l2rne(const graph::VertexFunction& truth, const graph::VertexFunction& recovered);

/// Bundle L2RNE and per-vertex absolute error; optionally FRNE of a
/// tensor pair (pass both or neither).
MetricsReport compute_metrics(const graph::VertexFunction& truth,
                              const graph::VertexFunction& recovered,
                              const fpt::FptTensor* exact = nullptr,
                              const fpt::FptTensor* empirical = nullptr);

}  // namespace fptrec::metrics
