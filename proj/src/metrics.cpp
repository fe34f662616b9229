#include "fptrec/metrics.hpp"

#include <cmath>

#include "fptrec/errors.hpp"

namespace fptrec::metrics {

double l2rne(const graph::VertexFunction& truth, const graph::VertexFunction& recovered) {
    if (truth.domain != recovered.domain || truth.values.size() != recovered.values.size())
        throw ValidationError("l2rne: functions live on different domains");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < truth.values.size(); ++i) {
        const double d = truth.values[i] - recovered.values[i];
        num += d * d;
        den += truth.values[i] * truth.values[i];
    }
    if (den == 0.0) throw ValidationError("l2rne: reference function has zero norm");
    const double out = std::sqrt(num / den) * 100.0;
    if (!std::isfinite(out)) throw NumericError("l2rne: non-finite result");
    return out;
}

MetricsReport compute_metrics(const graph::VertexFunction& truth,
                              const graph::VertexFunction& recovered,
                              const fpt::FptTensor* exact, const fpt::FptTensor* empirical) {
    if ((exact == nullptr) != (empirical == nullptr))
        throw ValidationError("compute_metrics: pass both tensors or neither");

    MetricsReport report;
    report.domain = truth.domain;
    report.l2rne_percent = l2rne(truth, recovered);
    report.error.resize(truth.values.size());
    for (std::size_t i = 0; i < truth.values.size(); ++i)
        report.error[i] = std::abs(truth.values[i] - recovered.values[i]);
    if (exact != nullptr) report.frne_percent = fpt::frne(*exact, *empirical);
    return report;
}

}  // namespace fptrec::metrics
