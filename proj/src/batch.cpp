#include "emuc/batch.hpp"

namespace emuc {

BatchResult run_batch_serial(const Diagram& d, const std::vector<EventSequence>& sequences) {
  Interpreter interp(d);
  BatchResult out;
  out.coverage.arc_fired.assign(d.arcs.size(), 0);
  out.outcomes.reserve(sequences.size());
  for (const auto& seq : sequences) {
    out.outcomes.push_back(run_checked(interp, seq));
    out.coverage.merge(out.outcomes.back().coverage);
  }
  return out;
}

BatchResult run_batch(const Diagram& d, const std::vector<EventSequence>& sequences) {
  const Interpreter interp(d);
  BatchResult out;
  out.coverage.arc_fired.assign(d.arcs.size(), 0);
  out.outcomes.resize(sequences.size());
  const auto n = static_cast<std::ptrdiff_t>(sequences.size());

#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out.outcomes[static_cast<std::size_t>(i)] =
        run_checked(interp, sequences[static_cast<std::size_t>(i)]);
  }

  for (const auto& o : out.outcomes) out.coverage.merge(o.coverage);
  return out;
}

}  // namespace emuc
