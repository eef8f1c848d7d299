#pragma once

#include <string>
#include <vector>

#include "emuc/interpreter.hpp"

namespace emuc {

using EventSequence = std::vector<std::string>;

struct BatchResult {
  std::vector<RunOutcome> outcomes;  // indexed like the input sequences
  Coverage coverage;                 // merged over all sequences
};

/// Runs every sequence through the interpreter, OpenMP-parallel over
/// sequences. Results are merged in sequence order, so the output is
/// identical to run_batch_serial.
BatchResult run_batch(const Diagram& d, const std::vector<EventSequence>& sequences);

/// Single-threaded reference for run_batch.
BatchResult run_batch_serial(const Diagram& d, const std::vector<EventSequence>& sequences);

}  // namespace emuc
