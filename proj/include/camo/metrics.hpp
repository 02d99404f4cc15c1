#pragma once

#include <optional>
#include <vector>

#include "camo/optimize.hpp"

namespace camo {

// All functions here exclude errored trials before computing anything: a
// trial that died on transport problems is neither a success nor a failure.
// Variance and standard deviation are population flavored (divide by n);
// the median of an even-length list is the lower-middle element of the
// sorted order. Both conventions are fixed so reruns are bit-identical.

struct DistanceStats {
  double mean = 0.0;
  double median = 0.0;
  double std_dev = 0.0;
  double max = 0.0;
};

struct ConvergenceStats {
  double mean_iterations = 0.0;
  double median_iterations = 0.0;
  double iteration_variance = 0.0;
  double mean_seconds = 0.0;
};

struct DecisionStats {
  double dmr = 0.0;
  double mean_confidence_change = 0.0;
  double std_confidence_change = 0.0;
};

// successes / attempts over non-errored trials. Throws std::invalid_argument
// when no non-errored trials remain.
double asr(const std::vector<TrialRecord>& records);

// Same ratio plus the raw counts, for "87.0%  87/100" style rendering.
struct SuccessCount {
  int successes = 0;
  int attempts = 0;
  double rate() const;
};
SuccessCount success_count(const std::vector<TrialRecord>& records);

// Stats of final_dv over non-errored trials. Throws on empty.
DistanceStats distance_stats(const std::vector<TrialRecord>& records);

// Iteration/time stats over *successful* non-errored trials; failures are
// filtered out here, callers may pass mixed collections. Throws when no
// successful trial exists.
ConvergenceStats convergence_stats(const std::vector<TrialRecord>& records);

// dmr = fraction of non-errored trials whose final label differs from the
// clean-image label or that succeeded outright. Confidence change is
// final - clean per trial. Every non-errored record must carry a clean
// baseline query; throws std::invalid_argument otherwise.
DecisionStats dmr_and_confidence(const std::vector<TrialRecord>& records);

struct ExperimentSummary {
  double asr = 0.0;
  int successes = 0;
  int attempts = 0;
  int errored = 0;
  DistanceStats distance;
  // Present only when at least one trial succeeded.
  std::optional<ConvergenceStats> convergence;
  // Present only when every non-errored trial carries a clean baseline.
  std::optional<DecisionStats> decision;
  long long total_api_calls = 0;  // loop + baseline queries, errored included
  double mean_perturbation = 0.0;
};

// One-shot rollup of a record collection. Throws when no non-errored trial
// exists.
ExperimentSummary summarize(const std::vector<TrialRecord>& records);

}  // namespace camo
