#include "camo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace camo {
namespace {

std::vector<const TrialRecord*> ok_records(
    const std::vector<TrialRecord>& records) {
  std::vector<const TrialRecord*> out;
  out.reserve(records.size());
  for (const TrialRecord& r : records)
    if (r.status == TrialStatus::kOk) out.push_back(&r);
  return out;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double population_variance(const std::vector<double>& values, double mean) {
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return sum / static_cast<double>(values.size());
}

double lower_median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

}  // namespace

double SuccessCount::rate() const {
  if (attempts == 0)
    throw std::invalid_argument("no completed trials to rate");
  return static_cast<double>(successes) / static_cast<double>(attempts);
}

SuccessCount success_count(const std::vector<TrialRecord>& records) {
  SuccessCount count;
  for (const TrialRecord* r : ok_records(records)) {
    ++count.attempts;
    if (r->success) ++count.successes;
  }
  return count;
}

double asr(const std::vector<TrialRecord>& records) {
  return success_count(records).rate();
}

DistanceStats distance_stats(const std::vector<TrialRecord>& records) {
  std::vector<double> dv;
  for (const TrialRecord* r : ok_records(records)) dv.push_back(r->final_dv);
  if (dv.empty())
    throw std::invalid_argument("no completed trials for distance stats");

  DistanceStats stats;
  stats.mean = mean_of(dv);
  stats.median = lower_median(dv);
  stats.std_dev = std::sqrt(population_variance(dv, stats.mean));
  stats.max = *std::max_element(dv.begin(), dv.end());
  return stats;
}

ConvergenceStats convergence_stats(const std::vector<TrialRecord>& records) {
  std::vector<double> iters;
  std::vector<double> seconds;
  for (const TrialRecord* r : ok_records(records)) {
    if (!r->success) continue;
    iters.push_back(static_cast<double>(r->iterations));
    seconds.push_back(r->wall_seconds);
  }
  if (iters.empty())
    throw std::invalid_argument("no successful trials for convergence stats");

  ConvergenceStats stats;
  stats.mean_iterations = mean_of(iters);
  stats.median_iterations = lower_median(iters);
  stats.iteration_variance = population_variance(iters, stats.mean_iterations);
  stats.mean_seconds = mean_of(seconds);
  return stats;
}

DecisionStats dmr_and_confidence(const std::vector<TrialRecord>& records) {
  std::vector<double> deltas;
  int manipulated = 0;
  int attempts = 0;
  for (const TrialRecord* r : ok_records(records)) {
    if (r->baseline_api_calls < 1)
      throw std::invalid_argument(
          "record lacks a clean-image baseline query; cannot compute DMR");
    ++attempts;
    if (r->success || r->final_label != r->clean_label) ++manipulated;
    deltas.push_back(r->final_confidence - r->clean_confidence);
  }
  if (attempts == 0)
    throw std::invalid_argument("no completed trials for decision stats");

  DecisionStats stats;
  stats.dmr = static_cast<double>(manipulated) / static_cast<double>(attempts);
  stats.mean_confidence_change = mean_of(deltas);
  stats.std_confidence_change = std::sqrt(
      population_variance(deltas, stats.mean_confidence_change));
  return stats;
}

ExperimentSummary summarize(const std::vector<TrialRecord>& records) {
  ExperimentSummary summary;
  const SuccessCount count = success_count(records);
  summary.asr = count.rate();
  summary.successes = count.successes;
  summary.attempts = count.attempts;
  summary.errored = static_cast<int>(records.size()) - count.attempts;
  summary.distance = distance_stats(records);

  if (count.successes > 0) summary.convergence = convergence_stats(records);

  bool all_have_baseline = true;
  for (const TrialRecord* r : ok_records(records))
    if (r->baseline_api_calls < 1) all_have_baseline = false;
  if (all_have_baseline) summary.decision = dmr_and_confidence(records);

  double perturbation_sum = 0.0;
  for (const TrialRecord& r : records)
    summary.total_api_calls += r.api_calls + r.baseline_api_calls;
  for (const TrialRecord* r : ok_records(records))
    perturbation_sum += r->mean_abs_perturbation;
  summary.mean_perturbation =
      perturbation_sum / static_cast<double>(count.attempts);
  return summary;
}

}  // namespace camo
