#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "camo/image.hpp"
#include "camo/oracle.hpp"
#include "camo/resample.hpp"
#include "camo/rng.hpp"

namespace camo {

struct RewardWeights {
  double w1 = 10.0;  // success
  double w2 = 0.5;   // visual distance penalty
  double w3 = 0.2;   // uncertainty penalty
};

// R = w1*s - w2*d - w3*(1 - c). d and c must be in [0, 1].
double reward(bool success, double distance, double confidence,
              const RewardWeights& weights);

struct HillClimbConfig {
  double step_size = 0.01;     // l-inf magnitude of each proposal step
  int proposals_per_iter = 1;
};

struct GaConfig {
  int population = 20;
  double mutation_sigma = 0.002;  // defaults to epsilon/10 at config load
  int elitism = 2;
  int tournament_size = 3;
};

struct AttackConfig {
  double epsilon = 0.02;
  int max_iterations = 50;
  RewardWeights weights;
  std::variant<HillClimbConfig, GaConfig> optimizer = HillClimbConfig{};
  std::uint64_t seed = 0;
  SuccessRule success_rule = SuccessRule::text_contains("match");
  // Bookkeeping of the attacked preprocessing pipeline; not applied by the
  // loop itself (scaling is the target's job).
  int downscale_h = 0;
  int downscale_w = 0;
  ResampleMethod method;
  // Query the clean image once before optimizing so label flips and
  // confidence change can be measured later.
  bool record_clean_baseline = true;

  const char* optimizer_name() const {
    return std::holds_alternative<HillClimbConfig>(optimizer) ? "hill_climb"
                                                              : "genetic";
  }
};

enum class TrialStatus { kOk, kErrored };

// One attack trial, serializable as a single JSON line.
//
// Counting conventions:
//   iterations       loop passes of the optimization loop (the clean-image
//                    baseline query is not an iteration)
//   api_calls        oracle queries spent by the loop. Hill-climbing spends
//                    1 + proposals_per_iter per completed iteration and 1 on
//                    an iteration that ends in success; the genetic
//                    optimizer spends one query per evaluated individual
//                    (population per completed generation, fewer when a
//                    member succeeds mid-generation).
//   baseline_api_calls  the clean-image query (0 or 1), tracked separately.
struct TrialRecord {
  TrialStatus status = TrialStatus::kOk;
  bool success = false;
  int iterations = 0;
  int api_calls = 0;
  int baseline_api_calls = 0;
  double final_dv = 0.0;
  double wall_seconds = 0.0;
  std::vector<double> confidence_trace;
  std::vector<double> reward_trace;
  std::uint64_t final_checksum = 0;
  double mean_abs_perturbation = 0.0;
  int fallback_confidence_count = 0;

  std::string optimizer;
  std::string method;
  int downscale_h = 0;
  int downscale_w = 0;
  std::uint64_t seed = 0;

  std::string clean_label;
  double clean_confidence = 0.0;
  std::string final_label;
  double final_confidence = 0.0;

  std::string error_message;

  // Set by the plan runner for reporting.
  std::string base_image;
  std::string prompt_name;
  int cell_index = -1;
  int trial_index = -1;
};

std::string trial_record_to_json_line(const TrialRecord& record);
TrialRecord trial_record_from_json_line(const std::string& line);

// One scored perturbation during search.
struct Evaluation {
  double reward = 0.0;
  double distance = 0.0;
  OracleResponse response;
};
using EvaluateFn = std::function<Evaluation(const Perturbation&)>;

struct StepResult {
  Perturbation delta;
  double reward = 0.0;
  bool accepted = false;
  int queries = 0;
  // Oracle response of the adopted candidate; meaningful only when
  // accepted is true.
  OracleResponse response;
};

// Propose `proposals_per_iter` steps of l-inf size `step_size` from the
// incumbent; adopt the best candidate whose reward strictly beats
// current_reward, otherwise keep the incumbent (ties retain it). Candidates
// are projected into the budget before evaluation.
StepResult hill_climb_step(const Perturbation& current, double current_reward,
                           const EvaluateFn& evaluate,
                           const HillClimbConfig& config, Rng& rng);

struct Individual {
  Perturbation delta;
  double reward = 0.0;
  double distance = 0.0;
  OracleResponse response;
};

// Next generation: the `elitism` best individuals survive unchanged
// (reward-descending, checksum as the deterministic tie-break), the rest are
// tournament-selected convex blends of two parents plus Gaussian mutation,
// projected back into the budget.
std::vector<Perturbation> ga_generation(const std::vector<Individual>& scored,
                                        const GaConfig& config, double epsilon,
                                        Rng& rng);

// The adaptive feedback loop: perturb, query, score, refine until the oracle
// reports success or the iteration cap is reached. Transport-level oracle
// failures mark the trial errored rather than failed. When `final_delta` is
// given it receives the perturbation the record describes.
TrialRecord run_attack(const Image& base, const AttackConfig& config,
                       Oracle& oracle, const std::string& prompt,
                       Perturbation* final_delta = nullptr);

// Non-adaptive comparison arm: one sampled perturbation, one query.
TrialRecord static_baseline(const Image& base, const AttackConfig& config,
                            Oracle& oracle, const std::string& prompt,
                            Perturbation* final_delta = nullptr);

}  // namespace camo
