#include "camo/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "camo/error.hpp"

namespace camo {
namespace {

using json = nlohmann::json;

Perturbation sample_delta(int height, int width, double epsilon, Rng& rng) {
  Perturbation delta(height, width, epsilon);
  for (double& v : delta.data()) v = rng.uniform(-epsilon, epsilon);
  return delta;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

void note_response(TrialRecord& record, const OracleResponse& resp) {
  record.final_label = resp.predicted_label;
  record.final_confidence = resp.confidence;
}

// Shared bookkeeping for the pieces of a record that do not depend on how
// the search went.
TrialRecord blank_record(const Image& base, const AttackConfig& config) {
  if (base.empty()) throw std::invalid_argument("attack base image is empty");
  // epsilon 0 is a legal degenerate budget: the search is pinned to the
  // clean image.
  if (config.epsilon < 0.0)
    throw std::invalid_argument("epsilon must be non-negative");
  if (config.max_iterations < 1)
    throw std::invalid_argument("max_iterations must be at least 1");
  TrialRecord record;
  record.optimizer = config.optimizer_name();
  record.method = to_string(config.method);
  record.downscale_h = config.downscale_h;
  record.downscale_w = config.downscale_w;
  record.seed = config.seed;
  return record;
}

// Query the untouched image once so label flips and confidence drift can be
// measured against it. Returns false when the query failed and the trial
// should be abandoned as errored.
bool query_clean_baseline(const Image& base, const AttackConfig& config,
                          Oracle& oracle, const std::string& prompt,
                          TrialRecord& record) {
  if (!config.record_clean_baseline) return true;
  try {
    OracleResponse resp = oracle.query(base, prompt);
    record.baseline_api_calls = 1;
    record.clean_label = resp.predicted_label;
    record.clean_confidence = resp.confidence;
    if (resp.confidence_is_fallback) ++record.fallback_confidence_count;
  } catch (const TransportError& e) {
    record.status = TrialStatus::kErrored;
    record.error_message = e.what();
    return false;
  } catch (const ParseError& e) {
    record.status = TrialStatus::kErrored;
    record.error_message = e.what();
    return false;
  }
  return true;
}

void finalize(TrialRecord& record, const Image& base,
              const Perturbation& delta,
              std::chrono::steady_clock::time_point start) {
  record.final_dv = visual_distance(base, apply_perturbation(base, delta));
  record.mean_abs_perturbation = delta.mean_abs();
  record.final_checksum = delta.checksum();
  record.wall_seconds = elapsed_seconds(start);
}

TrialRecord run_hill_climb(const Image& base, const AttackConfig& config,
                           const HillClimbConfig& hc, Oracle& oracle,
                           const std::string& prompt,
                           Perturbation* final_delta) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord record = blank_record(base, config);
  if (!query_clean_baseline(base, config, oracle, prompt, record)) {
    record.wall_seconds = elapsed_seconds(start);
    return record;
  }

  Rng rng(config.seed);
  Perturbation delta =
      sample_delta(base.height(), base.width(), config.epsilon, rng);

  const EvaluateFn evaluate = [&](const Perturbation& candidate) {
    Image adv = apply_perturbation(base, candidate);
    Evaluation eval;
    eval.response = oracle.query(adv, prompt);
    if (eval.response.confidence_is_fallback)
      ++record.fallback_confidence_count;
    eval.distance = visual_distance(base, adv);
    eval.reward = reward(eval.response.success, eval.distance,
                         eval.response.confidence, config.weights);
    return eval;
  };

  try {
    for (int iter = 1; iter <= config.max_iterations; ++iter) {
      record.iterations = iter;
      Evaluation eval = evaluate(delta);
      ++record.api_calls;
      record.confidence_trace.push_back(eval.response.confidence);
      record.reward_trace.push_back(eval.reward);
      note_response(record, eval.response);
      if (eval.response.success) {
        record.success = true;
        break;
      }
      StepResult step = hill_climb_step(delta, eval.reward, evaluate, hc, rng);
      record.api_calls += step.queries;
      if (step.accepted) {
        delta = std::move(step.delta);
        note_response(record, step.response);
      }
    }
  } catch (const TransportError& e) {
    record.status = TrialStatus::kErrored;
    record.error_message = e.what();
  } catch (const ParseError& e) {
    record.status = TrialStatus::kErrored;
    record.error_message = e.what();
  }

  finalize(record, base, delta, start);
  if (final_delta) *final_delta = delta;
  return record;
}

TrialRecord run_genetic(const Image& base, const AttackConfig& config,
                        const GaConfig& ga, Oracle& oracle,
                        const std::string& prompt,
                        Perturbation* final_delta) {
  if (ga.population < 2)
    throw std::invalid_argument("population must be at least 2");
  if (ga.elitism < 0 || ga.elitism > ga.population)
    throw std::invalid_argument("elitism must be in [0, population]");
  if (ga.tournament_size < 1)
    throw std::invalid_argument("tournament_size must be at least 1");
  if (ga.mutation_sigma < 0.0)
    throw std::invalid_argument("mutation_sigma must be non-negative");

  const auto start = std::chrono::steady_clock::now();
  TrialRecord record = blank_record(base, config);
  if (!query_clean_baseline(base, config, oracle, prompt, record)) {
    record.wall_seconds = elapsed_seconds(start);
    return record;
  }

  Rng rng(config.seed);
  std::vector<Perturbation> population;
  population.reserve(ga.population);
  for (int i = 0; i < ga.population; ++i)
    population.push_back(
        sample_delta(base.height(), base.width(), config.epsilon, rng));

  // Carried across generations so the record can always report the
  // strongest individual seen, even if a configuration without elitism
  // let it fall out of the population.
  Individual best;
  bool have_best = false;

  try {
    for (int gen = 1; gen <= config.max_iterations; ++gen) {
      record.iterations = gen;
      std::vector<Individual> scored;
      scored.reserve(population.size());
      for (Perturbation& member : population) {
        Individual ind;
        ind.delta = std::move(member);
        Image adv = apply_perturbation(base, ind.delta);
        ind.response = oracle.query(adv, prompt);
        ++record.api_calls;
        ind.distance = visual_distance(base, adv);
        ind.reward = reward(ind.response.success, ind.distance,
                            ind.response.confidence, config.weights);
        if (ind.response.confidence_is_fallback)
          ++record.fallback_confidence_count;
        const bool improved = !have_best || ind.reward > best.reward;
        scored.push_back(std::move(ind));
        if (improved) {
          best = scored.back();
          have_best = true;
        }
        if (scored.back().response.success) {
          record.success = true;
          break;
        }
      }
      record.confidence_trace.push_back(best.response.confidence);
      record.reward_trace.push_back(best.reward);
      if (record.success || gen == config.max_iterations) break;
      population = ga_generation(scored, ga, config.epsilon, rng);
    }
  } catch (const TransportError& e) {
    record.status = TrialStatus::kErrored;
    record.error_message = e.what();
  } catch (const ParseError& e) {
    record.status = TrialStatus::kErrored;
    record.error_message = e.what();
  }

  if (have_best) {
    record.final_label = best.response.predicted_label;
    record.final_confidence = best.response.confidence;
    finalize(record, base, best.delta, start);
    if (final_delta) *final_delta = std::move(best.delta);
  } else {
    record.wall_seconds = elapsed_seconds(start);
  }
  return record;
}

}  // namespace

double reward(bool success, double distance, double confidence,
              const RewardWeights& weights) {
  if (!(distance >= 0.0 && distance <= 1.0))
    throw std::invalid_argument("distance must be in [0, 1]");
  if (!(confidence >= 0.0 && confidence <= 1.0))
    throw std::invalid_argument("confidence must be in [0, 1]");
  return weights.w1 * (success ? 1.0 : 0.0) - weights.w2 * distance -
         weights.w3 * (1.0 - confidence);
}

StepResult hill_climb_step(const Perturbation& current, double current_reward,
                           const EvaluateFn& evaluate,
                           const HillClimbConfig& config, Rng& rng) {
  if (config.step_size <= 0.0)
    throw std::invalid_argument("step_size must be positive");
  if (config.proposals_per_iter < 1)
    throw std::invalid_argument("proposals_per_iter must be at least 1");

  StepResult result;
  result.delta = current;
  result.reward = current_reward;
  for (int p = 0; p < config.proposals_per_iter; ++p) {
    Perturbation candidate = current;
    for (double& v : candidate.data())
      v += rng.uniform(-config.step_size, config.step_size);
    candidate.project();
    Evaluation eval = evaluate(candidate);
    ++result.queries;
    if (eval.reward > result.reward) {
      result.delta = std::move(candidate);
      result.reward = eval.reward;
      result.accepted = true;
      result.response = std::move(eval.response);
    }
  }
  return result;
}

std::vector<Perturbation> ga_generation(const std::vector<Individual>& scored,
                                        const GaConfig& config, double epsilon,
                                        Rng& rng) {
  if (scored.empty())
    throw std::invalid_argument("cannot evolve an empty population");

  std::vector<std::size_t> order(scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scored[a].reward != scored[b].reward)
      return scored[a].reward > scored[b].reward;
    return scored[a].delta.checksum() < scored[b].delta.checksum();
  });

  std::vector<Perturbation> next;
  next.reserve(scored.size());
  const int elites =
      std::min<int>(config.elitism, static_cast<int>(scored.size()));
  for (int i = 0; i < elites; ++i) next.push_back(scored[order[i]].delta);

  const auto tournament_pick = [&]() -> const Individual& {
    std::size_t winner = rng.uniform_index(scored.size());
    for (int round = 1; round < config.tournament_size; ++round) {
      std::size_t challenger = rng.uniform_index(scored.size());
      if (scored[challenger].reward > scored[winner].reward)
        winner = challenger;
    }
    return scored[winner];
  };

  while (next.size() < scored.size()) {
    const Individual& a = tournament_pick();
    const Individual& b = tournament_pick();
    const double lambda = rng.uniform();
    Perturbation child = a.delta;
    for (std::size_t i = 0; i < child.size(); ++i) {
      child.data()[i] = lambda * a.delta.data()[i] +
                        (1.0 - lambda) * b.delta.data()[i] +
                        rng.gaussian(0.0, config.mutation_sigma);
    }
    child.project();
    next.push_back(std::move(child));
  }
  return next;
}

TrialRecord run_attack(const Image& base, const AttackConfig& config,
                       Oracle& oracle, const std::string& prompt,
                       Perturbation* final_delta) {
  if (const auto* hc = std::get_if<HillClimbConfig>(&config.optimizer))
    return run_hill_climb(base, config, *hc, oracle, prompt, final_delta);
  return run_genetic(base, config, std::get<GaConfig>(config.optimizer),
                     oracle, prompt, final_delta);
}

TrialRecord static_baseline(const Image& base, const AttackConfig& config,
                            Oracle& oracle, const std::string& prompt,
                            Perturbation* final_delta) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord record = blank_record(base, config);
  record.optimizer = "static";
  if (!query_clean_baseline(base, config, oracle, prompt, record)) {
    record.wall_seconds = elapsed_seconds(start);
    return record;
  }

  Rng rng(config.seed);
  Perturbation delta =
      sample_delta(base.height(), base.width(), config.epsilon, rng);
  try {
    Image adv = apply_perturbation(base, delta);
    OracleResponse resp = oracle.query(adv, prompt);
    record.api_calls = 1;
    record.iterations = 1;
    double dist = visual_distance(base, adv);
    record.confidence_trace.push_back(resp.confidence);
    record.reward_trace.push_back(
        reward(resp.success, dist, resp.confidence, config.weights));
    note_response(record, resp);
    if (resp.confidence_is_fallback) ++record.fallback_confidence_count;
    record.success = resp.success;
  } catch (const TransportError& e) {
    record.status = TrialStatus::kErrored;
    record.error_message = e.what();
  } catch (const ParseError& e) {
    record.status = TrialStatus::kErrored;
    record.error_message = e.what();
  }

  finalize(record, base, delta, start);
  if (final_delta) *final_delta = std::move(delta);
  return record;
}

std::string trial_record_to_json_line(const TrialRecord& record) {
  json j;
  j["status"] = record.status == TrialStatus::kOk ? "ok" : "errored";
  j["success"] = record.success;
  j["iterations"] = record.iterations;
  j["api_calls"] = record.api_calls;
  j["baseline_api_calls"] = record.baseline_api_calls;
  j["final_dv"] = record.final_dv;
  j["wall_seconds"] = record.wall_seconds;
  j["confidence_trace"] = record.confidence_trace;
  j["reward_trace"] = record.reward_trace;
  j["final_checksum"] = record.final_checksum;
  j["mean_abs_perturbation"] = record.mean_abs_perturbation;
  j["fallback_confidence_count"] = record.fallback_confidence_count;
  j["optimizer"] = record.optimizer;
  j["method"] = record.method;
  j["downscale_h"] = record.downscale_h;
  j["downscale_w"] = record.downscale_w;
  j["seed"] = record.seed;
  j["clean_label"] = record.clean_label;
  j["clean_confidence"] = record.clean_confidence;
  j["final_label"] = record.final_label;
  j["final_confidence"] = record.final_confidence;
  j["error_message"] = record.error_message;
  j["base_image"] = record.base_image;
  j["prompt_name"] = record.prompt_name;
  j["cell_index"] = record.cell_index;
  j["trial_index"] = record.trial_index;
  return j.dump();
}

TrialRecord trial_record_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad trial record line: ") + e.what(), line);
  }
  if (!j.is_object())
    throw ParseError("trial record line is not a JSON object", line);

  TrialRecord record;
  try {
    const std::string status = j.at("status").get<std::string>();
    if (status == "ok") {
      record.status = TrialStatus::kOk;
    } else if (status == "errored") {
      record.status = TrialStatus::kErrored;
    } else {
      throw ParseError("unknown trial status: " + status, line);
    }
    record.success = j.at("success").get<bool>();
    record.iterations = j.at("iterations").get<int>();
    record.api_calls = j.at("api_calls").get<int>();
    record.baseline_api_calls = j.value("baseline_api_calls", 0);
    record.final_dv = j.at("final_dv").get<double>();
    record.wall_seconds = j.value("wall_seconds", 0.0);
    record.confidence_trace =
        j.value("confidence_trace", std::vector<double>{});
    record.reward_trace = j.value("reward_trace", std::vector<double>{});
    record.final_checksum = j.value("final_checksum", std::uint64_t{0});
    record.mean_abs_perturbation = j.value("mean_abs_perturbation", 0.0);
    record.fallback_confidence_count = j.value("fallback_confidence_count", 0);
    record.optimizer = j.value("optimizer", std::string{});
    record.method = j.value("method", std::string{});
    record.downscale_h = j.value("downscale_h", 0);
    record.downscale_w = j.value("downscale_w", 0);
    record.seed = j.value("seed", std::uint64_t{0});
    record.clean_label = j.value("clean_label", std::string{});
    record.clean_confidence = j.value("clean_confidence", 0.0);
    record.final_label = j.value("final_label", std::string{});
    record.final_confidence = j.value("final_confidence", 0.0);
    record.error_message = j.value("error_message", std::string{});
    record.base_image = j.value("base_image", std::string{});
    record.prompt_name = j.value("prompt_name", std::string{});
    record.cell_index = j.value("cell_index", -1);
    record.trial_index = j.value("trial_index", -1);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad trial record field: ") + e.what(), line);
  }
  return record;
}

}  // namespace camo
