#include "camo/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "camo/error.hpp"
#include "camo/png.hpp"
#include "camo/rng.hpp"

namespace camo {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kRecordsFile = "records.jsonl";

std::string format_double(const char* spec, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, value);
  return buf;
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
  }
}

[[noreturn]] void bad_field(const std::string& where, const char* what) {
  throw ConfigError(where + ": " + what);
}

// Serializes access to a shared oracle when trials run on several threads.
class LockedOracle : public Oracle {
 public:
  explicit LockedOracle(Oracle& inner) : inner_(inner) {}
  OracleResponse query(const Image& image,
                       const std::string& prompt) override {
    std::lock_guard<std::mutex> lock(mu_);
    return inner_.query(image, prompt);
  }

 private:
  Oracle& inner_;
  std::mutex mu_;
};

json summary_to_json(const ExperimentSummary& s) {
  json j;
  j["asr"] = s.asr;
  j["successes"] = s.successes;
  j["attempts"] = s.attempts;
  j["errored"] = s.errored;
  j["distance"] = {{"mean", s.distance.mean},
                   {"median", s.distance.median},
                   {"std_dev", s.distance.std_dev},
                   {"max", s.distance.max}};
  if (s.convergence) {
    j["convergence"] = {
        {"mean_iterations", s.convergence->mean_iterations},
        {"median_iterations", s.convergence->median_iterations},
        {"iteration_variance", s.convergence->iteration_variance},
        {"mean_seconds", s.convergence->mean_seconds}};
  } else {
    j["convergence"] = nullptr;
  }
  if (s.decision) {
    j["decision"] = {
        {"dmr", s.decision->dmr},
        {"mean_confidence_change", s.decision->mean_confidence_change},
        {"std_confidence_change", s.decision->std_confidence_change}};
  } else {
    j["decision"] = nullptr;
  }
  j["total_api_calls"] = s.total_api_calls;
  j["mean_perturbation"] = s.mean_perturbation;
  return j;
}

}  // namespace

const std::vector<PromptTemplate>& builtin_prompts() {
  static const std::vector<PromptTemplate> prompts = {
      {"generic", "Describe the content of this image."},
      {"classify", "Classify this image. Reply with a single label."},
      {"anomaly",
       "Does anything in this image look unusual or out of place? Answer "
       "yes or no."},
      {"confidence",
       "Identify the main subject of this image and state your confidence."},
      {"decide",
       "Based on this image, should the request be approved or rejected? "
       "Answer with one word."},
  };
  return prompts;
}

const PromptTemplate& builtin_prompt(const std::string& name) {
  for (const PromptTemplate& p : builtin_prompts())
    if (p.name == name) return p;
  throw ConfigError("unknown prompt template \"" + name +
                    "\" (built-ins: generic, classify, anomaly, confidence, "
                    "decide)");
}

std::unique_ptr<Oracle> make_oracle(const OracleConfig& config,
                                    int downscale_h, int downscale_w,
                                    const ResampleMethod& method,
                                    const SuccessRule& rule) {
  if (config.kind == OracleConfig::Kind::kHttp)
    return std::make_unique<HttpOracle>(config.http, rule);

  DecodedPng decoded = read_png(config.stencil_path);
  Image stencil;
  try {
    stencil = downscale(decoded.image, downscale_h, downscale_w, method);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("stencil \"" + config.stencil_path +
                      "\" cannot serve a " + std::to_string(downscale_h) +
                      "x" + std::to_string(downscale_w) +
                      " target: " + e.what());
  }
  MockOracleSpec spec;
  spec.stencil = std::move(stencil);
  spec.downscale_h = downscale_h;
  spec.downscale_w = downscale_w;
  spec.method = method;
  spec.threshold = config.threshold;
  spec.sharpness = config.sharpness;
  return std::make_unique<MockOracle>(std::move(spec));
}

// ---------------------------------------------------------------------------
// Plan loading

namespace {

OracleConfig parse_oracle(const json& j) {
  if (!j.is_object()) throw ConfigError("\"oracle\" must be an object");
  OracleConfig out;
  const std::string kind = j.value("kind", std::string("mock"));
  if (kind == "mock") {
    require_keys(j, {"kind", "stencil", "threshold", "sharpness"}, "oracle");
    if (!j.contains("stencil"))
      bad_field("oracle", "mock oracle needs a \"stencil\" image path");
    out.kind = OracleConfig::Kind::kMock;
    out.stencil_path = j.at("stencil").get<std::string>();
    out.threshold = j.value("threshold", 0.8);
    out.sharpness = j.value("sharpness", 10.0);
  } else if (kind == "http") {
    require_keys(j,
                 {"kind", "base_url", "path", "api_key", "timeout_seconds",
                  "retry_cap", "min_interval_seconds",
                  "backoff_base_seconds"},
                 "oracle");
    out.kind = OracleConfig::Kind::kHttp;
    out.http.base_url = j.value("base_url", std::string{});
    out.http.path = j.value("path", std::string("/query"));
    out.http.api_key = j.value("api_key", std::string{});
    out.http.timeout_seconds = j.value("timeout_seconds", 30.0);
    out.http.retry_cap = j.value("retry_cap", 3);
    out.http.min_interval_seconds = j.value("min_interval_seconds", 1.0);
    out.http.backoff_base_seconds = j.value("backoff_base_seconds", 1.0);
  } else {
    bad_field("oracle.kind", "must be \"mock\" or \"http\"");
  }
  return out;
}

void parse_attack(const json& j, ExperimentPlan& plan) {
  if (!j.is_object()) throw ConfigError("\"attack\" must be an object");
  require_keys(j,
               {"epsilon", "max_iterations", "weights", "success_rule",
                "record_clean_baseline", "hill_climb", "genetic"},
               "attack");
  AttackConfig& cfg = plan.base_attack;
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
  if (cfg.epsilon <= 0.0) bad_field("attack.epsilon", "must be positive");
  if (cfg.max_iterations < 1)
    bad_field("attack.max_iterations", "must be at least 1");

  if (j.contains("weights")) {
    const json& w = j.at("weights");
    require_keys(w, {"w1", "w2", "w3"}, "attack.weights");
    cfg.weights.w1 = w.value("w1", cfg.weights.w1);
    cfg.weights.w2 = w.value("w2", cfg.weights.w2);
    cfg.weights.w3 = w.value("w3", cfg.weights.w3);
  }
  if (j.contains("success_rule")) {
    const json& r = j.at("success_rule");
    require_keys(r, {"mode", "value"}, "attack.success_rule");
    const std::string mode = r.value("mode", std::string("label_equals"));
    const std::string value = r.value("value", std::string("match"));
    if (mode == "label_equals") {
      cfg.success_rule = SuccessRule::label_equals(value);
    } else if (mode == "text_contains") {
      cfg.success_rule = SuccessRule::text_contains(value);
    } else {
      bad_field("attack.success_rule.mode",
                "must be \"label_equals\" or \"text_contains\"");
    }
  }
  cfg.record_clean_baseline =
      j.value("record_clean_baseline", cfg.record_clean_baseline);

  if (j.contains("hill_climb")) {
    const json& hc = j.at("hill_climb");
    require_keys(hc, {"step_size", "proposals_per_iter"},
                 "attack.hill_climb");
    plan.hill_climb.step_size =
        hc.value("step_size", plan.hill_climb.step_size);
    plan.hill_climb.proposals_per_iter =
        hc.value("proposals_per_iter", plan.hill_climb.proposals_per_iter);
  }
  plan.genetic.mutation_sigma = cfg.epsilon / 10.0;
  if (j.contains("genetic")) {
    const json& ga = j.at("genetic");
    require_keys(
        ga, {"population", "mutation_sigma", "elitism", "tournament_size"},
        "attack.genetic");
    plan.genetic.population = ga.value("population", plan.genetic.population);
    plan.genetic.mutation_sigma =
        ga.value("mutation_sigma", plan.genetic.mutation_sigma);
    plan.genetic.elitism = ga.value("elitism", plan.genetic.elitism);
    plan.genetic.tournament_size =
        ga.value("tournament_size", plan.genetic.tournament_size);
  }
}

}  // namespace

ExperimentPlan plan_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("plan must be a JSON object");
  require_keys(j,
               {"base_images", "prompts", "optimizers", "methods", "scales",
                "trials_per_cell", "output_dir", "master_seed", "jobs",
                "oracle", "attack"},
               "plan");

  ExperimentPlan plan;
  try {
    if (!j.contains("base_images") || !j.at("base_images").is_array() ||
        j.at("base_images").empty())
      throw ConfigError("plan needs a non-empty \"base_images\" array");
    for (const json& p : j.at("base_images"))
      plan.base_images.push_back(p.get<std::string>());

    if (j.contains("prompts")) {
      for (const json& p : j.at("prompts")) {
        if (p.is_string()) {
          plan.prompts.push_back(builtin_prompt(p.get<std::string>()));
        } else if (p.is_object()) {
          require_keys(p, {"name", "text"}, "prompts[]");
          plan.prompts.push_back({p.at("name").get<std::string>(),
                                  p.at("text").get<std::string>()});
        } else {
          bad_field("prompts[]", "must be a built-in name or {name, text}");
        }
      }
      if (plan.prompts.empty())
        bad_field("prompts", "must not be an empty array");
    } else {
      plan.prompts = builtin_prompts();
    }

    if (j.contains("optimizers")) {
      for (const json& o : j.at("optimizers")) {
        const std::string name = o.get<std::string>();
        if (name != "hill_climb" && name != "genetic" && name != "static")
          bad_field("optimizers[]",
                    "must be \"hill_climb\", \"genetic\", or \"static\"");
        plan.optimizers.push_back(name);
      }
      if (plan.optimizers.empty())
        bad_field("optimizers", "must not be an empty array");
    } else {
      plan.optimizers = {"hill_climb"};
    }

    if (j.contains("methods")) {
      for (const json& m : j.at("methods")) {
        try {
          plan.methods.push_back(
              resample_method_from_string(m.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("methods[]: ") + e.what());
        }
      }
      if (plan.methods.empty())
        bad_field("methods", "must not be an empty array");
    } else {
      plan.methods = {ResampleMethod::nearest()};
    }

    if (!j.contains("scales") || !j.at("scales").is_array() ||
        j.at("scales").empty())
      throw ConfigError(
          "plan needs a non-empty \"scales\" array of [height, width]");
    for (const json& s : j.at("scales")) {
      if (!s.is_array() || s.size() != 2)
        bad_field("scales[]", "must be a [height, width] pair");
      const int h = s.at(0).get<int>();
      const int w = s.at(1).get<int>();
      if (h < 1 || w < 1) bad_field("scales[]", "dims must be positive");
      plan.scales.emplace_back(h, w);
    }

    plan.trials_per_cell = j.value("trials_per_cell", 1);
    if (plan.trials_per_cell < 1)
      bad_field("trials_per_cell", "must be at least 1");
    plan.output_dir = j.value("output_dir", std::string("out"));
    plan.master_seed = j.value("master_seed", std::uint64_t{0});
    plan.jobs = j.value("jobs", 1);
    if (plan.jobs < 1) bad_field("jobs", "must be at least 1");

    if (j.contains("oracle")) plan.oracle = parse_oracle(j.at("oracle"));
    if (plan.oracle.kind == OracleConfig::Kind::kMock &&
        plan.oracle.stencil_path.empty())
      throw ConfigError("plan needs an \"oracle\" block (mock or http)");
    if (j.contains("attack")) parse_attack(j.at("attack"), plan);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed plan field: ") + e.what());
  }
  return plan;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open plan file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  ExperimentPlan plan = plan_from_json_text(buf.str());

  for (const std::string& img : plan.base_images)
    if (!fs::exists(img))
      throw ConfigError("base image \"" + img + "\" does not exist");
  if (plan.oracle.kind == OracleConfig::Kind::kMock &&
      !fs::exists(plan.oracle.stencil_path))
    throw ConfigError("stencil \"" + plan.oracle.stencil_path +
                      "\" does not exist");
  return plan;
}

std::vector<CellSpec> plan_cells(const ExperimentPlan& plan) {
  std::vector<CellSpec> cells;
  int index = 0;
  for (const std::string& optimizer : plan.optimizers) {
    for (const ResampleMethod& method : plan.methods) {
      for (const auto& [h, w] : plan.scales) {
        CellSpec cell;
        cell.index = index++;
        cell.optimizer = optimizer;
        cell.method = method;
        cell.downscale_h = h;
        cell.downscale_w = w;
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

LoadedRecords load_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open records file \"" + path + "\"");
  LoadedRecords out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.records.push_back(trial_record_from_json_line(line));
    } catch (const ParseError&) {
      ++out.malformed_lines;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plan execution

namespace {

struct RecordSink {
  std::ofstream stream;

  void append(const TrialRecord& record) {
    stream << trial_record_to_json_line(record) << '\n';
    stream.flush();
  }
};

struct PendingTrial {
  int trial = 0;
  AttackConfig config;
  const Image* base = nullptr;
  std::string base_path;
  std::string prompt_name;
  std::string prompt_text;
};

TrialRecord execute_trial(const CellSpec& cell, const PendingTrial& pending,
                          Oracle& oracle) {
  TrialRecord record =
      cell.optimizer == "static"
          ? static_baseline(*pending.base, pending.config, oracle,
                            pending.prompt_text)
          : run_attack(*pending.base, pending.config, oracle,
                       pending.prompt_text);
  record.base_image = pending.base_path;
  record.prompt_name = pending.prompt_name;
  record.cell_index = cell.index;
  record.trial_index = pending.trial;
  return record;
}

}  // namespace

PlanResult run_plan(const ExperimentPlan& plan) {
  if (plan.base_images.empty())
    throw ConfigError("plan has no base images");
  if (plan.prompts.empty()) throw ConfigError("plan has no prompts");
  if (plan.trials_per_cell < 1)
    throw ConfigError("trials_per_cell must be at least 1");
  if (plan.jobs < 1) throw ConfigError("jobs must be at least 1");

  fs::create_directories(plan.output_dir);
  PlanResult result;
  result.records_path =
      (fs::path(plan.output_dir) / kRecordsFile).string();

  // The records file is the resume ledger: an ok record means that
  // (cell, trial) pair is done.
  std::set<std::pair<int, int>> done;
  if (fs::exists(result.records_path)) {
    LoadedRecords prior = load_records(result.records_path);
    result.malformed_lines = prior.malformed_lines;
    for (TrialRecord& r : prior.records) {
      if (r.status == TrialStatus::kOk)
        done.insert({r.cell_index, r.trial_index});
      else
        ++result.errored;
      result.records.push_back(std::move(r));
    }
  }

  std::map<std::string, Image> image_cache;
  const auto base_image = [&](const std::string& path) -> const Image& {
    auto it = image_cache.find(path);
    if (it == image_cache.end())
      it = image_cache.emplace(path, read_png(path).image).first;
    return it->second;
  };

  // One HTTP client for the whole plan keeps the rate limiter global; mock
  // oracles are per cell because their pipeline is the cell's.
  std::unique_ptr<Oracle> shared_http;
  if (plan.oracle.kind == OracleConfig::Kind::kHttp)
    shared_http = make_oracle(plan.oracle, 0, 0, ResampleMethod::nearest(),
                              plan.base_attack.success_rule);

  RecordSink sink;
  sink.stream.open(result.records_path,
                   std::ios::binary | std::ios::app);
  if (!sink.stream)
    throw ConfigError("cannot open \"" + result.records_path +
                      "\" for append");

  const std::vector<CellSpec> cells = plan_cells(plan);
  for (const CellSpec& cell : cells) {
    std::vector<PendingTrial> pending;
    for (int trial = 0; trial < plan.trials_per_cell; ++trial) {
      if (done.count({cell.index, trial})) {
        ++result.skipped;
        continue;
      }
      PendingTrial p;
      p.trial = trial;
      p.config = plan.base_attack;
      if (cell.optimizer == "genetic")
        p.config.optimizer = plan.genetic;
      else
        p.config.optimizer = plan.hill_climb;
      p.config.method = cell.method;
      p.config.downscale_h = cell.downscale_h;
      p.config.downscale_w = cell.downscale_w;
      p.config.seed = derive_seed(plan.master_seed,
                                  static_cast<std::uint64_t>(cell.index),
                                  static_cast<std::uint64_t>(trial));
      const std::size_t n_img = plan.base_images.size();
      p.base_path = plan.base_images[trial % n_img];
      p.base = &base_image(p.base_path);
      const PromptTemplate& prompt =
          plan.prompts[(trial / n_img) % plan.prompts.size()];
      p.prompt_name = prompt.name;
      p.prompt_text = prompt.text;
      pending.push_back(std::move(p));
    }
    if (pending.empty()) continue;

    std::unique_ptr<Oracle> cell_oracle;
    Oracle* oracle = shared_http.get();
    if (!oracle) {
      cell_oracle = make_oracle(plan.oracle, cell.downscale_h,
                                cell.downscale_w, cell.method,
                                plan.base_attack.success_rule);
      oracle = cell_oracle.get();
    }

    // A trial that errored before a single query got through means the
    // oracle is unreachable; flush the record, then abort the plan.
    const auto commit = [&](TrialRecord&& record) {
      if (record.status == TrialStatus::kErrored) ++result.errored;
      sink.append(record);
      ++result.executed;
      const bool unreachable =
          record.status == TrialStatus::kErrored &&
          record.api_calls + record.baseline_api_calls == 0;
      std::string why = record.error_message;
      result.records.push_back(std::move(record));
      if (unreachable)
        throw TransportError("plan aborted, oracle unreachable: " + why);
    };

    if (plan.jobs == 1 || pending.size() == 1) {
      for (const PendingTrial& p : pending)
        commit(execute_trial(cell, p, *oracle));
    } else {
      LockedOracle locked(*oracle);
      std::vector<TrialRecord> slots(pending.size());
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> workers;
      const std::size_t n_workers =
          std::min<std::size_t>(plan.jobs, pending.size());
      for (std::size_t i = 0; i < n_workers; ++i) {
        workers.emplace_back([&]() {
          for (;;) {
            const std::size_t at = next.fetch_add(1);
            if (at >= pending.size()) return;
            slots[at] = execute_trial(cell, pending[at], locked);
          }
        });
      }
      for (std::thread& w : workers) w.join();
      for (TrialRecord& record : slots) commit(std::move(record));
    }
  }

  for (const CellSpec& cell : cells) {
    std::vector<TrialRecord> of_cell;
    bool any_ok = false;
    for (const TrialRecord& r : result.records) {
      if (r.cell_index != cell.index) continue;
      of_cell.push_back(r);
      any_ok |= r.status == TrialStatus::kOk;
    }
    if (!any_ok) continue;
    result.cells.push_back({cell, summarize(of_cell)});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::map<std::string, std::vector<TrialRecord>> group_by_optimizer(
    const std::vector<TrialRecord>& records) {
  std::map<std::string, std::vector<TrialRecord>> groups;
  for (const TrialRecord& r : records) groups[r.optimizer].push_back(r);
  return groups;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw ConfigError("cannot write report file \"" + path.string() + "\"");
  out << content;
}

}  // namespace

void write_reports(const std::vector<TrialRecord>& records,
                   const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const auto groups = group_by_optimizer(records);

  std::ostringstream rates;
  rates << "optimizer,asr,successes,attempts,ratio\n";
  for (const auto& [name, group] : groups) {
    const SuccessCount count = success_count(group);
    if (count.attempts == 0) continue;
    rates << name << ',' << format_double("%.1f%%", count.rate() * 100.0)
          << ',' << count.successes << ',' << count.attempts << ','
          << count.successes << '/' << count.attempts << '\n';
  }
  write_text_file(dir / "success_rates.csv", rates.str());

  std::ostringstream distance;
  distance << "optimizer,mean_dv,median_dv,std_dv,max_dv\n";
  for (const auto& [name, group] : groups) {
    if (success_count(group).attempts == 0) continue;
    const DistanceStats stats = distance_stats(group);
    distance << name << ',' << format_double("%.6f", stats.mean) << ','
             << format_double("%.6f", stats.median) << ','
             << format_double("%.6f", stats.std_dev) << ','
             << format_double("%.6f", stats.max) << '\n';
  }
  write_text_file(dir / "distance.csv", distance.str());

  std::ostringstream convergence;
  convergence << "optimizer,mean_iterations,median_iterations,"
                 "iteration_variance,mean_seconds\n";
  for (const auto& [name, group] : groups) {
    const SuccessCount count = success_count(group);
    if (count.successes == 0) continue;
    const ConvergenceStats stats = convergence_stats(group);
    convergence << name << ','
                << format_double("%.3f", stats.mean_iterations) << ','
                << format_double("%.3f", stats.median_iterations) << ','
                << format_double("%.3f", stats.iteration_variance) << ','
                << format_double("%.6f", stats.mean_seconds) << '\n';
  }
  write_text_file(dir / "convergence.csv", convergence.str());

  std::ostringstream decision;
  decision << "optimizer,dmr,mean_confidence_change,std_confidence_change\n";
  for (const auto& [name, group] : groups) {
    if (success_count(group).attempts == 0) continue;
    bool have_baselines = true;
    for (const TrialRecord& r : group)
      if (r.status == TrialStatus::kOk && r.baseline_api_calls < 1)
        have_baselines = false;
    if (!have_baselines) continue;
    const DecisionStats stats = dmr_and_confidence(group);
    decision << name << ',' << format_double("%.1f%%", stats.dmr * 100.0)
             << ',' << format_double("%.4f", stats.mean_confidence_change)
             << ',' << format_double("%.4f", stats.std_confidence_change)
             << '\n';
  }
  write_text_file(dir / "decision.csv", decision.str());

  std::ostringstream traces;
  traces << "cell_index,trial_index,optimizer,method,iteration,reward,"
            "confidence\n";
  for (const TrialRecord& r : records) {
    const std::size_t n =
        std::min(r.reward_trace.size(), r.confidence_trace.size());
    for (std::size_t i = 0; i < n; ++i) {
      traces << r.cell_index << ',' << r.trial_index << ',' << r.optimizer
             << ',' << r.method << ',' << (i + 1) << ','
             << format_double("%.9g", r.reward_trace[i]) << ','
             << format_double("%.9g", r.confidence_trace[i]) << '\n';
    }
  }
  write_text_file(dir / "traces.csv", traces.str());

  json summary;
  bool any_ok = false;
  for (const TrialRecord& r : records)
    any_ok |= r.status == TrialStatus::kOk;
  summary["overall"] = any_ok ? summary_to_json(summarize(records)) : json();
  summary["by_optimizer"] = json::object();
  for (const auto& [name, group] : groups) {
    if (success_count(group).attempts == 0) continue;
    summary["by_optimizer"][name] = summary_to_json(summarize(group));
  }
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace camo
