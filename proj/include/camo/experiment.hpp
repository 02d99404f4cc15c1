#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "camo/http_oracle.hpp"
#include "camo/metrics.hpp"
#include "camo/optimize.hpp"
#include "camo/oracle.hpp"
#include "camo/resample.hpp"

namespace camo {

struct PromptTemplate {
  std::string name;
  std::string text;
};

// The five named prompt templates shipped with the tool: generic, classify,
// anomaly, confidence, decide.
const std::vector<PromptTemplate>& builtin_prompts();
const PromptTemplate& builtin_prompt(const std::string& name);  // ConfigError

struct OracleConfig {
  enum class Kind { kMock, kHttp };
  Kind kind = Kind::kMock;
  // Mock: the stencil source image is downscaled to whatever dims a cell
  // targets, so a single source can serve a whole scale grid.
  std::string stencil_path;
  double threshold = 0.8;
  double sharpness = 10.0;
  // HTTP endpoint settings; the success rule comes from the attack config.
  HttpOracleConfig http;
};

// Builds the oracle a given preprocessing target (dims + kernel) is attacked
// through. Mock oracles are constructed per target; HTTP oracles ignore the
// dims (the remote service applies its own pipeline).
std::unique_ptr<Oracle> make_oracle(const OracleConfig& config,
                                    int downscale_h, int downscale_w,
                                    const ResampleMethod& method,
                                    const SuccessRule& rule);

struct ExperimentPlan {
  std::vector<std::string> base_images;
  std::vector<PromptTemplate> prompts;  // defaults to the five built-ins
  // Grid axes; the cell list is their cartesian product in
  // optimizer-major, method-middle, scale-minor order.
  std::vector<std::string> optimizers;  // hill_climb | genetic | static
  std::vector<ResampleMethod> methods;
  std::vector<std::pair<int, int>> scales;  // downscale target {h, w}
  int trials_per_cell = 1;
  std::string output_dir = "out";
  std::uint64_t master_seed = 0;
  int jobs = 1;
  OracleConfig oracle;
  // Shared attack settings; per-cell fields (optimizer, method, dims, seed)
  // are filled in by the runner.
  AttackConfig base_attack;
  HillClimbConfig hill_climb;
  GaConfig genetic;
};

// Reads a JSON config file. Unknown keys are rejected, referenced files
// must exist, and numeric sanity is enforced; violations throw ConfigError.
ExperimentPlan load_plan(const std::string& path);
ExperimentPlan plan_from_json_text(const std::string& text);

struct CellSpec {
  int index = 0;
  std::string optimizer;
  ResampleMethod method;
  int downscale_h = 0;
  int downscale_w = 0;
};

std::vector<CellSpec> plan_cells(const ExperimentPlan& plan);

struct LoadedRecords {
  std::vector<TrialRecord> records;
  int malformed_lines = 0;
};

// Reads a JSONL record file, skipping (and counting) lines that do not
// parse. A missing file throws ConfigError.
LoadedRecords load_records(const std::string& path);

struct CellSummary {
  CellSpec cell;
  ExperimentSummary summary;
};

struct PlanResult {
  std::string records_path;
  std::vector<TrialRecord> records;  // everything in the file after the run
  std::vector<CellSummary> cells;    // cells with at least one ok trial
  int executed = 0;   // trials run in this invocation
  int skipped = 0;    // trials already completed in a previous run
  int errored = 0;    // errored records in the file, old and new
  int malformed_lines = 0;
};

// Executes every (cell, trial) pair not yet present in
// <output_dir>/records.jsonl with status ok. Each finished trial is
// appended and flushed immediately, so the JSONL doubles as the resume
// ledger: rerunning a killed plan picks up at the first missing trial, and
// errored trials are retried (their old records stay in the file as spend
// history but are invisible to the statistics). Per-trial seeds are
// hash-derived from (master_seed, cell index, trial index).
//
// An oracle that cannot be reached at all (a trial errors without a single
// query getting through) aborts the plan with TransportError after the
// errored record is flushed.
PlanResult run_plan(const ExperimentPlan& plan);

// Emits the report files into `out_dir`:
//   success_rates.csv   per-optimizer ASR ("87.0%", "87/100")
//   distance.csv        d_v mean/median/std/max per optimizer
//   convergence.csv     iteration and time stats per optimizer (rows only
//                       for optimizers with at least one success)
//   decision.csv        DMR and confidence-change stats per optimizer
//   traces.csv          long-format per-iteration reward/confidence rows
//   summary.json        machine-readable overall + per-optimizer rollup
// Rows are grouped by optimizer name in ascending order; output is
// byte-identical across reruns on the same records.
void write_reports(const std::vector<TrialRecord>& records,
                   const std::string& out_dir);

}  // namespace camo
