#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "camo/defense.hpp"
#include "camo/error.hpp"
#include "camo/experiment.hpp"
#include "camo/font5x7.hpp"
#include "camo/metrics.hpp"
#include "camo/optimize.hpp"
#include "camo/payload.hpp"
#include "camo/png.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;
constexpr int kExitPartial = 4;

std::pair<int, int> parse_dims(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos || x == 0 || x + 1 >= text.size())
    throw camo::ConfigError("expected HxW, got \"" + text + "\"");
  int h = 0, w = 0;
  try {
    h = std::stoi(text.substr(0, x));
    w = std::stoi(text.substr(x + 1));
  } catch (const std::exception&) {
    throw camo::ConfigError("expected HxW, got \"" + text + "\"");
  }
  if (h < 1 || w < 1)
    throw camo::ConfigError("dims must be positive, got \"" + text + "\"");
  return {h, w};
}

std::string map_optimizer(const std::string& flag) {
  if (flag == "hc") return "hill_climb";
  if (flag == "ga") return "genetic";
  return flag;  // already a long name or "static"
}

// Shared --payload/--text handling for subcommands that forge an embedding.
struct EmbedArgs {
  std::string payload_path;
  std::string text;
  double max_deviation = 16.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--payload", payload_path,
                    "PNG whose content should survive downscaling")
        ->check(CLI::ExistingFile);
    cmd->add_option("--text", text,
                    "render this text as the payload instead of --payload");
    cmd->add_option("--max-deviation", max_deviation,
                    "intensity budget for non-critical source pixels")
        ->check(CLI::NonNegativeNumber);
  }

  bool present() const { return !payload_path.empty() || !text.empty(); }

  camo::Image load_payload() const {
    if (!payload_path.empty() && !text.empty())
      throw camo::ConfigError("--payload and --text are mutually exclusive");
    if (!payload_path.empty()) return camo::read_png(payload_path).image;
    if (!text.empty()) return camo::render_text(text);
    throw camo::ConfigError("need --payload or --text");
  }
};

camo::Image embed_into(const camo::Image& base, const EmbedArgs& args,
                       const camo::ResampleMethod& method,
                       camo::EmbedResult* detail = nullptr) {
  camo::EmbedSpec spec;
  spec.target_payload = args.load_payload();
  if (base.height() % spec.target_payload.height() != 0 ||
      base.width() % spec.target_payload.width() != 0)
    throw camo::ConfigError(
        "payload dims must divide the base image dims exactly");
  spec.scale_y = base.height() / spec.target_payload.height();
  spec.scale_x = base.width() / spec.target_payload.width();
  spec.method = method;
  spec.max_deviation = args.max_deviation;
  camo::EmbedResult result = camo::embed_payload_detailed(base, spec);
  if (result.max_residual > camo::embed_tolerance(method))
    throw camo::EmbedInfeasible(
        "embedding residual " + std::to_string(result.max_residual) +
            " exceeds tolerance " +
            std::to_string(camo::embed_tolerance(method)),
        result.max_residual);
  if (detail) *detail = result;
  return result.image;
}

std::string resolve_prompt(const camo::ExperimentPlan& plan,
                           const std::string& arg, std::string* name_out) {
  if (arg.empty()) {
    *name_out = plan.prompts.front().name;
    return plan.prompts.front().text;
  }
  for (const camo::PromptTemplate& p : plan.prompts) {
    if (p.name == arg) {
      *name_out = p.name;
      return p.text;
    }
  }
  for (const camo::PromptTemplate& p : camo::builtin_prompts()) {
    if (p.name == arg) {
      *name_out = p.name;
      return p.text;
    }
  }
  *name_out = "custom";
  return arg;
}

void apply_oracle_override(camo::ExperimentPlan& plan,
                           const std::string& oracle_flag) {
  if (oracle_flag.empty()) return;
  plan.oracle.kind = oracle_flag == "http"
                         ? camo::OracleConfig::Kind::kHttp
                         : camo::OracleConfig::Kind::kMock;
  if (plan.oracle.kind == camo::OracleConfig::Kind::kMock &&
      plan.oracle.stencil_path.empty())
    throw camo::ConfigError(
        "--oracle mock needs a mock oracle block (stencil) in the config");
}

void write_line(const fs::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw camo::ConfigError("cannot write \"" + path.string() + "\"");
  out << line << '\n';
}

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns the process exit code.

struct CommonArgs {
  std::string config_path;
  std::string oracle_flag;
  std::string optimizer_flag;
  std::string method_flag;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

int cmd_embed(const std::string& base_path, const EmbedArgs& embed_args,
              const std::string& method_flag, const std::string& out,
              const std::string& payload_out) {
  const camo::ResampleMethod method = camo::resample_method_from_string(
      method_flag.empty() ? "nearest" : method_flag);
  const camo::Image base = camo::read_png(base_path).image;
  camo::EmbedResult detail;
  const camo::Image forged = embed_into(base, embed_args, method, &detail);
  camo::write_png(out, forged);
  if (!payload_out.empty())
    camo::write_png(payload_out, embed_args.load_payload());

  json report;
  report["out"] = out;
  report["method"] = camo::to_string(method);
  report["max_residual"] = detail.max_residual;
  report["tolerance"] = camo::embed_tolerance(method);
  report["sweeps"] = detail.sweeps;
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_attack(const CommonArgs& args, const std::string& base_path,
               const std::string& prompt_arg, const EmbedArgs& embed_args,
               bool embed_first, bool is_baseline) {
  camo::ExperimentPlan plan = camo::load_plan(args.config_path);
  apply_oracle_override(plan, args.oracle_flag);
  if (!args.out.empty()) plan.output_dir = args.out;

  camo::AttackConfig config = plan.base_attack;
  if (args.optimizer_flag == "ga")
    config.optimizer = plan.genetic;
  else
    config.optimizer = plan.hill_climb;
  config.method = args.method_flag.empty()
                      ? plan.methods.front()
                      : camo::resample_method_from_string(args.method_flag);
  config.downscale_h = plan.scales.front().first;
  config.downscale_w = plan.scales.front().second;
  config.seed = args.seed_set ? args.seed : plan.master_seed;

  const std::string source =
      base_path.empty() ? plan.base_images.front() : base_path;
  camo::Image base = camo::read_png(source).image;

  fs::create_directories(plan.output_dir);
  const fs::path out_dir(plan.output_dir);
  if (embed_first || embed_args.present()) {
    base = embed_into(base, embed_args, config.method);
    camo::write_png((out_dir / "embedded.png").string(), base);
  }

  std::string prompt_name;
  const std::string prompt_text =
      resolve_prompt(plan, prompt_arg, &prompt_name);
  auto oracle =
      camo::make_oracle(plan.oracle, config.downscale_h, config.downscale_w,
                        config.method, config.success_rule);

  camo::Perturbation delta;
  camo::TrialRecord record =
      is_baseline
          ? camo::static_baseline(base, config, *oracle, prompt_text, &delta)
          : camo::run_attack(base, config, *oracle, prompt_text, &delta);
  record.base_image = source;
  record.prompt_name = prompt_name;

  const std::string line = camo::trial_record_to_json_line(record);
  write_line(out_dir / (is_baseline ? "baseline_record.jsonl"
                                    : "attack_record.jsonl"),
             line);
  if (delta.size() > 0)
    camo::write_png((out_dir / "adversarial.png").string(),
                    camo::apply_perturbation(base, delta));
  std::cout << line << '\n';
  return record.status == camo::TrialStatus::kErrored ? kExitOracle : kExitOk;
}

int cmd_evaluate(const CommonArgs& args, int jobs) {
  camo::ExperimentPlan plan = camo::load_plan(args.config_path);
  apply_oracle_override(plan, args.oracle_flag);
  if (!args.optimizer_flag.empty())
    plan.optimizers = {map_optimizer(args.optimizer_flag)};
  if (!args.method_flag.empty())
    plan.methods = {camo::resample_method_from_string(args.method_flag)};
  if (args.seed_set) plan.master_seed = args.seed;
  if (!args.out.empty()) plan.output_dir = args.out;
  if (jobs > 0) plan.jobs = jobs;

  const camo::PlanResult result = camo::run_plan(plan);
  for (const camo::CellSummary& cell : result.cells) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "cell %d  %s/%s %dx%d  asr %.1f%% (%d/%d)  mean_dv %.6f",
                  cell.cell.index, cell.cell.optimizer.c_str(),
                  camo::to_string(cell.cell.method).c_str(),
                  cell.cell.downscale_h, cell.cell.downscale_w,
                  cell.summary.asr * 100.0, cell.summary.successes,
                  cell.summary.attempts, cell.summary.distance.mean);
    std::cout << line << '\n';
  }
  camo::write_reports(result.records, plan.output_dir);
  std::cout << "executed " << result.executed << "  skipped "
            << result.skipped << "  errored " << result.errored
            << "  -> " << result.records_path << '\n';
  if (result.malformed_lines > 0)
    std::cerr << "warning: skipped " << result.malformed_lines
              << " malformed ledger line(s)\n";
  return result.errored > 0 ? kExitPartial : kExitOk;
}

int cmd_defend(const CommonArgs& args, const std::string& image_path,
               const std::string& prompt_arg,
               const std::vector<std::string>& probe_flags,
               double threshold) {
  camo::ExperimentPlan plan = camo::load_plan(args.config_path);
  apply_oracle_override(plan, args.oracle_flag);

  const auto [attack_h, attack_w] = plan.scales.front();
  std::vector<camo::Probe> probes;
  if (probe_flags.empty()) {
    probes = camo::default_probes(attack_h, attack_w);
  } else {
    for (const std::string& flag : probe_flags) {
      const auto colon = flag.find(':');
      if (colon == std::string::npos)
        throw camo::ConfigError("expected HxW:method, got \"" + flag + "\"");
      const auto [h, w] = parse_dims(flag.substr(0, colon));
      probes.push_back({h, w, camo::resample_method_from_string(
                                  flag.substr(colon + 1))});
    }
  }

  const camo::ResampleMethod method = args.method_flag.empty()
                                          ? plan.methods.front()
                                          : camo::resample_method_from_string(
                                                args.method_flag);
  auto oracle = camo::make_oracle(plan.oracle, attack_h, attack_w, method,
                                  plan.base_attack.success_rule);
  std::string prompt_name;
  const std::string prompt_text =
      resolve_prompt(plan, prompt_arg, &prompt_name);

  const camo::Image image = camo::read_png(image_path).image;
  const camo::ConsistencyVerdict verdict = camo::multiscale_check(
      image, probes, *oracle, prompt_text, threshold);

  json out;
  out["verdict"] = camo::to_string(verdict.verdict);
  out["divergence"] = verdict.divergence;
  out["threshold"] = verdict.threshold;
  out["probes"] = json::array();
  for (const camo::ProbeResult& r : verdict.responses) {
    out["probes"].push_back({{"height", r.probe.height},
                             {"width", r.probe.width},
                             {"method", camo::to_string(r.probe.method)},
                             {"label", r.label},
                             {"confidence", r.confidence}});
  }
  const std::string text = out.dump(2);
  std::cout << text << '\n';
  if (!args.out.empty()) write_line(args.out, text);
  return kExitOk;
}

int cmd_report(const std::string& records_path, const std::string& out_dir) {
  const camo::LoadedRecords loaded = camo::load_records(records_path);
  camo::write_reports(loaded.records, out_dir);
  if (loaded.malformed_lines > 0)
    std::cerr << "warning: skipped " << loaded.malformed_lines
              << " malformed line(s)\n";
  std::cout << "reports -> " << out_dir << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Forge, optimize, evaluate, and defend against image-scaling prompt "
      "injections"};
  app.require_subcommand(1);

  CommonArgs common;
  EmbedArgs embed_args;

  // embed
  auto* embed = app.add_subcommand(
      "embed", "hide a payload so it emerges after downscaling");
  std::string embed_base, embed_out, embed_payload_out, embed_method;
  embed->add_option("--base", embed_base, "source PNG")
      ->required()
      ->check(CLI::ExistingFile);
  embed_args.attach(embed);
  embed->add_option("--method", embed_method, "resampling kernel to target")
      ->check(CLI::IsMember({"nearest", "bilinear", "bicubic"}));
  embed->add_option("--out", embed_out, "output PNG path")->required();
  embed->add_option("--payload-out", embed_payload_out,
                    "also write the payload image (handy as a mock stencil)");

  // attack / baseline
  std::string trial_base, trial_prompt;
  bool embed_first = false;
  auto* attack = app.add_subcommand(
      "attack", "run the adaptive feedback loop against the oracle");
  auto* baseline = app.add_subcommand(
      "baseline", "one-shot static perturbation for comparison");
  for (CLI::App* cmd : {attack, baseline}) {
    cmd->add_option("--config", common.config_path, "experiment JSON config")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--base", trial_base,
                    "attack image (default: first base image in config)");
    cmd->add_option("--prompt", trial_prompt,
                    "prompt template name or literal text");
    cmd->add_option("--seed", common.seed, "trial seed")
        ->each([&](const std::string&) { common.seed_set = true; });
    cmd->add_option("--oracle", common.oracle_flag, "oracle backend")
        ->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--method", common.method_flag, "resampling kernel")
        ->check(CLI::IsMember({"nearest", "bilinear", "bicubic"}));
    cmd->add_option("--out", common.out, "output directory");
    cmd->add_flag("--embed-first", embed_first,
                  "embed the payload into the base image before attacking");
    embed_args.attach(cmd);
  }
  attack->add_option("--optimizer", common.optimizer_flag, "search strategy")
      ->check(CLI::IsMember({"hc", "ga"}));

  // evaluate
  int jobs = 0;
  auto* evaluate = app.add_subcommand(
      "evaluate", "run the full experiment grid and emit reports");
  evaluate
      ->add_option("--config", common.config_path, "experiment JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--seed", common.seed, "master seed override")
      ->each([&](const std::string&) { common.seed_set = true; });
  evaluate->add_option("--oracle", common.oracle_flag, "oracle backend")
      ->check(CLI::IsMember({"mock", "http"}));
  evaluate
      ->add_option("--optimizer", common.optimizer_flag,
                   "restrict the grid to one strategy")
      ->check(CLI::IsMember({"hc", "ga", "static"}));
  evaluate
      ->add_option("--method", common.method_flag,
                   "restrict the grid to one kernel")
      ->check(CLI::IsMember({"nearest", "bilinear", "bicubic"}));
  evaluate->add_option("--out", common.out, "output directory override");
  evaluate->add_option("--jobs", jobs, "worker threads")
      ->check(CLI::PositiveNumber);

  // defend
  std::string defend_image;
  std::vector<std::string> probe_flags;
  double threshold = camo::kDefaultDivergenceThreshold;
  auto* defend = app.add_subcommand(
      "defend", "multi-scale consistency check on an input image");
  defend->add_option("--config", common.config_path, "experiment JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  defend->add_option("--image", defend_image, "image to screen")
      ->required()
      ->check(CLI::ExistingFile);
  defend->add_option("--prompt", trial_prompt,
                     "prompt template name or literal text");
  defend->add_option("--probe", probe_flags,
                     "probe as HxW:method (repeatable; default probe set "
                     "derives from the first configured scale)");
  defend->add_option("--threshold", threshold, "divergence threshold")
      ->check(CLI::NonNegativeNumber);
  defend->add_option("--oracle", common.oracle_flag, "oracle backend")
      ->check(CLI::IsMember({"mock", "http"}));
  defend->add_option("--method", common.method_flag,
                     "kernel for the mock oracle pipeline")
      ->check(CLI::IsMember({"nearest", "bilinear", "bicubic"}));
  defend->add_option("--out", common.out, "also write the verdict JSON here");

  // report
  std::string records_path, report_out = "reports";
  auto* report = app.add_subcommand(
      "report", "rebuild CSV tables and plot data from a records file");
  report->add_option("--records", records_path, "records JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "report directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (embed->parsed())
      return cmd_embed(embed_base, embed_args, embed_method, embed_out,
                       embed_payload_out);
    if (attack->parsed())
      return cmd_attack(common, trial_base, trial_prompt, embed_args,
                        embed_first, false);
    if (baseline->parsed())
      return cmd_attack(common, trial_base, trial_prompt, embed_args,
                        embed_first, true);
    if (evaluate->parsed()) return cmd_evaluate(common, jobs);
    if (defend->parsed())
      return cmd_defend(common, defend_image, trial_prompt, probe_flags,
                        threshold);
    if (report->parsed()) return cmd_report(records_path, report_out);
  } catch (const camo::TransportError& e) {
    std::cerr << "oracle failure: " << e.what() << '\n';
    return kExitOracle;
  } catch (const camo::ParseError& e) {
    std::cerr << "oracle response unusable: " << e.what() << '\n';
    return kExitOracle;
  } catch (const camo::EmbedInfeasible& e) {
    std::cerr << "embedding infeasible: " << e.what() << '\n';
    return kExitConfig;
  } catch (const camo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
