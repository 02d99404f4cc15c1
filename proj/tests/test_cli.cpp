#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "camo/font5x7.hpp"
#include "camo/image.hpp"
#include "camo/optimize.hpp"
#include "camo/png.hpp"
#include "camo/resample.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace camo;
using testutil::TempDir;
using testutil::gradient_image;
using testutil::random_image_u8;

namespace {

bool same_pixels(const Image& a, const Image& b) {
  return a.same_shape(b) && a.data() == b.data();
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

// Runs the installed binary with stdout/stderr captured to a scratch file.
// Paths from TempDir contain no spaces, so plain joining is safe.
CliResult run_cli(const TempDir& dir, const std::string& args) {
  static int counter = 0;
  const std::string capture =
      dir.file("cli_capture_" + std::to_string(counter++) + ".txt");
  const std::string cmd =
      std::string(CAMOSCALE_BIN) + " " + args + " >" + capture + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  std::ifstream in(capture, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Scratch directory with a 16x16 base, a 16x16 stencil source, and a mock
// plan wired to a 4x4 nearest cell.
struct CliFixture {
  TempDir dir;
  std::string base_png;
  std::string stencil_png;
  std::string plan_json;

  CliFixture() {
    base_png = dir.file("base.png");
    stencil_png = dir.file("stencil.png");
    plan_json = dir.file("plan.json");
    write_png(base_png, gradient_image(16, 16));
    write_png(stencil_png, random_image_u8(16, 16, 909));
    write_plan("{\"base_images\":[\"" + base_png +
               "\"],\"scales\":[[4,4]],\"oracle\":{\"stencil\":\"" +
               stencil_png +
               "\"},\"attack\":{\"max_iterations\":2},\"master_seed\":77}");
  }

  void write_plan(const std::string& text) {
    std::ofstream out(plan_json, std::ios::binary | std::ios::trunc);
    out << text;
  }
};

}  // namespace

TEST_CASE("cli: embed forges an image whose downscale is the payload") {
  TempDir dir;
  const std::string base = dir.file("base.png");
  const std::string payload = dir.file("payload.png");
  const std::string forged = dir.file("forged.png");
  const std::string stencil = dir.file("stencil_copy.png");
  write_png(base, gradient_image(32, 32));
  const Image payload_img = random_image_u8(8, 8, 11);
  write_png(payload, payload_img);

  const CliResult r = run_cli(
      dir, "embed --base " + base + " --payload " + payload +
               " --method nearest --out " + forged + " --payload-out " +
               stencil);
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "max_residual"));

  const Image recovered =
      downscale(read_png(forged).image, 8, 8, ResampleMethod::nearest());
  CHECK(same_pixels(recovered, payload_img));
  CHECK(same_pixels(read_png(stencil).image, payload_img));
}

TEST_CASE("cli: embed renders --text payloads") {
  TempDir dir;
  const std::string base = dir.file("base.png");
  const std::string forged = dir.file("forged.png");
  // "HI" renders as 9x13, so an 18x26 base gives an exact 2x scale.
  write_png(base, gradient_image(18, 26));

  const CliResult r =
      run_cli(dir, "embed --base " + base + " --text HI --method nearest"
                   " --out " + forged);
  CHECK(r.exit_code == 0);
  const Image recovered =
      downscale(read_png(forged).image, 9, 13, ResampleMethod::nearest());
  CHECK(same_pixels(recovered, render_text("HI")));
}

TEST_CASE("cli: embed rejects bad payload setups with exit 2") {
  TempDir dir;
  const std::string base = dir.file("base.png");
  const std::string payload = dir.file("payload.png");
  write_png(base, gradient_image(32, 32));
  write_png(payload, random_image_u8(8, 8, 11));

  const CliResult both = run_cli(
      dir, "embed --base " + base + " --payload " + payload +
               " --text HI --out " + dir.file("x.png"));
  CHECK(both.exit_code == 2);
  CHECK(contains(both.output, "mutually exclusive"));

  const CliResult neither =
      run_cli(dir, "embed --base " + base + " --out " + dir.file("x.png"));
  CHECK(neither.exit_code == 2);
  CHECK(contains(neither.output, "need --payload or --text"));

  // 8x8 does not divide 20x20.
  write_png(base, gradient_image(20, 20));
  const CliResult indivisible = run_cli(
      dir, "embed --base " + base + " --payload " + payload + " --out " +
               dir.file("x.png"));
  CHECK(indivisible.exit_code == 2);
  CHECK(contains(indivisible.output, "divide"));
}

TEST_CASE("cli: attack runs the loop and writes record plus adversarial") {
  CliFixture fx;
  const std::string out = fx.dir.file("run");
  const CliResult r = run_cli(
      fx.dir, "attack --config " + fx.plan_json + " --seed 5 --out " + out);
  CHECK(r.exit_code == 0);

  std::ifstream record_file(out + "/attack_record.jsonl");
  REQUIRE(record_file.good());
  std::string line;
  REQUIRE(std::getline(record_file, line));
  const TrialRecord record = trial_record_from_json_line(line);
  CHECK(record.status == TrialStatus::kOk);
  CHECK(record.optimizer == "hill_climb");
  CHECK(record.seed == 5);
  CHECK(record.iterations == 2);
  CHECK(record.baseline_api_calls == 1);
  CHECK(record.base_image == fx.base_png);
  CHECK(record.prompt_name == "generic");

  // The stdout line is the same record.
  CHECK(contains(r.output, "\"optimizer\":"));
  CHECK(read_png(out + "/adversarial.png").image.height() == 16);
}

TEST_CASE("cli: attack --embed-first forges before optimizing") {
  CliFixture fx;
  const std::string base = fx.dir.file("blank.png");
  write_png(base, gradient_image(18, 26));
  const std::string out = fx.dir.file("run_embed");

  const CliResult r = run_cli(
      fx.dir, "attack --config " + fx.plan_json + " --base " + base +
                  " --embed-first --text HI --out " + out);
  CHECK(r.exit_code == 0);
  const Image embedded = read_png(out + "/embedded.png").image;
  const Image recovered =
      downscale(embedded, 9, 13, ResampleMethod::nearest());
  CHECK(same_pixels(recovered, render_text("HI")));
}

TEST_CASE("cli: baseline is the one-query static arm") {
  CliFixture fx;
  const std::string out = fx.dir.file("run_base");
  const CliResult r = run_cli(
      fx.dir, "baseline --config " + fx.plan_json + " --out " + out);
  CHECK(r.exit_code == 0);

  std::ifstream record_file(out + "/baseline_record.jsonl");
  REQUIRE(record_file.good());
  std::string line;
  REQUIRE(std::getline(record_file, line));
  const TrialRecord record = trial_record_from_json_line(line);
  CHECK(record.optimizer == "static");
  CHECK(record.api_calls == 1);
  CHECK(record.iterations == 1);
}

TEST_CASE("cli: attack against a dead endpoint exits 3") {
  CliFixture fx;
  fx.write_plan("{\"base_images\":[\"" + fx.base_png +
                "\"],\"scales\":[[4,4]],\"oracle\":{\"kind\":\"http\","
                "\"base_url\":\"http://127.0.0.1:9\",\"timeout_seconds\":2},"
                "\"attack\":{\"max_iterations\":1}}");
  const std::string out = fx.dir.file("run_dead");
  const CliResult r = run_cli(
      fx.dir, "attack --config " + fx.plan_json + " --out " + out);
  CHECK(r.exit_code == 3);

  std::ifstream record_file(out + "/attack_record.jsonl");
  REQUIRE(record_file.good());
  std::string line;
  REQUIRE(std::getline(record_file, line));
  CHECK(trial_record_from_json_line(line).status == TrialStatus::kErrored);
}

TEST_CASE("cli: evaluate runs the grid, reports, and resumes") {
  CliFixture fx;
  fx.write_plan("{\"base_images\":[\"" + fx.base_png +
                "\"],\"scales\":[[4,4]],"
                "\"optimizers\":[\"hill_climb\",\"static\"],"
                "\"trials_per_cell\":2,\"master_seed\":7,"
                "\"oracle\":{\"stencil\":\"" + fx.stencil_png +
                "\"},\"attack\":{\"max_iterations\":1}}");
  const std::string out = fx.dir.file("eval");

  const CliResult first =
      run_cli(fx.dir, "evaluate --config " + fx.plan_json + " --out " + out);
  CHECK(first.exit_code == 0);
  CHECK(contains(first.output, "executed 4  skipped 0  errored 0"));
  CHECK(contains(first.output, "cell 0  hill_climb/nearest 4x4"));

  for (const char* name :
       {"records.jsonl", "success_rates.csv", "distance.csv",
        "convergence.csv", "decision.csv", "traces.csv", "summary.json"}) {
    INFO(name);
    std::ifstream probe(out + "/" + name);
    CHECK(probe.good());
  }

  const CliResult second =
      run_cli(fx.dir, "evaluate --config " + fx.plan_json + " --out " + out);
  CHECK(second.exit_code == 0);
  CHECK(contains(second.output, "executed 0  skipped 4"));

  // Restricting the grid with --optimizer hits only that arm's cells.
  const std::string narrow = fx.dir.file("eval_narrow");
  const CliResult third = run_cli(
      fx.dir, "evaluate --config " + fx.plan_json + " --optimizer hc --out " +
                  narrow);
  CHECK(third.exit_code == 0);
  CHECK(contains(third.output, "executed 2"));
}

TEST_CASE("cli: evaluate exits 4 when the ledger carries errored trials") {
  CliFixture fx;
  fx.write_plan("{\"base_images\":[\"" + fx.base_png +
                "\"],\"scales\":[[4,4]],\"master_seed\":7,"
                "\"oracle\":{\"stencil\":\"" + fx.stencil_png +
                "\"},\"attack\":{\"max_iterations\":1}}");
  const std::string out = fx.dir.file("eval_partial");
  std::filesystem::create_directories(out);

  TrialRecord stale;
  stale.status = TrialStatus::kErrored;
  stale.error_message = "socket reset";
  stale.optimizer = "hill_climb";
  stale.method = "nearest";
  stale.api_calls = 1;
  stale.cell_index = 0;
  stale.trial_index = 0;
  std::ofstream ledger(out + "/records.jsonl", std::ios::binary);
  ledger << trial_record_to_json_line(stale) << "\n";
  ledger.close();

  const CliResult r =
      run_cli(fx.dir, "evaluate --config " + fx.plan_json + " --out " + out);
  CHECK(r.exit_code == 4);
  CHECK(contains(r.output, "errored 1"));
}

TEST_CASE("cli: defend prints a verdict and honors --probe") {
  CliFixture fx;
  const CliResult r = run_cli(
      fx.dir, "defend --config " + fx.plan_json + " --image " + fx.base_png +
                  " --out " + fx.dir.file("verdict.json"));
  CHECK(r.exit_code == 0);
  std::ifstream verdict_file(fx.dir.file("verdict.json"));
  REQUIRE(verdict_file.good());
  const auto verdict = nlohmann::json::parse(verdict_file);
  CHECK(verdict.at("verdict") == "consistent");
  CHECK(verdict.at("divergence") == 0.0);
  CHECK(verdict.at("probes").size() == 3);

  const CliResult custom = run_cli(
      fx.dir, "defend --config " + fx.plan_json + " --image " + fx.base_png +
                  " --probe 4x4:nearest --probe 8x8:bilinear");
  CHECK(custom.exit_code == 0);
  CHECK(contains(custom.output, "\"verdict\""));

  const CliResult bad_probe = run_cli(
      fx.dir, "defend --config " + fx.plan_json + " --image " + fx.base_png +
                  " --probe 4x4");
  CHECK(bad_probe.exit_code == 2);
  CHECK(contains(bad_probe.output, "expected HxW:method"));
}

TEST_CASE("cli: report rebuilds tables from a ledger") {
  CliFixture fx;
  const std::string out = fx.dir.file("eval_for_report");
  run_cli(fx.dir, "evaluate --config " + fx.plan_json + " --out " + out);

  const std::string reports = fx.dir.file("reports");
  const CliResult r = run_cli(
      fx.dir, "report --records " + out + "/records.jsonl --out " + reports);
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "reports -> " + reports));
  std::ifstream probe(reports + "/success_rates.csv");
  CHECK(probe.good());
}

TEST_CASE("cli: usage errors exit 2") {
  TempDir dir;
  CHECK(run_cli(dir, "frobnicate").exit_code == 2);
  CHECK(run_cli(dir, "attack").exit_code == 2);  // missing --config
  CHECK(run_cli(dir, "embed --base /does/not/exist.png --out x.png")
            .exit_code == 2);

  // A config that fails validation surfaces as a config error, not a crash.
  CliFixture fx;
  fx.write_plan("{\"base_images\":[\"" + fx.base_png +
                "\"],\"scales\":[[4,4]],\"oracle\":{\"stencil\":\"" +
                fx.stencil_png + "\"},\"zeppelin\":1}");
  const CliResult r = run_cli(
      fx.dir, "attack --config " + fx.plan_json + " --out " +
                  fx.dir.file("x"));
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "config error"));
  CHECK(contains(r.output, "unknown key"));
}
