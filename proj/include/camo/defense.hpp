#pragma once

#include <string>
#include <vector>

#include "camo/image.hpp"
#include "camo/oracle.hpp"
#include "camo/resample.hpp"

namespace camo {

// One downscale-and-ask probe of the consistency check.
struct Probe {
  int height = 0;
  int width = 0;
  ResampleMethod method;
};

struct ProbeResult {
  Probe probe;
  std::string label;
  double confidence = 0.0;
};

enum class Verdict { kConsistent, kSuspicious };

const char* to_string(Verdict verdict);

struct ConsistencyVerdict {
  Verdict verdict = Verdict::kConsistent;
  // 1 - (largest label-agreeing subset / probe count); 0 when every probe
  // agrees, at most 1 - 1/probes.
  double divergence = 0.0;
  double threshold = 0.0;
  std::vector<ProbeResult> responses;
};

inline constexpr double kDefaultDivergenceThreshold = 0.34;

// Scale/kernel pairs worth probing for an attack tuned to
// attack_h x attack_w: the attack dims under two different kernels plus a
// doubled-dims probe, so both the kernel axis and the scale axis get
// exercised.
std::vector<Probe> default_probes(int attack_h, int attack_w);

// Downscale `image` per probe, query the oracle on each variant, and flag
// the image Suspicious when more than `threshold` of the probes fall
// outside the largest label-agreeing subset. Requires >= 2 probes. An
// oracle failure mid-sweep rethrows with the partial results embedded in
// the message.
ConsistencyVerdict multiscale_check(const Image& image,
                                    const std::vector<Probe>& probes,
                                    Oracle& oracle, const std::string& prompt,
                                    double threshold =
                                        kDefaultDivergenceThreshold);

}  // namespace camo
