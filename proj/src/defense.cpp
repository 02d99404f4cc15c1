#include "camo/defense.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "camo/error.hpp"

namespace camo {

const char* to_string(Verdict verdict) {
  return verdict == Verdict::kConsistent ? "consistent" : "suspicious";
}

std::vector<Probe> default_probes(int attack_h, int attack_w) {
  if (attack_h < 1 || attack_w < 1)
    throw std::invalid_argument("attack dims must be positive");
  return {
      {attack_h, attack_w, ResampleMethod::bilinear()},
      {attack_h, attack_w, ResampleMethod::bicubic()},
      {attack_h * 2, attack_w * 2, ResampleMethod::bilinear()},
  };
}

ConsistencyVerdict multiscale_check(const Image& image,
                                    const std::vector<Probe>& probes,
                                    Oracle& oracle, const std::string& prompt,
                                    double threshold) {
  if (probes.size() < 2)
    throw std::invalid_argument(
        "consistency check needs at least 2 probes to compare");
  if (threshold < 0.0)
    throw std::invalid_argument("divergence threshold must be non-negative");

  ConsistencyVerdict out;
  out.threshold = threshold;
  for (const Probe& probe : probes) {
    Image scaled = downscale(image, probe.height, probe.width, probe.method);
    try {
      OracleResponse resp = oracle.query(scaled, prompt);
      out.responses.push_back({probe, resp.predicted_label, resp.confidence});
    } catch (const TransportError& e) {
      std::ostringstream msg;
      msg << "oracle failed on probe " << probe.height << "x" << probe.width
          << "/" << to_string(probe.method) << " after "
          << out.responses.size() << " of " << probes.size()
          << " probes completed";
      for (const ProbeResult& done : out.responses)
        msg << "; " << done.probe.height << "x" << done.probe.width << "/"
            << to_string(done.probe.method) << " -> " << done.label;
      msg << " (" << e.what() << ")";
      throw TransportError(msg.str());
    }
  }

  std::map<std::string, int> tally;
  for (const ProbeResult& r : out.responses) ++tally[r.label];
  int largest = 0;
  for (const auto& [label, count] : tally) largest = std::max(largest, count);

  out.divergence = 1.0 - static_cast<double>(largest) /
                             static_cast<double>(out.responses.size());
  out.verdict = out.divergence > threshold ? Verdict::kSuspicious
                                           : Verdict::kConsistent;
  return out;
}

}  // namespace camo
