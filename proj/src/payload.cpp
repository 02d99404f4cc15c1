#include "camo/payload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "camo/error.hpp"
#include "camo/rng.hpp"

namespace camo {

namespace {

struct Tap2d {
  int row;
  int col;
  double weight;
  bool critical;
};

// Taps whose magnitude reaches a quarter of the support's strongest weight
// carry the payload; everything else is held near the source.
constexpr double kCriticalFraction = 0.25;

// g(mu) = sum_s w_s * clamp(mu * w_s, lo_s, hi_s) is non-decreasing in mu,
// so the equality-constrained bounded least-squares step reduces to a scalar
// root find.
double solve_mu(const std::vector<Tap2d>& taps,
                const std::vector<double>& dlo, const std::vector<double>& dhi,
                double residual) {
  auto g = [&](double mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < taps.size(); ++i) {
      s += taps[i].weight *
           std::clamp(mu * taps[i].weight, dlo[i], dhi[i]);
    }
    return s;
  };
  double lo = -1e7, hi = 1e7;
  if (g(hi) <= residual) return hi;
  if (g(lo) >= residual) return lo;
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < residual) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double embed_tolerance(const ResampleMethod& method) {
  switch (method.kind) {
    case ResampleKind::kNearest:
      return 1e-6;
    case ResampleKind::kBilinear:
      return 0.5;
    case ResampleKind::kBicubic:
      return 2.0;
  }
  return 0.0;
}

EmbedResult embed_payload_detailed(const Image& source,
                                   const EmbedSpec& spec) {
  const Image& payload = spec.target_payload;
  if (spec.scale_y < 1 || spec.scale_x < 1) {
    throw std::invalid_argument("embed: scale factors must be >= 1");
  }
  if (payload.height() * spec.scale_y != source.height() ||
      payload.width() * spec.scale_x != source.width()) {
    throw std::invalid_argument(
        "embed: payload dims x scale factor must equal source dims");
  }
  if (spec.max_deviation < 0.0) {
    throw std::invalid_argument("embed: max_deviation must be >= 0");
  }

  const int oh = payload.height();
  const int ow = payload.width();
  std::vector<std::vector<Tap>> row_taps(oh), col_taps(ow);
  for (int y = 0; y < oh; ++y) {
    row_taps[y] = kernel_taps(spec.method, source.height(), oh, y);
  }
  for (int x = 0; x < ow; ++x) {
    col_taps[x] = kernel_taps(spec.method, source.width(), ow, x);
  }

  // The 2D support of each payload pixel is the outer product of its axis
  // taps. Criticality is decided per support, then unioned: a source pixel
  // that is critical anywhere escapes the max_deviation leash everywhere.
  std::vector<std::vector<Tap2d>> supports(static_cast<std::size_t>(oh) * ow);
  std::vector<char> critical(static_cast<std::size_t>(source.height()) *
                                 source.width(),
                             0);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      std::vector<Tap2d>& taps = supports[static_cast<std::size_t>(oy) * ow + ox];
      double wmax = 0.0;
      for (const Tap& rt : row_taps[oy]) {
        for (const Tap& ct : col_taps[ox]) {
          const double w = rt.weight * ct.weight;
          taps.push_back({rt.index, ct.index, w, false});
          wmax = std::max(wmax, std::abs(w));
        }
      }
      for (Tap2d& t : taps) {
        t.critical = std::abs(t.weight) >= kCriticalFraction * wmax;
        if (t.critical) {
          critical[static_cast<std::size_t>(t.row) * source.width() + t.col] = 1;
        }
      }
    }
  }

  Image embedded = source;
  const int channels = Image::kChannels;
  EmbedResult result;
  const int max_sweeps = 12;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const std::vector<Tap2d>& taps =
            supports[static_cast<std::size_t>(oy) * ow + ox];
        for (int ch = 0; ch < channels; ++ch) {
          const double target = payload.at(oy, ox, ch);

          if (taps.size() == 1 && taps[0].weight == 1.0) {
            // Single full-weight tap: direct assignment is exact.
            embedded.at(taps[0].row, taps[0].col, ch) = target;
            continue;
          }

          double current = 0.0;
          for (const Tap2d& t : taps) {
            current += t.weight * embedded.at(t.row, t.col, ch);
          }
          const double residual = target - current;
          if (std::abs(residual) < 1e-12) continue;

          std::vector<double> dlo(taps.size()), dhi(taps.size());
          for (std::size_t i = 0; i < taps.size(); ++i) {
            const Tap2d& t = taps[i];
            const double cur = embedded.at(t.row, t.col, ch);
            double lo = 0.0, hi = 255.0;
            if (!critical[static_cast<std::size_t>(t.row) * source.width() +
                          t.col]) {
              const double orig = source.at(t.row, t.col, ch);
              lo = std::max(lo, orig - spec.max_deviation);
              hi = std::min(hi, orig + spec.max_deviation);
            }
            dlo[i] = lo - cur;
            dhi[i] = hi - cur;
          }

          const double mu = solve_mu(taps, dlo, dhi, residual);
          for (std::size_t i = 0; i < taps.size(); ++i) {
            const Tap2d& t = taps[i];
            embedded.at(t.row, t.col, ch) +=
                std::clamp(mu * taps[i].weight, dlo[i], dhi[i]);
          }
        }
      }
    }

    const Image check = downscale(embedded, oh, ow, spec.method);
    double worst = 0.0;
    for (std::size_t i = 0; i < check.data().size(); ++i) {
      worst = std::max(worst,
                       std::abs(check.data()[i] - payload.data()[i]));
    }
    result.max_residual = worst;
    result.sweeps = sweep;
    if (worst <= 1e-9) break;
  }

  result.image = clip(std::move(embedded));
  return result;
}

Image embed_payload(const Image& source, const EmbedSpec& spec) {
  EmbedResult result = embed_payload_detailed(source, spec);
  if (result.max_residual > embed_tolerance(spec.method)) {
    throw EmbedInfeasible(
        "embedding infeasible under the deviation constraint; worst residual " +
            std::to_string(result.max_residual) + " intensity levels",
        result.max_residual);
  }
  return std::move(result.image);
}

Perturbation sample_initial_perturbation(int height, int width, double epsilon,
                                         std::uint64_t seed) {
  Perturbation delta(height, width, epsilon);
  Rng rng(seed);
  for (double& v : delta.data()) {
    v = rng.uniform(-epsilon, epsilon);
  }
  return delta;
}

}  // namespace camo
