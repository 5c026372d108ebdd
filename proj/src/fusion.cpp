#include "crmot/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "crmot/random.hpp"

namespace crmot {

double ScoreRecord::fused(double beta) const { return fuse_scores(s_t, s_a, beta); }

std::vector<double> fuse_features(std::span<const double> full_feature,
                                  std::span<const double> encoder_feature, double alpha) {
  if (full_feature.size() != encoder_feature.size()) {
    throw std::invalid_argument("fuse_features: feature lengths differ (" +
                                std::to_string(full_feature.size()) + " vs " +
                                std::to_string(encoder_feature.size()) + ")");
  }
  std::vector<double> out(full_feature.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = full_feature[i] + alpha * encoder_feature[i];
  }
  return out;
}

double fuse_scores(double s_t, double s_a, double beta) { return s_t + beta * std::exp(s_a); }

void validate_loss_inputs(const LossInputs& in) {
  if (in.l_d < 0 || in.l_s < 0 || in.l_c < 0) {
    throw std::invalid_argument("component losses must be non-negative");
  }
  if (in.probs.size() != in.labels.size()) {
    throw std::invalid_argument("probs and labels have different row counts");
  }
  for (std::size_t i = 0; i < in.probs.size(); ++i) {
    const auto& p = in.probs[i];
    const auto& y = in.labels[i];
    if (p.size() != y.size()) throw std::invalid_argument("probs and labels shapes differ");
    double sum = 0.0;
    int ones = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      sum += p[j];
      if (y[j] == 1.0) {
        ++ones;
      } else if (y[j] != 0.0) {
        ones = -1;
        break;
      }
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("probs row " + std::to_string(i) + " does not sum to 1");
    }
    if (ones != 1) {
      throw std::invalid_argument("labels row " + std::to_string(i) + " is not one-hot");
    }
  }
}

double loss_cmot(const LossInputs& in) {
  return 0.5 * (std::exp(-in.w1) * in.l_d + std::exp(-in.w2) * (in.l_s + in.l_c) + in.w1 +
                in.w2);
}

CmotGradient grad_loss_cmot(const LossInputs& in) {
  return {0.5 * (1.0 - std::exp(-in.w1) * in.l_d),
          0.5 * (1.0 - std::exp(-in.w2) * (in.l_s + in.l_c))};
}

double loss_referring(const Matrix& probs, const Matrix& labels) {
  if (probs.size() != labels.size()) {
    throw std::invalid_argument("loss_referring: probs has " + std::to_string(probs.size()) +
                                " rows, labels has " + std::to_string(labels.size()));
  }
  if (probs.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i].size() != labels[i].size()) {
      throw std::invalid_argument("loss_referring: row " + std::to_string(i) +
                                  " has mismatched widths");
    }
    for (std::size_t j = 0; j < probs[i].size(); ++j) {
      if (labels[i][j] != 0.0) sum += labels[i][j] * std::log(std::max(probs[i][j], kLogFloor));
    }
  }
  return -sum / static_cast<double>(probs.size());
}

double loss_total(const LossInputs& in) {
  return loss_cmot(in) + loss_referring(in.probs, in.labels);
}

namespace {

double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

std::size_t argmax_fused(const std::vector<ScoreRecord>& records, double shift, double beta) {
  std::size_t best = 0;
  double best_value = -INFINITY;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double v = fuse_scores(records[i].s_t + shift, records[i].s_a, beta);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

SelfCheck make_check(std::string name, bool passed, std::string detail = {}) {
  return {std::move(name), passed, std::move(detail)};
}

}  // namespace

std::vector<SelfCheck> fusion_self_check(unsigned long long seed, int trials) {
  std::vector<SelfCheck> checks;
  const FusionWeights defaults;

  {
    const auto f = fuse_features(std::vector<double>{1, 2}, std::vector<double>{100, -100},
                                 defaults.alpha);
    const bool ok = std::abs(f[0] - 2.0) <= 1e-9 && std::abs(f[1] - 1.0) <= 1e-9;
    checks.push_back(make_check("fuse_features worked example", ok));
  }
  {
    const double a = fuse_scores(0.5, 0.0, defaults.beta);
    const double b = fuse_scores(0.42, 0.9, defaults.beta);
    const bool ok = std::abs(a - 0.6) <= 1e-9 && std::abs(b - 0.665960311115695) <= 1e-9;
    checks.push_back(make_check("fuse_scores worked examples", ok));
  }
  {
    const double a = loss_referring({{0.5, 0.5}}, {{1, 0}});
    const double b = loss_referring({{0.5, 0.5}, {0.9, 0.1}}, {{1, 0}, {0, 1}});
    const bool ok = std::abs(a - 0.69315) <= 1e-5 && std::abs(b - 1.49787) <= 1e-5;
    checks.push_back(make_check("loss_referring worked examples", ok));
  }

  Rng rng(seed);
  {
    constexpr double h = 1e-5;
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
      LossInputs in;
      in.l_d = rng.uniform(0.0, 5.0);
      in.l_s = rng.uniform(0.0, 5.0);
      in.l_c = rng.uniform(0.0, 5.0);
      in.w1 = rng.uniform(-2.0, 2.0);
      in.w2 = rng.uniform(-2.0, 2.0);
      const CmotGradient g = grad_loss_cmot(in);
      LossInputs lo = in, hi = in;
      lo.w1 -= h;
      hi.w1 += h;
      const double n1 = (loss_cmot(hi) - loss_cmot(lo)) / (2 * h);
      lo = in;
      hi = in;
      lo.w2 -= h;
      hi.w2 += h;
      const double n2 = (loss_cmot(hi) - loss_cmot(lo)) / (2 * h);
      worst = std::max({worst, relative_error(g.d_w1, n1), relative_error(g.d_w2, n2)});
    }
    std::ostringstream os;
    os << "max relative error " << worst << " over " << trials << " inputs";
    checks.push_back(make_check("grad_loss_cmot vs central differences", worst <= 1e-6, os.str()));
  }
  {
    int failures = 0;
    for (int k = 0; k < trials; ++k) {
      const auto n = static_cast<std::size_t>(rng.integer(1, 12));
      std::vector<ScoreRecord> records(n);
      for (auto& r : records) r = {rng.uniform(), rng.uniform()};
      const double shift = rng.uniform(-1.0, 1.0);
      if (argmax_fused(records, 0.0, defaults.beta) != argmax_fused(records, shift, defaults.beta)) {
        ++failures;
      }
    }
    checks.push_back(make_check("argmax invariant under common s_t shift", failures == 0,
                                std::to_string(failures) + " failures"));
  }
  return checks;
}

}  // namespace crmot
