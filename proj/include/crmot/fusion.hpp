#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace crmot {

struct FusionWeights {
  double alpha = 0.01;  // weight of the encoder feature in feature fusion
  double beta = 0.1;    // weight of exp(attribute score) in score fusion

  bool operator==(const FusionWeights&) const = default;
};

// Per-detection scores. s_t and s_a are the inputs; s_f is derived.
struct ScoreRecord {
  double s_t = 0.0;
  double s_a = 0.0;

  double fused(double beta) const;
  bool operator==(const ScoreRecord&) const = default;
};

// F_i = F_f + alpha * F_Ai, elementwise.
std::vector<double> fuse_features(std::span<const double> full_feature,
                                  std::span<const double> encoder_feature, double alpha);

// S_f = S_t + beta * exp(S_a).
double fuse_scores(double s_t, double s_a, double beta);

using Matrix = std::vector<std::vector<double>>;

struct LossInputs {
  double l_d = 0.0;  // detection loss
  double l_s = 0.0;  // single-view re-identification loss
  double l_c = 0.0;  // cross-view re-identification loss
  double w1 = 0.0;
  double w2 = 0.0;
  Matrix probs;   // N x K, rows sum to 1
  Matrix labels;  // N x K, rows one-hot
};

// Throws std::invalid_argument describing the first broken invariant.
void validate_loss_inputs(const LossInputs& in);

// Uncertainty-weighted tracking loss:
// 0.5 * (exp(-w1) L_d + exp(-w2) (L_s + L_c) + w1 + w2).
double loss_cmot(const LossInputs& in);

struct CmotGradient {
  double d_w1 = 0.0;
  double d_w2 = 0.0;
};
CmotGradient grad_loss_cmot(const LossInputs& in);

inline constexpr double kLogFloor = 1e-12;

// Mean cross-entropy over N objects; log arguments are floored at kLogFloor.
// Throws std::invalid_argument on shape mismatch.
double loss_referring(const Matrix& probs, const Matrix& labels);

double loss_total(const LossInputs& in);

struct SelfCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Worked-example, finite-difference and argmax-invariance checks of this
// module. Deterministic for a given seed.
std::vector<SelfCheck> fusion_self_check(unsigned long long seed = 2024, int trials = 1000);

}  // namespace crmot
