#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "crmot/fusion.hpp"
#include "crmot/random.hpp"

using namespace crmot;

namespace {

LossInputs losses(double l_d, double l_s, double l_c, double w1, double w2) {
  LossInputs in;
  in.l_d = l_d;
  in.l_s = l_s;
  in.l_c = l_c;
  in.w1 = w1;
  in.w2 = w2;
  return in;
}

}  // namespace

TEST_SUITE("fusion") {

TEST_CASE("feature fusion") {
  const std::vector<double> f{1, 2};
  const std::vector<double> a{100, -100};
  const auto fused = fuse_features(f, a, 0.01);
  CHECK(fused[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fused[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fuse_features(f, a, 0.0) == f);
  CHECK(fuse_features(f, std::vector<double>{0, 0}, 0.01) == f);
  CHECK_THROWS_AS(fuse_features(f, std::vector<double>{1}, 0.01), std::invalid_argument);
}

TEST_CASE("score fusion") {
  CHECK(fuse_scores(0.5, 0.0, 0.1) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(std::abs(fuse_scores(0.42, 0.9, 0.1) - 0.665960311115695) < 1e-12);
  CHECK(fuse_scores(0.3, 0.8, 0.0) == 0.3);
  CHECK(ScoreRecord{0.42, 0.9}.fused(0.1) == fuse_scores(0.42, 0.9, 0.1));
}

TEST_CASE("score fusion is strictly increasing in both scores") {
  Rng rng(9);
  for (int k = 0; k < 1000; ++k) {
    const double t = rng.uniform(), a = rng.uniform(), d = rng.uniform(1e-6, 0.5);
    CHECK(fuse_scores(t + d, a, 0.1) > fuse_scores(t, a, 0.1));
    CHECK(fuse_scores(t, a + d, 0.1) > fuse_scores(t, a, 0.1));
  }
}

TEST_CASE("tracking loss") {
  CHECK(loss_cmot(losses(1, 0.5, 0.5, 0, 0)) == 1.0);
  CHECK(std::abs(loss_cmot(losses(1, 0.5, 0.5, std::log(2.0), 0)) - 1.0965735902799727) < 1e-12);
  CHECK(loss_cmot(losses(0, 0, 0, 0, 0)) == 0.0);
}

TEST_CASE("tracking loss gradient") {
  CHECK(grad_loss_cmot(losses(1, 0, 0, 0, 0)).d_w1 == 0.0);
  CHECK(grad_loss_cmot(losses(0, 0.25, 0.75, 0, 0)).d_w2 == 0.0);
  for (double w1 : {-3.0, 0.0, 2.5}) CHECK(grad_loss_cmot(losses(0, 1, 1, w1, 0)).d_w1 == 0.5);
}

TEST_CASE("tracking loss is minimised over w1 at log L_d") {
  for (double l_d : {0.3, 1.0, 4.0}) {
    const double w = std::log(l_d);
    const double at = loss_cmot(losses(l_d, 1, 1, w, 0));
    CHECK(loss_cmot(losses(l_d, 1, 1, w + 0.01, 0)) > at);
    CHECK(loss_cmot(losses(l_d, 1, 1, w - 0.01, 0)) > at);
    CHECK(std::abs(grad_loss_cmot(losses(l_d, 1, 1, w, 0)).d_w1) < 1e-15);
  }
}

TEST_CASE("referring loss") {
  CHECK(loss_referring({{1, 0}}, {{1, 0}}) == 0.0);
  CHECK(std::abs(loss_referring({{0.5, 0.5}}, {{1, 0}}) - 0.6931471805599453) < 1e-12);
  CHECK(std::abs(loss_referring({{0.5, 0.5}, {0.9, 0.1}}, {{1, 0}, {0, 1}}) -
                 1.4978661367769954) < 1e-12);
  // log(0) is floored, so the loss stays finite
  CHECK(loss_referring({{0, 1}}, {{1, 0}}) == doctest::Approx(-std::log(kLogFloor)));
  CHECK_THROWS_AS(loss_referring({{0.5, 0.5}}, {{1, 0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(loss_referring({{0.5, 0.5}}, {}), std::invalid_argument);
}

TEST_CASE("referring loss is non-negative and zero only for certain labels") {
  Rng rng(10);
  for (int k = 0; k < 500; ++k) {
    const int n = static_cast<int>(rng.integer(1, 4));
    const int classes = static_cast<int>(rng.integer(2, 5));
    Matrix p, y;
    for (int i = 0; i < n; ++i) {
      std::vector<double> row(static_cast<std::size_t>(classes));
      double sum = 0.0;
      for (auto& v : row) sum += (v = rng.uniform(0.01, 1.0));
      for (auto& v : row) v /= sum;
      std::vector<double> label(static_cast<std::size_t>(classes), 0.0);
      label[static_cast<std::size_t>(rng.integer(0, classes - 1))] = 1.0;
      p.push_back(row);
      y.push_back(label);
    }
    CHECK(loss_referring(p, y) > 0.0);
  }
}

TEST_CASE("total loss composes the two parts") {
  LossInputs in = losses(1, 0.5, 0.5, 0, 0);
  in.probs = {{0.5, 0.5}, {0.9, 0.1}};
  in.labels = {{1, 0}, {0, 1}};
  CHECK(std::abs(loss_total(in) - 2.4978661367769954) < 1e-12);
  CHECK(loss_total(losses(0, 0, 0, 0, 0)) == 0.0);
}

TEST_CASE("loss input validation") {
  LossInputs in = losses(1, 1, 1, 0, 0);
  in.probs = {{0.5, 0.6}};
  in.labels = {{1, 0}};
  CHECK_THROWS_AS(validate_loss_inputs(in), std::invalid_argument);
  in.probs = {{0.5, 0.5}};
  in.labels = {{1, 1}};
  CHECK_THROWS_AS(validate_loss_inputs(in), std::invalid_argument);
  in.labels = {{0, 1}};
  CHECK_NOTHROW(validate_loss_inputs(in));
  in.l_d = -1;
  CHECK_THROWS_AS(validate_loss_inputs(in), std::invalid_argument);
}

TEST_CASE("self check passes") {
  for (const auto& check : fusion_self_check()) {
    INFO(check.name << ": " << check.detail);
    CHECK(check.passed);
  }
}

}  // TEST_SUITE
