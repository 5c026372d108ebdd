#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "crmot/assignment.hpp"
#include "crmot/metrics.hpp"
#include "crmot/random.hpp"
#include "crmot/synth.hpp"
#include "fixtures.hpp"

using namespace crmot;
using test::lane_box;

namespace {

std::vector<Track> with_extra(const std::vector<Track>& tracks, const Detection& d) {
  auto dets = flatten(tracks);
  dets.push_back(d);
  return assemble_tracks(std::move(dets));
}

std::vector<Track> without(const std::vector<Track>& tracks, const SlotKey& key) {
  auto dets = flatten(tracks);
  std::erase_if(dets, [&](const Detection& d) { return d.key() == key; });
  return assemble_tracks(std::move(dets));
}

std::vector<Track> permute_views(const std::vector<Track>& tracks, const std::vector<int>& perm) {
  auto dets = flatten(tracks);
  for (auto& d : dets) d.view_id = perm[static_cast<std::size_t>(d.view_id)];
  return assemble_tracks(std::move(dets));
}

// Box in the same slot overlapping nothing in `scene` (placed below the image).
BBox spurious_box(double x) { return BBox(x, 5000.0, 30.0, 60.0); }

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("restrict_gt keeps the referred identities only") {
  const Scene s = test::lane_scene(2, {1, 2, 3}, 2);
  CHECK(restrict_gt(s, test::refer("a", {2})).size() == 1);
  CHECK(restrict_gt(s, test::refer("b", {})).empty());
  const auto two = restrict_gt(s, test::refer("c", {1, 3}));
  REQUIRE(two.size() == 2);
  CHECK(two[0].identity == 1);
  CHECK(two[1].identity == 3);
}

TEST_CASE("match_frame") {
  const BBox g(0, 0, 10, 10);
  SUBCASE("high overlap matches") {
    const std::vector<Detection> gt{{0, 1, 1, g}};
    const std::vector<Detection> pr{{0, 1, 7, BBox(0.5, 0, 10, 10)}};
    const FrameMatch m = match_frame(gt, pr, 0.5);
    CHECK(m.pairs.size() == 1);
    CHECK(m.unmatched_gt.empty());
  }
  SUBCASE("low overlap is a miss plus a false positive") {
    const std::vector<Detection> gt{{0, 1, 1, g}};
    const std::vector<Detection> pr{{0, 1, 7, BBox(6, 0, 10, 10)}};  // IoU 4/16
    const FrameMatch m = match_frame(gt, pr, 0.5);
    CHECK(m.pairs.empty());
    CHECK(m.unmatched_gt.size() == 1);
    CHECK(m.unmatched_pred.size() == 1);
  }
  SUBCASE("crossing boxes take the pairing with larger total IoU") {
    const std::vector<Detection> gt{{0, 1, 1, BBox(0, 0, 10, 10)}, {0, 1, 2, BBox(4, 0, 10, 10)}};
    const std::vector<Detection> pr{{0, 1, 5, BBox(3, 0, 10, 10)}, {0, 1, 6, BBox(0.5, 0, 10, 10)}};
    CostMatrix cost(2, 2);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) {
        const double v = iou(gt[r].bbox, pr[c].bbox);
        cost(r, c) = v >= 0.5 ? 1.0 - v : CostMatrix::kForbidden;
      }
    }
    const FrameMatch m = match_frame(gt, pr, 0.5);
    const Assignment ref = brute_force_lap(cost);
    REQUIRE(m.pairs.size() == ref.pairs.size());
    for (std::size_t k = 0; k < ref.pairs.size(); ++k) CHECK(m.pairs[k] == ref.pairs[k]);
    CHECK(m.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}});
  }
}

TEST_CASE("count_events") {
  const Scene s = test::lane_scene(2, {1, 2}, 3);
  SUBCASE("perfect predictions") {
    for (const auto& c : count_events(s.gt_tracks, s.gt_tracks, 0.5)) {
      CHECK(c.misses == 0);
      CHECK(c.false_positives == 0);
      CHECK(c.mismatches() == 0);
      CHECK(c.gt == 4);
    }
  }
  SUBCASE("one identity split across two views at one frame") {
    const auto pred = test::relabel(s.gt_tracks, 9, [](const Detection& d) {
      return d.identity == 1 && d.view_id == 1 && d.frame == 2;
    });
    const auto counts = count_events(s.gt_tracks, pred, 0.5);
    REQUIRE(counts.size() == 3);
    CHECK(counts[1].crossview_mismatches == 1);
    // view 1 switches to 9 at frame 2 and back to 1 at frame 3
    CHECK(counts[1].temporal_mismatches == 1);
    CHECK(counts[2].temporal_mismatches == 1);
    CHECK(counts[2].crossview_mismatches == 0);
  }
  SUBCASE("temporal switch of a track seen in one view") {
    Scene one = s;
    std::erase_if(one.gt_tracks[0].detections, [](const Detection& d) { return d.view_id == 1; });
    const auto pred = test::relabel(one.gt_tracks, 9, [](const Detection& d) {
      return d.identity == 1 && d.frame >= 2;
    });
    const EventTotals t = sum_counts(count_events(one.gt_tracks, pred, 0.5));
    CHECK(t.temporal_mismatches == 1);
    CHECK(t.crossview_mismatches == 0);
  }
  SUBCASE("frames with predictions but no GT are counted") {
    const auto pred = with_extra({}, Detection{0, 3, 4, lane_box(4)});
    const auto counts = count_events(std::vector<Track>{}, pred, 0.5);
    REQUIRE(counts.size() == 1);
    CHECK(counts[0].frame == 3);
    CHECK(counts[0].false_positives == 1);
  }
}

TEST_CASE("hand-built (4, 2, 1, 40) ledger fixture") {
  const Scene s = test::lane_scene(2, {1, 2, 3, 4}, 5);
  auto dets = flatten(s.gt_tracks);
  std::erase_if(dets, [](const Detection& d) {
    return d.identity == 1 && d.view_id == 1 && d.frame <= 4;
  });
  for (auto& d : dets) {
    if (d.identity == 1 && d.view_id == 1 && d.frame == 5) d.identity = 100;
  }
  dets.push_back({0, 2, 200, lane_box(50)});
  dets.push_back({1, 4, 201, lane_box(51)});
  const auto pred = assemble_tracks(std::move(dets));
  const EventTotals t = sum_counts(count_events(s.gt_tracks, pred, 0.5));
  CHECK(t.misses == 4);
  CHECK(t.false_positives == 2);
  CHECK(t.mismatches() == 1);
  CHECK(t.gt == 40);
  CHECK(*cvma(t) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("cvma") {
  CHECK(*cvma(EventTotals{0, 0, 0, 0, 40}) == 1.0);
  CHECK(*cvma(EventTotals{4, 2, 1, 0, 40}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(*cvma(EventTotals{40, 20, 0, 0, 40}) == -0.5);
  CHECK_FALSE(cvma(EventTotals{0, 3, 0, 0, 0}).has_value());
  const std::vector<FrameCounts> frames{{1, 1, 0, 0, 1, 10}, {2, 0, 1, 0, 0, 10}};
  CHECK(*cvma(frames) == doctest::Approx(1.0 - 4.0 / 20.0).epsilon(1e-15));
}

TEST_CASE("id_measures") {
  SUBCASE("full coverage") {
    const Scene s = test::lane_scene(2, {1}, 4);
    const IdMeasures m = id_measures(s.gt_tracks, s.gt_tracks, 0.5);
    CHECK(m.idtp == 8);
    CHECK(m.cvidp() == 1.0);
    CHECK(m.cvidr() == 1.0);
  }
  SUBCASE("ten slots split 6 / 4") {
    const Scene s = test::lane_scene(2, {1}, 5);
    int index = 0;
    auto dets = flatten(s.gt_tracks);
    for (auto& d : dets) d.identity = index++ < 6 ? 11 : 12;
    const auto pred = assemble_tracks(std::move(dets));
    const IdMeasures m = id_measures(s.gt_tracks, pred, 0.5);
    CHECK(m.idtp == 6);
    CHECK(m.idfn == 4);
    CHECK(m.idfp == 4);
    CHECK(m.cvidp() == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(m.cvidr() == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(cvidf1(m) == doctest::Approx(0.6).epsilon(1e-15));
  }
  SUBCASE("no predictions") {
    const Scene s = test::lane_scene(2, {1, 2}, 3);
    const IdMeasures m = id_measures(s.gt_tracks, std::vector<Track>{}, 0.5);
    CHECK(m.idtp == 0);
    CHECK(m.idfn == 12);
    CHECK(m.cvidp() == 0.0);
    CHECK(m.cvidr() == 0.0);
  }
}

TEST_CASE("cvidf1") {
  CHECK(cvidf1(IdMeasures{1, 1, 1}) == 0.5);
  CHECK(cvidf1(IdMeasures{0, 0, 5}) == 0.0);
  CHECK(cvidf1(IdMeasures{0, 0, 0}) == 0.0);
  CHECK(cvidf1(IdMeasures{3, 2, 2}) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("evaluate_description") {
  const Scene s = test::lane_scene(3, {1, 2, 3}, 4);
  const auto d = test::refer("d", {1, 2});
  const auto referred = restrict_gt(s, d);

  SUBCASE("perfect tracker") {
    const auto r = evaluate_description(s, d, referred);
    CHECK(r.cvidf1 == 1.0);
    CHECK(r.cvma_raw == 1.0);
  }
  SUBCASE("a visible but non-referred object is a false positive") {
    const auto r = evaluate_description(s, d, s.gt_tracks);
    CHECK(r.totals().false_positives == 12);
    CHECK(r.cvma_raw == doctest::Approx(1.0 - 12.0 / 24.0).epsilon(1e-15));
  }
  SUBCASE("empty predictions") {
    const auto r = evaluate_description(s, d, std::vector<Track>{});
    CHECK(r.cvidf1 == 0.0);
    CHECK(r.cvma_raw == 0.0);
  }
  SUBCASE("nothing referred") {
    const auto none = test::refer("n", {});
    CHECK(evaluate_description(s, none, std::vector<Track>{}).cvma_raw == 1.0);
    const auto r = evaluate_description(s, none, restrict_gt(s, test::refer("x", {3})));
    CHECK(r.totals().false_positives == 12);
    CHECK(r.cvma_raw == 1.0 - 12.0);
    CHECK(r.cvidf1 == 0.0);
  }
  SUBCASE("invalid threshold") {
    CHECK_THROWS_AS(evaluate_description(s, d, referred, MetricConfig{0.0}),
                    std::invalid_argument);
  }
}

TEST_CASE("aggregate") {
  auto result = [](double f1, double ma) {
    DescriptionResult r;
    r.cvidf1 = f1;
    r.cvma_raw = ma;
    return r;
  };
  const std::vector<DescriptionResult> a{result(0.8, 1.0), result(0.4, 1.0)};
  CHECK(aggregate(a).cvridf1 == doctest::Approx(0.6).epsilon(1e-15));
  const std::vector<DescriptionResult> b{result(1.0, 0.5), result(1.0, -0.3)};
  CHECK(aggregate(b).cvrma == 0.25);
  const std::vector<DescriptionResult> c{result(1.0, 1.0)};
  CHECK(aggregate(c) == AggregateScores{1, 1.0, 1.0});
  CHECK_THROWS_AS(aggregate(std::vector<DescriptionResult>{}), std::domain_error);
}

TEST_CASE("fixpoint on generated scenes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scene s = generate_scene(2 + static_cast<int>(seed % 3), 1 + static_cast<int>(seed % 8),
                                   5 + static_cast<int>(seed * 7 % 46), {}, seed);
    std::set<Identity> all = s.identities();
    const auto r = evaluate_description(s, test::refer("all", all), s.gt_tracks);
    CHECK(r.cvidf1 == 1.0);
    CHECK(r.cvma_raw == 1.0);
  }
}

TEST_CASE("spurious detections never raise cvma") {
  Rng rng(3);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Scene s = generate_scene(3, 4, 8, {}, seed);
    const ErrorSpec spec{static_cast<int>(seed % 3), static_cast<int>(seed % 2),
                         static_cast<int>(seed % 2), static_cast<int>(seed % 3)};
    const auto pred = perturb(s, spec, seed).predictions.tracks;
    const auto d = test::refer("all", s.identities());
    const double before = evaluate_description(s, d, pred).cvma_raw;
    const Detection extra{static_cast<int>(rng.integer(0, 2)), static_cast<int>(rng.integer(1, 8)),
                          777, spurious_box(rng.uniform(0, 1000))};
    const double after = evaluate_description(s, d, with_extra(pred, extra)).cvma_raw;
    CHECK(after < before);
  }
}

TEST_CASE("deleting a matched detection never raises cvma without mismatches") {
  Rng rng(4);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Scene s = generate_scene(2, 3, 6, {}, seed);
    const auto pred = perturb(s, ErrorSpec{2, 1, 0, 0}, seed).predictions.tracks;
    const auto d = test::refer("all", s.identities());
    const double before = evaluate_description(s, d, pred).cvma_raw;
    // Pick a detection sitting on a GT box (every relabel-free survivor does).
    const auto dets = flatten(pred);
    std::vector<Detection> on_gt;
    for (const auto& p : dets) {
      if (p.identity <= 3) on_gt.push_back(p);
    }
    const auto& victim = on_gt[static_cast<std::size_t>(
        rng.integer(0, static_cast<std::int64_t>(on_gt.size()) - 1))];
    const double after = evaluate_description(s, d, without(pred, victim.key())).cvma_raw;
    CHECK(after <= before);
  }
}

TEST_CASE("deleting a mismatched detection can raise cvma") {
  // The deletion removes a cross-view mismatch (weight 2) and adds one miss.
  const Scene s = test::lane_scene(2, {1}, 1);
  const auto pred = test::relabel(s.gt_tracks, 9, [](const Detection& d) { return d.view_id == 1; });
  const auto d = test::refer("all", {1});
  const double before = evaluate_description(s, d, pred).cvma_raw;
  const double after = evaluate_description(s, d, without(pred, {1, 1, 9})).cvma_raw;
  CHECK(before == 0.0);
  CHECK(after == 0.5);
}

TEST_CASE("relabelling views consistently leaves every metric unchanged") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Scene s = generate_scene(4, 5, 10, {}, seed);
    const auto pred = perturb(s, ErrorSpec{3, 2, 1, 2}, seed + 100).predictions.tracks;
    std::vector<int> perm{0, 1, 2, 3};
    Rng rng(seed);
    rng.shuffle(perm);
    Scene moved = s;
    moved.gt_tracks = permute_views(s.gt_tracks, perm);
    const auto d = test::refer("all", s.identities());
    const auto a = evaluate_description(s, d, pred);
    const auto b = evaluate_description(moved, d, permute_views(pred, perm));
    CHECK(a == b);
  }
}

TEST_CASE("aggregates stay inside [0, 1]") {
  Rng rng(12);
  std::vector<DescriptionResult> results;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Scene s = generate_scene(2, 3, 5, {}, seed);
    const auto pred = perturb(s, ErrorSpec{static_cast<int>(seed % 5), static_cast<int>(seed % 7),
                                           0, static_cast<int>(seed % 2)},
                              seed)
                          .predictions.tracks;
    std::set<Identity> some;
    for (Identity id : s.identities()) {
      if (rng.uniform() < 0.5) some.insert(id);
    }
    results.push_back(evaluate_description(s, test::refer("r", some), pred));
    const AggregateScores agg = aggregate(results);
    CHECK(agg.cvridf1 >= 0.0);
    CHECK(agg.cvridf1 <= 1.0);
    CHECK(agg.cvrma >= 0.0);
    CHECK(agg.cvrma <= 1.0);
  }
}

}  // TEST_SUITE
