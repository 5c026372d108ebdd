#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "crmot/datamodel.hpp"
#include "crmot/random.hpp"
#include "crmot/render.hpp"
#include "crmot/vocabulary.hpp"
#include "fixtures.hpp"

using namespace crmot;

TEST_SUITE("datamodel") {

TEST_CASE("bbox rejects degenerate and non-finite extents") {
  CHECK_THROWS_AS(BBox(0, 0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(BBox(0, 0, 1, -2), std::invalid_argument);
  CHECK_THROWS_AS(BBox(std::nan(""), 0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(BBox(0, std::numeric_limits<double>::infinity(), 1, 1), std::invalid_argument);
  const BBox b(1, 2, 3, 4);
  CHECK(b.right() == 4);
  CHECK(b.bottom() == 6);
  CHECK(b.area() == 12);
}

TEST_CASE("iou worked cases") {
  const BBox a(0, 0, 2, 2);
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, BBox(5, 5, 1, 1)) == 0.0);
  CHECK(iou(a, BBox(2, 0, 2, 2)) == 0.0);  // shared edge only
  // intersection 2, union 6
  CHECK(iou(a, BBox(1, 0, 2, 2)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("iou is symmetric, bounded, and 1 only for identical boxes") {
  Rng rng(11);
  for (int k = 0; k < 2000; ++k) {
    const BBox a(rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0.1, 5), rng.uniform(0.1, 5));
    const BBox b(rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0.1, 5), rng.uniform(0.1, 5));
    const double ab = iou(a, b);
    CHECK(ab == iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab < 1.0);
    CHECK(iou(a, a) == 1.0);
  }
}

TEST_CASE("assemble_tracks groups by identity and sorts by frame then view") {
  const auto tracks = assemble_tracks({{1, 2, 7, test::lane_box(7)},
                                       {0, 2, 7, test::lane_box(7)},
                                       {1, 1, 3, test::lane_box(3)},
                                       {0, 1, 7, test::lane_box(7)}});
  REQUIRE(tracks.size() == 2);
  CHECK(tracks[0].identity == 3);
  REQUIRE(tracks[1].detections.size() == 3);
  CHECK(tracks[1].detections[0].frame == 1);
  CHECK(tracks[1].detections[1].view_id == 0);
  CHECK(tracks[1].detections[2].view_id == 1);
}

TEST_CASE("validate_scene") {
  const Scene good = test::lane_scene(2, {1, 2}, 3);
  CHECK(validate_scene(good).ok());

  SUBCASE("view id equal to num_views") {
    Scene s = good;
    s.gt_tracks[0].detections.push_back({2, 3, 1, test::lane_box(1)});
    const auto report = validate_scene(s);
    REQUIRE(report.size() == 1);
    CHECK(report.violations[0].kind == Violation::Kind::kOutOfRange);
  }
  SUBCASE("duplicated (view, frame, identity)") {
    Scene s = good;
    auto& dets = s.gt_tracks[1].detections;
    dets.insert(dets.begin() + 2, dets[2]);
    const auto report = validate_scene(s);
    REQUIRE(report.size() == 1);
    CHECK(report.violations[0].kind == Violation::Kind::kDuplicate);
  }
  SUBCASE("single view") {
    Scene s = good;
    s.num_views = 1;
    CHECK_FALSE(validate_scene(s).ok());
  }
  SUBCASE("frame beyond frames_per_view") {
    Scene s = good;
    s.frames_per_view = 2;
    CHECK(validate_scene(s).size() == 4);  // two ids x two views at frame 3
  }
}

TEST_CASE("vocabulary has 8 categories and 74 words") {
  const auto& vocab = AttributeVocabulary::standard();
  REQUIRE(vocab.categories().size() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(vocab.categories()[k].name == kAttributeCategories[k]);
    CHECK(vocab.contains(kAttributeCategories[k], "null"));
  }
  CHECK(vocab.word_count() == 74);
  CHECK(vocab.find("coat")->words.size() == 11);
  CHECK(vocab.find("held_item_style")->words.size() == 12);
  CHECK(vocab.find("transportation")->words.size() == 4);
}

TEST_CASE("validate_attributes") {
  const auto& vocab = AttributeVocabulary::standard();
  AttributeSet attrs;
  attrs.set("coat", "black coat");
  CHECK(validate_attributes(attrs, vocab).ok());

  AttributeSet ride;
  ride.set("transportation", "a bicycle");
  CHECK(validate_attributes(ride, vocab).ok());

  AttributeSet brown;
  brown.set("coat", "brown coat");
  const auto r = validate_attributes(brown, vocab);
  REQUIRE(r.size() == 1);
  CHECK(r.violations[0].kind == Violation::Kind::kUnknownWord);

  AttributeSet odd;
  odd.set("hairstyle", "bun");
  const auto r2 = validate_attributes(odd, vocab);
  REQUIRE(r2.size() == 1);
  CHECK(r2.violations[0].kind == Violation::Kind::kUnknownCategory);
}

TEST_CASE("attribute set treats null as absent") {
  AttributeSet a;
  CHECK(a.get("coat") == "null");
  a.set("coat", "red coat");
  a.set("coat", "null");
  CHECK(a.empty());
}

TEST_CASE("validate_description flags unknown identities") {
  const Scene s = test::lane_scene(2, {1, 2, 3}, 2);
  const auto& vocab = AttributeVocabulary::standard();
  CHECK(validate_description(test::refer("d", {}), s, vocab).ok());
  CHECK(validate_description(test::refer("d", {1, 3}), s, vocab).ok());
  const auto r = validate_description(test::refer("d", {2, 99}), s, vocab);
  REQUIRE(r.size() == 1);
  CHECK(r.violations[0].message.find("99") != std::string::npos);
}

TEST_CASE("render_description") {
  AttributeSet attrs;
  attrs.set("coat", "black coat");
  attrs.set("trousers", "blue trousers");
  attrs.set("held_item_style", "a book");
  CHECK(render_description(attrs) == "A person in a black coat and blue trousers, holding a book.");
  CHECK(render_description(attrs) == render_description(attrs));
  CHECK(render_description(AttributeSet{}) == "A person.");
  CHECK(render_description(attrs, "list") == "person; black coat; blue trousers; a book");
  CHECK_THROWS_AS(render_description(attrs, "poem"), std::invalid_argument);

  AttributeSet full;
  full.set("headwear_color", "red");
  full.set("headwear_style", "with cap");
  full.set("coat", "orange coat");
  full.set("shoes", "white shoes");
  full.set("held_item_color", "yellow");
  full.set("held_item_style", "a handbag");
  full.set("transportation", "an electric bike");
  CHECK(render_description(full) ==
        "A person with a red cap in an orange coat and white shoes, holding a yellow handbag "
        "and riding an electric bike.");
}

}  // TEST_SUITE
