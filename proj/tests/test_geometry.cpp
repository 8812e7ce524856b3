#include <doctest.h>

#include "oracles.hpp"
#include "sdet/geometry.hpp"
#include "sdet/rng.hpp"

using namespace sdet;

namespace {

BBox random_box(Rng& rng, double extent) {
    const double x1 = rng.uniform(0.0, extent);
    const double y1 = rng.uniform(0.0, extent);
    return {x1, y1, x1 + rng.uniform(0.5, extent * 0.5), y1 + rng.uniform(0.5, extent * 0.5)};
}

bool same_proposals(const std::vector<Proposal>& a, const std::vector<Proposal>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].objectness != b[i].objectness || a[i].box.x1 != b[i].box.x1 ||
            a[i].box.y1 != b[i].box.y1 || a[i].box.x2 != b[i].box.x2 ||
            a[i].box.y2 != b[i].box.y2)
            return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("iou on the pinned cases") {
    BBox a{0, 0, 2, 2};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, {5, 5, 7, 7}) == 0.0);
    // intersection 2, union 6
    CHECK(iou(a, {1, 0, 3, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // degenerate boxes score zero by convention
    BBox point{1, 1, 1, 1};
    CHECK(iou(point, point) == 0.0);
    CHECK(iou(point, a) == 0.0);
}

TEST_CASE("iou symmetry and range on random boxes") {
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        BBox a = random_box(rng, 20.0);
        BBox b = random_box(rng, 20.0);
        const double ab = iou(a, b);
        CHECK(ab == iou(b, a));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(iou(a, a) == 1.0);
    }
}

TEST_CASE("nms keeps a single proposal and resolves the two-box case") {
    std::vector<Proposal> one = {{{0, 0, 4, 4}, 0.7}};
    auto kept = nms(one, 0.5);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].objectness == 0.7);

    std::vector<Proposal> two = {{{0, 0, 4, 4}, 0.8}, {{0, 0, 4, 4}, 0.9}};
    kept = nms(two, 0.5);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].objectness == 0.9);
}

TEST_CASE("nms ties break towards the lower original index") {
    std::vector<Proposal> ps = {{{0, 0, 2, 2}, 0.5}, {{10, 10, 12, 12}, 0.5}, {{20, 0, 22, 2}, 0.5}};
    auto kept = nms(ps, 0.5);
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].box.x1 == 0.0);
    CHECK(kept[1].box.x1 == 10.0);
    CHECK(kept[2].box.x1 == 20.0);
}

TEST_CASE("nms equals the brute-force reference on 1000 random instances") {
    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = rng.range(1, 50);
        std::vector<Proposal> ps;
        for (int i = 0; i < n; ++i) ps.push_back({random_box(rng, 12.0), rng.uniform()});
        const double thr = rng.uniform(0.2, 0.7);
        auto a = nms(ps, thr);
        auto b = oracle::nms_brute(ps, thr);
        CHECK(same_proposals(a, b));
        // survivors never overlap above the threshold
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = i + 1; j < a.size(); ++j)
                CHECK(iou(a[i].box, a[j].box) <= thr);
        // kept objectness is nonincreasing
        for (std::size_t i = 1; i < a.size(); ++i)
            CHECK(a[i - 1].objectness >= a[i].objectness);
    }
}

TEST_CASE("topk equals the full-sort reference") {
    Rng rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = rng.range(1, 20);
        std::vector<Proposal> ps;
        for (int i = 0; i < n; ++i) ps.push_back({random_box(rng, 8.0), rng.uniform()});
        const int k = rng.range(1, 25);
        CHECK(same_proposals(topk_by_objectness(ps, k), oracle::topk_brute(ps, k)));
    }
    // k >= n returns everything sorted; k = 1 returns the argmax
    std::vector<Proposal> ps = {{{0, 0, 1, 1}, 0.2}, {{0, 0, 1, 1}, 0.9}, {{0, 0, 1, 1}, 0.5}};
    auto all = topk_by_objectness(ps, 10);
    REQUIRE(all.size() == 3);
    CHECK(all[0].objectness == 0.9);
    CHECK(all[2].objectness == 0.2);
    auto top1 = topk_by_objectness(ps, 1);
    REQUIRE(top1.size() == 1);
    CHECK(top1[0].objectness == 0.9);
}

TEST_CASE("box encode/decode: pinned case and exact round trip") {
    BBox anchor{0, 0, 10, 10};
    CHECK(box_encode(anchor, anchor) == std::array<double, 4>{0, 0, 0, 0});

    auto d = box_encode({5, 5, 15, 15}, anchor);
    CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d[3] == doctest::Approx(0.0).epsilon(1e-12));

    Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        BBox a = random_box(rng, 30.0);
        BBox b = random_box(rng, 30.0);
        BBox back = box_decode(box_encode(b, a), a);
        CHECK(std::abs(back.x1 - b.x1) <= 1e-9);
        CHECK(std::abs(back.y1 - b.y1) <= 1e-9);
        CHECK(std::abs(back.x2 - b.x2) <= 1e-9);
        CHECK(std::abs(back.y2 - b.y2) <= 1e-9);
    }

    CHECK_THROWS_AS(box_encode({0, 0, 0, 5}, anchor), ContractError);
    CHECK_THROWS_AS(box_encode({0, 0, 5, 5}, {0, 0, 0, 0}), ContractError);
}

TEST_CASE("anchor grid layout") {
    AnchorSpec spec;
    spec.scales = {16.0, 32.0};
    spec.aspect_ratios = {0.5, 1.0, 2.0};
    auto anchors = make_anchors(spec, 4, 3, 8);
    CHECK(anchors.size() == 4u * 3u * 6u);
    // first anchor: centred on cell (0, 0) at stride 8 -> (4, 4)
    CHECK(anchors[0].cx() == doctest::Approx(4.0));
    CHECK(anchors[0].cy() == doctest::Approx(4.0));
    // ratio = h/w
    CHECK(anchors[0].height() / anchors[0].width() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("roi_align: constant map yields constant output") {
    FeatureMaps fm;
    fm.image_h = fm.image_w = 32;
    FeatureMaps::Level lvl;
    lvl.id = 0;
    lvl.stride = 4;
    lvl.map = Tensor(3, 8, 8);
    std::fill(lvl.map.v.begin(), lvl.map.v.end(), 2.5);
    fm.levels.push_back(std::move(lvl));

    Tensor out = roi_align(fm, {5.0, 6.0, 20.0, 27.0}, 7, 7);
    REQUIRE(out.c == 3);
    for (double v : out.v) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("roi_align: integer-aligned box reproduces the patch exactly") {
    FeatureMaps fm;
    fm.image_h = fm.image_w = 32;
    FeatureMaps::Level lvl;
    lvl.id = 0;
    lvl.stride = 4;
    lvl.map = Tensor(1, 8, 8);
    Rng rng(5);
    for (auto& v : lvl.map.v) v = rng.normal();
    fm.levels.push_back(lvl);

    // cells (2..4, 1..3), i.e. image box x in [4, 16), y in [8, 20)
    Tensor out = roi_align(fm, {4.0, 8.0, 16.0, 20.0}, 3, 3);
    for (int by = 0; by < 3; ++by)
        for (int bx = 0; bx < 3; ++bx)
            CHECK(out.at(0, by, bx) ==
                  doctest::Approx(fm.levels[0].map.at(0, 2 + by, 1 + bx)).epsilon(1e-12));
}

TEST_CASE("roi_align matches the naive bilinear reference on random boxes") {
    Rng rng(23);
    FeatureMaps fm;
    fm.image_h = fm.image_w = 32;
    FeatureMaps::Level lvl;
    lvl.id = 0;
    lvl.stride = 4;
    lvl.map = Tensor(2, 8, 8);
    for (auto& v : lvl.map.v) v = rng.normal();
    fm.levels.push_back(lvl);

    for (int trial = 0; trial < 1000; ++trial) {
        BBox box = random_box(rng, 24.0);
        const int oh = rng.range(1, 7);
        const int ow = rng.range(1, 7);
        Tensor got = roi_align(fm, box, oh, ow);
        Tensor ref = oracle::roi_align_naive(fm.levels[0].map, 4, box, oh, ow);
        REQUIRE(got.size() == ref.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            const double denom = std::max(1.0, std::abs(ref.v[i]));
            CHECK(std::abs(got.v[i] - ref.v[i]) / denom <= 1e-6);
        }
    }

    CHECK_THROWS_AS(roi_align(fm, {3, 3, 3, 9}, 2, 2), ContractError);
}

TEST_CASE("roi_align_backward satisfies the adjoint identity") {
    Rng rng(31);
    FeatureMaps fm;
    fm.image_h = fm.image_w = 32;
    FeatureMaps::Level lvl;
    lvl.id = 0;
    lvl.stride = 4;
    lvl.map = Tensor(2, 8, 8);
    for (auto& v : lvl.map.v) v = rng.normal();
    fm.levels.push_back(lvl);

    for (int trial = 0; trial < 50; ++trial) {
        BBox box = random_box(rng, 24.0);
        Tensor dy(2, 5, 5);
        for (auto& v : dy.v) v = rng.normal();
        Tensor y = roi_align(fm, box, 5, 5);
        Tensor dx(2, 8, 8);
        roi_align_backward(fm, box, 5, 5, dy, dx);

        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) lhs += y.v[i] * dy.v[i];
        for (std::size_t i = 0; i < dx.size(); ++i) rhs += dx.v[i] * fm.levels[0].map.v[i];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("roi level selection clamps to the available range") {
    FeatureMaps fm;
    fm.image_h = fm.image_w = 64;
    for (int i = 0; i < 3; ++i) {
        FeatureMaps::Level lvl;
        lvl.id = i;
        lvl.stride = 4 << i;
        lvl.map = Tensor(1, 16 >> i, 16 >> i);
        fm.levels.push_back(std::move(lvl));
    }
    // toy-scale boxes are far below the 224 canonical size -> finest level
    CHECK(roi_level(fm, {0, 0, 16, 16}) == 0);
    CHECK(roi_level(fm, {0, 0, 2000, 2000}) == 2);
}

}  // TEST_SUITE
