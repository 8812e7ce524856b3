#include "sdet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sdet {

double iou(const BBox& a, const BBox& b) {
    require(a.valid() && b.valid(), "iou: invalid box");
    const double ix1 = std::max(a.x1, b.x1);
    const double iy1 = std::max(a.y1, b.y1);
    const double ix2 = std::min(a.x2, b.x2);
    const double iy2 = std::min(a.y2, b.y2);
    const double iw = ix2 - ix1;
    const double ih = iy2 - iy1;
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;  // degenerate boxes by convention
    return inter / uni;
}

namespace {

// indices sorted by (-objectness, index)
std::vector<int> rank_indices(const std::vector<Proposal>& ps) {
    std::vector<int> idx(ps.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return ps[a].objectness > ps[b].objectness;
    });
    return idx;
}

}  // namespace

std::vector<Proposal> nms(const std::vector<Proposal>& proposals, double iou_threshold) {
    for (const auto& p : proposals) require_finite(p.objectness, "nms objectness");
    const std::vector<int> order = rank_indices(proposals);
    std::vector<bool> removed(proposals.size(), false);
    std::vector<Proposal> kept;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const int i = order[oi];
        if (removed[i]) continue;
        kept.push_back(proposals[i]);
        for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
            const int j = order[oj];
            if (!removed[j] && iou(proposals[i].box, proposals[j].box) > iou_threshold)
                removed[j] = true;
        }
    }
    return kept;
}

std::vector<Proposal> topk_by_objectness(const std::vector<Proposal>& proposals, int k) {
    require(k >= 1, "topk_by_objectness: k must be >= 1");
    const std::vector<int> order = rank_indices(proposals);
    std::vector<Proposal> out;
    out.reserve(std::min<std::size_t>(order.size(), static_cast<std::size_t>(k)));
    for (int i : order) {
        if (static_cast<int>(out.size()) >= k) break;
        out.push_back(proposals[i]);
    }
    return out;
}

std::array<double, 4> box_encode(const BBox& box, const BBox& anchor) {
    require(box.width() > 0.0 && box.height() > 0.0 &&
            anchor.width() > 0.0 && anchor.height() > 0.0,
            "box_encode: nonpositive box dimensions");
    const double wa = anchor.width();
    const double ha = anchor.height();
    return {(box.cx() - anchor.cx()) / wa, (box.cy() - anchor.cy()) / ha,
            std::log(box.width() / wa), std::log(box.height() / ha)};
}

BBox box_decode(const std::array<double, 4>& delta, const BBox& anchor) {
    require(anchor.width() > 0.0 && anchor.height() > 0.0, "box_decode: degenerate anchor");
    // clamp the log-size terms; un-trained heads can otherwise overflow exp
    const double max_log = 4.0;
    const double dw = std::min(delta[2], max_log);
    const double dh = std::min(delta[3], max_log);
    const double cx = anchor.cx() + delta[0] * anchor.width();
    const double cy = anchor.cy() + delta[1] * anchor.height();
    const double w = anchor.width() * std::exp(dw);
    const double h = anchor.height() * std::exp(dh);
    return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
}

std::vector<BBox> make_anchors(const AnchorSpec& spec, int feat_h, int feat_w, int stride) {
    spec.validate();
    std::vector<BBox> anchors;
    anchors.reserve(static_cast<std::size_t>(feat_h) * feat_w * spec.per_position());
    for (int y = 0; y < feat_h; ++y) {
        for (int x = 0; x < feat_w; ++x) {
            const double cx = (x + 0.5) * stride;
            const double cy = (y + 0.5) * stride;
            for (double s : spec.scales) {
                for (double r : spec.aspect_ratios) {
                    const double h = s * std::sqrt(r);
                    const double w = s / std::sqrt(r);
                    anchors.push_back({cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h});
                }
            }
        }
    }
    return anchors;
}

int roi_level(const FeatureMaps& features, const BBox& box) {
    const int n = static_cast<int>(features.levels.size());
    const int l0 = std::max(0, n - 2);  // coarsest-but-one
    const double scale = std::sqrt(std::max(box.area(), 1e-12));
    const int lvl = l0 + static_cast<int>(std::floor(std::log2(scale / 224.0)));
    return std::clamp(lvl, 0, n - 1);
}

namespace {

struct BinSample {
    int idx[4];
    double w[4];
};

// Bilinear sample point for one output bin centre, in one level's cell grid.
BinSample bin_sample(const Tensor& map, const BBox& box, int stride, int out_h, int out_w,
                     int by, int bx) {
    const double y = (box.y1 + (by + 0.5) * box.height() / out_h) / stride - 0.5;
    const double x = (box.x1 + (bx + 0.5) * box.width() / out_w) / stride - 0.5;
    const int y0 = static_cast<int>(std::floor(y));
    const int x0 = static_cast<int>(std::floor(x));
    const double fy = y - y0;
    const double fx = x - x0;

    BinSample s{};
    const double weights[4] = {(1 - fy) * (1 - fx), (1 - fy) * fx, fy * (1 - fx), fy * fx};
    const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
    const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
    for (int i = 0; i < 4; ++i) {
        if (ys[i] < 0 || ys[i] >= map.h || xs[i] < 0 || xs[i] >= map.w) {
            s.idx[i] = -1;
            s.w[i] = 0.0;
        } else {
            s.idx[i] = ys[i] * map.w + xs[i];
            s.w[i] = weights[i];
        }
    }
    return s;
}

}  // namespace

Tensor roi_align(const FeatureMaps& features, const BBox& box, int out_h, int out_w) {
    require(out_h >= 1 && out_w >= 1, "roi_align: output size must be >= 1");
    require(box.valid() && box.area() > 0.0, "roi_align: zero-area box");

    const auto& lvl = features.levels[roi_level(features, box)];
    const Tensor& map = lvl.map;
    Tensor out(map.c, out_h, out_w);
    for (int by = 0; by < out_h; ++by) {
        for (int bx = 0; bx < out_w; ++bx) {
            const BinSample s = bin_sample(map, box, lvl.stride, out_h, out_w, by, bx);
            for (int c = 0; c < map.c; ++c) {
                const double* plane = map.v.data() + static_cast<std::size_t>(c) * map.h * map.w;
                double acc = 0.0;
                for (int i = 0; i < 4; ++i)
                    if (s.idx[i] >= 0) acc += s.w[i] * plane[s.idx[i]];
                out.at(c, by, bx) = acc;
            }
        }
    }
    return out;
}

void roi_align_backward(const FeatureMaps& features, const BBox& box, int out_h, int out_w,
                        const Tensor& dy, Tensor& dlevel) {
    const auto& lvl = features.levels[roi_level(features, box)];
    const Tensor& map = lvl.map;
    require(dlevel.c == map.c && dlevel.h == map.h && dlevel.w == map.w,
            "roi_align_backward: gradient tensor shape mismatch");
    for (int by = 0; by < out_h; ++by) {
        for (int bx = 0; bx < out_w; ++bx) {
            const BinSample s = bin_sample(map, box, lvl.stride, out_h, out_w, by, bx);
            for (int c = 0; c < map.c; ++c) {
                const double g = dy.at(c, by, bx);
                if (g == 0.0) continue;
                double* plane = dlevel.v.data() + static_cast<std::size_t>(c) * map.h * map.w;
                for (int i = 0; i < 4; ++i)
                    if (s.idx[i] >= 0) plane[s.idx[i]] += s.w[i] * g;
            }
        }
    }
}

}  // namespace sdet
