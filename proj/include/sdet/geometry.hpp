#pragma once

#include <array>
#include <vector>

#include "sdet/common.hpp"
#include "sdet/features.hpp"

namespace sdet {

struct BBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
    double cx() const { return 0.5 * (x1 + x2); }
    double cy() const { return 0.5 * (y1 + y2); }
    bool valid() const { return x2 >= x1 && y2 >= y1; }

    BBox clipped(double w, double h) const {
        auto clamp = [](double v, double lo, double hi) {
            return v < lo ? lo : (v > hi ? hi : v);
        };
        return {clamp(x1, 0.0, w), clamp(y1, 0.0, h), clamp(x2, 0.0, w), clamp(y2, 0.0, h)};
    }
};

struct Proposal {
    BBox box;
    double objectness = 0.0;
};

struct Detection {
    BBox box;
    std::vector<double> class_probs;  // K+1 entries, class 0 = background

    int argmax() const {
        int best = 0;
        for (std::size_t i = 1; i < class_probs.size(); ++i)
            if (class_probs[i] > class_probs[best]) best = static_cast<int>(i);
        return best;
    }
    double score() const { return class_probs[argmax()]; }
    void validate() const {
        double s = 0.0;
        for (double p : class_probs) {
            require(p >= 0.0, "Detection: negative class probability");
            s += p;
        }
        require(std::abs(s - 1.0) <= 1e-6, "Detection: class_probs must sum to 1");
    }
};

struct AnchorSpec {
    std::vector<double> scales;         // side lengths in pixels
    std::vector<double> aspect_ratios;  // h/w

    void validate() const {
        require(!scales.empty() && !aspect_ratios.empty(), "AnchorSpec: empty scales/ratios");
        for (double s : scales) require(s > 0.0, "AnchorSpec: scale must be > 0");
        for (double r : aspect_ratios) require(r > 0.0, "AnchorSpec: ratio must be > 0");
    }
    int per_position() const {
        return static_cast<int>(scales.size() * aspect_ratios.size());
    }
};

// Intersection over union; degenerate boxes score 0 against everything.
double iou(const BBox& a, const BBox& b);

// Greedy NMS: repeatedly keep the highest-objectness proposal and drop the
// rest with IoU strictly above the threshold. Kept list is sorted by
// descending objectness; ties break towards the lower original index.
std::vector<Proposal> nms(const std::vector<Proposal>& proposals, double iou_threshold);

// k highest-objectness proposals (all if fewer), same order/tie rules as nms.
std::vector<Proposal> topk_by_objectness(const std::vector<Proposal>& proposals, int k);

// Box <-> anchor delta parameterisation: (dx, dy, dw, dh) with log size ratios.
std::array<double, 4> box_encode(const BBox& box, const BBox& anchor);
BBox box_decode(const std::array<double, 4>& delta, const BBox& anchor);

// Anchor grid for one pyramid level: row-major over (y, x), then scales x ratios.
std::vector<BBox> make_anchors(const AnchorSpec& spec, int feat_h, int feat_w, int stride);

// Pyramid level for a box under the standard scale heuristic.
int roi_level(const FeatureMaps& features, const BBox& box);

// Fixed-size bilinear crop: one sample per output bin centre, on the level
// chosen by roi_level. Output is c x out_h x out_w.
Tensor roi_align(const FeatureMaps& features, const BBox& box, int out_h, int out_w);

// Scatters the adjoint of roi_align back into `dlevel` (the gradient tensor of
// the level the box was aligned on; caller routes by roi_level).
void roi_align_backward(const FeatureMaps& features, const BBox& box, int out_h, int out_w,
                        const Tensor& dy, Tensor& dlevel);

}  // namespace sdet
