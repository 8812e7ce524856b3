#pragma once

#include <map>
#include <string>
#include <vector>

#include "sdet/geometry.hpp"

namespace sdet {

struct PredBox {
    int scene_id = 0;
    BBox box;
    int class_id = 0;  // 1..K
    double confidence = 0.0;
};

struct GtBox {
    int scene_id = 0;
    BBox box;
    int class_id = 0;  // 1..K for knowns; novelty eval uses class_id 0
};

struct EvalResult {
    double map_50 = 0.0;
    double map_50_95 = 0.0;
    double mar_50 = 0.0;
    std::map<int, double> per_class_ap;  // AP at IoU 0.5
    bool has_novelty = false;
    double novelty_recall = 0.0;
    double novelty_precision = 0.0;

    std::string to_text() const;
    static EvalResult from_text(const std::string& text);
};

// COCO-style 101-point interpolated AP per class at one IoU threshold.
// Classes absent from the ground truth are not reported.
std::map<int, double> ap_at_iou(const std::vector<PredBox>& preds,
                                const std::vector<GtBox>& gts, double iou_thr);

double map_at_iou(const std::vector<PredBox>& preds, const std::vector<GtBox>& gts,
                  double iou_thr);

// Mean over the IoU grid 0.50:0.05:0.95, then over classes.
double map_50_95(const std::vector<PredBox>& preds, const std::vector<GtBox>& gts);

// Mean average recall at IoU 0.5 with a per-image detection cap.
double mar_50(const std::vector<PredBox>& preds, const std::vector<GtBox>& gts,
              int max_dets = 100);

struct NoveltyScored {
    int scene_id = 0;
    BBox box;
    double q = 0.0;
};

// Greedy q-descending matching of candidates to unknown ground truth at
// IoU >= iou_thr. With no unknowns (or no candidates) the respective metric
// is vacuously 1.
std::pair<double, double> novelty_eval(const std::vector<NoveltyScored>& candidates,
                                       const std::vector<GtBox>& unknown_gts,
                                       double iou_thr = 0.5);

EvalResult evaluate_detections(const std::vector<PredBox>& preds,
                               const std::vector<GtBox>& gts);

}  // namespace sdet
