#include "sdet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace sdet {

namespace {

// canonical ordering: confidence desc, then a stable box key so that input
// order never changes a metric
bool pred_before(const PredBox& a, const PredBox& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.scene_id != b.scene_id) return a.scene_id < b.scene_id;
    if (a.box.x1 != b.box.x1) return a.box.x1 < b.box.x1;
    if (a.box.y1 != b.box.y1) return a.box.y1 < b.box.y1;
    if (a.box.x2 != b.box.x2) return a.box.x2 < b.box.x2;
    return a.box.y2 < b.box.y2;
}

struct MatchOutcome {
    std::vector<bool> tp;  // per ranked prediction
    int n_gt = 0;
};

MatchOutcome greedy_match(std::vector<PredBox> preds, const std::vector<GtBox>& gts,
                          int class_id, double iou_thr, int max_dets_per_image) {
    std::erase_if(preds, [&](const PredBox& p) { return p.class_id != class_id; });
    std::sort(preds.begin(), preds.end(), pred_before);

    if (max_dets_per_image > 0) {
        std::map<int, int> per_image;
        std::vector<PredBox> capped;
        for (const auto& p : preds)
            if (per_image[p.scene_id]++ < max_dets_per_image) capped.push_back(p);
        preds = std::move(capped);
    }

    std::vector<const GtBox*> cls_gts;
    for (const auto& g : gts)
        if (g.class_id == class_id) cls_gts.push_back(&g);

    MatchOutcome out;
    out.n_gt = static_cast<int>(cls_gts.size());
    std::vector<bool> taken(cls_gts.size(), false);
    for (const auto& p : preds) {
        int best = -1;
        double best_iou = iou_thr;
        for (std::size_t j = 0; j < cls_gts.size(); ++j) {
            if (taken[j] || cls_gts[j]->scene_id != p.scene_id) continue;
            const double v = iou(p.box, cls_gts[j]->box);
            if (v >= best_iou && (best < 0 || v > best_iou)) {
                best = static_cast<int>(j);
                best_iou = v;
            }
        }
        if (best >= 0) {
            taken[best] = true;
            out.tp.push_back(true);
        } else {
            out.tp.push_back(false);
        }
    }
    return out;
}

double interpolated_ap(const MatchOutcome& m) {
    if (m.n_gt == 0) return 0.0;
    std::vector<double> precision, recall;
    int tp = 0, fp = 0;
    for (bool hit : m.tp) {
        hit ? ++tp : ++fp;
        precision.push_back(static_cast<double>(tp) / (tp + fp));
        recall.push_back(static_cast<double>(tp) / m.n_gt);
    }
    double ap = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double r = i / 100.0;
        double best = 0.0;
        for (std::size_t j = 0; j < precision.size(); ++j)
            if (recall[j] >= r) best = std::max(best, precision[j]);
        ap += best;
    }
    return ap / 101.0;
}

std::set<int> gt_classes(const std::vector<GtBox>& gts) {
    std::set<int> cs;
    for (const auto& g : gts) cs.insert(g.class_id);
    return cs;
}

}  // namespace

std::map<int, double> ap_at_iou(const std::vector<PredBox>& preds,
                                const std::vector<GtBox>& gts, double iou_thr) {
    std::map<int, double> out;
    for (int c : gt_classes(gts))
        out[c] = interpolated_ap(greedy_match(preds, gts, c, iou_thr, 0));
    return out;
}

double map_at_iou(const std::vector<PredBox>& preds, const std::vector<GtBox>& gts,
                  double iou_thr) {
    const auto per_class = ap_at_iou(preds, gts, iou_thr);
    if (per_class.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [c, ap] : per_class) s += ap;
    return s / static_cast<double>(per_class.size());
}

double map_50_95(const std::vector<PredBox>& preds, const std::vector<GtBox>& gts) {
    double s = 0.0;
    int n = 0;
    for (int i = 0; i < 10; ++i) {
        s += map_at_iou(preds, gts, 0.5 + 0.05 * i);
        ++n;
    }
    return s / n;
}

double mar_50(const std::vector<PredBox>& preds, const std::vector<GtBox>& gts, int max_dets) {
    const auto classes = gt_classes(gts);
    if (classes.empty()) return 0.0;
    double s = 0.0;
    for (int c : classes) {
        const MatchOutcome m = greedy_match(preds, gts, c, 0.5, max_dets);
        int tp = 0;
        for (bool hit : m.tp) tp += hit;
        s += m.n_gt > 0 ? static_cast<double>(tp) / m.n_gt : 0.0;
    }
    return s / static_cast<double>(classes.size());
}

std::pair<double, double> novelty_eval(const std::vector<NoveltyScored>& candidates,
                                       const std::vector<GtBox>& unknown_gts, double iou_thr) {
    std::vector<NoveltyScored> ranked = candidates;
    std::sort(ranked.begin(), ranked.end(), [](const NoveltyScored& a, const NoveltyScored& b) {
        if (a.q != b.q) return a.q > b.q;
        if (a.scene_id != b.scene_id) return a.scene_id < b.scene_id;
        if (a.box.x1 != b.box.x1) return a.box.x1 < b.box.x1;
        return a.box.y1 < b.box.y1;
    });

    std::vector<bool> taken(unknown_gts.size(), false);
    int matched = 0;
    for (const auto& cand : ranked) {
        int best = -1;
        double best_iou = iou_thr;
        for (std::size_t j = 0; j < unknown_gts.size(); ++j) {
            if (taken[j] || unknown_gts[j].scene_id != cand.scene_id) continue;
            const double v = iou(cand.box, unknown_gts[j].box);
            if (v >= best_iou && (best < 0 || v > best_iou)) {
                best = static_cast<int>(j);
                best_iou = v;
            }
        }
        if (best >= 0) {
            taken[best] = true;
            ++matched;
        }
    }
    const double recall =
        unknown_gts.empty() ? 1.0 : static_cast<double>(matched) / unknown_gts.size();
    const double precision =
        ranked.empty() ? 1.0 : static_cast<double>(matched) / ranked.size();
    return {recall, precision};
}

EvalResult evaluate_detections(const std::vector<PredBox>& preds,
                               const std::vector<GtBox>& gts) {
    EvalResult r;
    r.per_class_ap = ap_at_iou(preds, gts, 0.5);
    r.map_50 = map_at_iou(preds, gts, 0.5);
    r.map_50_95 = map_50_95(preds, gts);
    r.mar_50 = mar_50(preds, gts);
    return r;
}

std::string EvalResult::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "sdet-eval v1\n";
    os << "map_50 = " << map_50 << "\n";
    os << "map_50_95 = " << map_50_95 << "\n";
    os << "mar_50 = " << mar_50 << "\n";
    for (const auto& [c, ap] : per_class_ap) os << "ap_50 class " << c << " = " << ap << "\n";
    if (has_novelty) {
        os << "novelty_recall = " << novelty_recall << "\n";
        os << "novelty_precision = " << novelty_precision << "\n";
    }
    return os.str();
}

EvalResult EvalResult::from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    if (line != "sdet-eval v1") throw IoError("eval result: unknown format header");
    EvalResult r;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const double v = std::stod(line.substr(eq + 1));
        if (line.rfind("map_50 ", 0) == 0) r.map_50 = v;
        else if (line.rfind("map_50_95", 0) == 0) r.map_50_95 = v;
        else if (line.rfind("mar_50", 0) == 0) r.mar_50 = v;
        else if (line.rfind("ap_50 class ", 0) == 0)
            r.per_class_ap[std::stoi(line.substr(12, eq - 12))] = v;
        else if (line.rfind("novelty_recall", 0) == 0) {
            r.novelty_recall = v;
            r.has_novelty = true;
        } else if (line.rfind("novelty_precision", 0) == 0) {
            r.novelty_precision = v;
            r.has_novelty = true;
        }
    }
    return r;
}

}  // namespace sdet
