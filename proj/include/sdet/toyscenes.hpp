#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdet/geometry.hpp"
#include "sdet/image.hpp"

namespace sdet {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape archetypes. Known and unknown sets must stay disjoint; which ones are
// "known" carries class ids 1..K in the annotations, unknowns carry a flag.
enum class ShapeKind { circle, square, triangle, cross, ring };

const char* shape_name(ShapeKind k);
ShapeKind shape_from_name(const std::string& name);

struct SceneSpec {
    int image_size = 64;
    std::vector<ShapeKind> known = {ShapeKind::circle, ShapeKind::square, ShapeKind::triangle};
    std::vector<ShapeKind> unknown = {ShapeKind::cross, ShapeKind::ring};
    int objects_min = 1, objects_max = 3;      // known objects per scene
    int unknown_min = 1, unknown_max = 2;      // unknown objects per val scene
    int train_unknown_min = 0, train_unknown_max = 1;  // rendered but unlabeled
    double size_min = 10.0, size_max = 26.0;   // object extent, px
    double max_pair_iou = 0.3;
    int place_retries = 100;
    std::uint64_t seed = 0;

    void validate() const;
    int n_known_classes() const { return static_cast<int>(known.size()); }
};

struct SceneObject {
    BBox box;          // exact analytic bounds of the rendered shape
    int class_id = 0;  // 1..K for knowns, 0 for unknowns
    bool is_unknown = false;
};

struct SceneAnnotation {
    int scene_id = 0;
    std::uint64_t seed = 0;
    int image_size = 0;
    std::vector<SceneObject> objects;
};

// Deterministic render. `n_unknown_range` selects which unknown-count knobs
// apply (train vs val scenes).
struct SceneRange {
    int unknown_lo = 0, unknown_hi = 0;
};
std::pair<Image, SceneAnnotation> generate_scene(const SceneSpec& spec, std::uint64_t scene_seed,
                                                 int scene_id, const SceneRange& range);

// Dataset on disk:
//   root/manifest.txt
//   root/{train,val}/images/scene_NNNNNN.ppm
//   root/{train,val}/annotations/scene_NNNNNN.txt
// Train annotations never list unknown objects (they are rendered but left
// as background); val annotations flag them.
void build_dataset(const SceneSpec& spec, int n_train, int n_val, const std::string& root,
                   bool force);

struct DatasetEntry {
    std::string image_path;
    SceneAnnotation ann;
};
struct Dataset {
    SceneSpec spec;
    std::vector<DatasetEntry> train, val;
};
Dataset load_dataset(const std::string& root);

std::string annotation_to_text(const SceneAnnotation& ann, const std::string& image_rel);
SceneAnnotation annotation_from_text(const std::string& text);

}  // namespace sdet
