#include "sdet/toyscenes.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdet/rng.hpp"

namespace fs = std::filesystem;

namespace sdet {

const char* shape_name(ShapeKind k) {
    switch (k) {
        case ShapeKind::circle: return "circle";
        case ShapeKind::square: return "square";
        case ShapeKind::triangle: return "triangle";
        case ShapeKind::cross: return "cross";
        case ShapeKind::ring: return "ring";
    }
    return "?";
}

ShapeKind shape_from_name(const std::string& name) {
    for (ShapeKind k : {ShapeKind::circle, ShapeKind::square, ShapeKind::triangle,
                        ShapeKind::cross, ShapeKind::ring})
        if (name == shape_name(k)) return k;
    throw ConfigError("unknown shape archetype: " + name);
}

void SceneSpec::validate() const {
    require_config(image_size >= 16, "scene spec: image_size too small");
    require_config(!known.empty(), "scene spec: needs at least one known archetype");
    for (ShapeKind k : known)
        for (ShapeKind u : unknown)
            require_config(k != u, "scene spec: known and unknown archetypes must be disjoint");
    require_config(objects_min >= 0 && objects_max >= objects_min, "scene spec: bad object range");
    require_config(size_min > 2.0 && size_max >= size_min &&
                       size_max < static_cast<double>(image_size),
                   "scene spec: bad size range");
    require_config(max_pair_iou >= 0.0 && max_pair_iou <= 1.0, "scene spec: bad max_pair_iou");
}

namespace {

struct PlacedShape {
    ShapeKind kind;
    double cx, cy, size;
    std::uint8_t rgb[3];
    BBox bounds;
};

bool inside_shape(const PlacedShape& s, double px, double py) {
    const double dx = px - s.cx;
    const double dy = py - s.cy;
    const double half = 0.5 * s.size;
    switch (s.kind) {
        case ShapeKind::circle:
            return dx * dx + dy * dy <= half * half;
        case ShapeKind::square:
            return std::abs(dx) <= half && std::abs(dy) <= half;
        case ShapeKind::triangle: {
            if (dy < -half || dy > half) return false;
            const double frac = (dy + half) / s.size;  // 0 at apex, 1 at base
            return std::abs(dx) <= half * frac;
        }
        case ShapeKind::cross: {
            const double thick = s.size / 6.0;
            const bool horiz = std::abs(dx) <= half && std::abs(dy) <= thick;
            const bool vert = std::abs(dy) <= half && std::abs(dx) <= thick;
            return horiz || vert;
        }
        case ShapeKind::ring: {
            const double d2 = dx * dx + dy * dy;
            const double rin = 0.55 * half;
            return d2 <= half * half && d2 >= rin * rin;
        }
    }
    return false;
}

void hsv_to_rgb(double h, double s, double v, std::uint8_t* rgb) {
    const double c = v * s;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    const double m = v - c;
    rgb[0] = static_cast<std::uint8_t>(std::lround(255.0 * (r + m)));
    rgb[1] = static_cast<std::uint8_t>(std::lround(255.0 * (g + m)));
    rgb[2] = static_cast<std::uint8_t>(std::lround(255.0 * (b + m)));
}

PlacedShape place_shape(const SceneSpec& spec, ShapeKind kind, Rng& rng,
                        const std::vector<PlacedShape>& placed) {
    for (int attempt = 0; attempt < spec.place_retries; ++attempt) {
        PlacedShape s;
        s.kind = kind;
        s.size = rng.uniform(spec.size_min, spec.size_max);
        const double half = 0.5 * s.size;
        s.cx = rng.uniform(half + 1.0, spec.image_size - half - 1.0);
        s.cy = rng.uniform(half + 1.0, spec.image_size - half - 1.0);
        s.bounds = {s.cx - half, s.cy - half, s.cx + half, s.cy + half};
        hsv_to_rgb(rng.uniform(0.0, 360.0), rng.uniform(0.6, 1.0), rng.uniform(0.6, 1.0),
                   s.rgb);

        bool ok = true;
        for (const auto& other : placed) {
            if (iou(s.bounds, other.bounds) > spec.max_pair_iou) {
                ok = false;
                break;
            }
        }
        if (ok) return s;
    }
    throw GenerationError("scene placement failed after " +
                          std::to_string(spec.place_retries) + " retries (image too crowded)");
}

void render_background(Image& img, Rng& rng) {
    // coarse bilinear gradient plus pixel jitter, dark enough that shapes pop
    const int grid = 5;
    std::vector<double> cells(static_cast<std::size_t>(grid) * grid);
    for (auto& c : cells) c = rng.uniform(8.0, 55.0);
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            const double gy = static_cast<double>(y) / img.h * (grid - 1);
            const double gx = static_cast<double>(x) / img.w * (grid - 1);
            const int iy = static_cast<int>(gy);
            const int ix = static_cast<int>(gx);
            const double fy = gy - iy;
            const double fx = gx - ix;
            const int iy1 = std::min(iy + 1, grid - 1);
            const int ix1 = std::min(ix + 1, grid - 1);
            double v = (1 - fy) * ((1 - fx) * cells[iy * grid + ix] + fx * cells[iy * grid + ix1]) +
                       fy * ((1 - fx) * cells[iy1 * grid + ix] + fx * cells[iy1 * grid + ix1]);
            v += rng.uniform(-5.0, 5.0);
            const auto b = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
            img.at(y, x, 0) = b;
            img.at(y, x, 1) = b;
            img.at(y, x, 2) = b;
        }
    }
}

}  // namespace

std::pair<Image, SceneAnnotation> generate_scene(const SceneSpec& spec, std::uint64_t scene_seed,
                                                 int scene_id, const SceneRange& range) {
    spec.validate();
    Rng rng(scene_seed);

    Image img(spec.image_size, spec.image_size);
    render_background(img, rng);

    std::vector<PlacedShape> placed;
    SceneAnnotation ann;
    ann.scene_id = scene_id;
    ann.seed = scene_seed;
    ann.image_size = spec.image_size;

    const int n_known = rng.range(spec.objects_min, spec.objects_max);
    for (int i = 0; i < n_known; ++i) {
        const int cls = rng.range(1, spec.n_known_classes());
        PlacedShape s = place_shape(spec, spec.known[cls - 1], rng, placed);
        placed.push_back(s);
        ann.objects.push_back({s.bounds, cls, false});
    }
    const int n_unknown = range.unknown_hi > 0 ? rng.range(range.unknown_lo, range.unknown_hi) : 0;
    for (int i = 0; i < n_unknown && !spec.unknown.empty(); ++i) {
        const ShapeKind kind = spec.unknown[rng.below(spec.unknown.size())];
        PlacedShape s = place_shape(spec, kind, rng, placed);
        placed.push_back(s);
        ann.objects.push_back({s.bounds, 0, true});
    }

    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x) {
            const double px = x + 0.5;
            const double py = y + 0.5;
            for (const auto& s : placed) {
                if (inside_shape(s, px, py)) {
                    img.at(y, x, 0) = s.rgb[0];
                    img.at(y, x, 1) = s.rgb[1];
                    img.at(y, x, 2) = s.rgb[2];
                    break;  // placement keeps overlap low; first hit wins
                }
            }
        }
    }
    return {std::move(img), std::move(ann)};
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string scene_file(int id, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "scene_%06d.%s", id, ext);
    return buf;
}

std::string shapes_csv(const std::vector<ShapeKind>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += shape_name(v[i]);
    }
    return out;
}

std::vector<ShapeKind> shapes_from_csv(const std::string& csv) {
    std::vector<ShapeKind> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(shape_from_name(tok));
    return out;
}

}  // namespace

std::string annotation_to_text(const SceneAnnotation& ann, const std::string& image_rel) {
    std::ostringstream os;
    os << "sdet-annot v1\n";
    os << "scene_id = " << ann.scene_id << "\n";
    os << "seed = " << ann.seed << "\n";
    os << "image = " << image_rel << "\n";
    os << "image_size = " << ann.image_size << "\n";
    os << "objects = " << ann.objects.size() << "\n";
    for (const auto& o : ann.objects) {
        os << "object " << fmt_double(o.box.x1) << " " << fmt_double(o.box.y1) << " "
           << fmt_double(o.box.x2) << " " << fmt_double(o.box.y2) << " ";
        if (o.is_unknown)
            os << "unknown\n";
        else
            os << "class " << o.class_id << "\n";
    }
    return os.str();
}

SceneAnnotation annotation_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    if (line != "sdet-annot v1") throw IoError("annotation: unknown format header");
    SceneAnnotation ann;
    while (std::getline(is, line)) {
        if (line.rfind("scene_id", 0) == 0) {
            ann.scene_id = std::stoi(line.substr(line.find('=') + 1));
        } else if (line.rfind("seed", 0) == 0) {
            ann.seed = std::stoull(line.substr(line.find('=') + 1));
        } else if (line.rfind("image_size", 0) == 0) {
            ann.image_size = std::stoi(line.substr(line.find('=') + 1));
        } else if (line.rfind("object ", 0) == 0) {
            std::istringstream ls(line.substr(7));
            SceneObject o;
            std::string tail;
            ls >> o.box.x1 >> o.box.y1 >> o.box.x2 >> o.box.y2 >> tail;
            if (tail == "unknown") {
                o.is_unknown = true;
                o.class_id = 0;
            } else {
                ls >> o.class_id;
            }
            ann.objects.push_back(o);
        }
    }
    return ann;
}

void build_dataset(const SceneSpec& spec, int n_train, int n_val, const std::string& root,
                   bool force) {
    spec.validate();
    require(n_train >= 1 && n_val >= 1, "build_dataset: counts must be >= 1");

    const fs::path rootp(root);
    if (fs::exists(rootp / "manifest.txt") && !force)
        throw IoError("dataset already exists at " + root + " (pass force to overwrite)");
    for (const char* split : {"train", "val"}) {
        fs::create_directories(rootp / split / "images");
        fs::create_directories(rootp / split / "annotations");
    }

    std::ostringstream man;
    man << "format = sdet-dataset v1\n";
    man << "image_size = " << spec.image_size << "\n";
    man << "known = " << shapes_csv(spec.known) << "\n";
    man << "unknown = " << shapes_csv(spec.unknown) << "\n";
    man << "objects_min = " << spec.objects_min << "\n";
    man << "objects_max = " << spec.objects_max << "\n";
    man << "unknown_min = " << spec.unknown_min << "\n";
    man << "unknown_max = " << spec.unknown_max << "\n";
    man << "train_unknown_min = " << spec.train_unknown_min << "\n";
    man << "train_unknown_max = " << spec.train_unknown_max << "\n";
    man << "size_min = " << fmt_double(spec.size_min) << "\n";
    man << "size_max = " << fmt_double(spec.size_max) << "\n";
    man << "max_pair_iou = " << fmt_double(spec.max_pair_iou) << "\n";
    man << "seed = " << spec.seed << "\n";
    man << "n_train = " << n_train << "\n";
    man << "n_val = " << n_val << "\n";

    auto emit = [&](const char* split, int id, const SceneRange& range, bool strip_unknown) {
        auto [img, ann] = generate_scene(spec, Rng::mix(spec.seed, static_cast<std::uint64_t>(id)),
                                         id, range);
        if (strip_unknown) {
            std::vector<SceneObject> kept;
            for (const auto& o : ann.objects)
                if (!o.is_unknown) kept.push_back(o);
            ann.objects = std::move(kept);
        }
        const std::string img_rel = "images/" + scene_file(id, "ppm");
        write_ppm((rootp / split / img_rel).string(), img);
        std::ofstream af(rootp / split / "annotations" / scene_file(id, "txt"));
        af << annotation_to_text(ann, img_rel);
    };

    for (int i = 0; i < n_train; ++i)
        emit("train", i, {spec.train_unknown_min, spec.train_unknown_max}, true);
    for (int i = 0; i < n_val; ++i)
        emit("val", n_train + i, {spec.unknown_min, spec.unknown_max}, false);

    std::ofstream mf(rootp / "manifest.txt");
    mf << man.str();
    if (!mf) throw IoError("cannot write manifest under " + root);
}

Dataset load_dataset(const std::string& root) {
    const fs::path rootp(root);
    std::ifstream mf(rootp / "manifest.txt");
    if (!mf) throw IoError("no dataset manifest under " + root);

    Dataset ds;
    int n_train = 0, n_val = 0;
    std::string line;
    auto val_of = [](const std::string& l) { return l.substr(l.find('=') + 1); };
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(mf, line)) {
        const std::string v = trim(val_of(line));
        if (line.rfind("image_size", 0) == 0) ds.spec.image_size = std::stoi(v);
        else if (line.rfind("known", 0) == 0) ds.spec.known = shapes_from_csv(v);
        else if (line.rfind("unknown ", 0) == 0 || line.rfind("unknown=", 0) == 0 ||
                 line.rfind("unknown =", 0) == 0)
            ds.spec.unknown = shapes_from_csv(v);
        else if (line.rfind("objects_min", 0) == 0) ds.spec.objects_min = std::stoi(v);
        else if (line.rfind("objects_max", 0) == 0) ds.spec.objects_max = std::stoi(v);
        else if (line.rfind("unknown_min", 0) == 0) ds.spec.unknown_min = std::stoi(v);
        else if (line.rfind("unknown_max", 0) == 0) ds.spec.unknown_max = std::stoi(v);
        else if (line.rfind("train_unknown_min", 0) == 0) ds.spec.train_unknown_min = std::stoi(v);
        else if (line.rfind("train_unknown_max", 0) == 0) ds.spec.train_unknown_max = std::stoi(v);
        else if (line.rfind("size_min", 0) == 0) ds.spec.size_min = std::stod(v);
        else if (line.rfind("size_max", 0) == 0) ds.spec.size_max = std::stod(v);
        else if (line.rfind("max_pair_iou", 0) == 0) ds.spec.max_pair_iou = std::stod(v);
        else if (line.rfind("seed", 0) == 0) ds.spec.seed = std::stoull(v);
        else if (line.rfind("n_train", 0) == 0) n_train = std::stoi(v);
        else if (line.rfind("n_val", 0) == 0) n_val = std::stoi(v);
    }

    auto load_split = [&](const char* split, int lo, int n, std::vector<DatasetEntry>& out) {
        for (int i = 0; i < n; ++i) {
            const int id = lo + i;
            std::ifstream af(rootp / split / "annotations" / scene_file(id, "txt"));
            if (!af) throw IoError("missing annotation for scene " + std::to_string(id));
            std::stringstream buf;
            buf << af.rdbuf();
            DatasetEntry e;
            e.ann = annotation_from_text(buf.str());
            e.image_path = (rootp / split / "images" / scene_file(id, "ppm")).string();
            out.push_back(std::move(e));
        }
    };
    load_split("train", 0, n_train, ds.train);
    load_split("val", n_train, n_val, ds.val);
    return ds;
}

}  // namespace sdet
