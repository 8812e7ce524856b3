#include "sdet/backbone.hpp"

namespace sdet {

void Backbone::init(const BackboneConfig& config, Rng& rng) {
    config.validate();
    cfg = config;
    trunk.clear();
    lateral.clear();
    smooth.clear();

    int cin = cfg.in_channels;
    for (int cout : cfg.trunk_channels) {
        Conv2d c(cin, cout, 3, /*stride=*/2, /*pad=*/1);
        c.init(rng, std::sqrt(2.0));  // relu-preserving scale
        trunk.push_back(std::move(c));
        cin = cout;
    }
    for (int stage : cfg.pyramid_stages) {
        Conv2d lat(cfg.trunk_channels[stage], cfg.pyramid_channels, 1, 1, 0);
        lat.init(rng, 1.0);
        lateral.push_back(std::move(lat));
        Conv2d sm(cfg.pyramid_channels, cfg.pyramid_channels, 3, 1, 1);
        sm.init(rng, 1.0);
        smooth.push_back(std::move(sm));
    }
}

FeatureMaps Backbone::forward(const Tensor& image, BackboneTrace* trace) const {
    require_config(image.c == cfg.in_channels, "backbone: image channel mismatch");

    std::vector<Tensor> stage_out;
    Tensor cur = image;
    for (const auto& c : trunk) {
        cur = conv_forward(c, cur);
        relu_inplace(cur);
        stage_out.push_back(cur);
    }

    const std::size_t n = cfg.pyramid_stages.size();
    std::vector<Tensor> merged(n);
    for (std::size_t i = n; i-- > 0;) {
        merged[i] = conv_forward(lateral[i], stage_out[cfg.pyramid_stages[i]]);
        if (i + 1 < n) {
            Tensor up = upsample2_nearest(merged[i + 1]);
            require_config(up.h == merged[i].h && up.w == merged[i].w,
                           "backbone: pyramid levels must differ by exactly one octave");
            for (std::size_t j = 0; j < merged[i].size(); ++j) merged[i].v[j] += up.v[j];
        }
    }

    FeatureMaps fm;
    fm.image_h = image.h;
    fm.image_w = image.w;
    for (std::size_t i = 0; i < n; ++i) {
        FeatureMaps::Level lvl;
        lvl.id = static_cast<int>(i);
        lvl.stride = level_stride(i);
        lvl.map = conv_forward(smooth[i], merged[i]);
        fm.levels.push_back(std::move(lvl));
    }
    fm.validate();

    if (trace) {
        trace->recorded = true;
        trace->stage_out.clear();
        for (int stage : cfg.pyramid_stages) trace->stage_out.push_back(stage_out[stage]);
        trace->merged = std::move(merged);
    }
    return fm;
}

void BackboneGrads::init(const Backbone& bb) {
    dlat_w.clear();
    dlat_b.clear();
    dsmooth_w.clear();
    dsmooth_b.clear();
    for (std::size_t i = 0; i < bb.lateral.size(); ++i) {
        dlat_w.emplace_back(bb.lateral[i].w.size(), 0.0);
        dlat_b.emplace_back(bb.lateral[i].b.size(), 0.0);
        dsmooth_w.emplace_back(bb.smooth[i].w.size(), 0.0);
        dsmooth_b.emplace_back(bb.smooth[i].b.size(), 0.0);
    }
}

void BackboneGrads::scale(double f) {
    auto sc = [f](std::vector<std::vector<double>>& vv) {
        for (auto& v : vv)
            for (auto& x : v) x *= f;
    };
    sc(dlat_w);
    sc(dlat_b);
    sc(dsmooth_w);
    sc(dsmooth_b);
}

void Backbone::backward(const BackboneTrace& trace, std::vector<Tensor> dlevels,
                        BackboneGrads& grads) const {
    require_state(trace.recorded, "backbone backward: forward was not traced");
    const std::size_t n = cfg.pyramid_stages.size();
    require(dlevels.size() == n, "backbone backward: level gradient count mismatch");

    // through the smoothing convs into the merged maps
    std::vector<Tensor> dmerged(n);
    for (std::size_t i = 0; i < n; ++i) {
        conv_backward(smooth[i], trace.merged[i], dlevels[i], grads.dsmooth_w[i].data(),
                      grads.dsmooth_b[i].data(), &dmerged[i]);
    }
    // top-down pathway adjoint: finest to coarsest
    for (std::size_t i = 0; i < n; ++i) {
        conv_backward(lateral[i], trace.stage_out[i], dmerged[i], grads.dlat_w[i].data(),
                      grads.dlat_b[i].data(), nullptr);
        if (i + 1 < n) upsample2_nearest_backward(dmerged[i], dmerged[i + 1]);
    }
}

}  // namespace sdet
