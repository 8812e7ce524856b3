#include "sdet/snn.hpp"

namespace sdet {

std::vector<double> lif_step(LifState& state, const std::vector<double>& input_current,
                             const NeuronParams& params) {
    params.validate();
    require(state.i.size() == state.v.size(), "lif_step: state current/voltage size mismatch");
    require(input_current.size() == state.size(), "lif_step: input size mismatch");
    for (double x : input_current) require_finite(x, "lif_step input");

    std::vector<double> spikes(state.size());
    std::vector<double> u(state.size());
    detail::lif_step_raw(state.i.data(), state.v.data(), u.data(), spikes.data(),
                         input_current.data(), state.size(), params);
    return spikes;
}

void li_step(LiState& state, const std::vector<double>& input_current,
             const NeuronParams& params) {
    params.validate();
    require(state.i.size() == state.v.size(), "li_step: state current/voltage size mismatch");
    require(input_current.size() == state.size(), "li_step: input size mismatch");
    for (double x : input_current) require_finite(x, "li_step input");

    detail::li_step_raw(state.i.data(), state.v.data(), input_current.data(), state.size(),
                        params);
}

SpikeTrain encode_direct(const std::vector<double>& features, const NeuronParams& params,
                         int t_steps) {
    params.validate();
    require(t_steps >= 1, "encode_direct: t_steps must be >= 1");
    for (double f : features) require_finite(f, "encode_direct features");

    const std::size_t n = features.size();
    std::vector<double> current(n);
    for (std::size_t k = 0; k < n; ++k) current[k] = features[k] > 0.0 ? features[k] : 0.0;

    SpikeTrain train;
    train.t_steps = t_steps;
    train.width = static_cast<int>(n);
    train.events.resize(static_cast<std::size_t>(t_steps) * n);

    LifState state = LifState::rest(n, params);
    std::vector<double> u(n);
    for (int t = 0; t < t_steps; ++t) {
        detail::lif_step_raw(state.i.data(), state.v.data(), u.data(),
                             train.events.data() + static_cast<std::size_t>(t) * n,
                             current.data(), n, params);
    }
    return train;
}

}  // namespace sdet
