#pragma once

#include <vector>

#include "sdet/common.hpp"

namespace sdet {

// Second-order leaky integrate-and-fire: synaptic current with decay tau_syn
// feeds a membrane voltage with decay tau_mem. Time constants are in units of
// the (fixed, dt = 1) simulation step.
struct NeuronParams {
    double tau_syn = 2.0;
    double tau_mem = 4.0;
    double v_th = 1.0;
    double v_leak = 0.0;
    double v_reset = 0.0;
    double beta = 10.0;  // surrogate-gradient slope

    void validate() const {
        require(tau_syn > 0.0 && tau_mem > 0.0, "NeuronParams: tau_syn, tau_mem must be > 0");
        require(v_th > v_leak && v_leak >= v_reset,
                "NeuronParams: need v_th > v_leak >= v_reset");
        require(beta > 0.0, "NeuronParams: beta must be > 0");
    }
    double alpha_syn() const { return 1.0 - 1.0 / tau_syn; }
    double alpha_mem() const { return 1.0 - 1.0 / tau_mem; }
};

struct LifState {
    std::vector<double> i;  // synaptic current
    std::vector<double> v;  // membrane voltage

    static LifState rest(std::size_t n, const NeuronParams& p) {
        LifState s;
        s.i.assign(n, 0.0);
        s.v.assign(n, p.v_leak);
        return s;
    }
    std::size_t size() const { return v.size(); }
};

// Same dynamics without threshold/spike/reset; the readout population.
struct LiState {
    std::vector<double> i;
    std::vector<double> v;

    static LiState rest(std::size_t n, const NeuronParams& p) {
        LiState s;
        s.i.assign(n, 0.0);
        s.v.assign(n, p.v_leak);
        return s;
    }
    std::size_t size() const { return v.size(); }
};

// Binary event tensor over t_steps x width, time-major.
struct SpikeTrain {
    int t_steps = 0;
    int width = 0;
    std::vector<double> events;  // t_steps * width, each entry 0 or 1

    double at(int t, int n) const { return events[static_cast<std::size_t>(t) * width + n]; }
    int count(int n) const {
        int c = 0;
        for (int t = 0; t < t_steps; ++t) c += at(t, n) != 0.0;
        return c;
    }
};

struct SimConfig {
    int t_steps = 1;
    double dt = 1.0;  // fixed; kept explicit so configs read unambiguously

    void validate() const { require(t_steps >= 1, "SimConfig: t_steps must be >= 1"); }
};

// One forward-Euler step. Returns the spike vector (entries 0/1); voltages of
// spiking neurons are hard-reset to v_reset.
std::vector<double> lif_step(LifState& state, const std::vector<double>& input_current,
                             const NeuronParams& params);

// Same update without threshold comparison: no spike, no reset.
void li_step(LiState& state, const std::vector<double>& input_current,
             const NeuronParams& params);

// Direct input encoding: each feature value drives an independent LIF neuron
// (shared fixed params) as a constant current for t_steps. Negative features
// inject no current.
SpikeTrain encode_direct(const std::vector<double>& features, const NeuronParams& params,
                         int t_steps);

// Unchecked kernels used inside the simulation loops (callers validate once).
namespace detail {

inline void lif_step_raw(double* i, double* v, double* u_out, double* s_out,
                         const double* x, std::size_t n, const NeuronParams& p) {
    const double as = p.alpha_syn();
    const double am = p.alpha_mem();
    const double leak = (1.0 - am) * p.v_leak;
    for (std::size_t k = 0; k < n; ++k) {
        const double ik = as * i[k] + x[k];
        const double u = am * v[k] + leak + ik;
        const double spike = (u >= p.v_th) ? 1.0 : 0.0;
        i[k] = ik;
        v[k] = spike != 0.0 ? p.v_reset : u;
        u_out[k] = u;
        s_out[k] = spike;
    }
}

// Soft verification mode: spike output is the fast sigmoid whose derivative
// is the SuperSpike surrogate, and there is no reset (matching the backward
// pass, which detaches the reset).
inline void lif_step_soft_raw(double* i, double* v, double* u_out, double* s_out,
                              const double* x, std::size_t n, const NeuronParams& p) {
    const double as = p.alpha_syn();
    const double am = p.alpha_mem();
    const double leak = (1.0 - am) * p.v_leak;
    for (std::size_t k = 0; k < n; ++k) {
        const double ik = as * i[k] + x[k];
        const double u = am * v[k] + leak + ik;
        const double d = u - p.v_th;
        i[k] = ik;
        v[k] = u;
        u_out[k] = u;
        s_out[k] = d / (1.0 + p.beta * std::abs(d));
    }
}

inline void li_step_raw(double* i, double* v, const double* x, std::size_t n,
                        const NeuronParams& p) {
    const double as = p.alpha_syn();
    const double am = p.alpha_mem();
    const double leak = (1.0 - am) * p.v_leak;
    for (std::size_t k = 0; k < n; ++k) {
        const double ik = as * i[k] + x[k];
        i[k] = ik;
        v[k] = am * v[k] + leak + ik;
    }
}

// SuperSpike surrogate derivative of the Heaviside jump, 1/(beta|u - th| + 1)^2.
inline double surrogate_grad(double u, const NeuronParams& p) {
    const double a = p.beta * std::abs(u - p.v_th) + 1.0;
    return 1.0 / (a * a);
}

}  // namespace detail

}  // namespace sdet
