#pragma once

#include <cstddef>
#include <vector>

#include "sdet/common.hpp"
#include "sdet/rng.hpp"

namespace sdet {

// Dense CHW tensor.
struct Tensor {
    int c = 0, h = 0, w = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, 0.0) {}

    double& at(int ci, int y, int x) { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
    double at(int ci, int y, int x) const { return v[(static_cast<std::size_t>(ci) * h + y) * w + x]; }
    std::size_t size() const { return v.size(); }
    void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

// Fully connected layer. Weights are stored input-major (row i holds the
// outgoing weights of input i) so that spike-driven accumulation walks
// contiguous rows.
struct Dense {
    int in = 0, out = 0;
    std::vector<double> w;  // in * out
    std::vector<double> b;  // out

    Dense() = default;
    Dense(int in_, int out_) : in(in_), out(out_), w(static_cast<std::size_t>(in_) * out_, 0.0), b(out_, 0.0) {}

    void init(Rng& rng, double gain) {
        const double std = gain / std::sqrt(static_cast<double>(in));
        for (auto& x : w) x = rng.normal(0.0, std);
        std::fill(b.begin(), b.end(), 0.0);
    }
    std::size_t n_params() const { return w.size() + b.size(); }
};

// y = W^T x + b; skips zero inputs, which is where spiking forward passes
// spend their time.
void dense_forward(const Dense& d, const double* x, double* y);
// dW/db/dx from upstream dy; dx may be null when not needed. dW/db accumulate.
void dense_backward(const Dense& d, const double* x, const double* dy, double* dw, double* db,
                    double* dx);

struct Conv2d {
    int cin = 0, cout = 0, k = 1, stride = 1, pad = 0;
    std::vector<double> w;  // cout * cin * k * k
    std::vector<double> b;  // cout

    Conv2d() = default;
    Conv2d(int cin_, int cout_, int k_, int stride_, int pad_)
        : cin(cin_), cout(cout_), k(k_), stride(stride_), pad(pad_),
          w(static_cast<std::size_t>(cout_) * cin_ * k_ * k_, 0.0), b(cout_, 0.0) {}

    void init(Rng& rng, double gain) {
        const double std = gain / std::sqrt(static_cast<double>(cin) * k * k);
        for (auto& x : w) x = rng.normal(0.0, std);
        std::fill(b.begin(), b.end(), 0.0);
    }
    int out_side(int in_side) const { return (in_side + 2 * pad - k) / stride + 1; }
    std::size_t n_params() const { return w.size() + b.size(); }
};

// Standard cross-correlation.
Tensor conv_forward(const Conv2d& c, const Tensor& x);
// Event-driven forward for stride-1 convs: scatters each nonzero input into
// the output instead of gathering over the full receptive field.
Tensor conv_forward_events(const Conv2d& c, const Tensor& x);
// Gradients; dx may be null. dw/db accumulate; dx is overwritten.
void conv_backward(const Conv2d& c, const Tensor& x, const Tensor& dy, double* dw, double* db,
                   Tensor* dx);

// Nearest-neighbour x2 upsampling and its adjoint.
Tensor upsample2_nearest(const Tensor& x);
void upsample2_nearest_backward(const Tensor& dy, Tensor& dx);

inline void relu_inplace(Tensor& t) {
    for (auto& x : t.v) x = x > 0.0 ? x : 0.0;
}

}  // namespace sdet
