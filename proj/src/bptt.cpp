#include <algorithm>

#include "sdet/block.hpp"

namespace sdet {

namespace {

struct Shape {
    int c, h, w;
};

Shape stage_in_shape(const SpikingBlock& blk, std::size_t l) {
    if (l == 0) return {blk.in_c, blk.in_h, blk.in_w};
    const auto& p = blk.stages[l - 1];
    return {p.out_c, p.out_h, p.out_w};
}

Tensor wrap(const std::vector<double>& flat, Shape sh) {
    Tensor t(sh.c, sh.h, sh.w);
    t.v = flat;
    return t;
}

// dw/db accumulation for one stage plus optionally the downstream adjoint dx.
void transform_backward(const BlockStage& st, const Tensor& x, const Tensor& dz,
                        std::vector<double>& dw, std::vector<double>& db, Tensor* dx) {
    if (st.is_conv) {
        conv_backward(st.conv, x, dz, dw.data(), db.data(), dx);
    } else {
        if (dx) *dx = Tensor(x.c, x.h, x.w);
        dense_backward(st.fc, x.v.data(), dz.v.data(), dw.data(), db.data(),
                       dx ? dx->v.data() : nullptr);
    }
}

void backward_ann(const SpikingBlock& blk, const BlockTrace& trace,
                  const std::vector<double>& upstream, BlockGrads& grads,
                  bool want_input_grad) {
    const std::size_t S = blk.stages.size();
    Tensor dz = wrap(upstream, {blk.stages[S - 1].out_c, blk.stages[S - 1].out_h,
                                blk.stages[S - 1].out_w});
    for (std::size_t li = S; li-- > 0;) {
        const Shape in_sh = stage_in_shape(blk, li);
        const Tensor x = wrap(li == 0 ? trace.input : trace.s[li - 1][0], in_sh);
        const bool need_dx = li > 0 || want_input_grad;
        Tensor dx;
        transform_backward(blk.stages[li], x, dz, grads.dw[li], grads.db[li],
                           need_dx ? &dx : nullptr);
        if (li > 0) {
            const auto& pre = trace.u[li - 1][0];
            for (std::size_t k = 0; k < dx.size(); ++k)
                if (pre[k] <= 0.0) dx.v[k] = 0.0;
            dz = std::move(dx);
        } else if (want_input_grad) {
            for (std::size_t k = 0; k < dx.size(); ++k) grads.dinput[k] += dx.v[k];
        }
    }
}

}  // namespace

void block_backward(const SpikingBlock& blk, const BlockTrace& trace,
                    const std::vector<double>& upstream, BlockGrads& grads,
                    bool want_input_grad) {
    require_state(trace.recorded, "block_backward: forward run was not recorded");
    require(upstream.size() == blk.out_size(), "block_backward: upstream size mismatch");
    require(grads.dw.size() == blk.stages.size(), "block_backward: grads not initialised");

    if (trace.mode == BlockMode::ann) {
        backward_ann(blk, trace, upstream, grads, want_input_grad);
        return;
    }

    const int T = trace.t_steps;
    const std::size_t S = blk.stages.size();
    const bool need_enc = blk.encode_input && want_input_grad;

    // adjoints carried backwards across steps: c = dL/du, a = dL/di
    std::vector<std::vector<double>> c_next(S), a_next(S);
    for (std::size_t l = 0; l < S; ++l) {
        c_next[l].assign(blk.stages[l].out_size(), 0.0);
        a_next[l].assign(blk.stages[l].out_size(), 0.0);
    }
    std::vector<double> ce_next, ae_next;
    if (need_enc) {
        ce_next.assign(blk.in_size(), 0.0);
        ae_next.assign(blk.in_size(), 0.0);
    }

    for (int t = T - 1; t >= 0; --t) {
        // readout LI: no spike nonlinearity, upstream enters at the last step
        Tensor dz;
        {
            const BlockStage& st = blk.stages[S - 1];
            const double am = st.np.alpha_mem();
            const double as = st.np.alpha_syn();
            auto& c = c_next[S - 1];
            auto& a = a_next[S - 1];
            for (std::size_t k = 0; k < c.size(); ++k) {
                const double cc = am * c[k] + (t == T - 1 ? upstream[k] : 0.0);
                c[k] = cc;
                a[k] = cc + as * a[k];
            }
            dz = wrap(a, {st.out_c, st.out_h, st.out_w});
        }

        for (std::size_t li = S; li-- > 0;) {
            const Shape in_sh = stage_in_shape(blk, li);
            Tensor x;
            if (li == 0)
                x = wrap(blk.encode_input ? trace.enc_s[t] : trace.input, in_sh);
            else
                x = wrap(trace.s[li - 1][t], in_sh);

            const bool need_dx =
                li > 0 || need_enc || (!blk.encode_input && want_input_grad);
            Tensor dx;
            transform_backward(blk.stages[li], x, dz, grads.dw[li], grads.db[li],
                               need_dx ? &dx : nullptr);

            if (li > 0) {
                const BlockStage& st = blk.stages[li - 1];
                const double am = st.np.alpha_mem();
                const double as = st.np.alpha_syn();
                const auto& u = trace.u[li - 1][t];
                auto& c = c_next[li - 1];
                auto& a = a_next[li - 1];
                for (std::size_t k = 0; k < c.size(); ++k) {
                    const double cc =
                        am * c[k] + detail::surrogate_grad(u[k], st.np) * dx.v[k];
                    c[k] = cc;
                    a[k] = cc + as * a[k];
                }
                dz = wrap(a, {st.out_c, st.out_h, st.out_w});
            } else if (need_enc) {
                const auto& u = trace.enc_u[t];
                for (std::size_t k = 0; k < ce_next.size(); ++k) {
                    const double cc = blk.encoder.alpha_mem() * ce_next[k] +
                                      detail::surrogate_grad(u[k], blk.encoder) * dx.v[k];
                    ce_next[k] = cc;
                    const double aa = cc + blk.encoder.alpha_syn() * ae_next[k];
                    ae_next[k] = aa;
                    if (trace.input[k] > 0.0) grads.dinput[k] += aa;
                }
            } else if (!blk.encode_input && want_input_grad) {
                for (std::size_t k = 0; k < dx.size(); ++k) grads.dinput[k] += dx.v[k];
            }
        }
    }
}

}  // namespace sdet
