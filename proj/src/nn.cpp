#include "sdet/nn.hpp"

#include <algorithm>
#include <cstring>

namespace sdet {

void dense_forward(const Dense& d, const double* x, double* y) {
    std::copy(d.b.begin(), d.b.end(), y);
    for (int i = 0; i < d.in; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* row = d.w.data() + static_cast<std::size_t>(i) * d.out;
        if (xi == 1.0) {  // binary spike: pure accumulate
            for (int o = 0; o < d.out; ++o) y[o] += row[o];
        } else {
            for (int o = 0; o < d.out; ++o) y[o] += xi * row[o];
        }
    }
}

void dense_backward(const Dense& d, const double* x, const double* dy, double* dw, double* db,
                    double* dx) {
    if (db) {
        for (int o = 0; o < d.out; ++o) db[o] += dy[o];
    }
    if (dw) {
        for (int i = 0; i < d.in; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            double* row = dw + static_cast<std::size_t>(i) * d.out;
            for (int o = 0; o < d.out; ++o) row[o] += xi * dy[o];
        }
    }
    if (dx) {
        for (int i = 0; i < d.in; ++i) {
            const double* row = d.w.data() + static_cast<std::size_t>(i) * d.out;
            double acc = 0.0;
            for (int o = 0; o < d.out; ++o) acc += row[o] * dy[o];
            dx[i] = acc;
        }
    }
}

Tensor conv_forward(const Conv2d& c, const Tensor& x) {
    require_config(x.c == c.cin, "conv_forward: channel mismatch");
    const int oh = c.out_side(x.h);
    const int ow = c.out_side(x.w);
    require_config(oh >= 1 && ow >= 1, "conv_forward: output would be empty");

    Tensor y(c.cout, oh, ow);
    for (int co = 0; co < c.cout; ++co) {
        const double bias = c.b[co];
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                double acc = bias;
                const int iy0 = oy * c.stride - c.pad;
                const int ix0 = ox * c.stride - c.pad;
                for (int ci = 0; ci < c.cin; ++ci) {
                    const double* wp =
                        c.w.data() + ((static_cast<std::size_t>(co) * c.cin + ci) * c.k) * c.k;
                    for (int ky = 0; ky < c.k; ++ky) {
                        const int iy = iy0 + ky;
                        if (iy < 0 || iy >= x.h) continue;
                        for (int kx = 0; kx < c.k; ++kx) {
                            const int ix = ix0 + kx;
                            if (ix < 0 || ix >= x.w) continue;
                            acc += wp[ky * c.k + kx] * x.at(ci, iy, ix);
                        }
                    }
                }
                y.at(co, oy, ox) = acc;
            }
        }
    }
    return y;
}

Tensor conv_forward_events(const Conv2d& c, const Tensor& x) {
    require_config(c.stride == 1, "conv_forward_events: stride-1 only");
    require_config(x.c == c.cin, "conv_forward_events: channel mismatch");
    const int oh = c.out_side(x.h);
    const int ow = c.out_side(x.w);

    Tensor y(c.cout, oh, ow);
    for (int co = 0; co < c.cout; ++co) {
        const double bias = c.b[co];
        double* plane = &y.at(co, 0, 0);
        for (int j = 0; j < oh * ow; ++j) plane[j] = bias;
    }
    for (int ci = 0; ci < c.cin; ++ci) {
        for (int iy = 0; iy < x.h; ++iy) {
            for (int ix = 0; ix < x.w; ++ix) {
                const double s = x.at(ci, iy, ix);
                if (s == 0.0) continue;
                // output cells whose receptive field covers (iy, ix)
                const int oy_lo = std::max(0, iy + c.pad - c.k + 1);
                const int oy_hi = std::min(oh - 1, iy + c.pad);
                const int ox_lo = std::max(0, ix + c.pad - c.k + 1);
                const int ox_hi = std::min(ow - 1, ix + c.pad);
                for (int co = 0; co < c.cout; ++co) {
                    const double* wp =
                        c.w.data() + ((static_cast<std::size_t>(co) * c.cin + ci) * c.k) * c.k;
                    for (int oy = oy_lo; oy <= oy_hi; ++oy) {
                        const int ky = iy - oy + c.pad;
                        for (int ox = ox_lo; ox <= ox_hi; ++ox) {
                            const int kx = ix - ox + c.pad;
                            y.at(co, oy, ox) += (s == 1.0 ? wp[ky * c.k + kx]
                                                          : s * wp[ky * c.k + kx]);
                        }
                    }
                }
            }
        }
    }
    return y;
}

void conv_backward(const Conv2d& c, const Tensor& x, const Tensor& dy, double* dw, double* db,
                   Tensor* dx) {
    const int oh = dy.h;
    const int ow = dy.w;
    if (db) {
        for (int co = 0; co < c.cout; ++co) {
            const double* plane = dy.v.data() + static_cast<std::size_t>(co) * oh * ow;
            double acc = 0.0;
            for (int j = 0; j < oh * ow; ++j) acc += plane[j];
            db[co] += acc;
        }
    }
    if (dw) {
        // accumulate over input events; cheap whenever x is a spike plane
        for (int ci = 0; ci < c.cin; ++ci) {
            for (int iy = 0; iy < x.h; ++iy) {
                for (int ix = 0; ix < x.w; ++ix) {
                    const double s = x.at(ci, iy, ix);
                    if (s == 0.0) continue;
                    for (int ky = 0; ky < c.k; ++ky) {
                        const int num = iy + c.pad - ky;
                        if (num % c.stride != 0) continue;
                        const int oy = num / c.stride;
                        if (oy < 0 || oy >= oh) continue;
                        for (int kx = 0; kx < c.k; ++kx) {
                            const int numx = ix + c.pad - kx;
                            if (numx % c.stride != 0) continue;
                            const int ox = numx / c.stride;
                            if (ox < 0 || ox >= ow) continue;
                            for (int co = 0; co < c.cout; ++co) {
                                dw[((static_cast<std::size_t>(co) * c.cin + ci) * c.k + ky) * c.k +
                                   kx] += s * dy.at(co, oy, ox);
                            }
                        }
                    }
                }
            }
        }
    }
    if (dx) {
        *dx = Tensor(c.cin, x.h, x.w);
        for (int co = 0; co < c.cout; ++co) {
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox) {
                    const double g = dy.at(co, oy, ox);
                    if (g == 0.0) continue;
                    const int iy0 = oy * c.stride - c.pad;
                    const int ix0 = ox * c.stride - c.pad;
                    for (int ci = 0; ci < c.cin; ++ci) {
                        const double* wp =
                            c.w.data() + ((static_cast<std::size_t>(co) * c.cin + ci) * c.k) * c.k;
                        for (int ky = 0; ky < c.k; ++ky) {
                            const int iy = iy0 + ky;
                            if (iy < 0 || iy >= x.h) continue;
                            for (int kx = 0; kx < c.k; ++kx) {
                                const int ix = ix0 + kx;
                                if (ix < 0 || ix >= x.w) continue;
                                dx->at(ci, iy, ix) += g * wp[ky * c.k + kx];
                            }
                        }
                    }
                }
            }
        }
    }
}

Tensor upsample2_nearest(const Tensor& x) {
    Tensor y(x.c, x.h * 2, x.w * 2);
    for (int c = 0; c < x.c; ++c)
        for (int iy = 0; iy < x.h; ++iy)
            for (int ix = 0; ix < x.w; ++ix) {
                const double v = x.at(c, iy, ix);
                y.at(c, 2 * iy, 2 * ix) = v;
                y.at(c, 2 * iy, 2 * ix + 1) = v;
                y.at(c, 2 * iy + 1, 2 * ix) = v;
                y.at(c, 2 * iy + 1, 2 * ix + 1) = v;
            }
    return y;
}

void upsample2_nearest_backward(const Tensor& dy, Tensor& dx) {
    require(dy.h == dx.h * 2 && dy.w == dx.w * 2 && dy.c == dx.c,
            "upsample2_nearest_backward: shape mismatch");
    for (int c = 0; c < dx.c; ++c)
        for (int iy = 0; iy < dx.h; ++iy)
            for (int ix = 0; ix < dx.w; ++ix) {
                dx.at(c, iy, ix) += dy.at(c, 2 * iy, 2 * ix) + dy.at(c, 2 * iy, 2 * ix + 1) +
                                    dy.at(c, 2 * iy + 1, 2 * ix) +
                                    dy.at(c, 2 * iy + 1, 2 * ix + 1);
            }
}

}  // namespace sdet
