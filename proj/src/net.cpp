#include "uavcov/net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace uavcov::net {

namespace {

// C[m][n] = sum_k A[m][k] * B[n][k]   (B stored row-major N x K)
void mm_nt(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
           std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        double* ci = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b + j * k;
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) acc += ai[t] * bj[t];
            ci[j] = acc;
        }
    }
}

// C[m][n] += sum_k A[m][k] * B[n][k]
void mm_nt_acc(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
               std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        double* ci = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b + j * k;
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) acc += ai[t] * bj[t];
            ci[j] += acc;
        }
    }
}

// C[m][n] += sum_k A[m][k] * B[k][n]
void mm_nn_acc(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
               std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        double* ci = c + i * n;
        for (std::size_t t = 0; t < k; ++t) {
            const double av = ai[t];
            const double* bt = b + t * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bt[j];
        }
    }
}

// C[k][n] += sum_m A[m][k] * B[m][n]   (A stored row-major M x K)
void mm_tn_acc(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
               std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        const double* bi = b + i * n;
        for (std::size_t t = 0; t < k; ++t) {
            const double av = ai[t];
            double* ct = c + t * n;
            for (std::size_t j = 0; j < n; ++j) ct[j] += av * bi[j];
        }
    }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
    if (spec_.input_width < 1 || spec_.history < 1 || spec_.lstm_units < 1 ||
        spec_.num_actions < 1 || spec_.dense_widths.empty())
        throw std::invalid_argument("network spec: all widths must be at least 1");
    const std::size_t u = spec_.input_width;
    const std::size_t w = spec_.lstm_units;
    std::size_t off = 0;
    off_wx_ = off;
    off += 4 * w * u;
    off_wh_ = off;
    off += 4 * w * w;
    off_b_ = off;
    off += 4 * w;
    std::size_t prev = w;
    for (std::size_t d : spec_.dense_widths) {
        off_dense_.push_back({off, off + d * prev});
        off += d * prev + d;
        prev = d;
    }
    off_wv_ = off;
    off += prev;
    off_bv_ = off;
    off += 1;
    off_wa_ = off;
    off += spec_.num_actions * prev;
    off_ba_ = off;
    off += spec_.num_actions;
    param_count_ = off;
}

ParamVector Network::init_params(RngStream& rng) const {
    ParamVector p(param_count_, 0.0);
    const std::size_t u = spec_.input_width;
    const std::size_t w = spec_.lstm_units;
    auto fill = [&](std::size_t off, std::size_t rows, std::size_t cols) {
        const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (std::size_t k = 0; k < rows * cols; ++k) p[off + k] = rng.next_double(-bound, bound);
    };
    fill(off_wx_, 4 * w, u);
    fill(off_wh_, 4 * w, w);
    // Forget-gate bias +1; all other biases stay zero.
    for (std::size_t k = 0; k < w; ++k) p[off_b_ + w + k] = 1.0;
    std::size_t prev = w;
    for (std::size_t l = 0; l < spec_.dense_widths.size(); ++l) {
        fill(off_dense_[l].first, spec_.dense_widths[l], prev);
        prev = spec_.dense_widths[l];
    }
    fill(off_wv_, 1, prev);
    fill(off_wa_, spec_.num_actions, prev);
    return p;
}

void Network::forward(const ParamVector& params, const double* obs, std::size_t batch,
                      Cache& cache) const {
    if (params.size() != param_count_) throw std::invalid_argument("forward: parameter size mismatch");
    if (batch < 1) throw std::invalid_argument("forward: empty batch");
    const std::size_t u = spec_.input_width;
    const std::size_t w = spec_.lstm_units;
    const std::size_t hsteps = spec_.history;
    const std::size_t a_count = spec_.num_actions;

    cache.batch = batch;
    cache.x.assign(obs, obs + batch * hsteps * u);
    cache.gate_i.resize(hsteps * batch * w);
    cache.gate_f.resize(hsteps * batch * w);
    cache.gate_g.resize(hsteps * batch * w);
    cache.gate_o.resize(hsteps * batch * w);
    cache.cell.resize(hsteps * batch * w);
    cache.tanh_c.resize(hsteps * batch * w);
    cache.hidden.resize(hsteps * batch * w);

    std::vector<double> gates(batch * 4 * w);
    std::vector<double> xt(batch * u);
    const double* wx = params.data() + off_wx_;
    const double* wh = params.data() + off_wh_;
    const double* b = params.data() + off_b_;

    for (std::size_t t = 0; t < hsteps; ++t) {
        for (std::size_t m = 0; m < batch; ++m)
            std::memcpy(xt.data() + m * u, cache.x.data() + (m * hsteps + t) * u, u * sizeof(double));
        mm_nt(gates.data(), xt.data(), wx, batch, u, 4 * w);
        if (t > 0)
            mm_nt_acc(gates.data(), cache.hidden.data() + (t - 1) * batch * w, wh, batch, w, 4 * w);
        const std::size_t base = t * batch * w;
        for (std::size_t m = 0; m < batch; ++m) {
            const double* g = gates.data() + m * 4 * w;
            const double* c_prev = t > 0 ? cache.cell.data() + (t - 1) * batch * w + m * w : nullptr;
            for (std::size_t k = 0; k < w; ++k) {
                const double gi = sigmoid(g[k] + b[k]);
                const double gf = sigmoid(g[w + k] + b[w + k]);
                const double gg = std::tanh(g[2 * w + k] + b[2 * w + k]);
                const double go = sigmoid(g[3 * w + k] + b[3 * w + k]);
                const double c = gf * (c_prev ? c_prev[k] : 0.0) + gi * gg;
                const double tc = std::tanh(c);
                const std::size_t idx = base + m * w + k;
                cache.gate_i[idx] = gi;
                cache.gate_f[idx] = gf;
                cache.gate_g[idx] = gg;
                cache.gate_o[idx] = go;
                cache.cell[idx] = c;
                cache.tanh_c[idx] = tc;
                cache.hidden[idx] = go * tc;
            }
        }
    }

    const std::size_t layers = spec_.dense_widths.size();
    cache.dense.resize(layers);
    const double* prev_act = cache.hidden.data() + (hsteps - 1) * batch * w;
    std::size_t prev_width = w;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t d = spec_.dense_widths[l];
        cache.dense[l].resize(batch * d);
        mm_nt(cache.dense[l].data(), prev_act, params.data() + off_dense_[l].first, batch,
              prev_width, d);
        const double* bias = params.data() + off_dense_[l].second;
        for (std::size_t m = 0; m < batch; ++m) {
            double* row = cache.dense[l].data() + m * d;
            for (std::size_t k = 0; k < d; ++k) {
                const double z = row[k] + bias[k];
                row[k] = z > 0.0 ? z : 0.0;
            }
        }
        prev_act = cache.dense[l].data();
        prev_width = d;
    }

    cache.value.resize(batch);
    cache.adv.resize(batch * a_count);
    cache.q.resize(batch * a_count);
    mm_nt(cache.adv.data(), prev_act, params.data() + off_wa_, batch, prev_width, a_count);
    const double bv = params[off_bv_];
    const double* wv = params.data() + off_wv_;
    const double* ba = params.data() + off_ba_;
    for (std::size_t m = 0; m < batch; ++m) {
        const double* z = prev_act + m * prev_width;
        double v = bv;
        for (std::size_t k = 0; k < prev_width; ++k) v += wv[k] * z[k];
        cache.value[m] = v;
        double* adv = cache.adv.data() + m * a_count;
        double mean = 0.0;
        for (std::size_t j = 0; j < a_count; ++j) {
            adv[j] += ba[j];
            mean += adv[j];
        }
        mean /= static_cast<double>(a_count);
        double* q = cache.q.data() + m * a_count;
        for (std::size_t j = 0; j < a_count; ++j) q[j] = v + (adv[j] - mean);
    }
}

std::vector<double> Network::forward_one(const ParamVector& params,
                                         std::span<const double> obs) const {
    if (obs.size() != obs_size()) throw std::invalid_argument("forward: observation size mismatch");
    Cache cache;
    forward(params, obs.data(), 1, cache);
    return cache.q;
}

void Network::backward(const ParamVector& params, const Cache& cache, const std::vector<double>& dq,
                       ParamVector& grad) const {
    const std::size_t batch = cache.batch;
    const std::size_t u = spec_.input_width;
    const std::size_t w = spec_.lstm_units;
    const std::size_t hsteps = spec_.history;
    const std::size_t a_count = spec_.num_actions;
    if (dq.size() != batch * a_count) throw std::invalid_argument("backward: dq size mismatch");

    grad.assign(param_count_, 0.0);

    // Dueling heads: q_j = v + a_j - mean(a).
    std::vector<double> dv(batch);
    std::vector<double> da(batch * a_count);
    for (std::size_t m = 0; m < batch; ++m) {
        const double* dqm = dq.data() + m * a_count;
        double total = 0.0;
        for (std::size_t j = 0; j < a_count; ++j) total += dqm[j];
        dv[m] = total;
        const double mean = total / static_cast<double>(a_count);
        double* dam = da.data() + m * a_count;
        for (std::size_t j = 0; j < a_count; ++j) dam[j] = dqm[j] - mean;
    }

    const std::size_t layers = spec_.dense_widths.size();
    const double* last_act =
        layers > 0 ? cache.dense.back().data() : cache.hidden.data() + (hsteps - 1) * batch * w;
    const std::size_t last_width = layers > 0 ? spec_.dense_widths.back() : w;

    mm_tn_acc(grad.data() + off_wv_, dv.data(), last_act, batch, 1, last_width);
    for (std::size_t m = 0; m < batch; ++m) grad[off_bv_] += dv[m];
    mm_tn_acc(grad.data() + off_wa_, da.data(), last_act, batch, a_count, last_width);
    for (std::size_t m = 0; m < batch; ++m)
        for (std::size_t j = 0; j < a_count; ++j) grad[off_ba_ + j] += da[m * a_count + j];

    std::vector<double> dz(batch * last_width, 0.0);
    mm_nn_acc(dz.data(), dv.data(), params.data() + off_wv_, batch, 1, last_width);
    mm_nn_acc(dz.data(), da.data(), params.data() + off_wa_, batch, a_count, last_width);

    // Dense trunk, in reverse.  relu' taken from the cached post-activation.
    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t d = spec_.dense_widths[l];
        const std::size_t prev_width = l > 0 ? spec_.dense_widths[l - 1] : w;
        const double* act = cache.dense[l].data();
        for (std::size_t k = 0; k < batch * d; ++k)
            if (act[k] <= 0.0) dz[k] = 0.0;
        const double* prev_act =
            l > 0 ? cache.dense[l - 1].data() : cache.hidden.data() + (hsteps - 1) * batch * w;
        mm_tn_acc(grad.data() + off_dense_[l].first, dz.data(), prev_act, batch, d, prev_width);
        for (std::size_t m = 0; m < batch; ++m)
            for (std::size_t k = 0; k < d; ++k) grad[off_dense_[l].second + k] += dz[m * d + k];
        std::vector<double> dprev(batch * prev_width, 0.0);
        mm_nn_acc(dprev.data(), dz.data(), params.data() + off_dense_[l].first, batch, d,
                  prev_width);
        dz = std::move(dprev);
    }

    // Backpropagation through time over the unrolled recurrence.
    std::vector<double> dh = std::move(dz); // batch x w, gradient on h_{H-1}
    std::vector<double> dc(batch * w, 0.0);
    std::vector<double> dgates(batch * 4 * w);
    std::vector<double> xt(batch * u);
    const double* wh = params.data() + off_wh_;
    for (std::size_t t = hsteps; t-- > 0;) {
        const std::size_t base = t * batch * w;
        for (std::size_t m = 0; m < batch; ++m) {
            for (std::size_t k = 0; k < w; ++k) {
                const std::size_t idx = base + m * w + k;
                const double gi = cache.gate_i[idx];
                const double gf = cache.gate_f[idx];
                const double gg = cache.gate_g[idx];
                const double go = cache.gate_o[idx];
                const double tc = cache.tanh_c[idx];
                const double dhk = dh[m * w + k];
                const double dck = dc[m * w + k] + dhk * go * (1.0 - tc * tc);
                const double c_prev =
                    t > 0 ? cache.cell[(t - 1) * batch * w + m * w + k] : 0.0;
                double* dg = dgates.data() + m * 4 * w;
                dg[k] = dck * gg * gi * (1.0 - gi);
                dg[w + k] = dck * c_prev * gf * (1.0 - gf);
                dg[2 * w + k] = dck * gi * (1.0 - gg * gg);
                dg[3 * w + k] = dhk * tc * go * (1.0 - go);
                dc[m * w + k] = dck * gf;
            }
        }
        for (std::size_t m = 0; m < batch; ++m)
            std::memcpy(xt.data() + m * u, cache.x.data() + (m * hsteps + t) * u, u * sizeof(double));
        mm_tn_acc(grad.data() + off_wx_, dgates.data(), xt.data(), batch, 4 * w, u);
        if (t > 0)
            mm_tn_acc(grad.data() + off_wh_, dgates.data(),
                      cache.hidden.data() + (t - 1) * batch * w, batch, 4 * w, w);
        for (std::size_t m = 0; m < batch; ++m)
            for (std::size_t k = 0; k < 4 * w; ++k) grad[off_b_ + k] += dgates[m * 4 * w + k];
        if (t > 0) {
            std::fill(dh.begin(), dh.end(), 0.0);
            mm_nn_acc(dh.data(), dgates.data(), wh, batch, 4 * w, w);
        }
    }
}

void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state, double lr) {
    if (params.size() != grad.size()) throw std::invalid_argument("adam_step: size mismatch");
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) throw std::invalid_argument("adam_step: state size mismatch");
    ++state.step;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        state.m[k] = kBeta1 * state.m[k] + (1.0 - kBeta1) * grad[k];
        state.v[k] = kBeta2 * state.v[k] + (1.0 - kBeta2) * grad[k] * grad[k];
        const double mhat = state.m[k] / bc1;
        const double vhat = state.v[k] / bc2;
        params[k] -= lr * mhat / (std::sqrt(vhat) + kEps);
    }
}

ParamVector clone_params(const ParamVector& params) { return params; }

namespace {
constexpr char kParamMagic[8] = {'U', 'A', 'V', 'N', 'E', 'T', 'P', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
} // namespace

void save_params(const std::string& path, const NetworkSpec& spec, const ParamVector& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open parameter file for write: " + path);
    out.write(kParamMagic, sizeof kParamMagic);
    write_u64(out, spec.input_width);
    write_u64(out, spec.history);
    write_u64(out, spec.lstm_units);
    write_u64(out, spec.dense_widths.size());
    for (std::size_t d : spec.dense_widths) write_u64(out, d);
    write_u64(out, spec.num_actions);
    write_u64(out, params.size());
    out.write(reinterpret_cast<const char*>(params.data()),
              static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failure: " + path);
}

ParamVector load_params(const std::string& path, const NetworkSpec& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open parameter file: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kParamMagic, sizeof magic) != 0)
        throw std::runtime_error("parameter file has wrong magic: " + path);
    NetworkSpec spec;
    spec.input_width = read_u64(in);
    spec.history = read_u64(in);
    spec.lstm_units = read_u64(in);
    spec.dense_widths.resize(read_u64(in));
    for (auto& d : spec.dense_widths) d = read_u64(in);
    spec.num_actions = read_u64(in);
    const std::uint64_t count = read_u64(in);
    if (!in) throw std::runtime_error("parameter file header truncated: " + path);
    if (!(spec == expected)) throw std::runtime_error("parameter file spec mismatch: " + path);
    ParamVector params(count);
    in.read(reinterpret_cast<char*>(params.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
        throw std::runtime_error("parameter file payload truncated: " + path);
    return params;
}

} // namespace uavcov::net
