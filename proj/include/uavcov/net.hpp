#ifndef UAVCOV_NET_HPP
#define UAVCOV_NET_HPP

#include "uavcov/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace uavcov::net {

struct NetworkSpec {
    std::size_t input_width = 0; // per-frame observation width
    std::size_t history = 1;     // frames per window
    std::size_t lstm_units = 64;
    std::vector<std::size_t> dense_widths = {128, 64};
    std::size_t num_actions = 0;

    bool operator==(const NetworkSpec&) const = default;
};

// Flat parameter layout, in order:
//   wx [4W x U]  recurrent input kernel, gate blocks stacked [i, f, g, o]
//   wh [4W x W]  recurrent state kernel, same gate order
//   b  [4W]      gate biases
//   per dense layer l: w_l [D_l x D_{l-1}], b_l [D_l]   (D_0 = W)
//   wv [1 x D_last], bv [1]   value head
//   wa [A x D_last], ba [A]   advantage head
using ParamVector = std::vector<double>;

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;
};

class Network {
public:
    explicit Network(NetworkSpec spec);

    const NetworkSpec& spec() const { return spec_; }
    std::size_t param_count() const { return param_count_; }
    std::size_t obs_size() const { return spec_.input_width * spec_.history; }

    // Xavier-uniform weights (per stored matrix), zero biases, forget-gate
    // bias +1.
    ParamVector init_params(RngStream& rng) const;

    // Saved activations from a batched forward pass, consumed by backward.
    struct Cache {
        std::size_t batch = 0;
        std::vector<double> x;       // batch x (H*U) copy of the input
        std::vector<double> gate_i;  // H x batch x W
        std::vector<double> gate_f;
        std::vector<double> gate_g;
        std::vector<double> gate_o;
        std::vector<double> cell;    // H x batch x W
        std::vector<double> tanh_c;  // H x batch x W
        std::vector<double> hidden;  // H x batch x W
        std::vector<std::vector<double>> dense; // post-relu per layer, batch x D_l
        std::vector<double> value;   // batch
        std::vector<double> adv;     // batch x A
        std::vector<double> q;       // batch x A
    };

    // obs is row-major batch x (history*input_width).  Fills cache.q with
    // Q = V + A - mean(A) per row.
    void forward(const ParamVector& params, const double* obs, std::size_t batch,
                 Cache& cache) const;

    std::vector<double> forward_one(const ParamVector& params, std::span<const double> obs) const;

    // dq is row-major batch x num_actions upstream gradient on cache.q.
    // Overwrites grad with the exact reverse-mode gradient.
    void backward(const ParamVector& params, const Cache& cache, const std::vector<double>& dq,
                  ParamVector& grad) const;

    // Offsets into the flat layout (exposed for targeted tests).
    std::size_t offset_wx() const { return off_wx_; }
    std::size_t offset_wh() const { return off_wh_; }
    std::size_t offset_b() const { return off_b_; }
    std::size_t offset_dense_w(std::size_t layer) const { return off_dense_[layer].first; }
    std::size_t offset_dense_b(std::size_t layer) const { return off_dense_[layer].second; }
    std::size_t offset_wv() const { return off_wv_; }
    std::size_t offset_bv() const { return off_bv_; }
    std::size_t offset_wa() const { return off_wa_; }
    std::size_t offset_ba() const { return off_ba_; }

private:
    NetworkSpec spec_;
    std::size_t param_count_ = 0;
    std::size_t off_wx_ = 0, off_wh_ = 0, off_b_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> off_dense_;
    std::size_t off_wv_ = 0, off_bv_ = 0, off_wa_ = 0, off_ba_ = 0;
};

// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8 and bias correction.
void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state, double lr);

ParamVector clone_params(const ParamVector& params);

// Flat binary file: magic, spec fields, parameter count, raw doubles.
void save_params(const std::string& path, const NetworkSpec& spec, const ParamVector& params);
ParamVector load_params(const std::string& path, const NetworkSpec& expected);

} // namespace uavcov::net

#endif
