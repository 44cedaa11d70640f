#include "esac/nnet.hpp"

#include <cmath>
#include <stdexcept>

namespace esac {

std::vector<int> NetSpec::layer_dims() const {
    std::vector<int> dims;
    dims.push_back(input_dim);
    for (int h : hidden_dims) dims.push_back(h);
    dims.push_back(output_dim);
    return dims;
}

int NetSpec::param_count() const {
    auto dims = layer_dims();
    int count = 0;
    for (size_t l = 0; l + 1 < dims.size(); ++l)
        count += dims[l] * dims[l + 1] + dims[l + 1];
    return count;
}

std::uint64_t NetSpec::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    mix(static_cast<std::uint64_t>(input_dim));
    for (int d : hidden_dims) mix(static_cast<std::uint64_t>(d));
    mix(static_cast<std::uint64_t>(output_dim));
    mix(output_activation == OutputActivation::tanh ? 2u : 1u);
    return h;
}

ParamVector init_params(const NetSpec& spec, Rng& rng) {
    ParamVector p;
    p.spec_id = spec.hash();
    p.values.reserve(spec.param_count());
    auto dims = spec.layer_dims();
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        for (int i = 0; i < dims[l] * dims[l + 1]; ++i)
            p.values.push_back(rng.uniform(-bound, bound));
        for (int i = 0; i < dims[l + 1]; ++i) p.values.push_back(0.0);
    }
    return p;
}

static void check_shapes(const ParamVector& params, const NetSpec& spec,
                         const std::vector<double>& input) {
    if (static_cast<int>(input.size()) != spec.input_dim)
        throw std::invalid_argument("forward: input length does not match spec.input_dim");
    if (params.size() != spec.param_count())
        throw std::invalid_argument("forward: params length does not match spec");
}

std::vector<double> forward_cached(const ParamVector& params, const NetSpec& spec,
                                   const std::vector<double>& input, ForwardCache& cache) {
    check_shapes(params, spec, input);
    auto dims = spec.layer_dims();
    size_t n_layers = dims.size() - 1;
    cache.input = input;
    cache.pre.assign(n_layers, {});
    cache.post.assign(n_layers, {});

    const double* w = params.values.data();
    const std::vector<double>* act = &cache.input;
    for (size_t l = 0; l < n_layers; ++l) {
        int in = dims[l], out = dims[l + 1];
        const double* bias = w + in * out;
        auto& pre = cache.pre[l];
        pre.assign(out, 0.0);
        for (int o = 0; o < out; ++o) {
            double acc = bias[o];
            const double* row = w + o * in;
            for (int i = 0; i < in; ++i) acc += row[i] * (*act)[i];
            pre[o] = acc;
        }
        auto& post = cache.post[l];
        post = pre;
        if (l + 1 < n_layers) {
            for (double& v : post)
                if (v < 0.0) v = 0.0;
        } else if (spec.output_activation == OutputActivation::tanh) {
            for (double& v : post) v = std::tanh(v);
        }
        w += in * out + out;
        act = &post;
    }
    return cache.post.back();
}

std::vector<double> forward(const ParamVector& params, const NetSpec& spec,
                            const std::vector<double>& input) {
    ForwardCache cache;
    return forward_cached(params, spec, input, cache);
}

BackwardResult backward(const ParamVector& params, const NetSpec& spec,
                        const ForwardCache& cache, const std::vector<double>& upstream_grad) {
    auto dims = spec.layer_dims();
    size_t n_layers = dims.size() - 1;
    if (static_cast<int>(upstream_grad.size()) != spec.output_dim)
        throw std::invalid_argument("backward: upstream_grad length does not match output_dim");
    if (cache.post.size() != n_layers)
        throw std::invalid_argument("backward: cache does not match spec");

    BackwardResult result;
    result.param_grads.assign(params.values.size(), 0.0);

    // Offsets of each layer's weight block in the flat vector.
    std::vector<int> offsets(n_layers);
    int off = 0;
    for (size_t l = 0; l < n_layers; ++l) {
        offsets[l] = off;
        off += dims[l] * dims[l + 1] + dims[l + 1];
    }

    // delta = dL/d(pre-activation of current layer)
    std::vector<double> delta = upstream_grad;
    if (spec.output_activation == OutputActivation::tanh) {
        const auto& out = cache.post.back();
        for (size_t i = 0; i < delta.size(); ++i) delta[i] *= 1.0 - out[i] * out[i];
    }

    for (size_t li = n_layers; li-- > 0;) {
        int in = dims[li], out = dims[li + 1];
        const std::vector<double>& below =
            (li == 0) ? cache.input : cache.post[li - 1];
        double* wgrad = result.param_grads.data() + offsets[li];
        double* bgrad = wgrad + in * out;
        for (int o = 0; o < out; ++o) {
            double d = delta[o];
            bgrad[o] += d;
            double* row = wgrad + o * in;
            for (int i = 0; i < in; ++i) row[i] += d * below[i];
        }
        // propagate to the layer below
        std::vector<double> next(in, 0.0);
        const double* w = params.values.data() + offsets[li];
        for (int o = 0; o < out; ++o) {
            double d = delta[o];
            const double* row = w + o * in;
            for (int i = 0; i < in; ++i) next[i] += d * row[i];
        }
        if (li > 0) {
            const auto& pre_below = cache.pre[li - 1];
            for (int i = 0; i < in; ++i)
                if (pre_below[i] <= 0.0) next[i] = 0.0;  // ReLU mask
        }
        delta = std::move(next);
    }
    result.input_grad = std::move(delta);
    return result;
}

void adam_step(ParamVector& params, const std::vector<double>& grads, AdamState& state,
               double lr) {
    if (grads.size() != params.values.size() ||
        grads.size() != state.first_moment.size())
        throw std::invalid_argument("adam_step: length mismatch");
    if (lr < 0.0) throw std::invalid_argument("adam_step: lr must be non-negative");
    for (double g : grads)
        if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");

    state.step_count += 1;
    const double b1 = state.beta1, b2 = state.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
    for (size_t i = 0; i < grads.size(); ++i) {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = b1 * m + (1.0 - b1) * grads[i];
        v = b2 * v + (1.0 - b2) * grads[i] * grads[i];
        double mhat = m / bc1;
        double vhat = v / bc2;
        params.values[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

}  // namespace esac
