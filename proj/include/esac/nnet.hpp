#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esac/rng.hpp"

namespace esac {

enum class OutputActivation { linear, tanh };

// Fully-connected ReLU MLP shape. Parameters live in a flat vector laid out
// layer by layer: weights row-major (out x in), then biases.
struct NetSpec {
    int input_dim = 0;
    std::vector<int> hidden_dims;
    int output_dim = 0;
    OutputActivation output_activation = OutputActivation::linear;

    std::vector<int> layer_dims() const;  // [input, hidden..., output]
    int param_count() const;
    std::uint64_t hash() const;  // FNV-1a over the shape fields
};

struct ParamVector {
    std::vector<double> values;
    std::uint64_t spec_id = 0;

    int size() const { return static_cast<int>(values.size()); }
};

// Weights ~ U[-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
ParamVector init_params(const NetSpec& spec, Rng& rng);

std::vector<double> forward(const ParamVector& params, const NetSpec& spec,
                            const std::vector<double>& input);

// Per-layer state captured by forward_cached so backward can run without
// recomputing the pass.
struct ForwardCache {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;   // pre-activation per layer
    std::vector<std::vector<double>> post;  // post-activation per layer
};

std::vector<double> forward_cached(const ParamVector& params, const NetSpec& spec,
                                   const std::vector<double>& input, ForwardCache& cache);

// Exact reverse-mode gradients for the composed network. upstream_grad is
// dL/d(output); returns dL/d(params) and dL/d(input).
struct BackwardResult {
    std::vector<double> param_grads;
    std::vector<double> input_grad;
};

BackwardResult backward(const ParamVector& params, const NetSpec& spec,
                        const ForwardCache& cache, const std::vector<double>& upstream_grad);

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(int dim)
        : first_moment(dim, 0.0), second_moment(dim, 0.0) {}
};

// Bias-corrected Adam update, in place. Rejects non-finite gradients.
void adam_step(ParamVector& params, const std::vector<double>& grads, AdamState& state,
               double lr);

}  // namespace esac
