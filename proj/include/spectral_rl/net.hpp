#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spectral {

struct MlpConfig {
    int input_dim = 0;
    std::vector<int> hidden = {128, 128};
    int heads = 1;    // N+1 for spectral agents, 1 for baselines
    int actions = 0;  // outputs = heads * actions
    bool zero_init_final = false;
    std::uint64_t seed = 0;
};

// Multilayer perceptron with ReLU hidden layers and a linear multi-head
// output. Parameters live in one flat vector so the optimizer, checkpoints
// and the Pop-Art rescale all work on the same storage.
class Mlp {
  public:
    explicit Mlp(const MlpConfig& cfg);

    int input_dim() const { return cfg_.input_dim; }
    int output_dim() const { return cfg_.heads * cfg_.actions; }
    int heads() const { return cfg_.heads; }
    int actions() const { return cfg_.actions; }
    size_t num_params() const { return params_.size(); }

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }
    const MlpConfig& config() const { return cfg_; }

    // Cached activations for one input, reusable across forward/backward.
    struct Cache {
        std::vector<std::vector<double>> pre;   // pre-activation per layer
        std::vector<std::vector<double>> post;  // post-activation (input at index 0)
    };

    void forward(std::span<const double> input, std::span<double> output) const;
    void forward(std::span<const double> input, Cache& cache) const;

    // Accumulates gradients of an arbitrary scalar loss given dL/d(output).
    // If hidden_scale is non-empty (length = output_dim), the error signal
    // propagated below the final layer is out_delta[j] * hidden_scale[j],
    // while the final layer itself trains from the unscaled out_delta.
    void backward(const Cache& cache, std::span<const double> out_delta,
                  std::span<const double> hidden_scale, std::span<double> grads) const;

    // Final-layer access for the Pop-Art rescale: row j of the final weight
    // matrix and bias j produce output j.
    std::span<double> final_weight_row(int output_index);
    double& final_bias(int output_index);

    // Flat checkpoint plus JSON shape manifest.
    void save(const std::string& path) const;
    static Mlp load(const std::string& path);

  private:
    struct LayerShape {
        int in, out;
        size_t weight_offset, bias_offset;
    };

    MlpConfig cfg_;
    std::vector<LayerShape> layers_;
    std::vector<double> params_;
};

// Pop-Art style output preservation: after the normalization statistics move
// from (old_mean, old_sigma) to (new_mean, new_sigma), rescale the final
// layer so that sigma * out + mean is unchanged for every input.
void rescale_final_layer(Mlp& net, double old_mean, double old_sigma, double new_mean,
                         double new_sigma);

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double stabilizer = 0.005 / 32;  // added inside the square root
};

class Adam {
  public:
    Adam(size_t num_params, AdamConfig cfg);

    void step(std::span<double> params, std::span<const double> grads);
    long steps_taken() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

  private:
    AdamConfig cfg_;
    std::vector<double> m_, v_;
    long t_ = 0;
};

}  // namespace spectral
