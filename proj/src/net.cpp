#include "spectral_rl/net.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace spectral {

Mlp::Mlp(const MlpConfig& cfg) : cfg_(cfg) {
    if (cfg_.input_dim <= 0 || cfg_.actions <= 0 || cfg_.heads <= 0)
        throw std::invalid_argument("MlpConfig: dimensions must be positive");

    std::vector<int> dims;
    dims.push_back(cfg_.input_dim);
    for (int h : cfg_.hidden) dims.push_back(h);
    dims.push_back(cfg_.heads * cfg_.actions);

    size_t offset = 0;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        LayerShape shape;
        shape.in = dims[l];
        shape.out = dims[l + 1];
        shape.weight_offset = offset;
        offset += static_cast<size_t>(shape.in) * shape.out;
        shape.bias_offset = offset;
        offset += static_cast<size_t>(shape.out);
        layers_.push_back(shape);
    }
    params_.assign(offset, 0.0);

    std::mt19937_64 rng(cfg_.seed);
    for (size_t l = 0; l < layers_.size(); ++l) {
        const bool final_layer = (l + 1 == layers_.size());
        if (final_layer && cfg_.zero_init_final) continue;
        const LayerShape& shape = layers_[l];
        const double bound = 1.0 / std::sqrt(static_cast<double>(shape.in));
        std::uniform_real_distribution<double> uniform(-bound, bound);
        for (size_t k = 0; k < static_cast<size_t>(shape.in) * shape.out; ++k)
            params_[shape.weight_offset + k] = uniform(rng);
        for (size_t k = 0; k < static_cast<size_t>(shape.out); ++k)
            params_[shape.bias_offset + k] = uniform(rng);
    }
}

void Mlp::forward(std::span<const double> input, Cache& cache) const {
    if (static_cast<int>(input.size()) != cfg_.input_dim)
        throw std::invalid_argument("Mlp::forward: input dimension mismatch");

    cache.pre.resize(layers_.size());
    cache.post.resize(layers_.size() + 1);
    cache.post[0].assign(input.begin(), input.end());

    for (size_t l = 0; l < layers_.size(); ++l) {
        const LayerShape& shape = layers_[l];
        const std::vector<double>& x = cache.post[l];
        std::vector<double>& pre = cache.pre[l];
        pre.assign(static_cast<size_t>(shape.out), 0.0);
        for (int j = 0; j < shape.out; ++j) {
            const double* w = &params_[shape.weight_offset + static_cast<size_t>(j) * shape.in];
            double acc = params_[shape.bias_offset + j];
            for (int i = 0; i < shape.in; ++i) acc += w[i] * x[i];
            pre[static_cast<size_t>(j)] = acc;
        }
        const bool final_layer = (l + 1 == layers_.size());
        std::vector<double>& post = cache.post[l + 1];
        post = pre;
        if (!final_layer)
            for (double& v : post) v = v > 0.0 ? v : 0.0;
    }
}

void Mlp::forward(std::span<const double> input, std::span<double> output) const {
    thread_local Cache cache;
    forward(input, cache);
    const std::vector<double>& out = cache.post.back();
    if (output.size() != out.size())
        throw std::invalid_argument("Mlp::forward: output dimension mismatch");
    std::copy(out.begin(), out.end(), output.begin());
}

void Mlp::backward(const Cache& cache, std::span<const double> out_delta,
                   std::span<const double> hidden_scale, std::span<double> grads) const {
    if (static_cast<int>(out_delta.size()) != output_dim())
        throw std::invalid_argument("Mlp::backward: delta dimension mismatch");
    if (!hidden_scale.empty() && hidden_scale.size() != out_delta.size())
        throw std::invalid_argument("Mlp::backward: hidden_scale dimension mismatch");
    if (grads.size() != params_.size())
        throw std::invalid_argument("Mlp::backward: gradient buffer size mismatch");

    std::vector<double> delta(out_delta.begin(), out_delta.end());
    for (size_t li = layers_.size(); li-- > 0;) {
        const LayerShape& shape = layers_[li];
        const bool final_layer = (li + 1 == layers_.size());
        const std::vector<double>& x = cache.post[li];

        for (int j = 0; j < shape.out; ++j) {
            const double d = delta[static_cast<size_t>(j)];
            double* gw = &grads[shape.weight_offset + static_cast<size_t>(j) * shape.in];
            for (int i = 0; i < shape.in; ++i) gw[i] += d * x[static_cast<size_t>(i)];
            grads[shape.bias_offset + j] += d;
        }
        if (li == 0) break;

        // Signal into the layers below; the final layer's contribution is
        // rescaled per output when a hidden_scale is supplied.
        std::vector<double> scaled;
        const std::vector<double>* up = &delta;
        if (final_layer && !hidden_scale.empty()) {
            scaled.resize(delta.size());
            for (size_t j = 0; j < delta.size(); ++j) scaled[j] = delta[j] * hidden_scale[j];
            up = &scaled;
        }
        std::vector<double> below(static_cast<size_t>(shape.in), 0.0);
        for (int j = 0; j < shape.out; ++j) {
            const double d = (*up)[static_cast<size_t>(j)];
            if (d == 0.0) continue;
            const double* w = &params_[shape.weight_offset + static_cast<size_t>(j) * shape.in];
            for (int i = 0; i < shape.in; ++i) below[static_cast<size_t>(i)] += d * w[i];
        }
        const std::vector<double>& pre_below = cache.pre[li - 1];
        for (size_t i = 0; i < below.size(); ++i)
            if (pre_below[i] <= 0.0) below[i] = 0.0;
        delta = std::move(below);
    }
}

std::span<double> Mlp::final_weight_row(int output_index) {
    const LayerShape& shape = layers_.back();
    return {&params_[shape.weight_offset + static_cast<size_t>(output_index) * shape.in],
            static_cast<size_t>(shape.in)};
}

double& Mlp::final_bias(int output_index) {
    const LayerShape& shape = layers_.back();
    return params_[shape.bias_offset + output_index];
}

void Mlp::save(const std::string& path) const {
    nlohmann::json manifest;
    manifest["input_dim"] = cfg_.input_dim;
    manifest["hidden"] = cfg_.hidden;
    manifest["heads"] = cfg_.heads;
    manifest["actions"] = cfg_.actions;
    manifest["zero_init_final"] = cfg_.zero_init_final;
    manifest["seed"] = cfg_.seed;
    manifest["num_params"] = params_.size();

    std::ofstream mf(path + ".json");
    mf << manifest.dump(2) << "\n";
    std::ofstream pf(path + ".bin", std::ios::binary);
    pf.write(reinterpret_cast<const char*>(params_.data()),
             static_cast<std::streamsize>(params_.size() * sizeof(double)));
    if (!pf) throw std::runtime_error("failed to write checkpoint: " + path);
}

Mlp Mlp::load(const std::string& path) {
    std::ifstream mf(path + ".json");
    if (!mf) throw std::runtime_error("missing checkpoint manifest: " + path + ".json");
    nlohmann::json manifest = nlohmann::json::parse(mf);

    MlpConfig cfg;
    cfg.input_dim = manifest.at("input_dim");
    cfg.hidden = manifest.at("hidden").get<std::vector<int>>();
    cfg.heads = manifest.at("heads");
    cfg.actions = manifest.at("actions");
    cfg.zero_init_final = manifest.at("zero_init_final");
    cfg.seed = manifest.at("seed");

    Mlp net(cfg);
    if (net.params_.size() != manifest.at("num_params").get<size_t>())
        throw std::runtime_error("checkpoint shape mismatch: " + path);
    std::ifstream pf(path + ".bin", std::ios::binary);
    pf.read(reinterpret_cast<char*>(net.params_.data()),
            static_cast<std::streamsize>(net.params_.size() * sizeof(double)));
    if (!pf) throw std::runtime_error("failed to read checkpoint: " + path);
    return net;
}

void rescale_final_layer(Mlp& net, double old_mean, double old_sigma, double new_mean,
                         double new_sigma) {
    const double scale = old_sigma / new_sigma;
    for (int j = 0; j < net.output_dim(); ++j) {
        for (double& w : net.final_weight_row(j)) w *= scale;
        double& b = net.final_bias(j);
        b = (old_sigma * b + old_mean - new_mean) / new_sigma;
    }
}

Adam::Adam(size_t num_params, AdamConfig cfg)
    : cfg_(cfg), m_(num_params, 0.0), v_(num_params, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw std::invalid_argument("Adam::step: size mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (size_t k = 0; k < m_.size(); ++k) {
        m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * grads[k];
        v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * grads[k] * grads[k];
        const double m_hat = m_[k] / bc1;
        const double v_hat = v_[k] / bc2;
        params[k] -= cfg_.lr * m_hat / std::sqrt(v_hat + cfg_.stabilizer);
    }
}

}  // namespace spectral
