#pragma once

#include "harv/errors.hpp"
#include "harv/rng.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace harv {

enum class Act { Relu, Tanh, Sigmoid, Linear };

const char* to_string(Act a);
Act act_from_string(const std::string& s);

/// Dense row-major matrix, the only tensor type the networks need.
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

    void resize(int r, int c) {
        rows = r;
        cols = c;
        a.assign(static_cast<std::size_t>(r) * c, 0.0);
    }
};

/// One affine layer. W is out×in.
struct Layer {
    Matrix W;
    std::vector<double> b;
    Act act = Act::Linear;

    int in_dim() const { return W.cols; }
    int out_dim() const { return W.rows; }
};

struct Mlp {
    std::vector<Layer> layers;

    int in_dim() const { return layers.front().in_dim(); }
    int out_dim() const { return layers.back().out_dim(); }
    std::size_t param_count() const;
};

/// Uniform ±1/sqrt(fan_in) initialization for weights and biases.
Mlp make_mlp(const std::vector<int>& dims, const std::vector<Act>& acts, Rng& rng);

/// Post-activation outputs of every layer for one batch; reused across
/// minibatches to avoid reallocation.
struct ForwardCache {
    Matrix x0;
    std::vector<Matrix> y;
};

/// Batched forward pass, X is n×in. Returns the final activations (also
/// stored in cache->y.back() when cache is provided).
const Matrix& forward_batch(const Mlp& net, const Matrix& X, ForwardCache& cache);

/// Single-sample forward pass.
std::vector<double> forward(const Mlp& net, std::span<const double> x);

/// Scratch-buffer variant for hot loops (no allocation after first call).
void forward_inplace(const Mlp& net, std::span<const double> x, std::vector<double>& out,
                     std::vector<double>& scratch);

struct Grads {
    std::vector<Matrix> dW;
    std::vector<std::vector<double>> db;

    static Grads like(const Mlp& net);
    void zero();
    void scale(double f);
};

/// Reverse pass. dY is the loss gradient with respect to the network
/// output (n×out), or with respect to the final pre-activation when
/// dy_wrt_preactivation is set (used by cross-entropy). Accumulates into
/// grads and returns the gradient with respect to the input batch.
Matrix backprop_batch(const Mlp& net, const ForwardCache& cache, Matrix dY, Grads& grads,
                      bool dy_wrt_preactivation = false);

/// Adam with bias correction.
struct AdamState {
    double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long t = 0;
    std::vector<Matrix> mW, vW;
    std::vector<std::vector<double>> mb, vb;

    static AdamState like(const Mlp& net, double lr);
};

void adam_step(Mlp& net, const Grads& grads, AdamState& opt);

/// target <- tau*learned + (1-tau)*target, elementwise.
void soft_update(Mlp& target, const Mlp& learned, double tau);

/// Mean squared error (1/N)ΣᵢΣₒ(pred-target)²; fills dY for backprop.
double mse_loss(const Matrix& pred, const Matrix& target, Matrix* dY);

/// Binary cross entropy against a sigmoid output column; fills the
/// gradient with respect to the final pre-activation.
double bce_loss(const Matrix& probs, const std::vector<int>& labels, Matrix* dZ);

nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

} // namespace harv
