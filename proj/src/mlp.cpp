#include "harv/mlp.hpp"

#include <algorithm>
#include <cmath>

namespace harv {

const char* to_string(Act a) {
    switch (a) {
        case Act::Relu: return "relu";
        case Act::Tanh: return "tanh";
        case Act::Sigmoid: return "sigmoid";
        case Act::Linear: return "linear";
    }
    return "linear";
}

Act act_from_string(const std::string& s) {
    if (s == "relu") return Act::Relu;
    if (s == "tanh") return Act::Tanh;
    if (s == "sigmoid") return Act::Sigmoid;
    if (s == "linear") return Act::Linear;
    throw std::invalid_argument("unknown activation: " + s);
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.W.a.size() + l.b.size();
    return n;
}

Mlp make_mlp(const std::vector<int>& dims, const std::vector<Act>& acts, Rng& rng) {
    if (dims.size() < 2 || acts.size() != dims.size() - 1)
        throw DimensionError("make_mlp: need dims.size()-1 activations");
    Mlp net;
    net.layers.resize(dims.size() - 1);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        layer.W.resize(dims[l + 1], dims[l]);
        layer.b.assign(static_cast<std::size_t>(dims[l + 1]), 0.0);
        layer.act = acts[l];
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        for (auto& w : layer.W.a) w = rng.uniform(-bound, bound);
        for (auto& b : layer.b) b = rng.uniform(-bound, bound);
    }
    return net;
}

namespace {

inline double activate(double z, Act a) {
    switch (a) {
        case Act::Relu: return z > 0.0 ? z : 0.0;
        case Act::Tanh: return std::tanh(z);
        case Act::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Act::Linear: return z;
    }
    return z;
}

/// Derivative expressed through the post-activation value.
inline double activate_grad_from_y(double y, Act a) {
    switch (a) {
        case Act::Relu: return y > 0.0 ? 1.0 : 0.0;
        case Act::Tanh: return 1.0 - y * y;
        case Act::Sigmoid: return y * (1.0 - y);
        case Act::Linear: return 1.0;
    }
    return 1.0;
}

void affine_forward(const Layer& layer, const Matrix& X, Matrix& Y) {
    const int n = X.rows, in = layer.in_dim(), out = layer.out_dim();
    if (X.cols != in) throw DimensionError("forward: input width mismatch");
    if (Y.rows != n || Y.cols != out) Y.resize(n, out);
    for (int m = 0; m < n; ++m) {
        const double* x = X.row(m);
        double* y = Y.row(m);
        for (int o = 0; o < out; ++o) {
            const double* w = layer.W.row(o);
            double acc = layer.b[static_cast<std::size_t>(o)];
            for (int j = 0; j < in; ++j) acc += w[j] * x[j];
            y[o] = activate(acc, layer.act);
        }
    }
}

} // namespace

const Matrix& forward_batch(const Mlp& net, const Matrix& X, ForwardCache& cache) {
    cache.x0 = X;
    cache.y.resize(net.layers.size());
    const Matrix* in = &cache.x0;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        affine_forward(net.layers[l], *in, cache.y[l]);
        in = &cache.y[l];
    }
    return cache.y.back();
}

std::vector<double> forward(const Mlp& net, std::span<const double> x) {
    std::vector<double> out, scratch;
    forward_inplace(net, x, out, scratch);
    return out;
}

void forward_inplace(const Mlp& net, std::span<const double> x, std::vector<double>& out,
                     std::vector<double>& scratch) {
    if (static_cast<int>(x.size()) != net.in_dim())
        throw DimensionError("forward: input size mismatch");
    scratch.assign(x.begin(), x.end());
    for (const Layer& layer : net.layers) {
        const int in = layer.in_dim(), o_n = layer.out_dim();
        out.resize(static_cast<std::size_t>(o_n));
        for (int o = 0; o < o_n; ++o) {
            const double* w = layer.W.row(o);
            double acc = layer.b[static_cast<std::size_t>(o)];
            for (int j = 0; j < in; ++j) acc += w[j] * scratch[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(o)] = activate(acc, layer.act);
        }
        scratch = out;
    }
}

Grads Grads::like(const Mlp& net) {
    Grads g;
    g.dW.reserve(net.layers.size());
    g.db.reserve(net.layers.size());
    for (const auto& l : net.layers) {
        g.dW.emplace_back(l.W.rows, l.W.cols);
        g.db.emplace_back(l.b.size(), 0.0);
    }
    return g;
}

void Grads::zero() {
    for (auto& m : dW) std::fill(m.a.begin(), m.a.end(), 0.0);
    for (auto& v : db) std::fill(v.begin(), v.end(), 0.0);
}

void Grads::scale(double f) {
    for (auto& m : dW)
        for (auto& v : m.a) v *= f;
    for (auto& v : db)
        for (auto& e : v) e *= f;
}

Matrix backprop_batch(const Mlp& net, const ForwardCache& cache, Matrix dY, Grads& grads,
                      bool dy_wrt_preactivation) {
    const int L = static_cast<int>(net.layers.size());
    if (static_cast<int>(cache.y.size()) != L)
        throw DimensionError("backprop: cache does not match network");
    if (dY.rows != cache.y.back().rows || dY.cols != cache.y.back().cols)
        throw DimensionError("backprop: upstream gradient shape mismatch");

    Matrix delta = std::move(dY);
    Matrix next_delta;
    for (int l = L - 1; l >= 0; --l) {
        const Layer& layer = net.layers[static_cast<std::size_t>(l)];
        const Matrix& y = cache.y[static_cast<std::size_t>(l)];
        const Matrix& x = l == 0 ? cache.x0 : cache.y[static_cast<std::size_t>(l - 1)];
        const int n = delta.rows, out = layer.out_dim(), in = layer.in_dim();

        if (!(l == L - 1 && dy_wrt_preactivation)) {
            for (int m = 0; m < n; ++m) {
                double* d = delta.row(m);
                const double* ym = y.row(m);
                for (int o = 0; o < out; ++o) d[o] *= activate_grad_from_y(ym[o], layer.act);
            }
        }

        Matrix& dW = grads.dW[static_cast<std::size_t>(l)];
        auto& db = grads.db[static_cast<std::size_t>(l)];
        for (int m = 0; m < n; ++m) {
            const double* d = delta.row(m);
            const double* xm = x.row(m);
            for (int o = 0; o < out; ++o) {
                const double g = d[o];
                if (g == 0.0) continue;
                double* wrow = dW.row(o);
                for (int j = 0; j < in; ++j) wrow[j] += g * xm[j];
                db[static_cast<std::size_t>(o)] += g;
            }
        }

        if (next_delta.rows != n || next_delta.cols != in) next_delta.resize(n, in);
        std::fill(next_delta.a.begin(), next_delta.a.end(), 0.0);
        for (int m = 0; m < n; ++m) {
            const double* d = delta.row(m);
            double* nd = next_delta.row(m);
            for (int o = 0; o < out; ++o) {
                const double g = d[o];
                if (g == 0.0) continue;
                const double* wrow = layer.W.row(o);
                for (int j = 0; j < in; ++j) nd[j] += g * wrow[j];
            }
        }
        std::swap(delta, next_delta);
    }
    return delta;
}

AdamState AdamState::like(const Mlp& net, double lr) {
    AdamState s;
    s.lr = lr;
    for (const auto& l : net.layers) {
        s.mW.emplace_back(l.W.rows, l.W.cols);
        s.vW.emplace_back(l.W.rows, l.W.cols);
        s.mb.emplace_back(l.b.size(), 0.0);
        s.vb.emplace_back(l.b.size(), 0.0);
    }
    return s;
}

namespace {

inline void adam_update(double* p, const double* g, double* m, double* v, std::size_t n,
                        const AdamState& s, double bc1, double bc2) {
    for (std::size_t j = 0; j < n; ++j) {
        m[j] = s.beta1 * m[j] + (1.0 - s.beta1) * g[j];
        v[j] = s.beta2 * v[j] + (1.0 - s.beta2) * g[j] * g[j];
        const double mhat = m[j] / bc1;
        const double vhat = v[j] / bc2;
        p[j] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
    }
}

} // namespace

void adam_step(Mlp& net, const Grads& grads, AdamState& opt) {
    if (grads.dW.size() != net.layers.size()) throw DimensionError("adam_step: gradient mismatch");
    opt.t += 1;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.t));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.t));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        adam_update(layer.W.a.data(), grads.dW[l].a.data(), opt.mW[l].a.data(),
                    opt.vW[l].a.data(), layer.W.a.size(), opt, bc1, bc2);
        adam_update(layer.b.data(), grads.db[l].data(), opt.mb[l].data(), opt.vb[l].data(),
                    layer.b.size(), opt, bc1, bc2);
    }
}

void soft_update(Mlp& target, const Mlp& learned, double tau) {
    if (target.layers.size() != learned.layers.size())
        throw DimensionError("soft_update: layer count mismatch");
    for (std::size_t l = 0; l < target.layers.size(); ++l) {
        auto& t = target.layers[l];
        const auto& s = learned.layers[l];
        if (t.W.a.size() != s.W.a.size() || t.b.size() != s.b.size())
            throw DimensionError("soft_update: layer shape mismatch");
        for (std::size_t j = 0; j < t.W.a.size(); ++j)
            t.W.a[j] = tau * s.W.a[j] + (1.0 - tau) * t.W.a[j];
        for (std::size_t j = 0; j < t.b.size(); ++j)
            t.b[j] = tau * s.b[j] + (1.0 - tau) * t.b[j];
    }
}

double mse_loss(const Matrix& pred, const Matrix& target, Matrix* dY) {
    if (pred.rows != target.rows || pred.cols != target.cols)
        throw DimensionError("mse_loss: shape mismatch");
    const double inv_n = 1.0 / static_cast<double>(pred.rows);
    double loss = 0.0;
    if (dY && (dY->rows != pred.rows || dY->cols != pred.cols)) dY->resize(pred.rows, pred.cols);
    for (std::size_t j = 0; j < pred.a.size(); ++j) {
        const double e = pred.a[j] - target.a[j];
        loss += e * e;
        if (dY) dY->a[j] = 2.0 * e * inv_n;
    }
    return loss * inv_n;
}

double bce_loss(const Matrix& probs, const std::vector<int>& labels, Matrix* dZ) {
    if (probs.cols != 1 || probs.rows != static_cast<int>(labels.size()))
        throw DimensionError("bce_loss: expects one probability column per label");
    const double inv_n = 1.0 / static_cast<double>(probs.rows);
    const double tiny = 1e-12;
    double loss = 0.0;
    if (dZ && (dZ->rows != probs.rows || dZ->cols != 1)) dZ->resize(probs.rows, 1);
    for (int m = 0; m < probs.rows; ++m) {
        const double pL = std::clamp(probs.at(m, 0), tiny, 1.0 - tiny);
        const double y = labels[static_cast<std::size_t>(m)] ? 1.0 : 0.0;
        loss -= y * std::log(pL) + (1.0 - y) * std::log(1.0 - pL);
        if (dZ) dZ->at(m, 0) = (pL - y) * inv_n;  // gradient at the sigmoid pre-activation
    }
    return loss * inv_n;
}

nlohmann::json mlp_to_json(const Mlp& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers) {
        nlohmann::json jl;
        jl["activation"] = to_string(l.act);
        jl["in"] = l.in_dim();
        jl["out"] = l.out_dim();
        jl["W"] = l.W.a;  // row-major, out x in
        jl["b"] = l.b;
        layers.push_back(std::move(jl));
    }
    return nlohmann::json{{"layers", std::move(layers)}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
    Mlp net;
    for (const auto& jl : j.at("layers")) {
        Layer l;
        const int in = jl.at("in").get<int>();
        const int out = jl.at("out").get<int>();
        l.W.resize(out, in);
        const auto w = jl.at("W").get<std::vector<double>>();
        if (w.size() != l.W.a.size()) throw DimensionError("mlp_from_json: weight size mismatch");
        l.W.a = w;
        l.b = jl.at("b").get<std::vector<double>>();
        if (l.b.size() != static_cast<std::size_t>(out))
            throw DimensionError("mlp_from_json: bias size mismatch");
        l.act = act_from_string(jl.at("activation").get<std::string>());
        net.layers.push_back(std::move(l));
    }
    if (net.layers.empty()) throw DimensionError("mlp_from_json: no layers");
    for (std::size_t l = 1; l < net.layers.size(); ++l)
        if (net.layers[l].in_dim() != net.layers[l - 1].out_dim())
            throw DimensionError("mlp_from_json: layer dimensions do not chain");
    return net;
}

} // namespace harv
