#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "eivuq/data.hpp"
#include "eivuq/errors.hpp"
#include "eivuq/math.hpp"
#include "eivuq/matrix.hpp"

namespace eivuq {

enum class Activation { relu, tanh };
enum class Optimizer { sgd, adam };

// Architecture + init seed of a feedforward net. The output head is always two
// linear nodes; the predictive probability is a logistic of their difference
// and lives outside the network (see uncertainty.hpp).
struct NetworkSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_layers;
    Activation activation = Activation::relu;
    double dropout_rate = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const NetworkSpec&) const = default;

    void validate() const {
        if (input_dim == 0) throw std::invalid_argument("network spec: input_dim must be positive");
        for (std::size_t h : hidden_layers)
            if (h == 0) throw std::invalid_argument("network spec: hidden layer sizes must be positive");
        if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
            throw std::invalid_argument("network spec: dropout_rate must lie in [0, 1)");
    }

    // Node counts per layer: input, hidden..., 2 output logits.
    std::vector<std::size_t> layer_dims() const {
        std::vector<std::size_t> dims;
        dims.reserve(hidden_layers.size() + 2);
        dims.push_back(input_dim);
        dims.insert(dims.end(), hidden_layers.begin(), hidden_layers.end());
        dims.push_back(2);
        return dims;
    }
};

struct LogitPair {
    double z0 = 0.0;
    double z1 = 0.0;
    double delta() const { return z1 - z0; }
};

struct ProbPair {
    double p0 = 0.0;
    double p1 = 0.0;
};

struct Network {
    NetworkSpec spec;
    std::vector<Matrix> weights;              // layer l: out_dim x in_dim
    std::vector<std::vector<double>> biases;  // layer l: out_dim

    bool operator==(const Network&) const = default;

    std::size_t n_layers() const { return weights.size(); }

    void validate() const {
        spec.validate();
        const auto dims = spec.layer_dims();
        if (weights.size() != dims.size() - 1 || biases.size() != weights.size())
            throw DataError("network: layer count does not match spec");
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            if (weights[l].rows != dims[l + 1] || weights[l].cols != dims[l])
                throw DataError("network: weight shape mismatch at layer " + std::to_string(l));
            if (biases[l].size() != dims[l + 1])
                throw DataError("network: bias shape mismatch at layer " + std::to_string(l));
            for (double w : weights[l].data)
                if (!std::isfinite(w)) throw DataError("network: non-finite weight at layer " + std::to_string(l));
            for (double b : biases[l])
                if (!std::isfinite(b)) throw DataError("network: non-finite bias at layer " + std::to_string(l));
        }
    }
};

// Fan-in-scaled uniform init, reproducible from spec.seed. Biases start at zero.
inline Network init_network(const NetworkSpec& spec) {
    spec.validate();
    Network net;
    net.spec = spec;
    Rng rng(spec.seed);
    const auto dims = spec.layer_dims();
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        Matrix w(dims[l + 1], dims[l]);
        for (double& v : w.data) v = uniform_range(rng, -bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(dims[l + 1], 0.0);
    }
    return net;
}

namespace detail {

inline double activate(Activation act, double z) {
    return act == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// Derivative in terms of the activation value (valid for both choices).
inline double activate_grad(Activation act, double a) {
    return act == Activation::relu ? (a > 0.0 ? 1.0 : 0.0) : 1.0 - a * a;
}

inline void check_input(const Network& net, const double* x, std::size_t n) {
    if (n != net.spec.input_dim)
        throw DataError("forward: input has length " + std::to_string(n) + ", expected " +
                        std::to_string(net.spec.input_dim));
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(x[i])) throw DataError("forward: non-finite input value");
}

// Reusable per-layer buffers so training does not allocate per sample.
// Hidden activations are kept pre-dropout alongside the applied multiplier;
// `fed` holds their product, which is what the next layer consumed.
struct ForwardScratch {
    std::vector<std::vector<double>> acts;   // acts[0] = input copy, acts[l+1] = layer l output
    std::vector<std::vector<double>> drops;  // dropout multiplier per hidden unit (0 or 1/(1-rate))
    std::vector<std::vector<double>> fed;    // masked hidden activations

    void resize(const std::vector<std::size_t>& dims) {
        acts.resize(dims.size());
        for (std::size_t i = 0; i < dims.size(); ++i) acts[i].assign(dims[i], 0.0);
        const std::size_t hidden = dims.size() >= 2 ? dims.size() - 2 : 0;
        drops.resize(hidden);
        fed.resize(hidden);
        for (std::size_t i = 0; i < hidden; ++i) {
            drops[i].assign(dims[i + 1], 1.0);
            fed[i].assign(dims[i + 1], 0.0);
        }
    }
};

inline LogitPair forward_into(const Network& net, const double* x, ForwardScratch& ws,
                              bool dropout_active, Rng* rng) {
    const auto act = net.spec.activation;
    const double rate = net.spec.dropout_rate;
    const double scale = rate > 0.0 ? 1.0 / (1.0 - rate) : 1.0;
    std::copy(x, x + net.spec.input_dim, ws.acts[0].begin());

    const double* in = ws.acts[0].data();
    std::size_t in_dim = net.spec.input_dim;
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
        const Matrix& w = net.weights[l];
        auto& out = ws.acts[l + 1];
        const bool is_output = (l + 1 == net.n_layers());
        for (std::size_t r = 0; r < w.rows; ++r) {
            const double* wr = w.row_ptr(r);
            double z = net.biases[l][r];
            for (std::size_t c = 0; c < in_dim; ++c) z += wr[c] * in[c];
            out[r] = is_output ? z : activate(act, z);
        }
        if (!is_output) {
            auto& drop = ws.drops[l];
            auto& fed = ws.fed[l];
            if (dropout_active) {
                for (std::size_t r = 0; r < out.size(); ++r)
                    drop[r] = (uniform_unit(*rng) < rate) ? 0.0 : scale;
            } else {
                std::fill(drop.begin(), drop.end(), 1.0);
            }
            for (std::size_t r = 0; r < out.size(); ++r) fed[r] = out[r] * drop[r];
            in = fed.data();
        } else {
            in = out.data();
        }
        in_dim = out.size();
    }
    auto& logits = ws.acts.back();
    return LogitPair{logits[0], logits[1]};
}

} // namespace detail

// Pre-sigmoid output pair for one input. Deterministic when dropout_active is
// false; otherwise hidden units are zeroed with probability dropout_rate and
// survivors rescaled by 1/(1 - dropout_rate).
inline LogitPair forward_logits(const Network& net, const std::vector<double>& x,
                                bool dropout_active, Rng& rng) {
    detail::check_input(net, x.data(), x.size());
    detail::ForwardScratch ws;
    ws.resize(net.spec.layer_dims());
    return detail::forward_into(net, x.data(), ws, dropout_active, &rng);
}

inline LogitPair forward_logits(const Network& net, const std::vector<double>& x) {
    detail::check_input(net, x.data(), x.size());
    detail::ForwardScratch ws;
    ws.resize(net.spec.layer_dims());
    return detail::forward_into(net, x.data(), ws, false, nullptr);
}

// Softmax over the two logits in stable form: p1 = logistic(z1 - z0).
inline ProbPair predict_proba_from_logits(const LogitPair& z) {
    const double p1 = logistic(z.delta());
    return ProbPair{1.0 - p1, p1};
}

inline ProbPair predict_proba(const Network& net, const std::vector<double>& x) {
    return predict_proba_from_logits(forward_logits(net, x));
}

// Gradient of the mean cross-entropy over a batch, shaped like the network.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    static Gradients zeros_like(const Network& net) {
        Gradients g;
        for (std::size_t l = 0; l < net.n_layers(); ++l) {
            g.weights.emplace_back(net.weights[l].rows, net.weights[l].cols);
            g.biases.emplace_back(net.biases[l].size(), 0.0);
        }
        return g;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& w : weights)
            for (double v : w.data) m = std::max(m, std::abs(v));
        for (const auto& b : biases)
            for (double v : b) m = std::max(m, std::abs(v));
        return m;
    }
};

namespace detail {

// Mean cross-entropy and (optionally) its gradient over the rows of X indexed
// by `idx`. Dropout masks are drawn from `rng` when given and enter both the
// forward values and the backward pass.
inline double batch_eval(const Network& net, const Matrix& X, const std::vector<int>& y,
                         const std::vector<std::size_t>& idx, Gradients* grads, Rng* rng) {
    if (idx.empty()) throw DataError("batch evaluation: empty batch");
    if (X.cols != net.spec.input_dim) throw DataError("batch evaluation: feature dimension mismatch");

    const auto dims = net.spec.layer_dims();
    ForwardScratch ws;
    ws.resize(dims);
    const bool dropout = rng != nullptr && net.spec.dropout_rate > 0.0;

    std::vector<std::vector<double>> delta(net.n_layers());
    for (std::size_t l = 0; l < net.n_layers(); ++l) delta[l].assign(dims[l + 1], 0.0);

    double loss = 0.0;
    const double inv_b = 1.0 / static_cast<double>(idx.size());
    for (std::size_t row : idx) {
        const LogitPair z = forward_into(net, X.row_ptr(row), ws, dropout, rng);
        const double d = z.delta();
        loss += (y[row] == 1) ? softplus(-d) : softplus(d);
        if (!grads) continue;

        const double residual = logistic(d) - static_cast<double>(y[row]);  // dL/d(z1-z0)
        auto& out_delta = delta.back();
        out_delta[0] = -residual;
        out_delta[1] = residual;
        for (std::size_t l = net.n_layers(); l-- > 0;) {
            Matrix& gw = grads->weights[l];
            auto& gb = grads->biases[l];
            const auto& dl = delta[l];
            for (std::size_t r = 0; r < gw.rows; ++r) {
                const double dr = dl[r] * inv_b;
                gb[r] += dr;
                double* gwr = gw.row_ptr(r);
                const double* layer_in = (l == 0) ? X.row_ptr(row) : ws.fed[l - 1].data();
                for (std::size_t c = 0; c < gw.cols; ++c) gwr[c] += dr * layer_in[c];
            }
            if (l > 0) {
                auto& prev = delta[l - 1];
                const Matrix& w = net.weights[l];
                for (std::size_t c = 0; c < w.cols; ++c) {
                    double s = 0.0;
                    for (std::size_t r = 0; r < w.rows; ++r) s += w.at(r, c) * dl[r];
                    prev[c] = s * activate_grad(net.spec.activation, ws.acts[l][c]) * ws.drops[l - 1][c];
                }
            }
        }
    }
    return loss * inv_b;
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

} // namespace detail

inline Gradients gradient(const Network& net, const Matrix& X, const std::vector<int>& y) {
    if (X.rows == 0) throw DataError("gradient: empty batch");
    if (y.size() != X.rows) throw DataError("gradient: label count does not match batch");
    Gradients g = Gradients::zeros_like(net);
    detail::batch_eval(net, X, y, detail::all_indices(X.rows), &g, nullptr);
    return g;
}

// Mean cross-entropy of predict_proba against labels, dropout off.
inline double batch_loss(const Network& net, const Matrix& X, const std::vector<int>& y) {
    if (X.rows == 0) throw DataError("loss: empty batch");
    if (y.size() != X.rows) throw DataError("loss: label count does not match batch");
    return detail::batch_eval(net, X, y, detail::all_indices(X.rows), nullptr, nullptr);
}

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::adam;
    double validation_fraction = 0.1;
    std::size_t early_stopping_patience = 20;
    std::uint64_t seed = 0;

    bool operator==(const TrainConfig&) const = default;

    void validate() const {
        if (batch_size == 0) throw std::invalid_argument("train config: batch_size must be positive");
        if (!(learning_rate > 0.0)) throw std::invalid_argument("train config: learning_rate must be positive");
        if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
            throw std::invalid_argument("train config: validation_fraction must lie in [0, 1)");
    }
};

struct TrainDiagnostics {
    std::vector<double> train_loss;  // one entry per completed epoch, dropout off
    std::vector<double> val_loss;    // empty when no validation rows were held out
    std::vector<std::string> warnings;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;  // epoch whose weights were returned
};

namespace detail {

struct AdamState {
    std::vector<Matrix> mw, vw;
    std::vector<std::vector<double>> mb, vb;
    std::uint64_t step = 0;

    explicit AdamState(const Network& net) {
        for (std::size_t l = 0; l < net.n_layers(); ++l) {
            mw.emplace_back(net.weights[l].rows, net.weights[l].cols);
            vw.emplace_back(net.weights[l].rows, net.weights[l].cols);
            mb.emplace_back(net.biases[l].size(), 0.0);
            vb.emplace_back(net.biases[l].size(), 0.0);
        }
    }
};

inline void apply_update(Network& net, const Gradients& g, const TrainConfig& cfg, AdamState& adam) {
    if (cfg.optimizer == Optimizer::sgd) {
        for (std::size_t l = 0; l < net.n_layers(); ++l) {
            for (std::size_t i = 0; i < net.weights[l].data.size(); ++i)
                net.weights[l].data[i] -= cfg.learning_rate * g.weights[l].data[i];
            for (std::size_t i = 0; i < net.biases[l].size(); ++i)
                net.biases[l][i] -= cfg.learning_rate * g.biases[l][i];
        }
        return;
    }
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++adam.step;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam.step));
    auto update = [&](double& param, double& m, double& v, double grad) {
        m = b1 * m + (1.0 - b1) * grad;
        v = b2 * v + (1.0 - b2) * grad * grad;
        param -= cfg.learning_rate * (m / c1) / (std::sqrt(v / c2) + eps);
    };
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].data.size(); ++i)
            update(net.weights[l].data[i], adam.mw[l].data[i], adam.vw[l].data[i], g.weights[l].data[i]);
        for (std::size_t i = 0; i < net.biases[l].size(); ++i)
            update(net.biases[l][i], adam.mb[l][i], adam.vb[l][i], g.biases[l][i]);
    }
}

} // namespace detail

// Mini-batch cross-entropy training with optional validation holdout and
// early stopping (best-epoch weights are restored). Fully deterministic for a
// fixed (net, X, y, cfg): all randomness flows from cfg.seed.
inline Network train(const Network& net, const Matrix& X, const std::vector<int>& y,
                     const TrainConfig& cfg, TrainDiagnostics* diag = nullptr) {
    cfg.validate();
    net.validate();
    if (X.rows == 0) throw DataError("train: empty dataset");
    if (y.size() != X.rows) throw DataError("train: label count does not match row count");
    if (X.cols != net.spec.input_dim) throw DataError("train: feature dimension mismatch");
    for (int v : y)
        if (v != 0 && v != 1) throw DataError("train: labels must be 0 or 1");

    TrainDiagnostics local;
    TrainDiagnostics& d = diag ? *diag : local;
    d = TrainDiagnostics{};

    const bool single_class =
        std::all_of(y.begin(), y.end(), [&](int v) { return v == y.front(); });
    if (single_class) d.warnings.push_back("training data contains a single class");

    // Validation holdout, then epoch shuffling and dropout masks, each on an
    // independent derived stream.
    Rng split_rng(derive_seed(cfg.seed, 0));
    Rng epoch_rng(derive_seed(cfg.seed, 1));
    Rng dropout_rng(derive_seed(cfg.seed, 2));

    auto idx = detail::all_indices(X.rows);
    shuffle_inplace(idx, split_rng);
    const std::size_t val_n = static_cast<std::size_t>(
        std::floor(static_cast<double>(X.rows) * cfg.validation_fraction));
    std::vector<std::size_t> val_idx(idx.begin(), idx.begin() + val_n);
    std::vector<std::size_t> train_idx(idx.begin() + val_n, idx.end());
    if (train_idx.empty()) throw DataError("train: validation holdout leaves no training rows");
    if (cfg.batch_size > train_idx.size())
        throw std::invalid_argument("train config: batch_size exceeds training split size");

    Network cur = net;
    if (cfg.epochs == 0) return cur;

    detail::AdamState adam(cur);
    Rng* drop = net.spec.dropout_rate > 0.0 ? &dropout_rng : nullptr;

    const bool use_val = !val_idx.empty();
    Network best = cur;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::size_t stall = 0;

    std::vector<std::size_t> batch;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_inplace(train_idx, epoch_rng);
        for (std::size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, train_idx.size());
            batch.assign(train_idx.begin() + start, train_idx.begin() + end);
            Gradients g = Gradients::zeros_like(cur);
            const double loss = detail::batch_eval(cur, X, y, batch, &g, drop);
            if (!std::isfinite(loss))
                throw NumericError("train: loss became non-finite at epoch " + std::to_string(epoch));
            detail::apply_update(cur, g, cfg, adam);
        }

        const double train_loss = detail::batch_eval(cur, X, y, train_idx, nullptr, nullptr);
        if (!std::isfinite(train_loss))
            throw NumericError("train: loss became non-finite at epoch " + std::to_string(epoch));
        d.train_loss.push_back(train_loss);
        d.epochs_run = epoch + 1;

        if (use_val) {
            const double val_loss = detail::batch_eval(cur, X, y, val_idx, nullptr, nullptr);
            if (!std::isfinite(val_loss))
                throw NumericError("train: loss became non-finite at epoch " + std::to_string(epoch));
            d.val_loss.push_back(val_loss);
            if (val_loss < best_val) {
                best_val = val_loss;
                best = cur;
                best_epoch = epoch;
                stall = 0;
            } else {
                ++stall;
                if (stall > cfg.early_stopping_patience) break;
            }
        }
    }

    if (use_val) {
        d.best_epoch = best_epoch;
        return best;
    }
    d.best_epoch = d.epochs_run == 0 ? 0 : d.epochs_run - 1;
    return cur;
}

// Trains on the ground-truth feature values; observation error is a
// prediction-time concern handled by the error model.
inline Network train(const Network& net, const Dataset& data, const TrainConfig& cfg,
                     TrainDiagnostics* diag = nullptr) {
    data.validate();
    return train(net, data.true_features, data.labels, cfg, diag);
}

} // namespace eivuq
