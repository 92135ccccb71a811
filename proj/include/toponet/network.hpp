#pragma once

#include "toponet/dataset.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace toponet {

enum class Activation { Relu, Softmax, Identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct LayerSpec {
    int in_dim = 0;
    int out_dim = 0;
    Activation activation = Activation::Relu;
};

/// Ordered layer specs; dims must chain and Softmax may only close the net.
struct NetworkSpec {
    std::vector<LayerSpec> layers;

    int input_dim() const { return layers.front().in_dim; }
    int output_dim() const { return layers.back().out_dim; }
    int depth() const { return static_cast<int>(layers.size()); }
    bool ends_in_softmax() const { return !layers.empty() && layers.back().activation == Activation::Softmax; }
    void validate() const;
};

struct Layer {
    Eigen::MatrixXd weights;  // out_dim x in_dim
    Eigen::VectorXd bias;     // out_dim
    Activation activation = Activation::Relu;
};

/// Dense network Net = f_L o ... o f_1 with f_i(x) = act(W_i x + b_i).
struct Network {
    std::vector<Layer> layers;
    std::uint64_t seed = 0;
    long epochs_run = 0;

    int input_dim() const { return static_cast<int>(layers.front().weights.cols()); }
    int output_dim() const { return static_cast<int>(layers.back().weights.rows()); }
    int depth() const { return static_cast<int>(layers.size()); }
    NetworkSpec spec() const;
    void validate() const;
};

/// Seeded He-style initialization (bias zero); the draw order is row-major
/// weights then bias, layer by layer, so a seed pins every parameter.
Network initialize_network(const NetworkSpec& spec, std::uint64_t seed);

/// Numerically stable softmax (max-shifted before exponentiation).
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Full composition; with a Softmax head the output lies strictly inside the
/// simplex and sums to 1 within 1e-12.
Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x);

/// Head Net^[i] = f_i o ... o f_1; head(net, 0, x) = x and
/// head(net, L, x) = forward(net, x) on the same code path.
Eigen::VectorXd head(const Network& net, int i, const Eigen::VectorXd& x);

/// Batched layer application used by forward/head/trace; points are rows.
Eigen::MatrixXd apply_layer(const Layer& layer, const Eigen::MatrixXd& points);

/// Per-layer clouds X^[0..L] for a dataset, labels aligned throughout.
struct ActivationTrace {
    std::vector<Eigen::MatrixXd> clouds;      // clouds[i] is count x dim_i
    std::vector<Eigen::MatrixXd> preactivations;  // W_i x + b_i, size L
    std::vector<int> labels;
    int num_classes = 0;

    int depth() const { return static_cast<int>(clouds.size()) - 1; }
    Eigen::MatrixXd class_cloud(int layer, int label) const;
};

ActivationTrace trace_activations(const Network& net, const LabeledPointSet& data);

struct Hyperparams {
    std::uint64_t seed = 0;
    long epochs = 1000;
    double step_size = 1e-3;   // Adam step
    long batch_size = 0;       // 0 = full batch
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct TrainResult {
    Network net;
    std::vector<double> loss_history;  // mean cross-entropy per epoch
    double final_accuracy = 0.0;       // training-set accuracy
};

/// Divergence abort (non-finite loss) with the offending epoch.
struct DivergenceError : std::runtime_error {
    long epoch;
    explicit DivergenceError(long at)
        : std::runtime_error("training diverged (non-finite loss) at epoch " + std::to_string(at)), epoch(at) {}
};

/// Adam on softmax cross-entropy; the loss is evaluated through log-sum-exp
/// and the softmax itself is never formed for the loss value. Deterministic
/// for a fixed (spec, data, hyperparams) triple.
TrainResult train(const NetworkSpec& spec, const LabeledPointSet& data, const Hyperparams& hp);

/// Mean cross-entropy and its gradients for one parameter set; exposed so
/// tests can check analytic gradients against finite differences.
struct LossGradients {
    double loss = 0.0;
    std::vector<Eigen::MatrixXd> d_weights;
    std::vector<Eigen::VectorXd> d_bias;
};
LossGradients loss_and_gradients(const Network& net, const Eigen::MatrixXd& points, const std::vector<int>& labels);

double cross_entropy_loss(const Network& net, const Eigen::MatrixXd& points, const std::vector<int>& labels);

/// Fraction of points whose argmax output matches the label.
double accuracy(const Network& net, const Eigen::MatrixXd& points, const std::vector<int>& labels);

/// Textual checkpoint, version-headed: dims + row-major weights + biases.
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace toponet
