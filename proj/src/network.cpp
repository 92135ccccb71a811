#include "toponet/network.hpp"

#include "toponet/rng.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace toponet {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Softmax: return "softmax";
        case Activation::Identity: return "identity";
    }
    return "?";
}

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "softmax") return Activation::Softmax;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

void NetworkSpec::validate() const {
    if (layers.empty()) throw std::invalid_argument("NetworkSpec: no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.in_dim < 1 || l.out_dim < 1)
            throw std::invalid_argument("NetworkSpec: layer " + std::to_string(i) + " has non-positive dims");
        if (i > 0 && layers[i - 1].out_dim != l.in_dim)
            throw std::invalid_argument("NetworkSpec: dim mismatch between layers " + std::to_string(i - 1) +
                                        " and " + std::to_string(i) + " (" + std::to_string(layers[i - 1].out_dim) +
                                        " vs " + std::to_string(l.in_dim) + ")");
        if (l.activation == Activation::Softmax && i + 1 != layers.size())
            throw std::invalid_argument("NetworkSpec: softmax allowed only on the last layer");
    }
}

NetworkSpec Network::spec() const {
    NetworkSpec s;
    for (const auto& l : layers)
        s.layers.push_back({static_cast<int>(l.weights.cols()), static_cast<int>(l.weights.rows()), l.activation});
    return s;
}

void Network::validate() const {
    if (layers.empty()) throw std::invalid_argument("Network: no layers");
    spec().validate();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.bias.size() != l.weights.rows())
            throw std::invalid_argument("Network: bias/weight shape mismatch at layer " + std::to_string(i));
        if (!l.weights.allFinite() || !l.bias.allFinite())
            throw std::invalid_argument("Network: non-finite parameters at layer " + std::to_string(i));
    }
}

Network initialize_network(const NetworkSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    Network net;
    net.seed = seed;
    for (const auto& ls : spec.layers) {
        Layer layer;
        layer.activation = ls.activation;
        layer.weights.resize(ls.out_dim, ls.in_dim);
        const double scale = ls.activation == Activation::Relu ? std::sqrt(2.0 / ls.in_dim)
                                                               : std::sqrt(1.0 / ls.in_dim);
        for (int r = 0; r < ls.out_dim; ++r)
            for (int c = 0; c < ls.in_dim; ++c) layer.weights(r, c) = scale * rng.normal();
        // small positive bias keeps narrow relu layers alive at the start;
        // zero-bias units whose weights point away from the data cone are
        // dead from birth and cannot recover
        layer.bias = ls.activation == Activation::Relu ? Eigen::VectorXd::Constant(ls.out_dim, 0.1)
                                                       : Eigen::VectorXd::Zero(ls.out_dim);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    if (!logits.allFinite()) throw std::invalid_argument("softmax: non-finite input");
    const Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
    Eigen::VectorXd e = shifted.array().exp();
    return e / e.sum();
}

namespace {

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) out.row(i) = softmax(logits.row(i).transpose()).transpose();
    return out;
}

// log(sum exp(z_j)) per row, max-shifted
Eigen::VectorXd log_sum_exp_rows(const Eigen::MatrixXd& logits) {
    Eigen::VectorXd out(logits.rows());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        out[i] = m + std::log((logits.row(i).array() - m).exp().sum());
    }
    return out;
}

}  // namespace

Eigen::MatrixXd apply_layer(const Layer& layer, const Eigen::MatrixXd& points) {
    Eigen::MatrixXd z = (points * layer.weights.transpose()).rowwise() + layer.bias.transpose();
    switch (layer.activation) {
        case Activation::Identity: return z;
        case Activation::Relu: return z.cwiseMax(0.0);
        case Activation::Softmax: return softmax_rows(z);
    }
    return z;
}

Eigen::VectorXd head(const Network& net, int i, const Eigen::VectorXd& x) {
    if (i < 0 || i > net.depth())
        throw std::invalid_argument("head: layer index " + std::to_string(i) + " out of range [0, " +
                                    std::to_string(net.depth()) + "]");
    if (x.size() != net.input_dim()) throw std::invalid_argument("head: input dimension mismatch");
    if (!x.allFinite()) throw std::invalid_argument("head: non-finite input");
    Eigen::MatrixXd cur = x.transpose();
    for (int l = 0; l < i; ++l) cur = apply_layer(net.layers[static_cast<std::size_t>(l)], cur);
    return cur.row(0).transpose();
}

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& x) { return head(net, net.depth(), x); }

ActivationTrace trace_activations(const Network& net, const LabeledPointSet& data) {
    if (data.dim() != net.input_dim())
        throw std::invalid_argument("trace_activations: dataset dim " + std::to_string(data.dim()) +
                                    " does not match network input dim " + std::to_string(net.input_dim()));
    ActivationTrace trace;
    trace.labels = data.labels;
    trace.num_classes = data.num_classes;
    trace.clouds.push_back(data.points);
    Eigen::MatrixXd cur = data.points;
    for (const auto& layer : net.layers) {
        Eigen::MatrixXd z = (cur * layer.weights.transpose()).rowwise() + layer.bias.transpose();
        trace.preactivations.push_back(z);
        switch (layer.activation) {
            case Activation::Identity: cur = z; break;
            case Activation::Relu: cur = z.cwiseMax(0.0); break;
            case Activation::Softmax: cur = softmax_rows(z); break;
        }
        trace.clouds.push_back(cur);
    }
    return trace;
}

Eigen::MatrixXd ActivationTrace::class_cloud(int layer, int label) const {
    const auto& cloud = clouds.at(static_cast<std::size_t>(layer));
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < cloud.rows(); ++i)
        if (labels[static_cast<std::size_t>(i)] == label) idx.push_back(i);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), cloud.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = cloud.row(idx[r]);
    return out;
}

namespace {

// Forward through all layers keeping pre-activations; the final layer is
// treated as affine (its logits feed the log-sum-exp loss directly).
struct ForwardCache {
    std::vector<Eigen::MatrixXd> activations;  // a_0..a_{L-1} (inputs to each layer)
    Eigen::MatrixXd logits;
    std::vector<Eigen::MatrixXd> preacts;  // z_1..z_{L-1} (hidden only)
};

ForwardCache forward_cache(const Network& net, const Eigen::MatrixXd& points) {
    ForwardCache cache;
    cache.activations.push_back(points);
    Eigen::MatrixXd cur = points;
    const int last = net.depth() - 1;
    for (int l = 0; l < net.depth(); ++l) {
        const auto& layer = net.layers[static_cast<std::size_t>(l)];
        Eigen::MatrixXd z = (cur * layer.weights.transpose()).rowwise() + layer.bias.transpose();
        if (l == last) {
            cache.logits = std::move(z);
            break;
        }
        cache.preacts.push_back(z);
        cur = layer.activation == Activation::Relu ? z.cwiseMax(0.0) : z;
        cache.activations.push_back(cur);
    }
    return cache;
}

double mean_cross_entropy(const Eigen::MatrixXd& logits, const std::vector<int>& labels) {
    const Eigen::VectorXd lse = log_sum_exp_rows(logits);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i)
        loss += lse[i] - logits(i, labels[static_cast<std::size_t>(i)]);
    return loss / static_cast<double>(logits.rows());
}

}  // namespace

double cross_entropy_loss(const Network& net, const Eigen::MatrixXd& points, const std::vector<int>& labels) {
    return mean_cross_entropy(forward_cache(net, points).logits, labels);
}

LossGradients loss_and_gradients(const Network& net, const Eigen::MatrixXd& points, const std::vector<int>& labels) {
    const ForwardCache cache = forward_cache(net, points);
    const Eigen::Index n = points.rows();
    const int depth = net.depth();

    LossGradients grads;
    grads.loss = mean_cross_entropy(cache.logits, labels);
    if (!std::isfinite(grads.loss)) return grads;  // caller aborts; no gradients to report
    grads.d_weights.resize(static_cast<std::size_t>(depth));
    grads.d_bias.resize(static_cast<std::size_t>(depth));

    // dL/dz_L = (softmax(z_L) - onehot) / n
    Eigen::MatrixXd delta = softmax_rows(cache.logits);
    for (Eigen::Index i = 0; i < n; ++i) delta(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
    delta /= static_cast<double>(n);

    for (int l = depth - 1; l >= 0; --l) {
        const auto& a_in = cache.activations[static_cast<std::size_t>(l)];
        grads.d_weights[static_cast<std::size_t>(l)] = delta.transpose() * a_in;
        grads.d_bias[static_cast<std::size_t>(l)] = delta.colwise().sum().transpose();
        if (l == 0) break;
        delta = delta * net.layers[static_cast<std::size_t>(l)].weights;
        if (net.layers[static_cast<std::size_t>(l - 1)].activation == Activation::Relu) {
            const auto& z = cache.preacts[static_cast<std::size_t>(l - 1)];
            delta = (z.array() > 0.0).select(delta, 0.0);
        }
    }
    return grads;
}

double accuracy(const Network& net, const Eigen::MatrixXd& points, const std::vector<int>& labels) {
    const Eigen::MatrixXd logits = forward_cache(net, points).logits;
    long hits = 0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index arg = 0;
        logits.row(i).maxCoeff(&arg);
        if (static_cast<int>(arg) == labels[static_cast<std::size_t>(i)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(logits.rows());
}

TrainResult train(const NetworkSpec& spec, const LabeledPointSet& data, const Hyperparams& hp) {
    spec.validate();
    data.validate();
    if (!spec.ends_in_softmax()) throw std::invalid_argument("train: classification net must end in softmax");
    if (spec.output_dim() != data.num_classes)
        throw std::invalid_argument("train: output dim " + std::to_string(spec.output_dim()) +
                                    " != num_classes " + std::to_string(data.num_classes));
    if (spec.input_dim() != data.dim()) throw std::invalid_argument("train: input dim does not match dataset");
    if (hp.epochs < 0 || hp.batch_size < 0) throw std::invalid_argument("train: negative epochs or batch size");

    TrainResult result;
    result.net = initialize_network(spec, hp.seed);
    Network& net = result.net;

    std::vector<Eigen::MatrixXd> m_w, v_w;
    std::vector<Eigen::VectorXd> m_b, v_b;
    for (const auto& l : net.layers) {
        m_w.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
        v_w.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
        m_b.push_back(Eigen::VectorXd::Zero(l.bias.size()));
        v_b.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }

    long step = 0;
    auto adam_update = [&](const LossGradients& g) {
        ++step;
        const double c1 = 1.0 - std::pow(hp.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(hp.beta2, static_cast<double>(step));
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            m_w[l] = hp.beta1 * m_w[l] + (1.0 - hp.beta1) * g.d_weights[l];
            v_w[l] = hp.beta2 * v_w[l].array() + (1.0 - hp.beta2) * g.d_weights[l].array().square();
            net.layers[l].weights.array() -=
                hp.step_size * (m_w[l].array() / c1) / ((v_w[l].array() / c2).sqrt() + hp.adam_eps);
            m_b[l] = hp.beta1 * m_b[l] + (1.0 - hp.beta1) * g.d_bias[l];
            v_b[l] = hp.beta2 * v_b[l].array() + (1.0 - hp.beta2) * g.d_bias[l].array().square();
            net.layers[l].bias.array() -=
                hp.step_size * (m_b[l].array() / c1) / ((v_b[l].array() / c2).sqrt() + hp.adam_eps);
        }
    };

    const Eigen::Index n = data.count();
    Rng shuffle_rng(hp.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    for (long epoch = 0; epoch < hp.epochs; ++epoch) {
        double epoch_loss = 0.0;
        if (hp.batch_size == 0 || hp.batch_size >= n) {
            const LossGradients g = loss_and_gradients(net, data.points, data.labels);
            epoch_loss = g.loss;
            if (!std::isfinite(epoch_loss)) throw DivergenceError(epoch);
            adam_update(g);
        } else {
            // Fisher-Yates with the portable rng, then contiguous batches
            for (Eigen::Index i = n - 1; i > 0; --i)
                std::swap(order[static_cast<std::size_t>(i)],
                          order[shuffle_rng.index(static_cast<std::uint64_t>(i) + 1)]);
            double total = 0.0;
            for (Eigen::Index start = 0; start < n; start += hp.batch_size) {
                const Eigen::Index len = std::min<Eigen::Index>(hp.batch_size, n - start);
                Eigen::MatrixXd batch(len, data.dim());
                std::vector<int> batch_labels(static_cast<std::size_t>(len));
                for (Eigen::Index i = 0; i < len; ++i) {
                    batch.row(i) = data.points.row(order[static_cast<std::size_t>(start + i)]);
                    batch_labels[static_cast<std::size_t>(i)] =
                        data.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(start + i)])];
                }
                const LossGradients g = loss_and_gradients(net, batch, batch_labels);
                if (!std::isfinite(g.loss)) throw DivergenceError(epoch);
                total += g.loss * static_cast<double>(len);
                adam_update(g);
            }
            epoch_loss = total / static_cast<double>(n);
        }
        result.loss_history.push_back(epoch_loss);
    }

    net.epochs_run = hp.epochs;
    result.final_accuracy = accuracy(net, data.points, data.labels);
    return result;
}

void save_network(const Network& net, const std::string& path) {
    net.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "toponet-network v1\n";
    out << "layers " << net.depth() << "\n";
    out << "seed " << net.seed << "\n";
    out << "epochs " << net.epochs_run << "\n";
    for (const auto& l : net.layers) {
        out << "layer " << l.weights.cols() << " " << l.weights.rows() << " " << to_string(l.activation) << "\n";
        out << "W";
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) out << " " << format_double(l.weights(r, c));
        out << "\nb";
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) out << " " << format_double(l.bias[r]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string word;
    in >> word;
    std::string version;
    in >> version;
    if (word != "toponet-network" || version != "v1")
        throw std::runtime_error("bad checkpoint header in " + path);
    long depth = 0;
    Network net;
    auto expect = [&](const char* key) {
        in >> word;
        if (word != key) throw std::runtime_error("bad checkpoint (expected '" + std::string(key) + "'): " + path);
    };
    expect("layers");
    in >> depth;
    expect("seed");
    in >> net.seed;
    expect("epochs");
    in >> net.epochs_run;
    if (!in || depth < 1) throw std::runtime_error("bad checkpoint header values: " + path);
    for (long l = 0; l < depth; ++l) {
        expect("layer");
        long in_dim = 0, out_dim = 0;
        std::string act;
        in >> in_dim >> out_dim >> act;
        if (!in || in_dim < 1 || out_dim < 1) throw std::runtime_error("bad layer dims in " + path);
        Layer layer;
        layer.activation = activation_from_string(act);
        layer.weights.resize(out_dim, in_dim);
        layer.bias.resize(out_dim);
        expect("W");
        for (long r = 0; r < out_dim; ++r)
            for (long c = 0; c < in_dim; ++c) in >> layer.weights(r, c);
        expect("b");
        for (long r = 0; r < out_dim; ++r) in >> layer.bias[r];
        if (!in) throw std::runtime_error("truncated checkpoint: " + path);
        net.layers.push_back(std::move(layer));
    }
    net.validate();
    return net;
}

}  // namespace toponet
