#include "syntab/cgan/cgan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "syntab/neural/adam.hpp"
#include "syntab/neural/gradcheck.hpp"
#include "syntab/neural/tensor_io.hpp"

namespace syntab::cgan {

namespace {

constexpr double kLeakySlope = 0.2;

std::size_t embedding_width(std::size_t embed_dim, std::size_t block_width) {
    return std::min(embed_dim, block_width);
}

Matrix concat_cols(const Matrix& left, const Matrix& right) {
    Matrix out(left.rows, left.cols + right.cols);
    for (std::size_t r = 0; r < left.rows; ++r) {
        double* dst = out.row_ptr(r);
        std::memcpy(dst, left.row_ptr(r), left.cols * sizeof(double));
        std::memcpy(dst + left.cols, right.row_ptr(r), right.cols * sizeof(double));
    }
    return out;
}

Matrix left_cols(const Matrix& m, std::size_t width) {
    Matrix out(m.rows, width);
    for (std::size_t r = 0; r < m.rows; ++r) {
        std::memcpy(out.row_ptr(r), m.row_ptr(r), width * sizeof(double));
    }
    return out;
}

Matrix right_cols(const Matrix& m, std::size_t width) {
    Matrix out(m.rows, width);
    for (std::size_t r = 0; r < m.rows; ++r) {
        std::memcpy(out.row_ptr(r), m.row_ptr(r) + (m.cols - width), width * sizeof(double));
    }
    return out;
}

void add_into(Matrix& accum, const Matrix& delta) {
    for (std::size_t i = 0; i < accum.size(); ++i) accum.data[i] += delta.data[i];
}

void scale_in_place(Matrix& m, double s) {
    for (double& v : m.data) v *= s;
}

Matrix gaussian_noise(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix z(rows, cols);
    for (double& v : z.data) v = rng.normal();
    return z;
}

Matrix constant_targets(std::size_t rows, double value) {
    Matrix t(rows, 1);
    std::fill(t.data.begin(), t.data.end(), value);
    return t;
}

struct ForwardCache {
    Matrix input;  // main input and embedding, concatenated
    Matrix pre1, mask1, post1;
    Matrix pre2, mask2, post2;
    Matrix output;  // sigmoid of the head
};

ForwardCache forward(const SubNetwork& net, const Matrix& main_input,
                     const std::vector<int>& labels, double dropout_rate, Rng& rng,
                     bool training) {
    ForwardCache cache;
    Matrix embedded = neural::embedding_forward(net.embedding, labels);
    cache.input = concat_cols(main_input, embedded);

    cache.pre1 = neural::dense_forward(net.block1, cache.input);
    neural::DropoutResult d1 =
        neural::dropout(neural::leaky_relu(cache.pre1, kLeakySlope), dropout_rate, rng, training);
    cache.mask1 = std::move(d1.mask);
    cache.post1 = std::move(d1.output);

    cache.pre2 = neural::dense_forward(net.block2, cache.post1);
    neural::DropoutResult d2 =
        neural::dropout(neural::leaky_relu(cache.pre2, kLeakySlope), dropout_rate, rng, training);
    cache.mask2 = std::move(d2.mask);
    cache.post2 = std::move(d2.output);

    cache.output = neural::sigmoid(neural::dense_forward(net.output, cache.post2));
    return cache;
}

struct SubGrads {
    Matrix embedding;
    neural::DenseGrads block1;
    neural::DenseGrads block2;
    neural::DenseGrads output;
    Matrix main_input;  // gradient wrt the non-embedding part of the input
};

SubGrads backward(const SubNetwork& net, const std::vector<int>& labels,
                  const ForwardCache& cache, const Matrix& output_grad) {
    SubGrads g;
    Matrix head = neural::sigmoid_backward(cache.output, output_grad);
    g.output = neural::dense_backward(net.output, cache.post2, head);

    Matrix at2 = neural::leaky_relu_backward(
        cache.pre2, kLeakySlope, neural::dropout_backward(cache.mask2, g.output.input));
    g.block2 = neural::dense_backward(net.block2, cache.post1, at2);

    Matrix at1 = neural::leaky_relu_backward(
        cache.pre1, kLeakySlope, neural::dropout_backward(cache.mask1, g.block2.input));
    g.block1 = neural::dense_backward(net.block1, cache.input, at1);

    std::size_t embed_width = net.embedding.entries.cols;
    g.embedding = neural::embedding_backward(net.embedding, labels,
                                             right_cols(g.block1.input, embed_width));
    g.main_input = left_cols(g.block1.input, g.block1.input.cols - embed_width);
    return g;
}

void add_grads(SubGrads& accum, const SubGrads& delta) {
    add_into(accum.embedding, delta.embedding);
    add_into(accum.block1.weights, delta.block1.weights);
    add_into(accum.block1.bias, delta.block1.bias);
    add_into(accum.block2.weights, delta.block2.weights);
    add_into(accum.block2.bias, delta.block2.bias);
    add_into(accum.output.weights, delta.output.weights);
    add_into(accum.output.bias, delta.output.bias);
}

void scale_grads(SubGrads& g, double s) {
    scale_in_place(g.embedding, s);
    scale_in_place(g.block1.weights, s);
    scale_in_place(g.block1.bias, s);
    scale_in_place(g.block2.weights, s);
    scale_in_place(g.block2.bias, s);
    scale_in_place(g.output.weights, s);
    scale_in_place(g.output.bias, s);
}

std::vector<Matrix*> param_list(SubNetwork& net) {
    return {&net.embedding.entries, &net.block1.weights, &net.block1.bias, &net.block2.weights,
            &net.block2.bias,       &net.output.weights, &net.output.bias};
}

std::vector<const Matrix*> grad_list(const SubGrads& g) {
    return {&g.embedding,     &g.block1.weights, &g.block1.bias, &g.block2.weights,
            &g.block2.bias,   &g.output.weights, &g.output.bias};
}

std::size_t latent_width(const CganModel& model) {
    return model.generator.block1.weights.rows - model.generator.embedding.entries.cols;
}

Matrix take_batch(const Matrix& features, const std::vector<std::size_t>& order,
                  std::size_t start, std::size_t count) {
    Matrix out(count, features.cols);
    for (std::size_t i = 0; i < count; ++i) {
        std::memcpy(out.row_ptr(i), features.row_ptr(order[start + i]),
                    features.cols * sizeof(double));
    }
    return out;
}

void append_tensors(std::vector<neural::NamedTensor>& out, const std::string& prefix,
                    const SubNetwork& net) {
    out.push_back({prefix + ".embedding", net.embedding.entries});
    out.push_back({prefix + ".block1.weights", net.block1.weights});
    out.push_back({prefix + ".block1.bias", net.block1.bias});
    out.push_back({prefix + ".block2.weights", net.block2.weights});
    out.push_back({prefix + ".block2.bias", net.block2.bias});
    out.push_back({prefix + ".output.weights", net.output.weights});
    out.push_back({prefix + ".output.bias", net.output.bias});
}

const Matrix& find_tensor(const std::vector<neural::NamedTensor>& tensors,
                          const std::string& name) {
    for (const neural::NamedTensor& t : tensors) {
        if (t.name == name) return t.value;
    }
    throw std::runtime_error("load_model: missing tensor " + name);
}

SubNetwork subnetwork_from(const std::vector<neural::NamedTensor>& tensors,
                           const std::string& prefix) {
    SubNetwork net;
    net.embedding.entries = find_tensor(tensors, prefix + ".embedding");
    net.block1.weights = find_tensor(tensors, prefix + ".block1.weights");
    net.block1.bias = find_tensor(tensors, prefix + ".block1.bias");
    net.block2.weights = find_tensor(tensors, prefix + ".block2.weights");
    net.block2.bias = find_tensor(tensors, prefix + ".block2.bias");
    net.output.weights = find_tensor(tensors, prefix + ".output.weights");
    net.output.bias = find_tensor(tensors, prefix + ".output.bias");
    return net;
}

void hash_bytes(std::uint64_t& h, const void* bytes, std::size_t count) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < count; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
}

}  // namespace

void validate(const CganConfig& config) {
    if (config.epochs < 1) throw std::invalid_argument("cgan config: epochs must be >= 1");
    if (config.batch_size < 2) throw std::invalid_argument("cgan config: batch_size must be >= 2");
    if (config.gen_neurons < 1 || config.disc_neurons < 1) {
        throw std::invalid_argument("cgan config: layer widths must be >= 1");
    }
    if (!(config.gen_dropout >= 0.0 && config.gen_dropout < 1.0)) {
        throw std::invalid_argument("cgan config: gen_dropout outside [0,1)");
    }
    if (!(config.disc_dropout >= 0.0 && config.disc_dropout < 1.0)) {
        throw std::invalid_argument("cgan config: disc_dropout outside [0,1)");
    }
    if (!(config.init_stddev > 0.0) || !std::isfinite(config.init_stddev)) {
        throw std::invalid_argument("cgan config: init_stddev must be positive and finite");
    }
    if (config.latent_dim < 1) throw std::invalid_argument("cgan config: latent_dim must be >= 1");
    if (config.embed_dim < 1) throw std::invalid_argument("cgan config: embed_dim must be >= 1");
}

CganModel build(const CganConfig& config, std::size_t feature_count) {
    validate(config);
    if (feature_count < 1) throw std::invalid_argument("cgan build: feature_count must be >= 1");

    Rng rng = Rng(config.seed).child(0xB01D);
    CganModel model;
    model.feature_count = feature_count;

    std::size_t gen_embed = embedding_width(config.embed_dim, config.gen_neurons);
    model.generator.embedding = neural::make_embedding(2, gen_embed, config.init_stddev, rng);
    model.generator.block1 = neural::make_dense(config.latent_dim + gen_embed, config.gen_neurons,
                                                config.init_stddev, rng);
    model.generator.block2 =
        neural::make_dense(config.gen_neurons, config.gen_neurons, config.init_stddev, rng);
    model.generator.output =
        neural::make_dense(config.gen_neurons, feature_count, config.init_stddev, rng);

    std::size_t disc_embed = embedding_width(config.embed_dim, config.disc_neurons);
    model.discriminator.embedding = neural::make_embedding(2, disc_embed, config.init_stddev, rng);
    model.discriminator.block1 = neural::make_dense(feature_count + disc_embed,
                                                    config.disc_neurons, config.init_stddev, rng);
    model.discriminator.block2 =
        neural::make_dense(config.disc_neurons, config.disc_neurons, config.init_stddev, rng);
    model.discriminator.output =
        neural::make_dense(config.disc_neurons, 1, config.init_stddev, rng);
    return model;
}

TrainLog train(CganModel& model, const tabular::LabeledDataset& real_train,
               const CganConfig& config, Rng& rng) {
    validate(config);
    if (real_train.rows() == 0) throw std::invalid_argument("cgan train: empty training set");
    if (real_train.cols() != model.feature_count) {
        throw std::invalid_argument("cgan train: dataset has " + std::to_string(real_train.cols()) +
                                    " features, model expects " +
                                    std::to_string(model.feature_count));
    }
    std::array<std::size_t, 2> counts = tabular::class_counts(real_train);
    if (counts[0] == 0 || counts[1] == 0) {
        throw std::invalid_argument("cgan train: both classes must be present");
    }

    const std::size_t n = real_train.rows();
    const std::size_t latent = latent_width(model);

    neural::AdamState gen_state = neural::make_adam_state(
        {&model.generator.embedding.entries, &model.generator.block1.weights,
         &model.generator.block1.bias, &model.generator.block2.weights,
         &model.generator.block2.bias, &model.generator.output.weights,
         &model.generator.output.bias});
    neural::AdamState disc_state = neural::make_adam_state(
        {&model.discriminator.embedding.entries, &model.discriminator.block1.weights,
         &model.discriminator.block1.bias, &model.discriminator.block2.weights,
         &model.discriminator.block2.bias, &model.discriminator.output.weights,
         &model.discriminator.output.bias});

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainLog log;
    log.g_loss.reserve(config.epochs);
    log.d_loss.reserve(config.epochs);
    log.epoch_ms.reserve(config.epochs);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        auto epoch_start = std::chrono::steady_clock::now();
        rng.shuffle(order);

        double d_loss_sum = 0.0;
        double g_loss_sum = 0.0;

        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t m = std::min(config.batch_size, n - start);
            Matrix real_rows = take_batch(real_train.features, order, start, m);
            std::vector<int> labels(m);
            for (std::size_t i = 0; i < m; ++i) labels[i] = real_train.labels[order[start + i]];

            // Discriminator step: real rows toward 1, label-matched fakes
            // toward 0, the two cross-entropies averaged into one update.
            Matrix noise = gaussian_noise(m, latent, rng);
            ForwardCache sampled =
                forward(model.generator, noise, labels, config.gen_dropout, rng, false);

            ForwardCache on_real =
                forward(model.discriminator, real_rows, labels, config.disc_dropout, rng, true);
            ForwardCache on_fake = forward(model.discriminator, sampled.output, labels,
                                           config.disc_dropout, rng, true);
            neural::BceResult real_bce = neural::bce_loss(on_real.output, constant_targets(m, 1.0));
            neural::BceResult fake_bce = neural::bce_loss(on_fake.output, constant_targets(m, 0.0));
            double d_loss = 0.5 * (real_bce.loss + fake_bce.loss);

            SubGrads disc_grads = backward(model.discriminator, labels, on_real, real_bce.grad);
            add_grads(disc_grads, backward(model.discriminator, labels, on_fake, fake_bce.grad));
            scale_grads(disc_grads, 0.5);
            adam_step(param_list(model.discriminator), grad_list(disc_grads), disc_state);

            // Generator step: fresh noise, push the updated discriminator
            // toward calling the fakes real.
            Matrix fresh_noise = gaussian_noise(m, latent, rng);
            ForwardCache gen_fwd =
                forward(model.generator, fresh_noise, labels, config.gen_dropout, rng, true);
            ForwardCache disc_fwd = forward(model.discriminator, gen_fwd.output, labels,
                                            config.disc_dropout, rng, true);
            neural::BceResult gen_bce = neural::bce_loss(disc_fwd.output, constant_targets(m, 1.0));
            double g_loss = gen_bce.loss;

            SubGrads through_disc =
                backward(model.discriminator, labels, disc_fwd, gen_bce.grad);
            SubGrads gen_grads =
                backward(model.generator, labels, gen_fwd, through_disc.main_input);
            adam_step(param_list(model.generator), grad_list(gen_grads), gen_state);

            if (!std::isfinite(d_loss) || !std::isfinite(g_loss)) {
                throw std::runtime_error("cgan train: non-finite loss at epoch " +
                                         std::to_string(epoch + 1));
            }
            d_loss_sum += d_loss * static_cast<double>(m);
            g_loss_sum += g_loss * static_cast<double>(m);
        }

        auto epoch_end = std::chrono::steady_clock::now();
        log.d_loss.push_back(d_loss_sum / static_cast<double>(n));
        log.g_loss.push_back(g_loss_sum / static_cast<double>(n));
        log.epoch_ms.push_back(
            std::chrono::duration<double, std::milli>(epoch_end - epoch_start).count());
    }
    return log;
}

tabular::LabeledDataset generate(const CganModel& model,
                                 const std::array<std::size_t, 2>& count_per_class, Rng& rng) {
    const std::size_t total = count_per_class[0] + count_per_class[1];
    std::vector<int> labels(total);
    std::fill(labels.begin() + static_cast<std::ptrdiff_t>(count_per_class[0]), labels.end(), 1);

    tabular::LabeledDataset out;
    out.origin = tabular::Origin::Synthetic;
    out.labels = labels;
    out.feature_names.reserve(model.feature_count);
    for (std::size_t j = 0; j < model.feature_count; ++j) {
        out.feature_names.push_back("f" + std::to_string(j));
    }
    if (total == 0) {
        out.features = Matrix(0, model.feature_count);
        return out;
    }

    Matrix noise = gaussian_noise(total, latent_width(model), rng);
    ForwardCache fwd = forward(model.generator, noise, labels, 0.0, rng, false);
    out.features = std::move(fwd.output);
    return out;
}

tabular::LabeledDataset synthesize_eval(const CganModel& model,
                                        const tabular::LabeledDataset& real_eval, Rng& rng) {
    if (real_eval.rows() == 0) {
        throw std::invalid_argument("synthesize_eval: empty evaluation set");
    }
    return generate(model, tabular::class_counts(real_eval), rng);
}

tabular::LabeledDataset binarize(const tabular::LabeledDataset& ds, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("binarize: threshold must lie in (0,1)");
    }
    tabular::LabeledDataset out = ds;
    for (double& v : out.features.data) v = v >= threshold ? 1.0 : 0.0;
    return out;
}

void save_model(const std::string& prefix, const CganModel& model) {
    std::vector<neural::NamedTensor> tensors;
    append_tensors(tensors, "gen", model.generator);
    append_tensors(tensors, "disc", model.discriminator);
    neural::save_tensors(prefix, tensors);
}

CganModel load_model(const std::string& prefix) {
    std::vector<neural::NamedTensor> tensors = neural::load_tensors(prefix);
    CganModel model;
    model.generator = subnetwork_from(tensors, "gen");
    model.discriminator = subnetwork_from(tensors, "disc");
    model.feature_count = model.generator.output.weights.cols;

    std::size_t disc_embed = model.discriminator.embedding.entries.cols;
    if (model.discriminator.block1.weights.rows != model.feature_count + disc_embed) {
        throw std::runtime_error("load_model: discriminator input width does not match "
                                 "generator output width");
    }
    return model;
}

std::uint64_t parameter_hash(const CganModel& model) {
    std::vector<neural::NamedTensor> tensors;
    append_tensors(tensors, "gen", model.generator);
    append_tensors(tensors, "disc", model.discriminator);

    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const neural::NamedTensor& t : tensors) {
        std::uint64_t dims[2] = {t.value.rows, t.value.cols};
        hash_bytes(h, dims, sizeof(dims));
        hash_bytes(h, t.value.data.data(), t.value.size() * sizeof(double));
    }
    return h;
}

double gradient_check(std::uint64_t seed, std::size_t feature_count, bool flip_sign) {
    CganConfig config;
    config.gen_neurons = 10;
    config.disc_neurons = 9;
    config.gen_dropout = 0.0;
    config.disc_dropout = 0.0;
    config.init_stddev = 0.4;
    config.latent_dim = 6;
    config.embed_dim = 4;
    config.seed = seed;
    CganModel model = build(config, feature_count);

    Rng rng = Rng(seed).child(0x6C);
    const std::size_t m = 5;
    Matrix real_rows(m, feature_count);
    for (double& v : real_rows.data) v = rng.uniform();
    std::vector<int> labels(m);
    for (std::size_t i = 0; i < m; ++i) labels[i] = static_cast<int>(i % 2);
    Matrix noise = gaussian_noise(m, config.latent_dim, rng);
    Matrix fresh_noise = gaussian_noise(m, config.latent_dim, rng);
    Matrix ones = constant_targets(m, 1.0);
    Matrix zeros = constant_targets(m, 0.0);
    Rng idle(0);

    // Discriminator loss against discriminator parameters.
    auto disc_loss = [&] {
        ForwardCache sampled = forward(model.generator, noise, labels, 0.0, idle, false);
        ForwardCache on_real = forward(model.discriminator, real_rows, labels, 0.0, idle, false);
        ForwardCache on_fake =
            forward(model.discriminator, sampled.output, labels, 0.0, idle, false);
        return 0.5 * (neural::bce_loss(on_real.output, ones).loss +
                      neural::bce_loss(on_fake.output, zeros).loss);
    };
    ForwardCache sampled = forward(model.generator, noise, labels, 0.0, idle, false);
    ForwardCache on_real = forward(model.discriminator, real_rows, labels, 0.0, idle, false);
    ForwardCache on_fake = forward(model.discriminator, sampled.output, labels, 0.0, idle, false);
    SubGrads disc_grads = backward(model.discriminator, labels, on_real,
                                   neural::bce_loss(on_real.output, ones).grad);
    add_grads(disc_grads, backward(model.discriminator, labels, on_fake,
                                   neural::bce_loss(on_fake.output, zeros).grad));
    scale_grads(disc_grads, 0.5);
    double disc_err = neural::finite_difference_check(
        disc_loss, param_list(model.discriminator), grad_list(disc_grads), 1e-5);

    // Generator loss, backpropagated through the discriminator, against
    // generator parameters.
    auto gen_loss = [&] {
        ForwardCache gen_fwd = forward(model.generator, fresh_noise, labels, 0.0, idle, false);
        ForwardCache disc_fwd =
            forward(model.discriminator, gen_fwd.output, labels, 0.0, idle, false);
        return neural::bce_loss(disc_fwd.output, ones).loss;
    };
    ForwardCache gen_fwd = forward(model.generator, fresh_noise, labels, 0.0, idle, false);
    ForwardCache disc_fwd = forward(model.discriminator, gen_fwd.output, labels, 0.0, idle, false);
    SubGrads through_disc = backward(model.discriminator, labels, disc_fwd,
                                     neural::bce_loss(disc_fwd.output, ones).grad);
    SubGrads gen_grads = backward(model.generator, labels, gen_fwd, through_disc.main_input);
    if (flip_sign) scale_in_place(gen_grads.block1.weights, -1.0);
    double gen_err = neural::finite_difference_check(gen_loss, param_list(model.generator),
                                                     grad_list(gen_grads), 1e-5);
    return std::max(disc_err, gen_err);
}

std::string train_log_to_csv(const TrainLog& log) {
    std::string out = "epoch,g_loss,d_loss,ms\n";
    char line[128];
    for (std::size_t i = 0; i < log.g_loss.size(); ++i) {
        std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g,%.3f\n", i + 1, log.g_loss[i],
                      log.d_loss[i], log.epoch_ms[i]);
        out += line;
    }
    return out;
}

}  // namespace syntab::cgan
