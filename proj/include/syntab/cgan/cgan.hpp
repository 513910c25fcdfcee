#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "syntab/neural/layers.hpp"
#include "syntab/rng.hpp"
#include "syntab/tabular/dataset.hpp"

namespace syntab::cgan {

struct CganConfig {
    std::size_t epochs = 300;
    std::size_t batch_size = 256;
    std::size_t gen_neurons = 512;
    std::size_t disc_neurons = 256;
    double gen_dropout = 0.2;
    double disc_dropout = 0.4;
    double init_stddev = 0.5;
    std::size_t latent_dim = 128;
    std::size_t embed_dim = 32;
    std::uint64_t seed = 0;
};

// Throws invalid_argument naming the offending field.
void validate(const CganConfig& config);

// Label embedding followed by two LeakyReLU/dropout blocks of equal width
// and a sigmoid dense head. The generator's head is feature_count wide, the
// discriminator's is a single unit.
struct SubNetwork {
    neural::EmbeddingTable embedding;
    neural::DenseLayer block1;
    neural::DenseLayer block2;
    neural::DenseLayer output;
};

struct CganModel {
    SubNetwork generator;
    SubNetwork discriminator;
    std::size_t feature_count = 0;
};

struct TrainLog {
    std::vector<double> g_loss;
    std::vector<double> d_loss;
    std::vector<double> epoch_ms;
};

// Generator input is latent_dim + embedding width, discriminator input is
// feature_count + embedding width. The embedding width is embed_dim clamped
// to each sub-network's own block width. All weights are drawn from
// N(0, init_stddev^2) seeded by config.seed.
CganModel build(const CganConfig& config, std::size_t feature_count);

// Alternating updates, one discriminator step then one generator step per
// batch. The discriminator trains on the real batch (target 1) and an
// equally sized, label-matched generated batch (target 0); its loss is the
// mean of the two cross-entropies. The generator then pushes the
// discriminator's output on freshly sampled fakes toward 1. Each epoch is a
// full pass over real_train in an order shuffled from `rng`.
// Throws runtime_error naming the epoch if a loss goes non-finite.
TrainLog train(CganModel& model, const tabular::LabeledDataset& real_train,
               const CganConfig& config, Rng& rng);

// count_per_class[0] rows of class 0 followed by count_per_class[1] rows of
// class 1, sampled from fresh latent noise. Dropout is inactive; values lie
// in (0,1) by the sigmoid head.
tabular::LabeledDataset generate(const CganModel& model,
                                 const std::array<std::size_t, 2>& count_per_class, Rng& rng);

// Synthetic counterpart of an evaluation fold: per-class counts copied from
// real_eval, rows sampled from noise. real_eval never touches the model.
tabular::LabeledDataset synthesize_eval(const CganModel& model,
                                        const tabular::LabeledDataset& real_eval, Rng& rng);

// Maps every feature to 0/1; values >= threshold round up, so an exact 0.5
// becomes 1 under the default. threshold must lie strictly inside (0,1).
tabular::LabeledDataset binarize(const tabular::LabeledDataset& ds, double threshold = 0.5);

// Writes/reads <prefix>.bin and <prefix>.json via the tensor container.
void save_model(const std::string& prefix, const CganModel& model);
CganModel load_model(const std::string& prefix);

// FNV-1a over every parameter tensor's shape and raw bytes, in save order.
// Unchanged hash before/after an operation proves the parameters were not
// touched.
std::uint64_t parameter_hash(const CganModel& model);

std::string train_log_to_csv(const TrainLog& log);

// Builds a small randomized model (feature_count columns, narrow layers)
// from the seed, evaluates both training losses once with dropout inactive,
// and compares every analytic parameter gradient against central
// differences: the discriminator loss against the discriminator's
// parameters, the generator loss against the generator's. Returns the worst
// relative error over both passes. flip_sign negates one analytic gradient
// so a harness can demonstrate the check actually bites.
double gradient_check(std::uint64_t seed, std::size_t feature_count = 8, bool flip_sign = false);

}  // namespace syntab::cgan
