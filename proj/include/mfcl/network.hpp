#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mfcl/activation.hpp"
#include "mfcl/matrix.hpp"
#include "mfcl/rng.hpp"

namespace mfcl {

enum class LayerKind { fc, mfcl };

struct LayerSpec {
    LayerKind kind = LayerKind::fc;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Activation activation = Activation::relu;
    // MFCL only.
    std::vector<std::size_t> modulation_hidden;
    std::size_t modulation_in = 0;

    static LayerSpec fc(std::size_t in, std::size_t out, Activation act);
    static LayerSpec mfcl(std::size_t in, std::size_t out, Activation act, std::size_t modulation_in,
                          std::vector<std::size_t> modulation_hidden);

    // Width of the modulation network output: out x (in + 1).
    std::size_t generated_size() const { return out_dim * (in_dim + 1); }

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkSpec {
    std::vector<LayerSpec> layers;

    // Throws ConfigError on zero dims, dimension breaks between layers, or an
    // MFCL anywhere but the first layer.
    void validate() const;
    bool has_mfcl() const;
    std::size_t input_dim() const;
    std::size_t output_dim() const;
    std::size_t modulation_dim() const;

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

// Plain dense layer: weight is out x in, bias is 1 x out.
struct DenseParams {
    Matrix weight;
    Matrix bias;

    friend bool operator==(const DenseParams&, const DenseParams&) = default;
};

// Modulation MLP of an MFCL: ReLU hidden layers, linear output of width
// out x (in + 1). Each output row reshapes row-major into [W_mod | b_mod].
struct MfclParams {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::vector<DenseParams> modulation;

    friend bool operator==(const MfclParams&, const MfclParams&) = default;
};

using LayerParams = std::variant<DenseParams, MfclParams>;

struct NetworkParams {
    std::vector<LayerParams> layers;

    std::vector<Matrix*> tensors();
    std::vector<const Matrix*> tensors() const;
    std::size_t parameter_count() const;
    std::vector<double> flatten() const;
    // Inverse of flatten; throws DimensionError on a size mismatch.
    void assign(std::span<const double> flat);

    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

NetworkParams zeros_like(const NetworkParams& p);

// Throws DimensionError when params do not match spec layer by layer.
void check_consistent(const NetworkSpec& spec, const NetworkParams& params);

// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero. The MFCL
// output layer is scaled by 0.1 and its bias is set to a freshly drawn dense
// initialisation (bias column zero), so the initial W_mod is close to a plain
// FC initialisation.
NetworkParams init_params(const NetworkSpec& spec, Rng& rng);

struct DenseCache {
    Matrix input;
    Matrix pre;
};

struct MfclCache {
    bool valid = false;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Matrix input;
    Matrix modulation_input;
    std::vector<DenseCache> modulation;
    Matrix generated;
    Matrix pre;
};

struct DenseForward {
    Matrix output;
    DenseCache cache;
};

struct MfclForward {
    Matrix output;
    MfclCache cache;
};

struct DenseGradients {
    DenseParams params;
    Matrix input;
};

struct MfclGradients {
    MfclParams params;
    Matrix input;
    // d loss / d m. Modulating signals are inputs, so trainers discard this.
    Matrix modulation;
};

DenseForward dense_forward(const LayerSpec& spec, const DenseParams& params, const Matrix& input);
DenseGradients dense_backward(const LayerSpec& spec, const DenseParams& params, const DenseCache& cache,
                              const Matrix& upstream);

// Batch x (out * (in + 1)) matrix of per-sample generated weights.
Matrix generate_weights(const MfclParams& params, const Matrix& modulation);

MfclForward mfcl_forward(const LayerSpec& spec, const MfclParams& params, const Matrix& input,
                         const Matrix& modulation);
MfclGradients mfcl_backward(const LayerSpec& spec, const MfclParams& params, const MfclCache& cache,
                            const Matrix& upstream);

struct NetworkForward {
    Matrix output;
    std::vector<std::variant<DenseCache, MfclCache>> caches;
};

struct NetworkGradients {
    NetworkParams params;
    Matrix input;
    Matrix modulation;
};

// modulation must be non-null iff the spec contains an MFCL layer.
NetworkForward network_forward(const NetworkSpec& spec, const NetworkParams& params, const Matrix& input,
                               const Matrix* modulation);
NetworkGradients network_backward(const NetworkSpec& spec, const NetworkParams& params,
                                  const NetworkForward& forward, const Matrix& upstream);

Matrix predict(const NetworkSpec& spec, const NetworkParams& params, const Matrix& input,
               const Matrix* modulation);

// Percentage change of the generated [W_mod | b_mod] for each probe signal
// relative to the baseline signal. Cells whose baseline magnitude is below
// 1e-9 are undefined (nullopt).
struct WeightDeltaTable {
    std::size_t probes = 0;
    std::size_t out_dim = 0;
    std::size_t in_dim = 0;
    std::vector<double> baseline;
    std::vector<std::optional<double>> percent;

    std::optional<double> at(std::size_t probe, std::size_t out, std::size_t in) const {
        return percent[probe * out_dim * (in_dim + 1) + out * (in_dim + 1) + in];
    }
};

WeightDeltaTable weight_delta_table(const MfclParams& params, std::span<const double> baseline,
                                    std::span<const std::vector<double>> probes);

std::string to_string(LayerKind kind);

}  // namespace mfcl
