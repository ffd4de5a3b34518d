#include "mfcl/network.hpp"

#include <cmath>

#include "mfcl/errors.hpp"

namespace mfcl {

namespace {

void require_rows(const Matrix& m, std::size_t cols, const std::string& what) {
    if (m.cols() != cols) {
        throw DimensionError(what + ": expected " + std::to_string(cols) + " columns, got " +
                             m.shape_string());
    }
}

Matrix glorot(std::size_t out, std::size_t in, Rng& rng, double scale = 1.0) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    Matrix w(out, in);
    for (double& v : w.values()) {
        v = scale * rng.uniform(-limit, limit);
    }
    return w;
}

// Forward through the modulation MLP: ReLU on hidden layers, linear output.
Matrix modulation_forward(const MfclParams& params, const Matrix& m, std::vector<DenseCache>* caches) {
    Matrix h = m;
    const std::size_t depth = params.modulation.size();
    for (std::size_t k = 0; k < depth; ++k) {
        const DenseParams& layer = params.modulation[k];
        Matrix pre = add_row(matmul_bt(h, layer.weight), layer.bias);
        Matrix out = k + 1 == depth ? pre : activate(Activation::relu, pre);
        if (caches != nullptr) {
            caches->push_back(DenseCache{std::move(h), std::move(pre)});
        }
        h = std::move(out);
    }
    return h;
}

}  // namespace

LayerSpec LayerSpec::fc(std::size_t in, std::size_t out, Activation act) {
    LayerSpec s;
    s.kind = LayerKind::fc;
    s.in_dim = in;
    s.out_dim = out;
    s.activation = act;
    return s;
}

LayerSpec LayerSpec::mfcl(std::size_t in, std::size_t out, Activation act, std::size_t modulation_in,
                          std::vector<std::size_t> modulation_hidden) {
    LayerSpec s;
    s.kind = LayerKind::mfcl;
    s.in_dim = in;
    s.out_dim = out;
    s.activation = act;
    s.modulation_in = modulation_in;
    s.modulation_hidden = std::move(modulation_hidden);
    return s;
}

void NetworkSpec::validate() const {
    if (layers.empty()) {
        throw ConfigError("network: no layers");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        const std::string name = "network layer " + std::to_string(i);
        if (l.in_dim == 0 || l.out_dim == 0) {
            throw ConfigError(name + ": dimensions must be >= 1");
        }
        if (i > 0 && l.in_dim != layers[i - 1].out_dim) {
            throw ConfigError(name + ": input dim " + std::to_string(l.in_dim) +
                              " does not match previous output dim " + std::to_string(layers[i - 1].out_dim));
        }
        if (l.kind == LayerKind::mfcl) {
            if (i != 0) {
                throw ConfigError(name + ": an MFCL is only supported as the first layer");
            }
            if (l.modulation_in == 0) {
                throw ConfigError(name + ": modulation input dim must be >= 1");
            }
            for (std::size_t h : l.modulation_hidden) {
                if (h == 0) {
                    throw ConfigError(name + ": modulation hidden widths must be >= 1");
                }
            }
        }
    }
}

bool NetworkSpec::has_mfcl() const {
    return !layers.empty() && layers.front().kind == LayerKind::mfcl;
}

std::size_t NetworkSpec::input_dim() const {
    return layers.empty() ? 0 : layers.front().in_dim;
}

std::size_t NetworkSpec::output_dim() const {
    return layers.empty() ? 0 : layers.back().out_dim;
}

std::size_t NetworkSpec::modulation_dim() const {
    return has_mfcl() ? layers.front().modulation_in : 0;
}

std::vector<Matrix*> NetworkParams::tensors() {
    std::vector<Matrix*> out;
    for (LayerParams& layer : layers) {
        if (auto* d = std::get_if<DenseParams>(&layer)) {
            out.push_back(&d->weight);
            out.push_back(&d->bias);
        } else {
            for (DenseParams& m : std::get<MfclParams>(layer).modulation) {
                out.push_back(&m.weight);
                out.push_back(&m.bias);
            }
        }
    }
    return out;
}

std::vector<const Matrix*> NetworkParams::tensors() const {
    std::vector<const Matrix*> out;
    for (Matrix* m : const_cast<NetworkParams*>(this)->tensors()) {
        out.push_back(m);
    }
    return out;
}

std::size_t NetworkParams::parameter_count() const {
    std::size_t n = 0;
    for (const Matrix* m : tensors()) {
        n += m->size();
    }
    return n;
}

std::vector<double> NetworkParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const Matrix* m : tensors()) {
        flat.insert(flat.end(), m->values().begin(), m->values().end());
    }
    return flat;
}

void NetworkParams::assign(std::span<const double> flat) {
    if (flat.size() != parameter_count()) {
        throw DimensionError("NetworkParams::assign: " + std::to_string(flat.size()) + " values for " +
                             std::to_string(parameter_count()) + " parameters");
    }
    std::size_t offset = 0;
    for (Matrix* m : tensors()) {
        auto v = m->values();
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                  flat.begin() + static_cast<std::ptrdiff_t>(offset + v.size()), v.begin());
        offset += v.size();
    }
}

NetworkParams zeros_like(const NetworkParams& p) {
    NetworkParams z = p;
    for (Matrix* m : z.tensors()) {
        *m = Matrix(m->rows(), m->cols());
    }
    return z;
}

void check_consistent(const NetworkSpec& spec, const NetworkParams& params) {
    if (spec.layers.size() != params.layers.size()) {
        throw DimensionError("network: spec has " + std::to_string(spec.layers.size()) +
                             " layers, params have " + std::to_string(params.layers.size()));
    }
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        const std::string name = "network layer " + std::to_string(i);
        if (l.kind == LayerKind::fc) {
            const auto* d = std::get_if<DenseParams>(&params.layers[i]);
            if (d == nullptr || d->weight.rows() != l.out_dim || d->weight.cols() != l.in_dim ||
                d->bias.rows() != 1 || d->bias.cols() != l.out_dim) {
                throw DimensionError(name + ": dense parameters do not match spec");
            }
        } else {
            const auto* m = std::get_if<MfclParams>(&params.layers[i]);
            if (m == nullptr || m->in_dim != l.in_dim || m->out_dim != l.out_dim ||
                m->modulation.size() != l.modulation_hidden.size() + 1) {
                throw DimensionError(name + ": MFCL parameters do not match spec");
            }
            std::size_t prev = l.modulation_in;
            for (std::size_t k = 0; k < m->modulation.size(); ++k) {
                const std::size_t width =
                    k < l.modulation_hidden.size() ? l.modulation_hidden[k] : l.generated_size();
                const DenseParams& d = m->modulation[k];
                if (d.weight.rows() != width || d.weight.cols() != prev || d.bias.rows() != 1 ||
                    d.bias.cols() != width) {
                    throw DimensionError(name + ": modulation layer " + std::to_string(k) +
                                         " does not match spec");
                }
                prev = width;
            }
        }
    }
}

NetworkParams init_params(const NetworkSpec& spec, Rng& rng) {
    spec.validate();
    NetworkParams params;
    for (const LayerSpec& l : spec.layers) {
        if (l.kind == LayerKind::fc) {
            params.layers.emplace_back(DenseParams{glorot(l.out_dim, l.in_dim, rng), Matrix(1, l.out_dim)});
            continue;
        }
        MfclParams m;
        m.in_dim = l.in_dim;
        m.out_dim = l.out_dim;
        std::size_t prev = l.modulation_in;
        for (std::size_t width : l.modulation_hidden) {
            m.modulation.push_back(DenseParams{glorot(width, prev, rng), Matrix(1, width)});
            prev = width;
        }
        const std::size_t generated = l.generated_size();
        DenseParams last{glorot(generated, prev, rng, 0.1), Matrix(1, generated)};
        const Matrix base = glorot(l.out_dim, l.in_dim, rng);
        for (std::size_t o = 0; o < l.out_dim; ++o) {
            for (std::size_t i = 0; i < l.in_dim; ++i) {
                last.bias(0, o * (l.in_dim + 1) + i) = base(o, i);
            }
        }
        m.modulation.push_back(std::move(last));
        params.layers.emplace_back(std::move(m));
    }
    return params;
}

DenseForward dense_forward(const LayerSpec& spec, const DenseParams& params, const Matrix& input) {
    require_rows(input, spec.in_dim, "dense layer input");
    DenseForward f;
    f.cache.input = input;
    f.cache.pre = add_row(matmul_bt(input, params.weight), params.bias);
    f.output = activate(spec.activation, f.cache.pre);
    return f;
}

DenseGradients dense_backward(const LayerSpec& spec, const DenseParams& params, const DenseCache& cache,
                              const Matrix& upstream) {
    if (upstream.rows() != cache.pre.rows() || upstream.cols() != cache.pre.cols()) {
        throw UsageError("dense backward: upstream " + upstream.shape_string() + " does not match cache " +
                         cache.pre.shape_string());
    }
    const Matrix delta = hadamard(upstream, activate_derivative(spec.activation, cache.pre));
    DenseGradients g;
    g.params.weight = matmul_at(delta, cache.input);
    g.params.bias = column_sums(delta);
    g.input = matmul(delta, params.weight);
    return g;
}

Matrix generate_weights(const MfclParams& params, const Matrix& modulation) {
    if (params.modulation.empty()) {
        throw DimensionError("MFCL: empty modulation network");
    }
    require_rows(modulation, params.modulation.front().weight.cols(), "MFCL modulation input");
    return modulation_forward(params, modulation, nullptr);
}

MfclForward mfcl_forward(const LayerSpec& spec, const MfclParams& params, const Matrix& input,
                         const Matrix& modulation) {
    const std::size_t in = params.in_dim;
    const std::size_t out = params.out_dim;
    if (spec.in_dim != in || spec.out_dim != out) {
        throw DimensionError("MFCL layer: parameters " + std::to_string(out) + "x" + std::to_string(in) +
                             " do not match spec");
    }
    require_rows(input, in, "MFCL layer input");
    require_rows(modulation, params.modulation.front().weight.cols(), "MFCL layer modulation");
    if (input.rows() != modulation.rows()) {
        throw DimensionError("MFCL layer: input batch " + std::to_string(input.rows()) +
                             " != modulation batch " + std::to_string(modulation.rows()));
    }
    MfclForward f;
    f.cache.valid = true;
    f.cache.in_dim = in;
    f.cache.out_dim = out;
    f.cache.input = input;
    f.cache.modulation_input = modulation;
    f.cache.generated = modulation_forward(params, modulation, &f.cache.modulation);
    f.cache.pre = Matrix(input.rows(), out);
    const std::size_t stride = in + 1;
    for (std::size_t s = 0; s < input.rows(); ++s) {
        auto x = input.row(s);
        auto w = f.cache.generated.row(s);
        for (std::size_t o = 0; o < out; ++o) {
            const double* wrow = w.data() + o * stride;
            double acc = 0.0;
            for (std::size_t i = 0; i < in; ++i) {
                acc += wrow[i] * x[i];
            }
            f.cache.pre(s, o) = acc + wrow[in];
        }
    }
    f.cache.pre.check_finite("MFCL layer");
    f.output = activate(spec.activation, f.cache.pre);
    return f;
}

MfclGradients mfcl_backward(const LayerSpec& spec, const MfclParams& params, const MfclCache& cache,
                            const Matrix& upstream) {
    if (!cache.valid) {
        throw UsageError("MFCL backward: cache was not produced by a forward pass");
    }
    if (cache.in_dim != params.in_dim || cache.out_dim != params.out_dim ||
        cache.modulation.size() != params.modulation.size()) {
        throw UsageError("MFCL backward: cache does not match layer parameters");
    }
    if (upstream.rows() != cache.pre.rows() || upstream.cols() != cache.pre.cols()) {
        throw UsageError("MFCL backward: upstream " + upstream.shape_string() + " does not match cache " +
                         cache.pre.shape_string());
    }
    const std::size_t in = params.in_dim;
    const std::size_t out = params.out_dim;
    const std::size_t stride = in + 1;
    const std::size_t batch = upstream.rows();
    const Matrix delta = hadamard(upstream, activate_derivative(spec.activation, cache.pre));

    MfclGradients g;
    g.input = Matrix(batch, in);
    Matrix d_generated(batch, out * stride);
    for (std::size_t s = 0; s < batch; ++s) {
        auto x = cache.input.row(s);
        auto w = cache.generated.row(s);
        auto dx = g.input.row(s);
        auto dw = d_generated.row(s);
        for (std::size_t o = 0; o < out; ++o) {
            const double d = delta(s, o);
            const double* wrow = w.data() + o * stride;
            double* dwrow = dw.data() + o * stride;
            for (std::size_t i = 0; i < in; ++i) {
                dx[i] += wrow[i] * d;
                dwrow[i] = d * x[i];
            }
            dwrow[in] = d;
        }
    }

    g.params.in_dim = in;
    g.params.out_dim = out;
    g.params.modulation.resize(params.modulation.size());
    Matrix up = std::move(d_generated);
    for (std::size_t k = params.modulation.size(); k-- > 0;) {
        const DenseCache& c = cache.modulation[k];
        const Matrix d = k + 1 == params.modulation.size()
                             ? up
                             : hadamard(up, activate_derivative(Activation::relu, c.pre));
        g.params.modulation[k].weight = matmul_at(d, c.input);
        g.params.modulation[k].bias = column_sums(d);
        up = matmul(d, params.modulation[k].weight);
    }
    g.modulation = std::move(up);
    return g;
}

NetworkForward network_forward(const NetworkSpec& spec, const NetworkParams& params, const Matrix& input,
                               const Matrix* modulation) {
    check_consistent(spec, params);
    if (spec.has_mfcl() && modulation == nullptr) {
        throw ConfigError("network: spec contains an MFCL but no modulation batch was given");
    }
    NetworkForward f;
    Matrix h = input;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        if (l.kind == LayerKind::fc) {
            DenseForward d = dense_forward(l, std::get<DenseParams>(params.layers[i]), h);
            f.caches.emplace_back(std::move(d.cache));
            h = std::move(d.output);
        } else {
            MfclForward m = mfcl_forward(l, std::get<MfclParams>(params.layers[i]), h, *modulation);
            f.caches.emplace_back(std::move(m.cache));
            h = std::move(m.output);
        }
    }
    f.output = std::move(h);
    return f;
}

NetworkGradients network_backward(const NetworkSpec& spec, const NetworkParams& params,
                                  const NetworkForward& forward, const Matrix& upstream) {
    check_consistent(spec, params);
    if (forward.caches.size() != spec.layers.size()) {
        throw UsageError("network backward: cache depth does not match spec");
    }
    NetworkGradients g;
    g.params.layers.resize(spec.layers.size());
    Matrix up = upstream;
    for (std::size_t i = spec.layers.size(); i-- > 0;) {
        const LayerSpec& l = spec.layers[i];
        if (l.kind == LayerKind::fc) {
            const auto* cache = std::get_if<DenseCache>(&forward.caches[i]);
            if (cache == nullptr) {
                throw UsageError("network backward: cache kind mismatch at layer " + std::to_string(i));
            }
            DenseGradients d = dense_backward(l, std::get<DenseParams>(params.layers[i]), *cache, up);
            g.params.layers[i] = std::move(d.params);
            up = std::move(d.input);
        } else {
            const auto* cache = std::get_if<MfclCache>(&forward.caches[i]);
            if (cache == nullptr) {
                throw UsageError("network backward: cache kind mismatch at layer " + std::to_string(i));
            }
            MfclGradients m = mfcl_backward(l, std::get<MfclParams>(params.layers[i]), *cache, up);
            g.params.layers[i] = std::move(m.params);
            g.modulation = std::move(m.modulation);
            up = std::move(m.input);
        }
    }
    g.input = std::move(up);
    return g;
}

Matrix predict(const NetworkSpec& spec, const NetworkParams& params, const Matrix& input,
               const Matrix* modulation) {
    return network_forward(spec, params, input, modulation).output;
}

WeightDeltaTable weight_delta_table(const MfclParams& params, std::span<const double> baseline,
                                    std::span<const std::vector<double>> probes) {
    WeightDeltaTable t;
    t.probes = probes.size();
    t.out_dim = params.out_dim;
    t.in_dim = params.in_dim;
    const Matrix base = generate_weights(params, Matrix::row_vector(baseline));
    t.baseline.assign(base.values().begin(), base.values().end());
    t.percent.reserve(probes.size() * base.cols());
    for (const std::vector<double>& probe : probes) {
        if (probe.size() != baseline.size()) {
            throw DimensionError("weight_delta_table: probe width " + std::to_string(probe.size()) +
                                 " != baseline width " + std::to_string(baseline.size()));
        }
        const Matrix w = generate_weights(params, Matrix::row_vector(probe));
        for (std::size_t c = 0; c < w.cols(); ++c) {
            const double b = base(0, c);
            if (std::abs(b) < 1e-9) {
                t.percent.emplace_back(std::nullopt);
            } else {
                t.percent.emplace_back(100.0 * (w(0, c) - b) / std::abs(b));
            }
        }
    }
    return t;
}

std::string to_string(LayerKind kind) {
    return kind == LayerKind::mfcl ? "mfcl" : "fc";
}

}  // namespace mfcl
