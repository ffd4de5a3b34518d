#include <string>

#include "doctest.h"
#include "mfcl/errors.hpp"
#include "mfcl/network.hpp"
#include "mfcl/serialize.hpp"
#include "test_util.hpp"

using namespace mfcl;

namespace {

// MFCL whose modulation net ignores m: output layer weights zero, bias = c.
MfclParams constant_mfcl(const LayerSpec& spec, const Matrix& weight, const Matrix& bias, Rng& rng) {
    NetworkSpec ns;
    ns.layers = {spec};
    MfclParams m = std::get<MfclParams>(init_params(ns, rng).layers[0]);
    DenseParams& last = m.modulation.back();
    last.weight = Matrix(last.weight.rows(), last.weight.cols());
    for (std::size_t o = 0; o < spec.out_dim; ++o) {
        for (std::size_t i = 0; i < spec.in_dim; ++i) {
            last.bias(0, o * (spec.in_dim + 1) + i) = weight(o, i);
        }
        last.bias(0, o * (spec.in_dim + 1) + spec.in_dim) = bias(0, o);
    }
    return m;
}

}  // namespace

TEST_CASE("zero modulation output gives f(0)") {
    Rng rng(1);
    const LayerSpec spec = LayerSpec::mfcl(3, 2, Activation::sigmoid, 4, {5});
    NetworkSpec ns;
    ns.layers = {spec};
    MfclParams m = std::get<MfclParams>(init_params(ns, rng).layers[0]);
    m.modulation.back().weight = Matrix(m.modulation.back().weight.rows(), m.modulation.back().weight.cols());
    m.modulation.back().bias = Matrix(1, spec.generated_size());
    const MfclForward f = mfcl_forward(spec, m, testing::random_matrix(6, 3, rng), testing::random_matrix(6, 4, rng));
    CHECK(f.output == Matrix(6, 2, 0.5));
}

TEST_CASE("constant modulation reduces to a plain dense layer") {
    Rng rng(2);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t in = 1 + rng.index(6);
        const std::size_t out = 1 + rng.index(6);
        const Activation act = trial % 3 == 0 ? Activation::relu : (trial % 3 == 1 ? Activation::sigmoid : Activation::linear);
        const LayerSpec mspec = LayerSpec::mfcl(in, out, act, 3, {4, 2});
        const LayerSpec fspec = LayerSpec::fc(in, out, act);
        const DenseParams dense{testing::random_matrix(out, in, rng), testing::random_matrix(1, out, rng)};
        const MfclParams mod = constant_mfcl(mspec, dense.weight, dense.bias, rng);
        const Matrix x = testing::random_matrix(7, in, rng);
        const Matrix m = testing::random_matrix(7, 3, rng);
        const MfclForward mf = mfcl_forward(mspec, mod, x, m);
        const DenseForward df = dense_forward(fspec, dense, x);
        CHECK(mf.output == df.output);
        const Matrix up = testing::random_matrix(7, out, rng);
        const MfclGradients mg = mfcl_backward(mspec, mod, mf.cache, up);
        const DenseGradients dg = dense_backward(fspec, dense, df.cache, up);
        CHECK(max_abs_diff(mg.input, dg.input) <= 1e-12);
    }
}

TEST_CASE("hand-evaluated 1x1 MFCL") {
    // Single linear modulation layer emitting [w, b] = [2m, 0].
    const LayerSpec spec = LayerSpec::mfcl(1, 1, Activation::linear, 1, {});
    MfclParams params;
    params.in_dim = 1;
    params.out_dim = 1;
    params.modulation.push_back(DenseParams{Matrix{{2.0}, {0.0}}, Matrix{{0.0, 0.0}}});
    const MfclForward f = mfcl_forward(spec, params, Matrix{{3.0}}, Matrix{{1.0}});
    CHECK(f.output(0, 0) == 6.0);

    const MfclGradients g = mfcl_backward(spec, params, f.cache, Matrix{{1.0}});
    CHECK(g.params.modulation[0].weight(0, 0) == 3.0);
    CHECK(g.params.modulation[0].weight(1, 0) == 1.0);
    CHECK(g.input(0, 0) == 2.0);
    CHECK(g.modulation(0, 0) == 6.0);

    const MfclGradients zero = mfcl_backward(spec, params, f.cache, Matrix{{0.0}});
    const NetworkParams zero_grads{{zero.params}};
    for (const Matrix* t : zero_grads.tensors()) {
        CHECK(*t == Matrix(t->rows(), t->cols()));
    }
}

TEST_CASE("MFCL backward rejects stale or mismatched caches") {
    Rng rng(3);
    const LayerSpec spec = LayerSpec::mfcl(2, 2, Activation::relu, 2, {3});
    NetworkSpec ns;
    ns.layers = {spec};
    const MfclParams params = std::get<MfclParams>(init_params(ns, rng).layers[0]);
    CHECK_THROWS_AS(mfcl_backward(spec, params, MfclCache{}, Matrix(1, 2)), UsageError);
    const MfclForward f = mfcl_forward(spec, params, Matrix(3, 2), Matrix(3, 2));
    CHECK_THROWS_AS(mfcl_backward(spec, params, f.cache, Matrix(4, 2)), UsageError);
}

TEST_CASE("MFCL shape errors name the layer") {
    Rng rng(4);
    NetworkSpec ns;
    ns.layers = {LayerSpec::mfcl(2, 2, Activation::relu, 3, {3}), LayerSpec::fc(2, 1, Activation::sigmoid)};
    const NetworkParams params = init_params(ns, rng);
    const Matrix m(4, 3);
    try {
        network_forward(ns, params, Matrix(4, 5), &m);
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        CHECK(std::string(e.what()).find("MFCL layer") != std::string::npos);
    }
    CHECK_THROWS_AS(network_forward(ns, params, Matrix(4, 2), nullptr), ConfigError);
    const Matrix short_m(3, 3);
    CHECK_THROWS_AS(network_forward(ns, params, Matrix(4, 2), &short_m), DimensionError);
}

TEST_CASE("spec validation") {
    NetworkSpec late;
    late.layers = {LayerSpec::fc(3, 2, Activation::relu), LayerSpec::mfcl(2, 1, Activation::sigmoid, 2, {4})};
    CHECK_THROWS_AS(late.validate(), ConfigError);
    NetworkSpec broken;
    broken.layers = {LayerSpec::fc(3, 2, Activation::relu), LayerSpec::fc(4, 1, Activation::sigmoid)};
    CHECK_THROWS_AS(broken.validate(), ConfigError);
    NetworkSpec zero;
    zero.layers = {LayerSpec::fc(0, 2, Activation::relu)};
    CHECK_THROWS_AS(zero.validate(), ConfigError);
}

TEST_CASE("sigmoid output network emits probabilities") {
    Rng rng(5);
    NetworkSpec ns;
    ns.layers = {LayerSpec::fc(6, 8, Activation::relu), LayerSpec::fc(8, 4, Activation::relu),
                 LayerSpec::fc(4, 1, Activation::sigmoid)};
    const NetworkParams params = init_params(ns, rng);
    const Matrix out = predict(ns, params, testing::random_matrix(50, 6, rng, 3.0), nullptr);
    for (double v : out.values()) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("all-FC network equals the composition of dense layers") {
    Rng rng(6);
    NetworkSpec ns;
    ns.layers = {LayerSpec::fc(3, 4, Activation::relu), LayerSpec::fc(4, 1, Activation::sigmoid)};
    const NetworkParams params = init_params(ns, rng);
    const Matrix x = testing::random_matrix(5, 3, rng);
    const Matrix h = dense_forward(ns.layers[0], std::get<DenseParams>(params.layers[0]), x).output;
    const Matrix y = dense_forward(ns.layers[1], std::get<DenseParams>(params.layers[1]), h).output;
    CHECK(predict(ns, params, x, nullptr) == y);
}

TEST_CASE("random network gradients match finite differences") {
    Rng rng(99);
    for (int draw = 0; draw < 20; ++draw) {
        const LossKind loss = draw % 2 == 0 ? LossKind::bce : LossKind::masked_mse;
        const testing::Problem p = testing::random_problem(rng, 8, 16, loss);
        const GradcheckReport r = p.check();
        CAPTURE(draw);
        CAPTURE(r.worst_index);
        CAPTURE(r.analytic);
        CAPTURE(r.numeric);
        CHECK(r.max_relative_error < 1e-5);
    }
}

TEST_CASE("full MFCL network gradcheck on 16 samples") {
    Rng rng(17);
    testing::Problem p;
    p.spec.layers = {LayerSpec::mfcl(4, 3, Activation::sigmoid, 8, {5, 5}), LayerSpec::fc(3, 2, Activation::relu),
                     LayerSpec::fc(2, 1, Activation::sigmoid)};
    p.params = init_params(p.spec, rng);
    p.input = testing::random_matrix(16, 4, rng);
    p.modulation = hconcat(testing::random_binary(16, 4, rng), p.input);
    p.target = testing::random_binary(16, 1, rng);
    p.mask = Matrix(16, 1, 1.0);
    CHECK(p.check().max_relative_error < 1e-5);
}

TEST_CASE("batch forward equals per-sample forward") {
    Rng rng(21);
    for (int draw = 0; draw < 10; ++draw) {
        const testing::Problem p = testing::random_problem(rng, 8, 16, LossKind::bce);
        const Matrix batch = predict(p.spec, p.params, p.input, p.modulation_ptr());
        for (std::size_t r = 0; r < p.input.rows(); ++r) {
            const Matrix x = slice_rows(p.input, r, 1);
            const Matrix m = slice_rows(p.modulation, r, 1);
            const Matrix single = predict(p.spec, p.params, x, p.spec.has_mfcl() ? &m : nullptr);
            CHECK(max_abs_diff(single, slice_rows(batch, r, 1)) <= 1e-12);
        }
    }
}

TEST_CASE("weight delta table") {
    Rng rng(31);
    const LayerSpec spec = LayerSpec::mfcl(3, 2, Activation::relu, 4, {6});
    NetworkSpec ns;
    ns.layers = {spec};
    const MfclParams params = std::get<MfclParams>(init_params(ns, rng).layers[0]);
    const std::vector<double> base{0, 0, 0, 0};
    const std::vector<std::vector<double>> same{base};
    const WeightDeltaTable t = weight_delta_table(params, base, same);
    REQUIRE(t.percent.size() == spec.generated_size());
    for (std::size_t c = 0; c < t.percent.size(); ++c) {
        if (t.percent[c]) {
            CHECK(*t.percent[c] == 0.0);
        }
    }
    // Bias column of the initialisation is zero, so it is undefined.
    CHECK_FALSE(t.at(0, 0, 3).has_value());
    CHECK(t.at(0, 0, 0).has_value());

    const MfclParams constant = constant_mfcl(spec, testing::random_matrix(2, 3, rng), Matrix{{1.0, -1.0}}, rng);
    const std::vector<std::vector<double>> probes{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 5, -3}};
    const WeightDeltaTable tc = weight_delta_table(constant, base, probes);
    for (const auto& cell : tc.percent) {
        REQUIRE(cell.has_value());
        CHECK(*cell == 0.0);
    }
    const std::vector<std::vector<double>> bad{{1, 0}};
    CHECK_THROWS_AS(weight_delta_table(params, base, bad), DimensionError);
}

TEST_CASE("model documents round-trip bit-exactly") {
    Rng rng(41);
    for (int draw = 0; draw < 10; ++draw) {
        const testing::Problem p = testing::random_problem(rng, 8, 4, LossKind::bce);
        const std::string text = model_to_json(p.spec, p.params).dump();
        const SavedModel back = model_from_json(nlohmann::json::parse(text));
        CHECK(back.spec == p.spec);
        CHECK(back.params == p.params);
    }
}

TEST_CASE("model documents reject unknown versions") {
    Rng rng(42);
    const testing::Problem p = testing::random_problem(rng, 4, 2, LossKind::bce);
    nlohmann::json doc = model_to_json(p.spec, p.params);
    doc["version"] = 99;
    CHECK_THROWS_AS(model_from_json(doc), ConfigError);
}

TEST_CASE("MFCL initialisation approximates a dense initialisation") {
    Rng rng(51);
    NetworkSpec ns;
    ns.layers = {LayerSpec::mfcl(10, 4, Activation::relu, 20, {8, 8})};
    const NetworkParams params = init_params(ns, rng);
    const MfclParams& m = std::get<MfclParams>(params.layers[0]);
    const Matrix w = generate_weights(m, Matrix(1, 20));
    const double limit = std::sqrt(6.0 / 14.0);
    for (std::size_t o = 0; o < 4; ++o) {
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(std::abs(w(0, o * 11 + i)) <= limit + 1e-12);
        }
    }
}
