#include <doctest.h>

#include <cmath>

#include "scgadj/simulate.hpp"
#include "support.hpp"

using namespace scgadj;
using namespace testing_support;

namespace {

LinearModel single_edge(double coef) {
    const auto g = Scg::build({"X", "Y"}, {{"X", "Y"}});
    FtDagTemplate t{g, 1, {LagMask(0b10)}};
    return {t, {{{1, coef}}}, {1.0, 1.0}};
}

double sample_cov(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
    ma /= a.size();
    mb /= b.size();
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / (a.size() - 1);
}

}  // namespace

TEST_CASE("model sampling") {
    const auto t = make_template(fig2a(), 1);
    const auto a = sample_linear_model(t, 5);
    const auto b = sample_linear_model(t, 5);
    CHECK(a.coefficients.size() == b.coefficients.size());
    for (std::size_t i = 0; i < a.coefficients.size(); ++i)
        for (std::size_t k = 0; k < a.coefficients[i].size(); ++k)
            CHECK(a.coefficients[i][k].value == b.coefficients[i][k].value);
    std::size_t pairs = 0;
    for (auto m : t.lags) pairs += lags_of(m).size();
    CHECK(a.coefficient_count() == pairs);
    for (const auto& c : a.coefficients)
        for (const auto& v : c) {
            CHECK(std::abs(v.value) >= 0.1);
            CHECK(std::abs(v.value) <= 0.9);
        }
    CHECK_NOTHROW(validate_model(a));
}

TEST_CASE("sampled models stay bounded") {
    const auto t = make_template(fig5(), 1, {{{"Y", "Z"}, {1}}});
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto m = sample_linear_model(t, s);
        CHECK(spectral_radius(m) < 0.95);
        const auto d = generate(m, 1, 500, 0, s, 1);
        for (double v : d.values) REQUIRE(std::isfinite(v));
    }
}

TEST_CASE("zero coefficients give pure noise") {
    auto m = sample_linear_model(make_template(fig2a(), 1), 3);
    for (auto& c : m.coefficients)
        for (auto& v : c) v.value = 0.0;
    m.noise_sd = {0.5, 1.0, 1.5};
    const auto d = generate(m, 20000, 1, 10, 4, 0);
    for (std::size_t s = 0; s < 3; ++s) {
        double ss = 0;
        for (std::size_t r = 0; r < d.replicates; ++r) ss += d.at(r, 0, s) * d.at(r, 0, s);
        const double var = ss / d.replicates;
        const double expected = m.noise_sd[s] * m.noise_sd[s];
        // sd of the sample variance of n normals: sigma^2 sqrt(2 / n)
        CHECK(std::abs(var - expected) < 3 * expected * std::sqrt(2.0 / d.replicates));
    }
}

TEST_CASE("generation is deterministic and thread-count independent") {
    const auto m = sample_linear_model(make_template(fig2a(), 1), 7);
    const auto a = generate(m, 700, 4, 20, 9, 1);
    const auto b = generate(m, 700, 4, 20, 9, 4);
    CHECK(a.values == b.values);
    CHECK(generate(m, 700, 4, 20, 10, 1).values != a.values);
}

TEST_CASE("lag-1 covariance matches the closed form") {
    const auto m = single_edge(0.8);
    const auto d = generate(m, 40000, 2, 5, 11, 0);
    std::vector<double> x, y;
    for (std::size_t r = 0; r < d.replicates; ++r) {
        x.push_back(d.at(r, 0, 0));
        y.push_back(d.at(r, 1, 1));
    }
    const double cov = sample_cov(x, y);
    const double var_x = sample_cov(x, x);
    // cov(X, Y') = 0.8 var(X); var of the estimate ~ (0.8^2 + 1 * ... ) / n, bound with sd ~ sqrt(1.64 / n)
    CHECK(std::abs(cov - 0.8 * var_x) < 3 * std::sqrt(1.64 / d.replicates) + 1e-9);
}

TEST_CASE("true effect sums path products") {
    CHECK(true_effect(single_edge(0.8), {0, 1, 1, 1}) == doctest::Approx(0.8));
    CHECK(true_effect(single_edge(0.8), {0, 1, 0, 1}) == doctest::Approx(0.0));
    CHECK(true_effect(single_edge(0.8), {1, 0, 1, 1}) == doctest::Approx(0.0));
    // X -> M -> Y (0.5 * 0.5) plus X -> Y (0.3), all at lag 0.
    const auto g = Scg::build({"X", "M", "Y"}, {{"X", "M"}, {"M", "Y"}, {"X", "Y"}});
    FtDagTemplate t{g, 1, {1u, 1u, 1u}};
    LinearModel m{t, {}, {1, 1, 1}};
    for (const auto& e : g.edges()) {
        const double c = (e.source == 0 && e.target == 2) ? 0.3 : 0.5;
        m.coefficients.push_back({{0, c}});
    }
    CHECK(true_effect(m, {0, 2, 0, 1}) == doctest::Approx(0.55));
}

TEST_CASE("ols recovers the effect and detects confounding") {
    const auto m = single_edge(0.8);
    const auto d = generate(m, 20000, 2, 5, 13, 0);
    const auto e = ols_effect(d, {0, 1, 1, 1}, {});
    CHECK(std::abs(e.point - 0.8) < 3 * e.standard_error);
    CHECK(e.n == d.replicates);

    const auto g = Scg::build({"W", "X", "Y"}, {{"W", "X"}, {"W", "Y"}, {"X", "Y"}});
    FtDagTemplate t{g, 1, {1u, 1u, 1u}};
    LinearModel c{t, {{{0, 0.8}}, {{0, 0.8}}, {{0, 0.5}}}, {1, 1, 1}};
    const auto dc = generate(c, 20000, 1, 0, 17, 0);
    const MicroQuery q{1, 2, 0, 1};
    const auto naive = ols_effect(dc, q, {});
    CHECK(std::abs(naive.point - true_effect(c, q)) > 5 * naive.standard_error);
    const auto adjusted = ols_effect(dc, q, {{0, 0}});
    CHECK(std::abs(adjusted.point - 0.5) < 3 * adjusted.standard_error);
}

TEST_CASE("ols rejects malformed input") {
    const auto d = generate(single_edge(0.8), 100, 3, 0, 1, 1);
    CHECK_THROWS_AS(ols_effect(d, {1, 1, 0, 1}, {}), InputError);
    CHECK_THROWS_AS(ols_effect(d, {0, 1, 0, 1}, {{1, 0}}), InputError);
    CHECK_THROWS_AS(ols_effect(d, {0, 1, 0, 1}, {{0, 0}}), InputError);
    CHECK_THROWS_AS(ols_effect(d, {0, 1, 0, 1}, {{1, -5}}), InputError);
    CHECK_THROWS_AS(ols_effect(generate(single_edge(0.8), 1, 2, 0, 1, 1), {0, 1, 0, 1}, {}), InputError);
}

TEST_CASE("estimates shrink with n") {
    const auto g = fig2a();
    const MicroQuery q{0, 1, 1, 1};
    const auto m = sample_linear_model(make_template(g, 1), 21);
    const auto z = qopt(g, q);
    const NamedSets sets{{"qopt", z}};
    const auto small = variance_experiment(m, q, sets, 1000, 40, 5, 50, 0);
    const auto large = variance_experiment(m, q, sets, 10000, 40, 6, 50, 0);
    const double ratio = small.sets[0].variance / large.sets[0].variance;
    // Expected ratio 10; the variance ratio of 40-rep estimates lies well within [4, 25].
    CHECK(ratio > 4.0);
    CHECK(ratio < 25.0);
}

TEST_CASE("null model: all sets unbiased") {
    const auto g = fig2a();
    const MicroQuery q{0, 1, 1, 1};
    auto m = sample_linear_model(make_template(g, 1), 2);
    for (auto& c : m.coefficients)
        for (auto& v : c) v.value = 0.0;
    NamedSets sets;
    for (auto& [name, s] : canonical_sets(g, q))
        if (name == "qopt" || name == "a1") sets.emplace_back(name, s);
    const auto r = variance_experiment(m, q, sets, 2000, 60, 3, 10, 0);
    CHECK(r.true_effect == 0.0);
    for (const auto& s : r.sets) CHECK(std::abs(s.bias) < 4 * s.mean_se);
    CHECK(r.sets[0].variance / r.sets[1].variance == doctest::Approx(1.0).epsilon(0.5));
}

TEST_CASE("ordering experiment bookkeeping") {
    const auto g = fig2a();
    const MicroQuery q{0, 1, 1, 1};
    NamedSets sets;
    for (auto& [name, s] : canonical_sets(g, q))
        if (name == "qopt" || name == "a1") sets.emplace_back(name, s);
    const auto r = ordering_experiment(make_template(g, 1), q, sets, "qopt", 2000, 20, 2, 100, 0.10, 20, 0);
    CHECK(r.blocks.size() == 2);
    CHECK(r.blocks[0].variance_ratio[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(ordering_experiment(make_template(g, 1), q, sets, "nope", 10, 2, 1, 1), InputError);
}
