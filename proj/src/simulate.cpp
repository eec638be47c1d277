#include "scgadj/simulate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace scgadj {

std::size_t LinearModel::coefficient_count() const {
    std::size_t n = 0;
    for (const auto& c : coefficients) n += c.size();
    return n;
}

void validate_model(const LinearModel& m) {
    validate_template(m.tmpl);
    const auto& edges = m.tmpl.scg.edges();
    if (m.coefficients.size() != edges.size()) throw InputError("one coefficient list per edge required");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto lags = lags_of(m.tmpl.lags[i]);
        if (m.coefficients[i].size() != lags.size())
            throw InputError("coefficient count does not match the lag set");
        for (std::size_t k = 0; k < lags.size(); ++k)
            if (m.coefficients[i][k].lag != lags[k]) throw InputError("coefficient lag mismatch");
    }
    if (m.noise_sd.size() != m.tmpl.scg.size()) throw InputError("one noise sd per series required");
    for (double sd : m.noise_sd)
        if (!(sd > 0.0)) throw InputError("noise sd must be positive");
}

namespace {

struct Term {
    NodeIndex source;
    int lag;
    double coef;
};

// Incoming terms per target series.
std::vector<std::vector<Term>> incoming(const LinearModel& m) {
    std::vector<std::vector<Term>> in(m.tmpl.scg.size());
    const auto& edges = m.tmpl.scg.edges();
    for (std::size_t i = 0; i < edges.size(); ++i)
        for (const auto& c : m.coefficients[i]) in[edges[i].target].push_back({edges[i].source, c.lag, c.value});
    return in;
}

// Order of series within a time slice (lag-0 edges respected).
std::vector<NodeIndex> slice_order(const FtDagTemplate& t) {
    const std::size_t n = t.scg.size();
    std::vector<std::size_t> indeg(n, 0);
    std::vector<std::vector<NodeIndex>> out(n);
    const auto& edges = t.scg.edges();
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (has_lag(t.lags[i], 0)) {
            out[edges[i].source].push_back(edges[i].target);
            ++indeg[edges[i].target];
        }
    std::vector<NodeIndex> order, ready;
    for (NodeIndex v = n; v-- > 0;)
        if (indeg[v] == 0) ready.push_back(v);
    while (!ready.empty()) {
        auto v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (auto w : out[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    if (order.size() != n) throw InputError("lag-0 subgraph has a cycle");
    return order;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), tag};
    return std::mt19937_64(seq);
}

}  // namespace

double spectral_radius(const LinearModel& m) {
    const int n = static_cast<int>(m.tmpl.scg.size());
    const int p = m.tmpl.gamma_max;
    if (n == 0) return 0.0;
    std::vector<Eigen::MatrixXd> a(p + 1, Eigen::MatrixXd::Zero(n, n));
    const auto& edges = m.tmpl.scg.edges();
    for (std::size_t i = 0; i < edges.size(); ++i)
        for (const auto& c : m.coefficients[i]) a[c.lag](edges[i].target, edges[i].source) += c.value;
    const Eigen::MatrixXd reduce = (Eigen::MatrixXd::Identity(n, n) - a[0]).inverse();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n * p, n * p);
    for (int l = 1; l <= p; ++l) companion.block(0, (l - 1) * n, n, n) = reduce * a[l];
    if (p > 1) companion.block(n, 0, n * (p - 1), n * (p - 1)).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

LinearModel sample_linear_model(const FtDagTemplate& t, std::uint64_t seed, const ModelSampling& opts) {
    validate_template(t);
    if (!(opts.coef_low > 0.0) || opts.coef_high < opts.coef_low)
        throw InputError("coefficient bounds must satisfy 0 < low <= high");
    if (!(opts.noise_low > 0.0) || opts.noise_high < opts.noise_low)
        throw InputError("noise bounds must satisfy 0 < low <= high");
    auto rng = stream(seed, 0, 3);
    std::uniform_real_distribution<double> magnitude(opts.coef_low, opts.coef_high);
    std::uniform_real_distribution<double> noise(opts.noise_low, opts.noise_high);
    std::bernoulli_distribution negative(0.5);
    LinearModel m{t, {}, {}};
    for (int attempt = 0; attempt < opts.max_tries; ++attempt) {
        m.coefficients.assign(t.lags.size(), {});
        for (std::size_t i = 0; i < t.lags.size(); ++i)
            for (int lag : lags_of(t.lags[i])) {
                const double c = magnitude(rng);
                m.coefficients[i].push_back({lag, negative(rng) ? -c : c});
            }
        m.noise_sd.clear();
        for (std::size_t v = 0; v < t.scg.size(); ++v) m.noise_sd.push_back(noise(rng));
        if (spectral_radius(m) < opts.max_radius) return m;
    }
    throw InputError("no stable coefficient draw within the retry bound");
}

Dataset generate(const LinearModel& m, std::size_t n_replicates, std::size_t horizon,
                 std::size_t burn_in, std::uint64_t seed, unsigned threads) {
    validate_model(m);
    if (horizon == 0) throw InputError("horizon must be positive");
    const std::size_t n = m.tmpl.scg.size();
    Dataset d{n_replicates, horizon, n, m.tmpl.scg.names(), {}};
    d.values.assign(n_replicates * horizon * n, 0.0);
    const auto in = incoming(m);
    const auto order = slice_order(m.tmpl);
    const std::size_t total = burn_in + horizon;

    // One random stream per fixed block of replicates keeps the output
    // independent of the thread count without seeding an engine per replicate.
    constexpr std::size_t kBlock = 256;
    const std::size_t blocks = (n_replicates + kBlock - 1) / kBlock;
    auto simulate = [&](std::size_t b) {
        auto rng = stream(seed, b, 4);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> buf(total * n, 0.0);
        const std::size_t end = std::min(n_replicates, (b + 1) * kBlock);
        for (std::size_t r = b * kBlock; r < end; ++r) {
            for (std::size_t t = 0; t < total; ++t)
                for (auto v : order) {
                    double x = m.noise_sd[v] * normal(rng);
                    for (const auto& term : in[v]) {
                        if (static_cast<std::size_t>(term.lag) > t) continue;
                        x += term.coef * buf[(t - term.lag) * n + term.source];
                    }
                    buf[t * n + v] = x;
                }
            std::copy(buf.begin() + burn_in * n, buf.end(), d.values.begin() + r * horizon * n);
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || blocks < 2) {
        for (std::size_t b = 0; b < blocks; ++b) simulate(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < std::min<std::size_t>(threads, blocks); ++k)
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < blocks; b = next++) simulate(b);
            });
        for (auto& th : pool) th.join();
    }
    return d;
}

double true_effect(const LinearModel& m, const MicroQuery& q) {
    validate_model(m);
    validate_query(m.tmpl.scg, q);
    const std::size_t n = m.tmpl.scg.size();
    const auto in = incoming(m);
    const auto order = slice_order(m.tmpl);
    const int lo = -q.gamma;
    const std::size_t slices = static_cast<std::size_t>(q.gamma + 1);
    std::vector<double> eff(slices * n, 0.0);
    for (std::size_t s = 0; s < slices; ++s)
        for (auto v : order) {
            const int t = lo + static_cast<int>(s);
            if (v == q.treatment && t == lo) {
                eff[s * n + v] = 1.0;
                continue;
            }
            double e = 0.0;
            for (const auto& term : in[v]) {
                if (t - term.lag < lo) continue;
                e += term.coef * eff[(s - term.lag) * n + term.source];
            }
            eff[s * n + v] = e;
        }
    return eff[(slices - 1) * n + q.outcome];
}

EffectEstimate ols_effect(const Dataset& data, const MicroQuery& q, const TemporalSet& z) {
    if (q.treatment >= data.series || q.outcome >= data.series)
        throw InputError("query names an unknown series");
    if (q.treatment == q.outcome) throw InputError("malformed query: treatment equals outcome");
    if (q.gamma < 0) throw InputError("malformed query: negative gamma");
    const TemporalVar x{q.treatment, -q.gamma};
    const TemporalVar y{q.outcome, 0};
    if (z.count(y)) throw InputError("malformed query: the outcome cannot be a regressor");
    if (z.count(x)) throw InputError("malformed query: the treatment is already a regressor");
    int min_off = -q.gamma;
    for (const auto& v : z) {
        if (v.series >= data.series) throw InputError("adjustment set names an unknown series");
        if (v.offset > 0) throw InputError("adjustment variables must not lie after the outcome");
        min_off = std::min(min_off, v.offset);
    }
    const std::size_t first = static_cast<std::size_t>(-min_off);
    if (data.horizon <= first) throw InputError("horizon too short for the adjustment set");
    const std::size_t anchors = data.horizon - first;
    const std::size_t rows = anchors * data.replicates;
    const std::size_t cols = 2 + z.size();
    if (rows <= cols + 2) throw InputError("too few rows for the regression");

    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    std::size_t row = 0;
    for (std::size_t r = 0; r < data.replicates; ++r)
        for (std::size_t t = first; t < data.horizon; ++t, ++row) {
            design(row, 0) = 1.0;
            design(row, 1) = data.at(r, t - q.gamma, q.treatment);
            std::size_t c = 2;
            for (const auto& v : z) design(row, c++) = data.at(r, t + v.offset, v.series);
            target(row) = data.at(r, t, q.outcome);
        }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < static_cast<Eigen::Index>(cols)) throw InputError("rank-deficient design matrix");
    const Eigen::VectorXd beta = qr.solve(target);
    const double rss = (target - design * beta).squaredNorm();
    const double sigma2 = rss / static_cast<double>(rows - cols);
    const Eigen::MatrixXd gram = design.transpose() * design;
    const Eigen::VectorXd unit = Eigen::VectorXd::Unit(cols, 1);
    const double var = sigma2 * gram.ldlt().solve(unit)(1);
    return {beta(1), std::sqrt(std::max(var, 0.0)), rows, z};
}

VarianceReport variance_experiment(const LinearModel& m, const MicroQuery& q, const NamedSets& sets,
                                   std::size_t n, std::size_t reps, std::uint64_t seed,
                                   std::size_t burn_in, unsigned threads) {
    if (reps < 2) throw InputError("at least two repetitions required");
    int min_off = -q.gamma;
    for (const auto& [name, z] : sets)
        for (const auto& v : z) min_off = std::min(min_off, v.offset);
    // One anchor per replicate: the horizon is exactly the regressor span.
    const std::size_t horizon = static_cast<std::size_t>(-min_off) + 1;

    VarianceReport rep;
    rep.true_effect = true_effect(m, q);
    rep.n = n;
    rep.reps = reps;
    rep.seed = seed;
    std::vector<std::vector<double>> points(sets.size());
    for (std::size_t r = 0; r < reps; ++r) {
        const auto data = generate(m, n, horizon, burn_in, seed * 1000003ULL + r, threads);
        for (std::size_t s = 0; s < sets.size(); ++s)
            points[s].push_back(ols_effect(data, q, sets[s].second).point);
    }
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto& p = points[s];
        double mean = 0.0;
        for (double v : p) mean += v;
        mean /= static_cast<double>(p.size());
        double ss = 0.0;
        for (double v : p) ss += (v - mean) * (v - mean);
        const double variance = ss / static_cast<double>(p.size() - 1);
        rep.sets.push_back({sets[s].first, sets[s].second, mean, variance, mean - rep.true_effect,
                            std::sqrt(variance / static_cast<double>(p.size()))});
    }
    return rep;
}

OrderingReport ordering_experiment(const FtDagTemplate& t, const MicroQuery& q, const NamedSets& sets,
                                   const std::string& reference, std::size_t n, std::size_t reps,
                                   std::size_t blocks, std::uint64_t seed, double slack,
                                   std::size_t burn_in, unsigned threads, const ModelSampling& sampling) {
    const auto ref = std::find_if(sets.begin(), sets.end(), [&](const auto& s) { return s.first == reference; });
    if (ref == sets.end()) throw InputError("reference set \"" + reference + "\" is not among the sets");
    if (blocks == 0) throw InputError("at least one block required");
    const std::size_t ri = static_cast<std::size_t>(ref - sets.begin());

    OrderingReport out;
    out.reference = reference;
    out.slack = slack;
    out.per_block_ordering = true;
    out.unbiased = true;
    double ref_total = 0.0;
    std::vector<double> other_total(sets.size(), 0.0);
    std::size_t strict = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        OrderingBlock blk;
        blk.seed = seed + b;
        blk.model = sample_linear_model(t, blk.seed, sampling);
        blk.report = variance_experiment(blk.model, q, sets, n, reps, blk.seed, burn_in, threads);
        const double vref = blk.report.sets[ri].variance;
        bool smallest = true;
        for (std::size_t s = 0; s < sets.size(); ++s) {
            const auto& sum = blk.report.sets[s];
            const double ratio = sum.variance > 0.0 ? vref / sum.variance : (vref > 0.0 ? INFINITY : 1.0);
            blk.variance_ratio.push_back(ratio);
            other_total[s] += sum.variance;
            if (s == ri) continue;
            if (ratio > 1.0 + slack) out.per_block_ordering = false;
            if (ratio > 1.0) smallest = false;
            if (std::abs(sum.bias) > 3.0 * sum.mean_se) out.unbiased = false;
        }
        if (std::abs(blk.report.sets[ri].bias) > 3.0 * blk.report.sets[ri].mean_se) out.unbiased = false;
        if (smallest) ++strict;
        ref_total += vref;
        out.blocks.push_back(std::move(blk));
    }
    out.aggregate_ordering = true;
    for (std::size_t s = 0; s < sets.size(); ++s)
        if (s != ri && ref_total > other_total[s]) out.aggregate_ordering = false;
    out.strict_fraction = static_cast<double>(strict) / static_cast<double>(blocks);
    return out;
}

}  // namespace scgadj
