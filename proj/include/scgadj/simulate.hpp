#pragma once

// Linear-Gaussian dynamic models over a template, data generation, OLS
// adjustment estimates and the variance-ordering experiment.

#include <cstdint>
#include <string>
#include <vector>

#include "scgadj/identify.hpp"

namespace scgadj {

struct LaggedCoefficient {
    int lag = 0;
    double value = 0.0;
};

struct LinearModel {
    FtDagTemplate tmpl;
    /// Parallel to tmpl.scg.edges(); one entry per lag of the edge, ascending.
    std::vector<std::vector<LaggedCoefficient>> coefficients;
    std::vector<double> noise_sd;

    std::size_t coefficient_count() const;
};

/// Spectral radius of the companion matrix of the reduced-form VAR.
double spectral_radius(const LinearModel& m);

/// Throws InputError when shapes disagree, a noise sd is not positive or the
/// lag-0 part is not acyclic.
void validate_model(const LinearModel& m);

struct ModelSampling {
    double coef_low = 0.1;
    double coef_high = 0.9;
    double noise_low = 0.5;
    double noise_high = 1.5;
    /// Draws with spectral radius at or above this are rejected.
    double max_radius = 0.95;
    int max_tries = 1000;
};

/// Coefficients uniform in [coef_low, coef_high] with a random sign, noise sd
/// uniform in [noise_low, noise_high]; unstable draws are redrawn. Throws
/// InputError when no stable draw is found within max_tries.
LinearModel sample_linear_model(const FtDagTemplate& t, std::uint64_t seed,
                                const ModelSampling& opts = {});

struct Dataset {
    std::size_t replicates = 0;
    std::size_t horizon = 0;
    std::size_t series = 0;
    std::vector<std::string> names;
    /// Index (replicate * horizon + time) * series + series index.
    std::vector<double> values;

    double at(std::size_t replicate, std::size_t time, std::size_t s) const {
        return values[(replicate * horizon + time) * series + s];
    }
};

/// Independent replicates, each simulated from zero for burn_in + horizon
/// steps; the burn-in prefix is dropped.
Dataset generate(const LinearModel& m, std::size_t n_replicates, std::size_t horizon,
                 std::size_t burn_in, std::uint64_t seed, unsigned threads = 0);

/// Sum over directed paths X@-gamma -> Y@0 of coefficient products.
double true_effect(const LinearModel& m, const MicroQuery& q);

struct EffectEstimate {
    double point = 0.0;
    double standard_error = 0.0;
    std::size_t n = 0;
    TemporalSet set_used;
};

/// Treatment coefficient of the OLS regression of Y@0 on an intercept,
/// X@-gamma and z, pooled over replicates and every anchor time with all
/// regressors observed. Throws InputError on a malformed query, too few rows
/// or a rank-deficient design.
EffectEstimate ols_effect(const Dataset& data, const MicroQuery& q, const TemporalSet& z);

struct SetSummary {
    std::string name;
    TemporalSet set;
    double mean = 0.0;
    double variance = 0.0;
    double bias = 0.0;
    /// Standard error of the mean estimate across reps.
    double mean_se = 0.0;
};

struct VarianceReport {
    double true_effect = 0.0;
    std::size_t n = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<SetSummary> sets;
};

/// reps independent datasets of n single-anchor replicates from one model;
/// every named set is estimated on each dataset.
VarianceReport variance_experiment(const LinearModel& m, const MicroQuery& q, const NamedSets& sets,
                                   std::size_t n, std::size_t reps, std::uint64_t seed,
                                   std::size_t burn_in = 50, unsigned threads = 0);

struct OrderingBlock {
    std::uint64_t seed = 0;
    LinearModel model;
    VarianceReport report;
    /// Var(reference) / Var(other set), parallel to report.sets.
    std::vector<double> variance_ratio;
};

struct OrderingReport {
    std::string reference;
    double slack = 0.0;
    std::vector<OrderingBlock> blocks;
    /// Every block has ratio <= 1 + slack against every other set.
    bool per_block_ordering = false;
    /// Summed over blocks, Var(reference) <= Var(other) for every other set.
    bool aggregate_ordering = false;
    /// Blocks (fraction) where the reference has the smallest variance outright.
    double strict_fraction = 0.0;
    /// Every set in every block has |bias| <= 3 * mean_se.
    bool unbiased = false;
};

/// One model per block (seed + block) sampled on t, then variance_experiment
/// with the same block seed. `reference` must name one of `sets`.
OrderingReport ordering_experiment(const FtDagTemplate& t, const MicroQuery& q, const NamedSets& sets,
                                   const std::string& reference, std::size_t n, std::size_t reps,
                                   std::size_t blocks, std::uint64_t seed, double slack = 0.10,
                                   std::size_t burn_in = 50, unsigned threads = 0,
                                   const ModelSampling& sampling = {});

}  // namespace scgadj
