#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <grpsel/core_data.hpp>
#include <grpsel/metrics.hpp>
#include <grpsel/solvers.hpp>

namespace grpsel {

enum class BlockCorrelation { Autoregressive, SharedFactor };
enum class BlockType { Continuous, Discrete, Mixed };

/// One active effect. Continuous variables use level = -1; a discrete
/// variable's effect applies to the indicator of `level`.
struct ActiveEffect
{
    std::size_t variable = 0;   // 0-based
    int level = -1;
};

struct SimDesign
{
    int id = 1;
    std::size_t n = 100;
    std::vector<std::size_t> block_sizes;
    std::vector<BlockCorrelation> block_correlation;
    std::vector<BlockType> block_types;
    double rho = 0.5;
    ResponseKind response = ResponseKind::Continuous;
    double snr = 1.8;

    /**
     * The five reference designs. `repeats` overrides the number of copies
     * of the six-block pattern for designs 3-5 (0 keeps 3, 40 and 8); `n`
     * overrides the sample size (0 keeps the design's own).
     */
    static SimDesign make(int id, double rho, std::size_t repeats = 0, std::size_t n = 0);

    std::size_t p() const;
    void validate() const;
};

struct SimInstance
{
    Dataset dataset;
    SelectionTruth truth;
    Partition true_partition;
    std::vector<std::size_t> active_blocks;
    std::vector<ActiveEffect> effects;
    std::vector<double> coefficients;   // parallel to `effects`
    double noise_sd = 0.0;              // regression designs only
};

/// Draws one instance; identical seeds give identical instances.
SimInstance generate(const SimDesign& design, std::uint64_t seed);

/// Var(signal) / noise variance, estimated on a fresh draw of `rows` rows
/// with the instance's coefficients and noise level.
double realized_snr(const SimDesign& design, const SimInstance& inst, std::size_t rows, std::uint64_t seed);

struct ExperimentConfig
{
    int design = 1;
    std::vector<GroupFamily> families{GroupFamily::GrLasso, GroupFamily::GrSCAD, GroupFamily::GrMCP, GroupFamily::SGL};
    std::vector<double> rhos{0.5};
    std::size_t replicates = 50;
    std::uint64_t seed = 20240917;
    std::size_t jobs = 1;
    std::size_t j_boot = 50;
    std::size_t cv_folds = 10;
    std::size_t nlambda = 100;
    std::size_t repeats = 0;
    std::size_t n = 0;
};

/// One metric value from one replicate of one (family, rho, case) cell.
struct ReplicateRecord
{
    GroupFamily family = GroupFamily::GrLasso;
    double rho = 0.0;
    std::size_t replicate = 0;
    int case_id = 1;    // 1 = random equal groups, 2 = two-stage
    std::string metric;
    double value = 0.0;
};

struct ExperimentCell
{
    int design = 1;
    GroupFamily family = GroupFamily::GrLasso;
    double rho = 0.0;
    int case_id = 1;
    std::string metric;
    double mean = 0.0;
    double sd = 0.0;
    std::size_t replicates = 0;
};

struct ExperimentResult
{
    std::vector<ReplicateRecord> records;
    std::vector<ExperimentCell> cells;
};

/// Correlation grid used when none is given: 0.1 to 0.9 by 0.05 for
/// design 1, {0.2, 0.5, 0.8} otherwise.
std::vector<double> default_rhos(int design);

/// Seed of replicate r at correlation index k; shared by all families.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t rho_index, std::size_t replicate);

/**
 * For each rho and replicate: draw an instance, find groups once by the
 * two-stage route (case 2), deal all variables into the same number of
 * random equal groups (case 1), and fit every family under both. Metrics
 * are out-of-fold RMSE (or accuracy, sensitivity, specificity and AUC for
 * a binary response) at the cross-validated lambda, plus selection
 * sensitivity and specificity of the full-data fit.
 */
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// RFC-4180 table: design,family,rho,case,metric,mean,sd,replicates.
std::string experiment_csv(const ExperimentResult& r);

} // namespace grpsel
