#include <grpsel/simulation.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include <grpsel/io.hpp>
#include <grpsel/parallel.hpp>
#include <grpsel/two_stage.hpp>

namespace grpsel {

namespace {

const std::vector<std::size_t> kSixBlocks{6, 7, 8, 9, 10, 10};

std::vector<ActiveEffect> effects_from_one_based(std::initializer_list<std::pair<std::size_t, int>> items)
{
    std::vector<ActiveEffect> out;
    for (const auto& [v, level] : items) out.push_back({v - 1, level});
    return out;
}

ActiveEffect cont(std::size_t one_based) { return {one_based - 1, -1}; }

// Active effects and their coefficient draws, in a fixed order.
std::vector<ActiveEffect> design_effects(int id)
{
    std::vector<ActiveEffect> e;
    auto range = [&](std::size_t a, std::size_t b) { for (std::size_t i = a; i <= b; ++i) e.push_back(cont(i)); };
    switch (id) {
        case 1:
            range(1, 7);
            range(12, 21);
            range(29, 30);
            break;
        case 2:
            range(1, 6);
            for (std::size_t i : {14, 16, 18, 20}) e.push_back(cont(i));
            range(23, 28);
            for (auto x : effects_from_one_based({{46, 1}, {48, 2}, {50, 2}})) e.push_back(x);
            break;
        case 3:
            range(1, 3);
            for (std::size_t i : {14, 16, 18}) e.push_back(cont(i));
            range(23, 28);
            for (auto x : effects_from_one_based({{46, 1}, {48, 2}, {50, 2}})) e.push_back(x);
            for (std::size_t i : {91, 93, 95}) e.push_back(cont(i));
            for (auto x : effects_from_one_based({{100, 1}, {150, 1}, {150, 2}})) e.push_back(x);
            break;
        default:
            range(1, 6);
            range(15, 17);
            range(31, 33);
            range(46, 48);
            break;
    }
    return e;
}

// Fixed coefficients of design 1, aligned with design_effects(1).
const std::vector<double> kDesignOneBeta{
    0.1, 0.0, 8.0,              // block 1
    0.4, 0.3, 0.2, 7.0,         // block 2
    4.0, 5.0, 6.0,              // block 4
    3.0, 0.0, 0.5, 0.0,         // block 5
    0.2, 0.4, 0.6,              // block 6
    9.0, 10.0};                 // block 9

std::vector<double> draw_coefficients(const SimDesign& d, std::size_t count, std::mt19937_64& rng)
{
    if (d.id == 1) return kDesignOneBeta;
    std::vector<double> beta(count);
    if (d.id == 2 || d.id == 3) {
        const double half = d.id == 2 ? 5.0 : 7.0;
        std::uniform_real_distribution<double> u(-half, half);
        for (auto& b : beta) b = u(rng);
    } else {
        const double eta = 4.0 * std::log(static_cast<double>(d.n)) / std::sqrt(static_cast<double>(d.n));
        std::bernoulli_distribution w(0.4);
        std::normal_distribution<double> z(0.0, 1.0);
        std::uniform_real_distribution<double> c(0.5, 3.0);
        for (auto& b : beta) {
            const double sign = w(rng) ? -1.0 : 1.0;
            const double mag = eta + std::abs(z(rng));
            b = c(rng) * sign * mag;
        }
    }
    return beta;
}

// Whether variable j (0-based) of the design is trichotomized.
std::vector<char> discrete_mask(const SimDesign& d)
{
    std::vector<char> mask;
    for (std::size_t b = 0; b < d.block_sizes.size(); ++b) {
        for (std::size_t i = 0; i < d.block_sizes[b]; ++i) {
            switch (d.block_types[b]) {
                case BlockType::Continuous: mask.push_back(0); break;
                case BlockType::Discrete: mask.push_back(1); break;
                case BlockType::Mixed: mask.push_back(i % 2 == 1 ? 1 : 0); break;
            }
        }
    }
    return mask;
}

Eigen::MatrixXd draw_latent(const SimDesign& d, std::size_t rows, std::mt19937_64& rng)
{
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d.p()));
    const double innov = std::sqrt(1.0 - d.rho * d.rho);
    Eigen::Index start = 0;
    for (std::size_t b = 0; b < d.block_sizes.size(); ++b) {
        const auto s = static_cast<Eigen::Index>(d.block_sizes[b]);
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            if (d.block_correlation[b] == BlockCorrelation::Autoregressive) {
                // Stationary AR(1) gives corr(x_i, x_j) = rho^|i-j|.
                double prev = z(rng);
                x(r, start) = prev;
                for (Eigen::Index j = 1; j < s; ++j) {
                    prev = d.rho * prev + innov * z(rng);
                    x(r, start + j) = prev;
                }
            } else {
                const double w = z(rng);
                for (Eigen::Index j = 0; j < s; ++j) x(r, start + j) = (z(rng) + w) / std::sqrt(2.0);
            }
        }
        start += s;
    }
    return x;
}

// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<int> trichotomize(const Eigen::VectorXd& x)
{
    std::vector<double> v(x.data(), x.data() + x.size());
    const double q1 = quantile(v, 1.0 / 3.0);
    const double q2 = quantile(v, 2.0 / 3.0);
    std::vector<int> codes(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) codes[i] = v[i] < q1 ? 0 : (v[i] > q2 ? 2 : 1);
    return codes;
}

// Codes for discrete variables (empty vector for continuous ones).
std::vector<std::vector<int>> discretize(const Eigen::MatrixXd& latent, const std::vector<char>& mask)
{
    std::vector<std::vector<int>> codes(mask.size());
    for (std::size_t j = 0; j < mask.size(); ++j) {
        if (mask[j]) codes[j] = trichotomize(latent.col(static_cast<Eigen::Index>(j)));
    }
    return codes;
}

Eigen::VectorXd linear_signal(const Eigen::MatrixXd& latent, const std::vector<std::vector<int>>& codes,
    const std::vector<ActiveEffect>& effects, const std::vector<double>& beta)
{
    Eigen::VectorXd s = Eigen::VectorXd::Zero(latent.rows());
    for (std::size_t e = 0; e < effects.size(); ++e) {
        const auto j = effects[e].variable;
        if (effects[e].level < 0) {
            s += beta[e] * latent.col(static_cast<Eigen::Index>(j));
        } else {
            for (Eigen::Index r = 0; r < s.size(); ++r) {
                if (codes[j][static_cast<std::size_t>(r)] == effects[e].level) s[r] += beta[e];
            }
        }
    }
    return s;
}

// Exact Var(x'beta) for all-continuous designs.
double exact_signal_variance(const SimDesign& d, const std::vector<ActiveEffect>& effects, const std::vector<double>& beta)
{
    std::vector<std::size_t> block_of;
    std::vector<std::size_t> pos_in_block;
    for (std::size_t b = 0; b < d.block_sizes.size(); ++b) {
        for (std::size_t i = 0; i < d.block_sizes[b]; ++i) {
            block_of.push_back(b);
            pos_in_block.push_back(i);
        }
    }
    double var = 0.0;
    for (std::size_t a = 0; a < effects.size(); ++a) {
        for (std::size_t c = 0; c < effects.size(); ++c) {
            const auto i = effects[a].variable, j = effects[c].variable;
            if (block_of[i] != block_of[j]) continue;
            double cov;
            if (i == j) cov = 1.0;
            else if (d.block_correlation[block_of[i]] == BlockCorrelation::Autoregressive) {
                const auto lag = pos_in_block[i] > pos_in_block[j] ? pos_in_block[i] - pos_in_block[j] : pos_in_block[j] - pos_in_block[i];
                cov = std::pow(d.rho, static_cast<double>(lag));
            } else {
                cov = 0.5;
            }
            var += beta[a] * beta[c] * cov;
        }
    }
    return var;
}

double sample_variance(const Eigen::VectorXd& v)
{
    return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1);
}

inline double sigmoid(double t) noexcept
{
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

// exp(5t - 2) / (1 + exp(5t - 3)) - 1.5, rewritten as e * sigmoid(5t - 3) - 1.5.
inline double design_five_link(double t) noexcept
{
    return std::exp(1.0) * sigmoid(5.0 * t - 3.0) - 1.5;
}

constexpr std::uint64_t kCalibrationStream = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

SimDesign SimDesign::make(int id, double rho, std::size_t repeats, std::size_t n)
{
    SimDesign d;
    d.id = id;
    d.rho = rho;
    auto tile = [&](std::size_t copies, bool mixed_types) {
        for (std::size_t r = 0; r < copies; ++r) {
            for (std::size_t b = 0; b < kSixBlocks.size(); ++b) {
                d.block_sizes.push_back(kSixBlocks[b]);
                if (mixed_types) {
                    d.block_correlation.push_back(b % 2 == 0 ? BlockCorrelation::Autoregressive : BlockCorrelation::SharedFactor);
                    d.block_types.push_back(static_cast<BlockType>(b % 3));
                } else {
                    d.block_correlation.push_back(BlockCorrelation::Autoregressive);
                    d.block_types.push_back(BlockType::Continuous);
                }
            }
        }
    };
    switch (id) {
        case 1:
            if (repeats != 0) throw Error(ErrorCode::InvalidDesign, "design 1 has a fixed block layout");
            d.n = 100;
            d.block_sizes = {3, 4, 4, 3, 4, 3, 4, 3, 2};
            d.block_correlation.assign(d.block_sizes.size(), BlockCorrelation::Autoregressive);
            d.block_types.assign(d.block_sizes.size(), BlockType::Continuous);
            break;
        case 2:
            if (repeats != 0) throw Error(ErrorCode::InvalidDesign, "design 2 has a fixed block layout");
            d.n = 100;
            tile(1, true);
            break;
        case 3:
            d.n = 100;
            tile(repeats == 0 ? 3 : repeats, true);
            break;
        case 4:
            d.n = 200;
            tile(repeats == 0 ? 40 : repeats, false);
            break;
        case 5:
            d.n = 200;
            d.response = ResponseKind::Binary;
            tile(repeats == 0 ? 8 : repeats, false);
            break;
        default:
            throw Error(ErrorCode::InvalidDesign, "design must be 1..5, got " + std::to_string(id));
    }
    if (n != 0) d.n = n;
    d.validate();
    return d;
}

std::size_t SimDesign::p() const
{
    std::size_t p = 0;
    for (auto s : block_sizes) p += s;
    return p;
}

void SimDesign::validate() const
{
    if (id < 1 || id > 5) throw Error(ErrorCode::InvalidDesign, "design must be 1..5");
    if (block_sizes.empty() || block_sizes.size() != block_correlation.size() || block_sizes.size() != block_types.size()) {
        throw Error(ErrorCode::InvalidDesign, "block descriptions disagree in length");
    }
    for (auto s : block_sizes) {
        if (s == 0) throw Error(ErrorCode::InvalidDesign, "empty block");
    }
    if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorCode::InvalidDesign, "rho must lie in (0,1), got " + std::to_string(rho));
    if (!(snr > 0.0)) throw Error(ErrorCode::InvalidDesign, "snr must be positive");
    if (n < 10) throw Error(ErrorCode::InvalidDesign, "n must be at least 10");
    for (const auto& e : design_effects(id)) {
        if (e.variable >= p()) {
            throw Error(ErrorCode::InvalidDesign, "active variable " + std::to_string(e.variable + 1) +
                " lies beyond p = " + std::to_string(p()));
        }
    }
}

SimInstance generate(const SimDesign& design, std::uint64_t seed)
{
    design.validate();
    std::mt19937_64 rng(seed);
    SimInstance inst;
    inst.effects = design_effects(design.id);
    inst.coefficients = draw_coefficients(design, inst.effects.size(), rng);

    const auto mask = discrete_mask(design);
    const Eigen::MatrixXd latent = draw_latent(design, design.n, rng);
    const auto codes = discretize(latent, mask);
    const Eigen::VectorXd signal = linear_signal(latent, codes, inst.effects, inst.coefficients);

    Eigen::VectorXd y(signal.size());
    if (design.response == ResponseKind::Continuous) {
        double var;
        if (std::none_of(mask.begin(), mask.end(), [](char c) { return c != 0; })) {
            var = exact_signal_variance(design, inst.effects, inst.coefficients);
        } else {
            std::mt19937_64 cal(seed ^ kCalibrationStream);
            const Eigen::MatrixXd big = draw_latent(design, 20000, cal);
            var = sample_variance(linear_signal(big, discretize(big, mask), inst.effects, inst.coefficients));
        }
        inst.noise_sd = std::sqrt(var / design.snr);
        std::normal_distribution<double> eps(0.0, inst.noise_sd);
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = signal[i] + eps(rng);
    } else {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            std::bernoulli_distribution coin(sigmoid(design_five_link(signal[i])));
            y[i] = coin(rng) ? 1.0 : 0.0;
        }
    }

    std::vector<Column> cols;
    cols.reserve(mask.size());
    for (std::size_t j = 0; j < mask.size(); ++j) {
        const std::string name = "X" + std::to_string(j + 1);
        if (mask[j]) {
            cols.push_back(Column::qualitative(name, codes[j], {"0", "1", "2"}));
        } else {
            const auto c = latent.col(static_cast<Eigen::Index>(j));
            cols.push_back(Column::quantitative(name, std::vector<double>(c.data(), c.data() + c.size())));
        }
    }
    inst.dataset = Dataset(std::move(cols), std::move(y), design.response);

    std::vector<int> labels;
    for (std::size_t b = 0; b < design.block_sizes.size(); ++b) labels.insert(labels.end(), design.block_sizes[b], static_cast<int>(b));
    inst.true_partition = Partition(labels);

    std::vector<std::size_t> active;
    for (std::size_t e = 0; e < inst.effects.size(); ++e) {
        if (inst.coefficients[e] != 0.0) active.push_back(inst.effects[e].variable);
    }
    inst.truth = SelectionTruth::from_active(active, design.p());
    for (std::size_t v : inst.truth.active) inst.active_blocks.push_back(static_cast<std::size_t>(labels[v]));
    inst.active_blocks.erase(std::unique(inst.active_blocks.begin(), inst.active_blocks.end()), inst.active_blocks.end());
    return inst;
}

double realized_snr(const SimDesign& design, const SimInstance& inst, std::size_t rows, std::uint64_t seed)
{
    if (design.response != ResponseKind::Continuous) throw Error(ErrorCode::InvalidDesign, "SNR is defined for regression designs");
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXd latent = draw_latent(design, rows, rng);
    const Eigen::VectorXd s = linear_signal(latent, discretize(latent, discrete_mask(design)), inst.effects, inst.coefficients);
    return sample_variance(s) / (inst.noise_sd * inst.noise_sd);
}

std::vector<double> default_rhos(int design)
{
    if (design != 1) return {0.2, 0.5, 0.8};
    std::vector<double> out;
    for (int i = 0; i <= 16; ++i) out.push_back((10 + 5 * i) / 100.0);
    return out;
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t rho_index, std::size_t replicate)
{
    return splitmix(splitmix(seed + rho_index) + replicate);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    if (cfg.replicates < 1) throw Error(ErrorCode::InvalidArgument, "replicates must be at least 1");
    if (cfg.families.empty() || cfg.rhos.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one family and one rho");
    std::vector<SimDesign> designs;
    for (double rho : cfg.rhos) designs.push_back(SimDesign::make(cfg.design, rho, cfg.repeats, cfg.n));

    const std::size_t tasks = cfg.rhos.size() * cfg.replicates;
    std::vector<std::vector<ReplicateRecord>> slots(tasks);
    parallel_for(tasks, cfg.jobs, [&](std::size_t t) {
        const std::size_t k = t / cfg.replicates;
        const std::size_t r = t % cfg.replicates;
        const std::uint64_t s = replicate_seed(cfg.seed, k, r);
        const SimInstance inst = generate(designs[k], s);
        const Dataset& d = inst.dataset;
        const bool binary = d.response_kind() == ResponseKind::Binary;
        const LossKind loss = binary ? LossKind::Logistic : LossKind::SquaredError;

        TwoStageConfig tc;
        tc.j_boot = cfg.j_boot;
        tc.cv_folds = cfg.cv_folds;
        tc.nlambda = cfg.nlambda;
        tc.seed = s;
        tc.jobs = 1;
        const StageOne s1 = run_stage_one(d, tc);
        const Partition random_groups = random_equal_partition(d.p(), std::min(s1.partition.cluster_count(), d.p()), splitmix(s));
        const StandardizedMatrix z_all = standardize(d);

        auto emit = [&](GroupFamily fam, int case_id, const Eigen::VectorXd& oof, const std::vector<std::size_t>& selected) {
            auto push = [&](const char* metric, double v) { slots[t].push_back({fam, cfg.rhos[k], r, case_id, metric, v}); };
            if (binary) {
                const auto m = classification_metrics(d.y(), oof);
                push("accuracy", m.accuracy);
                push("class_sensitivity", m.sensitivity);
                push("class_specificity", m.specificity);
                push("auc", m.auc);
            } else {
                push("rmse", rmse(d.y(), oof));
            }
            const auto sel = selection_metrics(inst.truth, selected);
            push("selection_sensitivity", sel.sensitivity);
            push("selection_specificity", sel.specificity);
            push("groups", static_cast<double>(case_id == 1 ? random_groups.cluster_count() : s1.partition.cluster_count()));
        };

        for (GroupFamily fam : cfg.families) {
            tc.family = fam;
            CvOptions cv;
            cv.folds = cfg.cv_folds;
            cv.seed = s;
            const auto c1 = fit_with_cv(z_all, d.y(), loss, random_groups, tc.penalty(), cfg.nlambda, cv);
            emit(fam, 1, c1.cv.oof_predictions.col(static_cast<Eigen::Index>(c1.cv.best_index)),
                nonzero_variables(c1.fit.path[c1.cv.best_index], z_all.column_map));

            const auto c2 = run_stage_two(d, tc, s1);
            emit(fam, 2, c2.cv.oof_predictions.col(static_cast<Eigen::Index>(c2.best_index)), c2.selected_variables);
        }
    });

    ExperimentResult out;
    for (auto& s : slots) out.records.insert(out.records.end(), s.begin(), s.end());

    // Cells in first-appearance order of (rho, family, case, metric).
    std::vector<std::tuple<std::size_t, std::size_t, int, std::string>> order;
    std::map<std::tuple<std::size_t, std::size_t, int, std::string>, std::vector<double>> values;
    for (const auto& rec : out.records) {
        const auto k = static_cast<std::size_t>(std::find(cfg.rhos.begin(), cfg.rhos.end(), rec.rho) - cfg.rhos.begin());
        const auto f = static_cast<std::size_t>(std::find(cfg.families.begin(), cfg.families.end(), rec.family) - cfg.families.begin());
        const auto key = std::make_tuple(k, f, rec.case_id, rec.metric);
        auto& v = values[key];
        if (v.empty()) order.push_back(key);
        v.push_back(rec.value);
    }
    std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) < std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
    });
    for (const auto& key : order) {
        const auto& v = values[key];
        ExperimentCell c;
        c.design = cfg.design;
        c.rho = cfg.rhos[std::get<0>(key)];
        c.family = cfg.families[std::get<1>(key)];
        c.case_id = std::get<2>(key);
        c.metric = std::get<3>(key);
        c.replicates = v.size();
        double sum = 0.0;
        for (double x : v) sum += x;
        c.mean = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - c.mean) * (x - c.mean);
        c.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        out.cells.push_back(std::move(c));
    }
    return out;
}

std::string experiment_csv(const ExperimentResult& r)
{
    std::ostringstream os;
    os << csv_line({"design", "family", "rho", "case", "metric", "mean", "sd", "replicates"});
    for (const auto& c : r.cells) {
        os << csv_line({std::to_string(c.design), std::string(to_string(c.family)), format_number(c.rho),
            std::to_string(c.case_id), c.metric, format_number(c.mean), format_number(c.sd), std::to_string(c.replicates)});
    }
    return os.str();
}

} // namespace grpsel
