#include <grpsel/two_stage.hpp>

#include <algorithm>
#include <numeric>
#include <random>

namespace grpsel {


void TwoStageConfig::validate() const
{
    if (cv_folds < 2) throw Error(ErrorCode::InvalidArgument, "cv_folds must be at least 2");
    if (j_boot < 1) throw Error(ErrorCode::InvalidArgument, "j_boot must be at least 1");
    if (max_m < 2) throw Error(ErrorCode::InvalidArgument, "max_m must be at least 2");
    if (nlambda < 1) throw Error(ErrorCode::InvalidArgument, "nlambda must be at least 1");
    if (k_factor && !(*k_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "k_factor must be positive");
    penalty().validate(1);
}

GroupPenaltySpec TwoStageConfig::penalty() const
{
    switch (family) {
        case GroupFamily::GrLasso: return GroupPenaltySpec::gr_lasso();
        case GroupFamily::GrSCAD: return GroupPenaltySpec::gr_scad(gamma > 0.0 ? gamma : default_scad_gamma);
        case GroupFamily::GrMCP: return GroupPenaltySpec::gr_mcp(gamma > 0.0 ? gamma : default_mcp_gamma);
        case GroupFamily::SGL: return GroupPenaltySpec::sgl(alpha);
    }
    return GroupPenaltySpec::gr_lasso();
}

std::vector<std::size_t> nonzero_variables(const Coefficients& coef, std::span<const ColumnRange> column_map)
{
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < column_map.size(); ++v) {
        const auto& r = column_map[v];
        for (std::size_t c = r.begin; c < r.end(); ++c) {
            if (coef.beta[static_cast<Eigen::Index>(c)] != 0.0) {
                out.push_back(v);
                break;
            }
        }
    }
    return out;
}

GroupFit fit_with_cv(const StandardizedMatrix& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& variable_groups, const GroupPenaltySpec& spec, std::size_t nlambda,
    const CvOptions& cv_opts)
{
    const Partition columns = expand_groups(variable_groups, z.column_map);
    const double lmax = lambda_max(z.z, y, loss, columns, spec);
    const auto grid = make_lambda_grid(lmax, nlambda, default_min_ratio(static_cast<std::size_t>(z.z.rows()), z.columns()));
    GroupFit out;
    out.fit = fit_group(z.z, y, loss, columns, spec, grid, cv_opts.solver);
    out.cv = cross_validate(z.z, y, loss, columns, spec, std::span<const double>(grid).first(out.fit.size()), cv_opts);
    return out;
}

namespace {

LossKind default_loss(const Dataset& d, const TwoStageConfig& cfg)
{
    return cfg.loss.value_or(d.response_kind() == ResponseKind::Binary ? LossKind::Logistic : LossKind::SquaredError);
}

} // namespace

StageOne run_stage_one(const Dataset& d, const TwoStageConfig& cfg)
{
    cfg.validate();
    if (!d.has_response()) throw Error(ErrorCode::InvalidArgument, "two-stage selection needs a response");
    StageOne s;
    const std::size_t p = d.p();

    const std::size_t threshold = cfg.screen_threshold.value_or(d.n());
    if (p > threshold) {
        const double k = cfg.k_factor.value_or(p >= 1000 ? 2.0 : 1.0);
        s.screened = screen(standardize(d), d.y(), ScreeningMethod::DCSIS, k, cfg.jobs);
        if (s.screened->kept.empty()) throw Error(ErrorCode::EmptyScreenResult, "screening kept no variables");
        s.retained = s.screened->kept;
        std::sort(s.retained.begin(), s.retained.end());
    } else {
        s.retained.resize(p);
        std::iota(s.retained.begin(), s.retained.end(), std::size_t{0});
    }

    if (cfg.fixed_partition) {
        if (cfg.fixed_partition->size() != s.retained.size()) {
            throw Error(ErrorCode::DimensionMismatch, "fixed partition covers " + std::to_string(cfg.fixed_partition->size()) +
                " variables but " + std::to_string(s.retained.size()) + " were retained");
        }
        s.partition = *cfg.fixed_partition;
    } else if (s.retained.size() < 3) {
        s.partition = Partition::singletons(s.retained.size());
    } else {
        StabilityOptions so;
        so.j_boot = cfg.j_boot;
        so.seed = cfg.seed;
        so.max_m = cfg.max_m;
        so.jobs = cfg.jobs;
        auto st = stability_select(d.select_columns(s.retained), so);
        s.dendrogram = std::move(st.dendrogram);
        s.stability = std::move(st.curve);
        s.partition = std::move(st.partition);
    }
    return s;
}

TwoStageReport run_stage_two(const Dataset& d, const TwoStageConfig& cfg, StageOne stage_one)
{
    cfg.validate();
    if (!d.has_response()) throw Error(ErrorCode::InvalidArgument, "two-stage selection needs a response");
    TwoStageReport rep;
    rep.family = cfg.family;
    rep.loss = default_loss(d, cfg);
    rep.screened = std::move(stage_one.screened);
    rep.retained = std::move(stage_one.retained);
    rep.dendrogram = std::move(stage_one.dendrogram);
    rep.stability = std::move(stage_one.stability);
    rep.partition = std::move(stage_one.partition);

    const StandardizedMatrix z = standardize(d.select_columns(rep.retained));
    CvOptions cv;
    cv.folds = cfg.cv_folds;
    cv.seed = cfg.seed;
    cv.jobs = cfg.jobs;
    cv.solver = cfg.solver;
    auto gf = fit_with_cv(z, d.y(), rep.loss, rep.partition, cfg.penalty(), cfg.nlambda, cv);
    rep.fit = std::move(gf.fit);
    rep.cv = std::move(gf.cv);
    rep.best_index = rep.cv.best_index;
    rep.best_lambda = rep.cv.best_lambda;
    rep.column_map = z.column_map;

    for (std::size_t v : nonzero_variables(rep.best(), rep.column_map)) {
        rep.selected_variables.push_back(rep.retained[v]);
        rep.selected_names.push_back(d.column(rep.retained[v]).name);
    }
    return rep;
}

TwoStageReport run_two_stage(const Dataset& d, const TwoStageConfig& cfg)
{
    return run_stage_two(d, cfg, run_stage_one(d, cfg));
}

Partition random_equal_partition(std::size_t p, std::size_t k, std::uint64_t seed)
{
    if (k < 1 || k > p) {
        throw Error(ErrorCode::OutOfRange, "group count " + std::to_string(k) + " outside 1.." + std::to_string(p));
    }
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> labels(p, 0);
    for (std::size_t i = 0; i < p; ++i) labels[order[i]] = static_cast<int>(i % k);
    return Partition(std::move(labels));
}

} // namespace grpsel
