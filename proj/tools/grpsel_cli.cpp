// grpsel command-line front end.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage or validation error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <grpsel/clustering.hpp>
#include <grpsel/io.hpp>
#include <grpsel/metrics.hpp>
#include <grpsel/report.hpp>
#include <grpsel/screening.hpp>
#include <grpsel/simulation.hpp>
#include <grpsel/solvers.hpp>
#include <grpsel/two_stage.hpp>

namespace {

using namespace grpsel;

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;
constexpr std::uint64_t kDefaultSeed = 20240917;

std::size_t available_cores()
{
    const unsigned c = std::thread::hardware_concurrency();
    return c == 0 ? 1 : c;
}

// Empty path or "-" means stdout.
void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        write_text_file(path, text);
    }
}

void emit_optional(const std::string& path, const std::function<std::string()>& make)
{
    if (!path.empty()) emit(path, make());
}

const std::map<std::string, GroupFamily> kFamilies{
    {"grlasso", GroupFamily::GrLasso}, {"grscad", GroupFamily::GrSCAD}, {"grmcp", GroupFamily::GrMCP}, {"sgl", GroupFamily::SGL}};

std::optional<LossKind> parse_loss(const std::string& s)
{
    if (s == "squared_error") return LossKind::SquaredError;
    if (s == "logistic") return LossKind::Logistic;
    return std::nullopt;   // auto
}

// Shared model options of `fit` and `two-stage`.
struct ModelOptions
{
    std::string family = "grlasso";
    std::optional<double> gamma;
    double alpha = 0.5;
    std::string loss = "auto";
    std::size_t folds = 10;
    std::size_t nlambda = 100;
    double tol = 1e-7;
    int max_iter = 10000;

    void add_to(CLI::App* app)
    {
        app->add_option("--family", family, "Penalty family")
            ->check(CLI::IsMember({"grlasso", "grscad", "grmcp", "sgl"}))
            ->capture_default_str();
        app->add_option("--gamma", gamma, "Concavity for grscad (default 3.7, must exceed 2) or grmcp (default 3, must exceed 1)");
        app->add_option("--alpha", alpha, "Group share of the sgl penalty, in [0,1]")->capture_default_str();
        app->add_option("--loss", loss, "Loss; auto picks logistic for a binary response")
            ->check(CLI::IsMember({"auto", "squared_error", "logistic"}))
            ->capture_default_str();
        app->add_option("--cv", folds, "Cross-validation folds")->capture_default_str();
        app->add_option("--nlambda", nlambda, "Length of the lambda grid")->capture_default_str();
        app->add_option("--tol", tol, "Convergence tolerance on the largest coefficient change")->capture_default_str();
        app->add_option("--max-iter", max_iter, "Sweep limit per lambda")->capture_default_str();
    }

    void apply(TwoStageConfig& cfg) const
    {
        cfg.family = kFamilies.at(family);
        if (gamma) {
            // An explicit gamma is checked as given; 0 would otherwise mean "default".
            if (cfg.family == GroupFamily::GrSCAD) PenaltySpec::scad(0.0, *gamma).validate();
            if (cfg.family == GroupFamily::GrMCP) PenaltySpec::mcp(0.0, *gamma).validate();
            cfg.gamma = *gamma;
        }
        cfg.alpha = alpha;
        cfg.loss = parse_loss(loss);
        cfg.cv_folds = folds;
        cfg.nlambda = nlambda;
        if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "--tol must be positive");
        if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "--max-iter must be at least 1");
        cfg.solver.tol = tol;
        cfg.solver.max_iter = max_iter;
    }
};

struct Common
{
    std::uint64_t seed = kDefaultSeed;
    std::size_t jobs = available_cores();

    void add_to(CLI::App* app, bool with_jobs = true)
    {
        app->add_option("--seed", seed, "Random seed")->capture_default_str();
        if (with_jobs) app->add_option("--jobs", jobs, "Worker threads (results do not depend on it)")->default_str("available cores");
    }

    void check() const
    {
        if (jobs < 1) throw Error(ErrorCode::InvalidArgument, "--jobs must be at least 1");
    }
};

struct DataOptions
{
    std::string data;
    std::string schema;

    void add_to(CLI::App* app)
    {
        app->add_option("--data", data, "Data CSV")->required();
        app->add_option("--schema", schema, "Schema JSON typing the columns")->required();
    }

    Dataset load(bool require_response) const
    {
        auto loaded = load_dataset(data, schema, require_response);
        if (loaded.dropped_rows > 0) {
            std::cerr << "warning: dropped " << loaded.dropped_rows << " row(s) with missing values\n";
        }
        return std::move(loaded.dataset);
    }
};

std::vector<std::string> names_of(const Dataset& d, std::span<const std::size_t> idx)
{
    std::vector<std::string> out;
    for (std::size_t v : idx) out.push_back(d.column(v).name);
    return out;
}

Json coefficient_json(const Coefficients& c, std::span<const std::string> column_names)
{
    Json coef = Json::object();
    for (Eigen::Index j = 0; j < c.beta.size(); ++j) {
        if (c.beta[j] != 0.0) coef[column_names[static_cast<std::size_t>(j)]] = c.beta[j];
    }
    return coef;
}

// ---------------------------------------------------------------- fit

struct FitCommand
{
    DataOptions data;
    ModelOptions model;
    Common common;
    std::string groups;
    std::string json_out;
    std::string cv_csv_out;
    std::string selected_csv_out;

    void add_to(CLI::App* app)
    {
        data.add_to(app);
        app->add_option("--groups", groups, "variable,group CSV; only listed variables enter the fit (default: all, one group each)");
        model.add_to(app);
        common.add_to(app);
        app->add_option("--json", json_out, "Path report JSON (default stdout)");
        app->add_option("--csv", cv_csv_out, "Cross-validation summary CSV");
        app->add_option("--selected-csv", selected_csv_out, "Selected variables CSV");
    }

    int run() const
    {
        common.check();
        TwoStageConfig cfg;
        model.apply(cfg);
        cfg.seed = common.seed;
        cfg.jobs = common.jobs;
        cfg.validate();

        const Dataset d = data.load(true);
        std::vector<std::size_t> vars;
        std::vector<int> labels;
        if (groups.empty()) {
            for (std::size_t v = 0; v < d.p(); ++v) {
                vars.push_back(v);
                labels.push_back(static_cast<int>(v));
            }
        } else {
            auto table = read_groups_file(groups);
            for (std::size_t v = 0; v < d.p(); ++v) {
                auto it = table.find(d.column(v).name);
                if (it == table.end()) continue;
                vars.push_back(v);
                labels.push_back(it->second);
                table.erase(it);
            }
            if (!table.empty()) {
                throw Error(ErrorCode::InvalidArgument, "groups file names unknown variable '" + table.begin()->first + "'");
            }
            if (vars.empty()) throw Error(ErrorCode::InvalidArgument, "groups file lists no variables");
        }
        const Partition part = Partition::from_any_labels(labels);
        const Dataset sub = d.select_columns(vars);
        const LossKind loss = cfg.loss.value_or(d.response_kind() == ResponseKind::Binary ? LossKind::Logistic : LossKind::SquaredError);
        const auto spec = cfg.penalty();
        spec.validate(part.cluster_count());

        const StandardizedMatrix z = standardize(sub);
        CvOptions cv;
        cv.folds = cfg.cv_folds;
        cv.seed = cfg.seed;
        cv.jobs = cfg.jobs;
        cv.solver = cfg.solver;
        const GroupFit gf = fit_with_cv(z, d.y(), loss, part, spec, cfg.nlambda, cv);

        const auto var_names = names_of(d, vars);
        const auto cols = expanded_column_names(sub);
        const auto& best = gf.fit.path.at(gf.cv.best_index);
        std::vector<std::size_t> selected;
        for (std::size_t v : nonzero_variables(best, z.column_map)) selected.push_back(vars[v]);

        Json body;
        body["loss"] = to_string(loss);
        body["family"] = to_string(cfg.family);
        body["variables"] = var_names;
        body["partition"] = partition_json(part, var_names);
        body["cv"] = cv_json(gf.cv);
        body["best_lambda"] = gf.cv.best_lambda;
        body["intercept"] = best.intercept;
        body["coefficients"] = coefficient_json(best, cols);
        body["selected_variables"] = names_of(d, selected);
        body["saturated"] = gf.fit.saturated;
        body["fit"] = fit_json(gf.fit, cols);
        emit(json_out, dump(document("fit", std::move(body))));
        emit_optional(cv_csv_out, [&] { return cv_csv(gf.cv); });
        emit_optional(selected_csv_out, [&] { return selected_csv(selected, d.column_names()); });
        return kExitOk;
    }
};

// ---------------------------------------------------------------- two-stage

struct TwoStageCommand
{
    DataOptions data;
    ModelOptions model;
    Common common;
    std::optional<std::size_t> screen_threshold;
    std::optional<double> k_factor;
    std::size_t j_boot = 50;
    std::size_t max_m = 30;
    std::string json_out;
    std::string partition_csv_out;
    std::string cv_csv_out;
    std::string selected_csv_out;
    std::string stability_csv_out;
    std::string screening_csv_out;

    void add_to(CLI::App* app)
    {
        data.add_to(app);
        model.add_to(app);
        app->add_option("--screen-threshold", screen_threshold, "Screen when p exceeds this")->default_str("n");
        app->add_option("--k-factor", k_factor, "Screening size factor: keep ceil(k n / ln n)")->default_str("1, or 2 when p >= 1000");
        app->add_option("--j-boot", j_boot, "Bootstrap resamples for the stability curve")->capture_default_str();
        app->add_option("--max-m", max_m, "Largest cluster count considered")->capture_default_str();
        common.add_to(app);
        app->add_option("--json", json_out, "Full report JSON (default stdout)");
        app->add_option("--partition-csv", partition_csv_out, "Discovered groups as variable,group CSV");
        app->add_option("--csv", cv_csv_out, "Cross-validation summary CSV");
        app->add_option("--selected-csv", selected_csv_out, "Selected variables CSV");
        app->add_option("--stability-csv", stability_csv_out, "Stability curve CSV");
        app->add_option("--screening-csv", screening_csv_out, "Screening scores CSV (when screening ran)");
    }

    int run() const
    {
        common.check();
        TwoStageConfig cfg;
        model.apply(cfg);
        cfg.screen_threshold = screen_threshold;
        cfg.k_factor = k_factor;
        cfg.j_boot = j_boot;
        cfg.max_m = max_m;
        cfg.seed = common.seed;
        cfg.jobs = common.jobs;
        cfg.validate();

        const Dataset d = data.load(true);
        const TwoStageReport rep = run_two_stage(d, cfg);
        const auto names = d.column_names();
        const auto retained_names = names_of(d, rep.retained);

        emit(json_out, dump(document("two_stage", two_stage_json(rep, d))));
        emit_optional(partition_csv_out, [&] { return partition_csv(rep.partition, retained_names); });
        emit_optional(cv_csv_out, [&] { return cv_csv(rep.cv); });
        emit_optional(selected_csv_out, [&] { return selected_csv(rep.selected_variables, names); });
        emit_optional(stability_csv_out, [&] { return stability_csv(rep.stability); });
        if (!screening_csv_out.empty()) {
            if (rep.screened) emit(screening_csv_out, screening_csv(*rep.screened, names));
            else std::cerr << "warning: screening did not run; " << screening_csv_out << " not written\n";
        }
        return kExitOk;
    }
};

// ---------------------------------------------------------------- cluster

struct ClusterCommand
{
    DataOptions data;
    Common common;
    std::size_t j_boot = 50;
    std::size_t max_m = 30;
    std::optional<std::size_t> m;
    std::string json_out;
    std::string csv_out;
    std::string stability_csv_out;

    void add_to(CLI::App* app)
    {
        data.add_to(app);
        app->add_option("--j-boot", j_boot, "Bootstrap resamples for the stability curve")->capture_default_str();
        app->add_option("--max-m", max_m, "Largest cluster count considered")->capture_default_str();
        app->add_option("--m", m, "Cut the tree at this many clusters instead of choosing by stability");
        common.add_to(app);
        app->add_option("--json", json_out, "Dendrogram, stability curve and partition JSON (default stdout)");
        app->add_option("--csv", csv_out, "Partition as variable,group CSV");
        app->add_option("--stability-csv", stability_csv_out, "Stability curve CSV");
    }

    int run() const
    {
        common.check();
        if (j_boot < 1) throw Error(ErrorCode::InvalidArgument, "--j-boot must be at least 1");
        if (max_m < 2) throw Error(ErrorCode::InvalidArgument, "--max-m must be at least 2");
        const Dataset d = data.load(false);
        const auto names = d.column_names();

        Json body;
        body["variables"] = names;
        std::optional<StabilityCurve> curve;
        Partition part;
        Dendrogram dend;
        if (m) {
            if (*m < 1 || *m > d.p()) {
                throw Error(ErrorCode::OutOfRange, "--m must lie in 1.." + std::to_string(d.p()));
            }
            dend = hierarchical_cluster(d);
            part = cut_tree(dend, *m);
        } else {
            StabilityOptions so;
            so.j_boot = j_boot;
            so.max_m = max_m;
            so.seed = common.seed;
            so.jobs = common.jobs;
            auto res = stability_select(d, so);
            dend = std::move(res.dendrogram);
            curve = std::move(res.curve);
            part = std::move(res.partition);
        }
        body["dendrogram"] = dendrogram_json(dend);
        body["stability"] = curve ? stability_json(*curve) : Json(nullptr);
        body["partition"] = partition_json(part, names);
        emit(json_out, dump(document("cluster", std::move(body))));
        emit_optional(csv_out, [&] { return partition_csv(part, names); });
        if (!stability_csv_out.empty()) {
            if (curve) emit(stability_csv_out, stability_csv(*curve));
            else std::cerr << "warning: --m given, no stability curve; " << stability_csv_out << " not written\n";
        }
        return kExitOk;
    }
};

// ---------------------------------------------------------------- screen

struct ScreenCommand
{
    DataOptions data;
    Common common;
    std::string method = "dcsis";
    double k_factor = 1.0;
    std::string json_out;
    std::string csv_out;

    void add_to(CLI::App* app)
    {
        data.add_to(app);
        app->add_option("--method", method, "Marginal utility")->check(CLI::IsMember({"dcsis", "sis"}))->capture_default_str();
        app->add_option("--k-factor", k_factor, "Keep ceil(k n / ln n) variables")->capture_default_str();
        common.add_to(app);
        app->add_option("--json", json_out, "Screening report JSON (default stdout)");
        app->add_option("--csv", csv_out, "variable,score,rank,kept CSV");
    }

    int run() const
    {
        common.check();
        if (!(k_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "--k-factor must be positive");
        const Dataset d = data.load(true);
        if (d.p() <= d.n()) {
            std::cerr << "warning: p = " << d.p() << " does not exceed n = " << d.n()
                      << "; the two-stage pipeline would skip screening on these data\n";
        }
        const auto m = method == "sis" ? ScreeningMethod::SIS : ScreeningMethod::DCSIS;
        const auto res = screen(standardize(d), d.y(), m, k_factor, common.jobs);
        const auto names = d.column_names();
        emit(json_out, dump(document("screen", screening_json(res, names))));
        emit_optional(csv_out, [&] { return screening_csv(res, names); });
        return kExitOk;
    }
};

// ---------------------------------------------------------------- simulate

struct SimulateCommand
{
    Common common;
    int design = 1;
    std::vector<double> rhos;
    std::size_t replicates = 50;
    std::vector<std::string> families{"grlasso", "grscad", "grmcp", "sgl"};
    std::size_t j_boot = 50;
    std::size_t folds = 10;
    std::size_t nlambda = 100;
    std::size_t repeats = 0;
    std::size_t n = 0;
    std::string csv_out;
    std::string records_csv_out;
    std::string json_out;
    std::string emit_data;

    void add_to(CLI::App* app)
    {
        app->add_option("--design", design, "Simulation design")->check(CLI::Range(1, 5))->capture_default_str();
        app->add_option("--rho", rhos, "Correlation levels (comma separated)")
            ->delimiter(',')
            ->default_str("0.1,0.15,...,0.9 for design 1; 0.2,0.5,0.8 otherwise");
        app->add_option("--replicates", replicates, "Replicates per correlation level")->capture_default_str();
        app->add_option("--families", families, "Families to fit (comma separated)")
            ->delimiter(',')
            ->check(CLI::IsMember({"grlasso", "grscad", "grmcp", "sgl"}))
            ->default_str("grlasso,grscad,grmcp,sgl");
        app->add_option("--j-boot", j_boot, "Bootstrap resamples in stage one")->capture_default_str();
        app->add_option("--cv", folds, "Cross-validation folds")->capture_default_str();
        app->add_option("--nlambda", nlambda, "Length of the lambda grid")->capture_default_str();
        app->add_option("--repeats", repeats, "Copies of the six-block pattern for designs 3-5")->default_str("design's own");
        app->add_option("--n", n, "Sample size override")->default_str("design's own");
        common.add_to(app);
        app->add_option("--csv", csv_out, "Summary table CSV (default stdout)");
        app->add_option("--records-csv", records_csv_out, "Per-replicate metric CSV");
        app->add_option("--json", json_out, "Summary JSON");
        app->add_option("--emit-data", emit_data,
            "Write one instance (first rho, replicate seed 0) as PREFIX.csv, PREFIX.schema.json and PREFIX.truth.json instead of running the experiment");
    }

    int run() const
    {
        common.check();
        const std::vector<double> levels = rhos.empty() ? default_rhos(design) : rhos;
        for (double r : levels) SimDesign::make(design, r, repeats, n).validate();

        if (!emit_data.empty()) {
            const auto sd = SimDesign::make(design, levels.front(), repeats, n);
            const auto inst = generate(sd, replicate_seed(common.seed, 0, 0));
            write_text_file(emit_data + ".csv", dataset_csv(inst.dataset));
            write_text_file(emit_data + ".schema.json", schema_json(schema_of(inst.dataset)));
            const auto names = inst.dataset.column_names();
            Json truth;
            truth["design"] = design;
            truth["rho"] = levels.front();
            truth["active"] = names_of(inst.dataset, inst.truth.active);
            truth["partition"] = partition_json(inst.true_partition, names);
            Json effects = Json::array();
            for (std::size_t i = 0; i < inst.effects.size(); ++i) {
                const auto& e = inst.effects[i];
                effects.push_back(Json{{"variable", names[e.variable]},
                    {"level", e.level < 0 ? Json(nullptr) : Json(e.level)}, {"coefficient", inst.coefficients[i]}});
            }
            truth["effects"] = effects;
            truth["noise_sd"] = inst.noise_sd;
            write_text_file(emit_data + ".truth.json", dump(document("simulation_truth", std::move(truth))));
            return kExitOk;
        }

        ExperimentConfig cfg;
        cfg.design = design;
        cfg.families.clear();
        for (const auto& f : families) cfg.families.push_back(kFamilies.at(f));
        cfg.rhos = levels;
        cfg.replicates = replicates;
        cfg.seed = common.seed;
        cfg.jobs = common.jobs;
        cfg.j_boot = j_boot;
        cfg.cv_folds = folds;
        cfg.nlambda = nlambda;
        cfg.repeats = repeats;
        cfg.n = n;
        if (replicates < 1) throw Error(ErrorCode::InvalidArgument, "--replicates must be at least 1");

        const auto res = run_experiment(cfg);
        emit(csv_out, experiment_csv(res));
        if (!records_csv_out.empty()) {
            std::string out = csv_line({"design", "family", "rho", "replicate", "case", "metric", "value"});
            for (const auto& r : res.records) {
                out += csv_line({std::to_string(design), std::string(to_string(r.family)), format_number(r.rho),
                    std::to_string(r.replicate + 1), std::to_string(r.case_id), r.metric, format_number(r.value)});
            }
            emit(records_csv_out, out);
        }
        if (!json_out.empty()) {
            Json cells = Json::array();
            for (const auto& c : res.cells) {
                cells.push_back(Json{{"family", to_string(c.family)}, {"rho", c.rho}, {"case", c.case_id},
                    {"metric", c.metric}, {"mean", c.mean}, {"sd", c.sd}, {"replicates", c.replicates}});
            }
            Json body{{"design", design}, {"seed", common.seed}, {"replicates", replicates}, {"cells", cells}};
            emit(json_out, dump(document("simulation", std::move(body))));
        }
        return kExitOk;
    }
};

// ---------------------------------------------------------------- smote

struct SmoteCommand
{
    DataOptions data;
    Common common;
    std::size_t k = 5;
    double ratio = 1.0;
    std::string csv_out;
    std::string json_out;

    void add_to(CLI::App* app)
    {
        data.add_to(app);
        app->add_option("--k", k, "Nearest minority neighbours")->capture_default_str();
        app->add_option("--ratio", ratio, "Target minority:majority ratio")->capture_default_str();
        common.add_to(app, false);
        app->add_option("--csv", csv_out, "Augmented data CSV (default stdout)");
        app->add_option("--json", json_out, "Summary JSON");
    }

    int run() const
    {
        if (k < 1) throw Error(ErrorCode::InvalidArgument, "--k must be at least 1");
        if (!(ratio > 0.0)) throw Error(ErrorCode::InvalidArgument, "--ratio must be positive");
        const Dataset d = data.load(true);
        if (d.response_kind() != ResponseKind::Binary) throw Error(ErrorCode::InvalidArgument, "smote needs a binary response");
        for (const auto& c : d.columns()) {
            if (c.is_qualitative()) {
                throw Error(ErrorCode::InvalidArgument, "smote interpolates quantitative predictors only; '" + c.name + "' is qualitative");
            }
        }
        const Eigen::VectorXd& y = d.y();
        const std::size_t ones = static_cast<std::size_t>(y.sum());
        const double minority_label = ones <= d.n() - ones ? 1.0 : 0.0;
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < d.n(); ++i) {
            if (y[static_cast<Eigen::Index>(i)] == minority_label) rows.push_back(i);
        }
        const std::size_t majority = d.n() - rows.size();
        Eigen::MatrixXd minority(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.p()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t j = 0; j < d.p(); ++j) {
                minority(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = d.column(j).values[rows[r]];
            }
        }
        SmoteConfig sc;
        sc.k_neighbors = k;
        sc.target_ratio = ratio;
        sc.seed = common.seed;
        const auto res = smote(minority, majority, sc);

        const DataSchema schema = read_schema_file(data.schema);
        std::vector<std::string> header = d.column_names();
        header.push_back(schema.response_name);
        header.push_back("synthetic");
        std::string text = csv_line(header);
        std::vector<std::string> fields(header.size());
        for (std::size_t i = 0; i < d.n(); ++i) {
            for (std::size_t j = 0; j < d.p(); ++j) fields[j] = format_number(d.column(j).values[i]);
            fields[d.p()] = format_number(y[static_cast<Eigen::Index>(i)]);
            fields[d.p() + 1] = "0";
            text += csv_line(fields);
        }
        for (Eigen::Index s = 0; s < res.synthetic.rows(); ++s) {
            for (std::size_t j = 0; j < d.p(); ++j) fields[j] = format_number(res.synthetic(s, static_cast<Eigen::Index>(j)));
            fields[d.p()] = format_number(minority_label);
            fields[d.p() + 1] = "1";
            text += csv_line(fields);
        }
        emit(csv_out, text);
        if (!json_out.empty()) {
            const std::size_t final_minority = rows.size() + res.base.size();
            Json parents = Json::array();
            for (std::size_t s = 0; s < res.base.size(); ++s) {
                parents.push_back(Json{{"base_row", rows[res.base[s]] + 1}, {"neighbor_row", rows[res.neighbor[s]] + 1}, {"step", res.step[s]}});
            }
            Json body{{"minority_label", static_cast<int>(minority_label)}, {"minority", rows.size()}, {"majority", majority},
                {"synthetic", res.base.size()}, {"final_minority", final_minority}, {"final_majority", majority},
                {"final_n", d.n() + res.base.size()}, {"k", k}, {"ratio", ratio}, {"seed", common.seed}, {"parents", parents}};
            emit(json_out, dump(document("smote", std::move(body))));
        }
        return kExitOk;
    }
};

// ---------------------------------------------------------------- metrics

std::vector<std::size_t> parse_index_list(const std::string& s, std::size_t p, const char* flag)
{
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || v < 1 || static_cast<std::size_t>(v) > p) {
            throw Error(ErrorCode::InvalidArgument, std::string(flag) + " entry '" + item + "' is not an index in 1.." + std::to_string(p));
        }
        out.push_back(static_cast<std::size_t>(v - 1));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct MetricsCommand
{
    std::string predictions;
    std::string truth_col = "y";
    std::string score_col = "prediction";
    std::string kind = "auto";
    double cutoff = 0.5;
    std::string active;
    std::string selected;
    std::size_t p = 0;
    bool divide_by_p = false;
    std::string json_out;
    std::string csv_out;

    void add_to(CLI::App* app)
    {
        app->add_option("--predictions", predictions, "CSV holding observed responses and predictions");
        app->add_option("--truth-col", truth_col, "Column of observed responses")->capture_default_str();
        app->add_option("--score-col", score_col, "Column of predictions (probabilities for classification)")->capture_default_str();
        app->add_option("--kind", kind, "auto treats a 0/1 response as classification")
            ->check(CLI::IsMember({"auto", "regression", "classification"}))
            ->capture_default_str();
        app->add_option("--cutoff", cutoff, "Class-1 threshold on the score")->capture_default_str();
        app->add_option("--active", active, "True active variables, 1-based, comma separated");
        app->add_option("--selected", selected, "Selected variables, 1-based, comma separated");
        app->add_option("--p", p, "Number of candidate variables (needed with --active)");
        app->add_flag("--divide-by-p", divide_by_p, "Divide selection counts by p instead of |active| and |inactive|");
        app->add_option("--json", json_out, "Metrics JSON (default stdout)");
        app->add_option("--csv", csv_out, "metric,value CSV");
    }

    static double parse_cell(const std::string& s, const std::string& col, std::size_t row)
    {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v)) {
            throw Error(ErrorCode::ParseError, "column '" + col + "' row " + std::to_string(row + 1) + ": '" + s + "' is not a number");
        }
        return v;
    }

    int run() const
    {
        if (predictions.empty() && active.empty()) {
            throw Error(ErrorCode::InvalidArgument, "give --predictions, --active/--selected, or both");
        }
        std::vector<std::pair<std::string, double>> values;
        if (!predictions.empty()) {
            const auto table = read_csv_file(predictions);
            const std::size_t ti = table.index_of(truth_col);
            const std::size_t si = table.index_of(score_col);
            Eigen::VectorXd y(static_cast<Eigen::Index>(table.rows.size()));
            Eigen::VectorXd s(y.size());
            bool binary = true;
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                y[static_cast<Eigen::Index>(r)] = parse_cell(table.rows[r].at(ti), truth_col, r);
                s[static_cast<Eigen::Index>(r)] = parse_cell(table.rows[r].at(si), score_col, r);
                binary = binary && (y[static_cast<Eigen::Index>(r)] == 0.0 || y[static_cast<Eigen::Index>(r)] == 1.0);
            }
            if (y.size() == 0) throw Error(ErrorCode::InvalidArgument, "predictions file has no rows");
            const bool classify = kind == "classification" || (kind == "auto" && binary);
            if (classify) {
                if (!binary) throw Error(ErrorCode::NonBinaryResponse, "classification metrics need a 0/1 response");
                const auto m = classification_metrics(y, s, cutoff);
                values.insert(values.end(), {{"accuracy", m.accuracy}, {"sensitivity", m.sensitivity},
                    {"specificity", m.specificity}, {"auc", m.auc}});
            } else {
                values.emplace_back("rmse", rmse(y, s));
            }
        }
        if (!active.empty() || !selected.empty()) {
            if (active.empty() || p == 0) throw Error(ErrorCode::InvalidArgument, "selection metrics need --active and --p");
            const auto truth = SelectionTruth::from_active(parse_index_list(active, p, "--active"), p);
            const auto sel = parse_index_list(selected, p, "--selected");
            const auto m = selection_metrics(truth, sel, divide_by_p);
            values.insert(values.end(), {{"selection_sensitivity", m.sensitivity}, {"selection_specificity", m.specificity}});
        }

        Json body = Json::object();
        for (const auto& [k, v] : values) body[k] = v;
        emit(json_out, dump(document("metrics", std::move(body))));
        if (!csv_out.empty()) {
            std::string out = csv_line({"metric", "value"});
            for (const auto& [k, v] : values) out += csv_line({k, format_number(v)});
            emit(csv_out, out);
        }
        return kExitOk;
    }
};

// ---------------------------------------------------------------- penalty

struct PenaltyCommand
{
    std::string family = "scad";
    double lambda = 1.0;
    std::optional<double> gamma;
    double from = 0.0;
    double to = 5.0;
    std::size_t points = 101;
    std::string csv_out;

    void add_to(CLI::App* app)
    {
        app->add_option("--family", family, "Scalar penalty")->check(CLI::IsMember({"lasso", "scad", "mcp"}))->capture_default_str();
        app->add_option("--lambda", lambda, "Penalty level")->capture_default_str();
        app->add_option("--gamma", gamma, "Concavity")->default_str("3.7 for scad, 3 for mcp");
        app->add_option("--from", from, "First |beta| value")->capture_default_str();
        app->add_option("--to", to, "Last |beta| value")->capture_default_str();
        app->add_option("--points", points, "Grid points")->capture_default_str();
        app->add_option("--csv", csv_out, "beta,penalty,derivative CSV (default stdout)");
    }

    int run() const
    {
        PenaltySpec spec;
        if (family == "lasso") spec = PenaltySpec::lasso(lambda);
        else if (family == "scad") spec = PenaltySpec::scad(lambda, gamma.value_or(default_scad_gamma));
        else spec = PenaltySpec::mcp(lambda, gamma.value_or(default_mcp_gamma));
        spec.validate();
        if (points < 2) throw Error(ErrorCode::InvalidArgument, "--points must be at least 2");
        if (!(from >= 0.0) || !(to > from)) throw Error(ErrorCode::InvalidArgument, "need 0 <= --from < --to");
        std::string out = csv_line({"beta", "penalty", "derivative"});
        for (std::size_t i = 0; i < points; ++i) {
            const double w = from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1);
            out += csv_line({format_number(w), format_number(penalty_value(spec, w)), format_number(penalty_derivative(spec, w))});
        }
        emit(csv_out, out);
        return kExitOk;
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-stage group variable selection: screening, variable clustering and group-penalized fits"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every command");

    FitCommand fit;
    TwoStageCommand two_stage;
    ClusterCommand cluster;
    ScreenCommand screen_cmd;
    SimulateCommand simulate;
    SmoteCommand smote_cmd;
    MetricsCommand metrics;
    PenaltyCommand penalty;

    std::function<int()> action;
    auto bind = [&](CLI::App* sub, auto& cmd) {
        cmd.add_to(sub);
        sub->callback([&action, &cmd] { action = [&cmd] { return cmd.run(); }; });
    };
    bind(app.add_subcommand("fit", "Group-penalized path with cross-validation over given groups"), fit);
    bind(app.add_subcommand("two-stage", "Screening, clustering and a group-penalized fit over the discovered groups"), two_stage);
    bind(app.add_subcommand("cluster", "Hierarchical variable clustering with bootstrap stability"), cluster);
    bind(app.add_subcommand("screen", "Marginal screening by distance correlation or Pearson correlation"), screen_cmd);
    bind(app.add_subcommand("simulate", "Simulation experiments comparing random groups with discovered groups"), simulate);
    bind(app.add_subcommand("smote", "Oversample the minority class of a binary response"), smote_cmd);
    bind(app.add_subcommand("metrics", "Prediction and selection metrics"), metrics);
    bind(app.add_subcommand("penalty", "Plot-ready penalty and derivative curves"), penalty);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        return action();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_validation_error(e.code()) ? kExitUsage : kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
