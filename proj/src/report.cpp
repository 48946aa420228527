#include <grpsel/report.hpp>

#include <grpsel/io.hpp>

namespace grpsel {

std::vector<std::string> expanded_column_names(const Dataset& d)
{
    std::vector<std::string> out;
    for (const auto& c : d.columns()) {
        if (!c.is_qualitative()) {
            out.push_back(c.name);
            continue;
        }
        for (const auto& level : c.levels) out.push_back(c.name + "=" + level);
    }
    return out;
}

Json partition_json(const Partition& part, std::span<const std::string> names)
{
    Json groups = Json::array();
    for (const auto& members : part.members()) {
        Json g = Json::array();
        for (std::size_t v : members) g.push_back(v < names.size() ? names[v] : std::to_string(v + 1));
        groups.push_back(std::move(g));
    }
    Json labels = Json::array();
    for (int l : part.labels()) labels.push_back(l + 1);
    return Json{{"cluster_count", part.cluster_count()}, {"labels", labels}, {"groups", groups}};
}

Json dendrogram_json(const Dendrogram& dend)
{
    Json merges = Json::array();
    for (const auto& m : dend.merges) {
        merges.push_back(Json{{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
    }
    return Json{{"leaves", dend.leaf_names}, {"merges", merges}};
}

Json stability_json(const StabilityCurve& curve)
{
    return Json{{"cluster_counts", curve.cluster_counts}, {"mean_ari", curve.mean_ari}, {"chosen_m", curve.chosen_m}};
}

Json screening_json(const ScreeningResult& res, std::span<const std::string> names)
{
    Json kept = Json::array();
    for (std::size_t v : res.kept) kept.push_back(names[v]);
    return Json{{"method", to_string(res.method)}, {"d", res.d}, {"scores", res.scores}, {"kept", kept}};
}

Json fit_json(const FitResult& fit, std::span<const std::string> column_names)
{
    Json path = Json::array();
    for (std::size_t g = 0; g < fit.size(); ++g) {
        const auto& c = fit.path[g];
        Json nonzero = Json::object();
        for (Eigen::Index j = 0; j < c.beta.size(); ++j) {
            if (c.beta[j] != 0.0) nonzero[column_names[static_cast<std::size_t>(j)]] = c.beta[j];
        }
        path.push_back(Json{{"lambda", fit.lambdas[g]}, {"intercept", c.intercept}, {"loss", fit.loss_path[g]},
            {"df", fit.df_path[g]}, {"converged", fit.converged[g] != 0}, {"iterations", fit.iterations[g]},
            {"coefficients", nonzero}});
    }
    Json groups = Json::array();
    for (int l : fit.groups.labels()) groups.push_back(l + 1);
    return Json{{"columns", column_names}, {"column_groups", groups}, {"path", path}};
}

Json cv_json(const CvResult& cv)
{
    return Json{{"folds", cv.fold_loss.rows()}, {"lambdas", cv.lambdas}, {"mean_loss", cv.mean_loss},
        {"sd_loss", cv.sd_loss}, {"best_index", cv.best_index}, {"best_lambda", cv.best_lambda}};
}

Json two_stage_json(const TwoStageReport& rep, const Dataset& d)
{
    const auto names = d.column_names();
    std::vector<std::string> retained_names;
    for (std::size_t v : rep.retained) retained_names.push_back(names[v]);
    const Dataset sub = d.select_columns(rep.retained);

    Json j;
    j["loss"] = to_string(rep.loss);
    j["family"] = to_string(rep.family);
    j["screening"] = rep.screened ? screening_json(*rep.screened, names) : Json(nullptr);
    j["retained"] = retained_names;
    j["dendrogram"] = rep.dendrogram ? dendrogram_json(*rep.dendrogram) : Json(nullptr);
    j["stability"] = stability_json(rep.stability);
    j["partition"] = partition_json(rep.partition, retained_names);
    j["cv"] = cv_json(rep.cv);
    j["best_lambda"] = rep.best_lambda;
    const auto& best = rep.best();
    const auto cols = expanded_column_names(sub);
    Json coef = Json::object();
    for (Eigen::Index c = 0; c < best.beta.size(); ++c) {
        if (best.beta[c] != 0.0) coef[cols[static_cast<std::size_t>(c)]] = best.beta[c];
    }
    j["intercept"] = best.intercept;
    j["coefficients"] = coef;
    j["selected_variables"] = rep.selected_names;
    j["fit"] = fit_json(rep.fit, cols);
    return j;
}

Json document(const std::string& kind, Json body)
{
    Json out;
    out["schema_version"] = kSchemaVersion;
    out["kind"] = kind;
    for (auto& [k, v] : body.items()) out[k] = v;
    return out;
}

std::string dump(const Json& j)
{
    return j.dump(2) + "\n";
}

std::string partition_csv(const Partition& part, std::span<const std::string> names)
{
    std::string out = csv_line({"variable", "group"});
    for (std::size_t i = 0; i < part.size(); ++i) out += csv_line({names[i], std::to_string(part.label(i) + 1)});
    return out;
}

std::string screening_csv(const ScreeningResult& res, std::span<const std::string> names)
{
    std::vector<std::size_t> rank(res.scores.size());
    for (std::size_t r = 0; r < res.ranking.size(); ++r) rank[res.ranking[r]] = r + 1;
    std::string out = csv_line({"variable", "score", "rank", "kept"});
    for (std::size_t v = 0; v < res.scores.size(); ++v) {
        out += csv_line({names[v], format_number(res.scores[v]), std::to_string(rank[v]), rank[v] <= res.d ? "1" : "0"});
    }
    return out;
}

std::string stability_csv(const StabilityCurve& curve)
{
    std::string out = csv_line({"m", "mean_ari", "chosen"});
    for (std::size_t i = 0; i < curve.cluster_counts.size(); ++i) {
        out += csv_line({std::to_string(curve.cluster_counts[i]), format_number(curve.mean_ari[i]),
            curve.cluster_counts[i] == curve.chosen_m ? "1" : "0"});
    }
    return out;
}

std::string cv_csv(const CvResult& cv)
{
    std::string out = csv_line({"lambda", "mean_loss", "sd_loss", "best"});
    for (std::size_t g = 0; g < cv.lambdas.size(); ++g) {
        out += csv_line({format_number(cv.lambdas[g]), format_number(cv.mean_loss[g]), format_number(cv.sd_loss[g]),
            g == cv.best_index ? "1" : "0"});
    }
    return out;
}

std::string selected_csv(std::span<const std::size_t> indices, std::span<const std::string> names)
{
    std::string out = csv_line({"variable", "index"});
    for (std::size_t v : indices) out += csv_line({names[v], std::to_string(v + 1)});
    return out;
}

} // namespace grpsel
