#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include <grpsel/clustering.hpp>
#include <grpsel/metrics.hpp>
#include <grpsel/screening.hpp>
#include <grpsel/solvers.hpp>
#include <grpsel/two_stage.hpp>

namespace grpsel {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// One name per standardized column: the variable name, or "name=level" for indicators.
std::vector<std::string> expanded_column_names(const Dataset& d);

Json partition_json(const Partition& part, std::span<const std::string> names);
Json dendrogram_json(const Dendrogram& dend);
Json stability_json(const StabilityCurve& curve);
Json screening_json(const ScreeningResult& res, std::span<const std::string> names);
Json fit_json(const FitResult& fit, std::span<const std::string> column_names);
Json cv_json(const CvResult& cv);
/// Full report; `names` are the variable names of the original dataset.
Json two_stage_json(const TwoStageReport& rep, const Dataset& d);

/// Adds schema_version and a kind tag at the top of a document.
Json document(const std::string& kind, Json body);
std::string dump(const Json& j);

std::string partition_csv(const Partition& part, std::span<const std::string> names);
std::string screening_csv(const ScreeningResult& res, std::span<const std::string> names);
std::string stability_csv(const StabilityCurve& curve);
std::string cv_csv(const CvResult& cv);
std::string selected_csv(std::span<const std::size_t> indices, std::span<const std::string> names);

} // namespace grpsel
