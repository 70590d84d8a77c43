#pragma once

// JSON views of every result type.

#include <json.hpp>

#include "hoqc/certify.hpp"
#include "hoqc/korn.hpp"
#include "hoqc/params.hpp"
#include "hoqc/qctest.hpp"
#include "hoqc/search.hpp"
#include "hoqc/sweep.hpp"

namespace hoqc {

inline constexpr int kReportSchema = 1;

nlohmann::json matrix_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

nlohmann::json report_json(const ModelParams& params);
nlohmann::json report_json(const ConstantsTable& table);
nlohmann::json report_json(const SweepReport& sweep);
/// The field itself is not embedded; `field_path` names its file if saved.
nlohmann::json report_json(const KornEstimate& est, const std::string& field_path = "");
nlohmann::json report_json(const OptimizerSettings& settings);
nlohmann::json report_json(const DeficitReport& report, const std::string& witness_path = "");
nlohmann::json report_json(const CertificateReport& cert);
nlohmann::json report_json(const ProbeOutcome& probe);
nlohmann::json report_json(const SandwichVerdict& v);

OptimizerSettings optimizer_from_json(const nlohmann::json& j, OptimizerSettings base = {});

} // namespace hoqc
