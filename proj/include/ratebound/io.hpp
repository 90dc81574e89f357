#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ratebound/verify.hpp"

namespace ratebound {

using Json = nlohmann::json;

Json matrix_to_json(const Mat& m);  // row-major array of arrays
Mat matrix_from_json(const Json& j);
Json vector_to_json(const Vec& v);
Vec vector_from_json(const Json& j);

Json feedback_to_json(const FeedbackDescriptor& fd);
FeedbackDescriptor feedback_from_json(const Json& j);

Json reduced_form_to_json(const ReducedForm& rf);
ReducedForm reduced_form_from_json(const Json& j);

/// The (J, bhat, T, theta) bundle behind --dump-canonical.
Json canonical_to_json(const CanonicalForm& cf);

Json bounds_to_json(const BoundSpec& bounds);
BoundSpec bounds_from_json(const Json& j);

Json certificate_to_json(const BoundCertificate& cert);
Json tuning_report_to_json(const TuningReport& report);
Json siss_report_to_json(const SissReport& report);
Json lyapunov_report_to_json(const LyapunovSuiteReport& report);
Json growth_report_to_json(const GrowthReport& report);

/// Columns: t, x..., u..., then per-order derivative columns when jets are
/// attached (u<c>_d<j>).
std::string trajectory_to_csv(const Trajectory& traj);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace ratebound
