#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sbnoise/bath_kernel.hpp"
#include "sbnoise/correlation.hpp"
#include "sbnoise/dfs.hpp"
#include "sbnoise/oracle.hpp"
#include "sbnoise/wick.hpp"

namespace sbnoise::io {

using nlohmann::json;

// Malformed serialized input; names the offending field or line.
class FormatError : public Error {
public:
    using Error::Error;
};

// printf("%.12e")
std::string format_number(double x);

json to_json(const BathSpec& bath);
BathSpec bath_from_json(const json& j);

json to_json(const QubitLayout& layout);
QubitLayout layout_from_json(const json& j);

json to_json(const ContractionMatrix& c);
ContractionMatrix contraction_from_json(const json& j);

// Long format, one row per entry: t,channel,delta,row,col,re,im.
std::string contraction_csv_header();
std::string contraction_csv_rows(const ContractionMatrix& c);
std::vector<ContractionMatrix> contraction_from_csv(const std::string& text);

json to_json(const ErrorPattern& p);
ErrorPattern pattern_from_json(const json& j);
json to_json(const AmplitudeReport& r);
AmplitudeReport amplitude_report_from_json(const json& j);

// Amplitudes are numbers or [re, im] pairs; a state is either a bare amplitude
// list or an object {"label": ..., "amplitudes": [...]}.
RegisterState state_from_json(const json& j);
std::vector<std::pair<std::string, RegisterState>> states_from_json(const json& j);
json to_json(const RegisterState& s);

json to_json(const DecompositionReport& r);
json to_json(const CanonicalReport& r);
json to_json(const DfsDecouplingReport& r);

// Artifact envelope {"schema", "version", "config", "result"}.
json make_artifact(const std::string& schema, const json& config, const json& result);
// Re-parses the result section with the reader for its schema; throws FormatError on mismatch.
void validate_artifact(const json& artifact);

// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace sbnoise::io
