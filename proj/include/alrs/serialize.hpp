#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "alrs/estimate.hpp"
#include "alrs/eval.hpp"
#include "alrs/features.hpp"
#include "alrs/gor.hpp"
#include "alrs/lsr.hpp"
#include "alrs/pipeline.hpp"

// JSON and CSV encodings of the library's result types. Doubles are written
// with round-trip precision.
namespace alrs::io {

using Json = nlohmann::ordered_json;

Json toJson(const AffineTransform& t);
/// Throws InvalidArgument on missing or non-numeric fields.
AffineTransform transformFromJson(const Json& j);

Json toJson(const estimate::FitResult& fit);
Json toJson(const pipeline::PipelineConfig& cfg);
Json toJson(const pipeline::RegistrationReport& report);
Json toJson(const eval::MatchingScore& s);
Json toJson(const eval::RegistrationScore& s);

/// Header `px,py,qx,qy`.
void writeCorrespondencesCsv(std::ostream& out, const CorrespondenceSet& cs);
CorrespondenceSet readCorrespondencesCsv(std::istream& in);

/// Header `cx,cy,angle_deg,length,width,count`.
void writeRegionsCsv(std::ostream& out, const std::vector<lsr::LineSupportRegion>& regions);

/// Header `iteration,removed_index,S_value`.
void writeRemovalsCsv(std::ostream& out, const std::vector<gor::RemovalEvent>& events);

void writeText(const std::filesystem::path& path, const std::string& text);
Json readJson(const std::filesystem::path& path);

}  // namespace alrs::io
