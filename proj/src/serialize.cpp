#include "alrs/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "alrs/error.hpp"

namespace alrs::io {
namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double numberField(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number())
    throw InvalidArgument(std::string("transform JSON lacks numeric field '") + key + "'");
  return j.at(key).get<double>();
}

Json optionalNumber(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json toJson(const AffineTransform& t) {
  return Json{{"a", t.a}, {"b", t.b}, {"tx", t.tx}, {"c", t.c}, {"d", t.d}, {"ty", t.ty}};
}

AffineTransform transformFromJson(const Json& j) {
  AffineTransform t;
  t.a = numberField(j, "a");
  t.b = numberField(j, "b");
  t.tx = numberField(j, "tx");
  t.c = numberField(j, "c");
  t.d = numberField(j, "d");
  t.ty = numberField(j, "ty");
  if (!t.isFinite()) throw InvalidArgument("transform JSON holds non-finite values");
  return t;
}

Json toJson(const estimate::FitResult& fit) {
  return Json{{"transform", toJson(fit.transform)}, {"rmse", fit.rmse}, {"residuals", fit.residuals}};
}

Json toJson(const pipeline::PipelineConfig& cfg) {
  return Json{{"tau", cfg.tau},
              {"dratio", cfg.dRatio},
              {"epsilon", cfg.epsilon},
              {"max_levels", cfg.maxLevels},
              {"flat_threshold", cfg.flatThreshold},
              {"min_region_size", cfg.minRegionSize},
              {"seed", cfg.seed},
              {"sift",
               {{"intervals", cfg.sift.intervals},
                {"sigma", cfg.sift.sigma},
                {"contrast_threshold", cfg.sift.contrastThreshold},
                {"edge_ratio", cfg.sift.edgeRatio},
                {"mask_blur", cfg.sift.maskBlur},
                {"upsample_first_octave", cfg.sift.upsampleFirstOctave}}}};
}

Json toJson(const pipeline::RegistrationReport& report) {
  Json levels = Json::array();
  for (const auto& d : report.levels) {
    levels.push_back({{"level", d.level},
                      {"width", d.width},
                      {"height", d.height},
                      {"initial_matches", d.initialMatches},
                      {"survivors", d.survivors},
                      {"scaled_rmse", optionalNumber(d.scaledRmse)},
                      {"status", pipeline::toString(d.status)}});
  }
  return Json{{"status", report.success ? "success" : "failure"},
              {"final_transform", report.finalTransform ? toJson(*report.finalTransform) : Json(nullptr)},
              {"level_used", report.levelUsed},
              {"scaled_rmse", optionalNumber(report.scaledRmse)},
              {"initial_matches", report.initialMatches.size()},
              {"survivors", report.survivors.size()},
              {"removed", report.removals.size()},
              {"levels", levels}};
}

Json toJson(const eval::MatchingScore& s) {
  return Json{{"initial_correct", s.initialCorrect},
              {"residual_correct", s.residualCorrect},
              {"residual_total", s.residualTotal},
              {"recall", s.recallDefined ? Json(s.recall) : Json(nullptr)},
              {"precision", s.precisionDefined ? Json(s.precision) : Json(nullptr)}};
}

Json toJson(const eval::RegistrationScore& s) {
  return Json{{"n_red", s.nRed}, {"rms_all", s.rmsAll}, {"rms_loo", s.rmsLoo}, {"bpp2", s.bpp2}};
}

void writeCorrespondencesCsv(std::ostream& out, const CorrespondenceSet& cs) {
  out << "px,py,qx,qy\n";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    out << fmt(cs.refPoints[i].x) << ',' << fmt(cs.refPoints[i].y) << ',' << fmt(cs.sensedPoints[i].x) << ','
        << fmt(cs.sensedPoints[i].y) << '\n';
  }
}

CorrespondenceSet readCorrespondencesCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("px,py,qx,qy", 0) != 0)
    throw InvalidArgument("correspondence CSV must start with header px,py,qx,qy");
  CorrespondenceSet cs;
  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    double v[4];
    for (double& x : v) {
      if (!std::getline(ss, cell, ',')) throw InvalidArgument("short row at line " + std::to_string(lineNo));
      try {
        x = std::stod(cell);
      } catch (const std::exception&) {
        throw InvalidArgument("bad number at line " + std::to_string(lineNo));
      }
    }
    cs.add({v[0], v[1]}, {v[2], v[3]});
  }
  return cs;
}

void writeRegionsCsv(std::ostream& out, const std::vector<lsr::LineSupportRegion>& regions) {
  out << "cx,cy,angle_deg,length,width,count\n";
  for (const auto& r : regions) {
    out << fmt(r.center.x) << ',' << fmt(r.center.y) << ',' << fmt(r.angleDeg) << ',' << fmt(r.length) << ','
        << fmt(r.width) << ',' << r.memberCount << '\n';
  }
}

void writeRemovalsCsv(std::ostream& out, const std::vector<gor::RemovalEvent>& events) {
  out << "iteration,removed_index,S_value\n";
  for (const auto& e : events) out << e.iteration << ',' << e.index << ',' << e.score << '\n';
}

void writeText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

Json readJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("unreadable file: " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace alrs::io
