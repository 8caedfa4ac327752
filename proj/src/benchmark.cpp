#include "alrs/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "alrs/error.hpp"
#include "alrs/gor.hpp"
#include "alrs/image_io.hpp"
#include "alrs/serialize.hpp"

namespace alrs::bench {
namespace {

using io::Json;

AffineTransform parseTruth(const Json& j, int width, int height) {
  if (j.contains("a")) return io::transformFromJson(j);
  const Point2 c{(width - 1) / 2.0, (height - 1) / 2.0};
  const double rot = j.value("rotate_cw_deg", 0.0);
  const double scale = j.value("scale", 1.0);
  const double h = j.value("shear_h", 0.0);
  const double v = j.value("shear_v", 0.0);
  return eval::shear(h, v, c) * eval::rotationScale(rot, scale, c);
}

std::size_t positiveCount(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0)
    throw InvalidArgument(std::string("fixture needs a non-negative integer '") + key + "'");
  return j.at(key).get<std::size_t>();
}

CorrespondenceSet filterWith(Method m, const CorrespondenceSet& initial, std::uint64_t seed,
                             const Options& options) {
  if (m == Method::Gor) {
    if (initial.size() < 3) return {};
    return gor::removeOutliers(initial).survivors;
  }
  estimate::RansacParams params = options.ransac;
  params.seed = seed;
  try {
    const auto result = estimate::fitAffineRansac(initial, params);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < result.inlierMask.size(); ++i)
      if (result.inlierMask[i]) keep.push_back(i);
    return initial.select(keep);
  } catch (const Error&) {
    return {};
  }
}

struct Accumulator {
  std::size_t trials = 0;
  double recall = 0.0;
  std::size_t precisionCount = 0;
  double precision = 0.0;
  std::size_t regCount = 0;
  double nRed = 0.0, rmsAll = 0.0, rmsLoo = 0.0, bpp2 = 0.0;

  void add(const eval::MatchingScore& m, const CorrespondenceSet& survivors) {
    ++trials;
    recall += m.recallDefined ? m.recall : 0.0;
    if (m.precisionDefined) {
      precision += m.precision;
      ++precisionCount;
    }
    if (survivors.size() < 4) return;
    try {
      const auto fit = estimate::fitAffineLSM(survivors);
      const auto r = eval::scoreRegistration(survivors, fit.transform);
      nRed += static_cast<double>(r.nRed);
      rmsAll += r.rmsAll;
      rmsLoo += r.rmsLoo;
      bpp2 += r.bpp2;
      ++regCount;
    } catch (const DegenerateError&) {
    }
  }

  Summary finish(const std::string& name, Method m) const {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    Summary s;
    s.fixture = name;
    s.method = m;
    s.trials = trials;
    s.recall = trials ? recall / trials : nan;
    s.precision = precisionCount ? precision / precisionCount : nan;
    const double k = static_cast<double>(regCount);
    s.nRed = regCount ? nRed / k : nan;
    s.rmsAll = regCount ? rmsAll / k : nan;
    s.rmsLoo = regCount ? rmsLoo / k : nan;
    s.bpp2 = regCount ? bpp2 / k : nan;
    return s;
  }
};

std::string cell(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

Fixture loadFixture(const std::filesystem::path& path) {
  const Json j = io::readJson(path);
  Fixture f;
  f.name = j.value("name", path.stem().string());
  const std::string kind = j.value("kind", "");
  if (kind == "points") {
    f.kind = FixtureKind::Points;
    f.width = static_cast<int>(positiveCount(j, "width"));
    f.height = static_cast<int>(positiveCount(j, "height"));
    if (f.width <= 0 || f.height <= 0) throw InvalidArgument("fixture frame must be non-empty");
    f.inliers = positiveCount(j, "inliers");
    f.outliers = positiveCount(j, "outliers");
  } else if (kind == "image") {
    f.kind = FixtureKind::Image;
    if (!j.contains("image") || !j.at("image").is_string()) throw InvalidArgument("image fixture needs 'image'");
    f.image = j.at("image").get<std::string>();
    if (f.image.is_relative()) f.image = path.parent_path() / f.image;
    const GrayImage img = loadImage(f.image);
    f.width = img.width();
    f.height = img.height();
  } else {
    throw InvalidArgument("fixture kind must be 'points' or 'image': " + path.string());
  }
  if (!j.contains("transform")) throw InvalidArgument("fixture needs 'transform': " + path.string());
  f.truth.transform = parseTruth(j.at("transform"), f.width, f.height);
  f.truth.inlierTol = j.value("inlier_tol", 2.0);
  return f;
}

std::vector<Fixture> loadFixtureDir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  if (files.empty()) throw InvalidArgument("no fixtures in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<Fixture> out;
  for (const auto& p : files) out.push_back(loadFixture(p));
  return out;
}

Method parseMethod(const std::string& name) {
  if (name == "gor") return Method::Gor;
  if (name == "ransac") return Method::Ransac;
  throw InvalidArgument("unknown method: " + name);
}

std::string toString(Method m) { return m == Method::Gor ? "gor" : "ransac"; }

std::vector<Summary> runFixture(const Fixture& fixture, const Options& options) {
  if (options.seeds == 0) throw InvalidArgument("seed count must be positive");
  CorrespondenceSet imageMatches;
  if (fixture.kind == FixtureKind::Image) {
    const auto pair = eval::synthesizePair(loadImage(fixture.image), fixture.truth.transform);
    imageMatches = pipeline::matchLevel(pair.ref, pair.sensed, 0, options.pipeline).matches;
  }

  std::vector<Accumulator> acc(options.methods.size());
  for (std::uint64_t seed = 0; seed < options.seeds; ++seed) {
    CorrespondenceSet initial;
    if (fixture.kind == FixtureKind::Points) {
      const auto exact =
          eval::exactCorrespondences(fixture.truth.transform, fixture.inliers, fixture.width, fixture.height, seed);
      initial = eval::injectOutliers(exact, fixture.outliers, fixture.width, fixture.height, seed + 1000003).set;
    } else {
      initial = imageMatches;
    }
    for (std::size_t m = 0; m < options.methods.size(); ++m) {
      const auto survivors = filterWith(options.methods[m], initial, seed, options);
      acc[m].add(eval::scoreMatching(initial, survivors, fixture.truth), survivors);
    }
  }

  std::vector<Summary> rows;
  for (std::size_t m = 0; m < options.methods.size(); ++m) rows.push_back(acc[m].finish(fixture.name, options.methods[m]));
  return rows;
}

void writeSummaryCsv(std::ostream& out, const std::vector<Summary>& rows) {
  out << "fixture,method,recall,precision,n_red,rms_all,rms_loo,bpp2\n";
  for (const auto& r : rows) {
    out << r.fixture << ',' << toString(r.method) << ',' << cell(r.recall) << ',' << cell(r.precision) << ','
        << cell(r.nRed) << ',' << cell(r.rmsAll) << ',' << cell(r.rmsLoo) << ',' << cell(r.bpp2) << '\n';
  }
}

}  // namespace alrs::bench
