// Acceptance campaign: one PASS/FAIL line per criterion, non-zero exit on any
// failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "alrs/estimate.hpp"
#include "alrs/eval.hpp"
#include "alrs/gor.hpp"
#include "alrs/image_io.hpp"
#include "alrs/lsr.hpp"
#include "alrs/pipeline.hpp"

namespace {

using namespace alrs;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Point2 gridPoint(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_int_distribution<long> d(static_cast<long>(lo * 256), static_cast<long>(hi * 256));
  return {d(rng) / 256.0, d(rng) / 256.0};
}

/// Rotation, scale and shear mixes about the frame centre. Every fourth map
/// is the h = v = 0.1 shear protocol.
AffineTransform protocolMix(std::mt19937_64& rng, int index, Point2 centre) {
  if (index % 4 == 3) return eval::shear(0.1, 0.1, centre);
  std::uniform_real_distribution<double> ang(0, 360), sc(0.7, 1.3), sh(-0.15, 0.15);
  return eval::shear(sh(rng), sh(rng), centre) * eval::rotationScale(ang(rng), sc(rng), centre);
}

eval::InjectedSet stressSet(std::uint64_t seed, AffineTransform& truth) {
  std::mt19937_64 rng(seed);
  truth = protocolMix(rng, static_cast<int>(seed), {255.5, 255.5});
  const auto exact = eval::exactCorrespondences(truth, 50, 512, 512, seed);
  return eval::injectOutliers(exact, 30, 512, 512, seed + 1000003);
}

Outcome ledgerOracle() {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> size(3, gor::kOracleMaxSize);
  std::uniform_int_distribution<int> coarse(0, 4);
  for (int trial = 0; trial < 500; ++trial) {
    CorrespondenceSet cs;
    const std::size_t n = size(rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (trial % 3 == 0)
        cs.add({1.0 * coarse(rng), 1.0 * coarse(rng)}, {1.0 * coarse(rng), 1.0 * coarse(rng)});
      else
        cs.add(gridPoint(rng, 0, 512), gridPoint(rng, 0, 512));
    }
    if (!(gor::computeLedger(gor::classify(cs)) == gor::bruteForceOracle(cs)))
      return {false, "mismatch in trial " + std::to_string(trial)};
  }
  return {true, "500 sets, integer-equal ledgers"};
}

Outcome signCovariance() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> pt(-4096, 4096), coef(-40, 40), tr(-65536, 65536);
  auto point = [&] { return Point2{pt(rng) / 16.0, pt(rng) / 16.0}; };
  std::vector<std::array<Point2, 3>> triples;
  for (int i = 0; i < 1000; ++i) {
    const Point2 a = point(), b = point();
    triples.push_back({a, b, i % 20 == 0 ? a + 3.0 * (b - a) : point()});
  }
  int positive = 0, negative = 0;
  while (positive < 100 || negative < 100) {
    const AffineTransform t{coef(rng) / 16.0, coef(rng) / 16.0, coef(rng) / 16.0,
                            coef(rng) / 16.0, tr(rng) / 256.0,  tr(rng) / 256.0};
    const double det = t.linearDeterminant();
    if (det == 0.0 || (det > 0 && positive >= 100) || (det < 0 && negative >= 100)) continue;
    (det > 0 ? positive : negative)++;
    const int s = det > 0 ? 1 : -1;
    for (const auto& tri : triples)
      if (gor::edgeSign(t(tri[0]), t(tri[1]), t(tri[2])) != s * gor::edgeSign(tri[0], tri[1], tri[2]))
        return {false, "sign changed under a map with det " + std::to_string(det)};
  }
  return {true, "1000 triples x (100 positive + 100 negative) maps"};
}

Outcome fixedPoint() {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    const auto t = protocolMix(rng, static_cast<int>(seed), {255.5, 255.5});
    const auto r = gor::removeOutliers(eval::exactCorrespondences(t, 50, 512, 512, seed));
    if (!r.removedIndices.empty())
      return {false, std::to_string(r.removedIndices.size()) + " removals in trial " + std::to_string(seed)};
  }
  return {true, "200 exact sets, no removals"};
}

Outcome stress() {
  int perfect = 0;
  double recall = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    AffineTransform truth;
    const auto injected = stressSet(seed, truth);
    const auto r = gor::removeOutliers(injected.set);
    const auto s = eval::scoreMatching(injected.set, r.survivors, {truth, 2.0});
    perfect += s.precisionDefined && s.precision == 1.0;
    recall += s.recall;
  }
  recall /= 100;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "precision 1.0 in %d/100, mean recall %.4f", perfect, recall);
  return {perfect >= 99 && recall >= 0.8, buf};
}

Outcome endToEnd(const std::function<AffineTransform(Point2)>& make) {
  const GrayImage scene = loadImage(std::filesystem::path(ALRS_SOURCE_DIR) / "data" / "scene512.png");
  const auto truth = make(eval::imageCenter(scene));
  const auto pair = eval::synthesizePair(scene, truth);
  const auto report = pipeline::registerImages(pair.ref, pair.sensed, {});
  if (!report.success) return {false, "registration failed"};
  const double corner = eval::maxCornerDisplacement(*report.finalTransform, truth, scene.width(), scene.height());
  char buf[160];
  std::snprintf(buf, sizeof(buf), "level %d, scaled rmse %.3f, %zu/%zu kept, corner error %.3f px", report.levelUsed,
                *report.scaledRmse, report.survivors.size(), report.initialMatches.size(), corner);
  return {corner < 1.0, buf};
}

Outcome scaledRmseArithmetic() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 100);
  std::normal_distribution<double> noise(0, 0.7);
  for (int trial = 0; trial < 50; ++trial) {
    CorrespondenceSet cs;
    for (int i = 0; i < 12; ++i) {
      const Point2 p{u(rng), u(rng)};
      cs.add(p, p + Point2{noise(rng), noise(rng)});
    }
    const auto fit = estimate::fitAffineLSM(cs);
    for (int L = 0; L < 4; ++L)
      if (std::abs(estimate::scaledRmse(fit, L) - std::pow(2.0, L) * fit.rmse) > 1e-12)
        return {false, "level " + std::to_string(L)};
  }
  return {true, "50 fits x L in {0,1,2,3}"};
}

Outcome lsmExactness() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coef(-1.5, 1.5), tr(-100, 100), u(0, 500);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    AffineTransform t;
    do t = {coef(rng), coef(rng), coef(rng), coef(rng), tr(rng), tr(rng)};
    while (std::abs(t.linearDeterminant()) < 0.05);
    CorrespondenceSet cs;
    for (int i = 0; i < 5; ++i) {
      const Point2 p{u(rng), u(rng)};
      cs.add(p, {t.a * p.x + t.b * p.y + t.tx, t.c * p.x + t.d * p.y + t.ty});
    }
    const auto f = estimate::fitAffineLSM(cs).transform;
    for (double e : {f.a - t.a, f.b - t.b, f.c - t.c, f.d - t.d, f.tx - t.tx, f.ty - t.ty})
      worst = std::max(worst, std::abs(e));
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "100 maps, worst coefficient error %.2e", worst);
  return {worst < 1e-9, buf};
}

Outcome segmentationProperties() {
  const auto dir = std::filesystem::path(ALRS_SOURCE_DIR) / "tests" / "data";
  for (const char* name : {"bar96.png", "step64.pgm"}) {
    const GrayImage img = loadImage(dir / name);
    const GradientField f = computeGradientField(img);
    std::vector<lsr::JoinEvent> trace;
    const auto regions = lsr::growRegions(f, lsr::kDefaultTau, lsr::kDefaultMinRegionSize, &trace);
    if (regions.empty()) return {false, std::string(name) + ": no regions"};
    std::set<std::pair<int, int>> seen;
    for (const auto& r : regions) {
      double s = 0, c = 0;
      for (const auto& p : r.members()) {
        if (!seen.insert({p.x, p.y}).second) return {false, std::string(name) + ": overlapping regions"};
        s += std::sin(f.angleAt(p.x, p.y) * std::numbers::pi / 180);
        c += std::cos(f.angleAt(p.x, p.y) * std::numbers::pi / 180);
      }
      if (std::abs(std::remainder(std::atan2(s, c) - r.angleRad(), 2 * std::numbers::pi)) > 1e-9)
        return {false, std::string(name) + ": incremental angle drift"};
    }
    for (const auto& e : trace)
      if (!e.seed && !(circularDistanceDeg(e.pixelAngleDeg, e.regionAngleDeg) < lsr::kDefaultTau))
        return {false, std::string(name) + ": join outside tolerance"};
    const auto mask = lsr::segment(img).mask;
    for (int i = 0; i < 10; ++i)
      if (!(lsr::segment(img).mask == mask)) return {false, std::string(name) + ": nondeterministic mask"};
  }
  return {true, "bar and step fixtures"};
}

Outcome epsilonTrend() {
  double recall[2] = {0, 0}, precision[2] = {0, 0};
  int successes[2] = {0, 0};
  const double eps[2] = {0.5, 2.0};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    AffineTransform truth;
    const auto injected = stressSet(seed, truth);
    pipeline::LevelMatcher matcher = [&](int level) {
      const double f = std::ldexp(1.0, -level);
      return pipeline::LevelMatches{512 >> level, 512 >> level, injected.set.scaled(f)};
    };
    for (int e = 0; e < 2; ++e) {
      pipeline::PipelineConfig cfg;
      cfg.epsilon = eps[e];
      const auto r = pipeline::registerLevels(matcher, cfg);
      if (!r.success) continue;  // failed run: recall 0, no precision sample
      const auto s = eval::scoreMatching(injected.set, r.survivors, {truth, 2.0});
      recall[e] += s.recall;
      precision[e] += s.precision;
      ++successes[e];
    }
  }
  for (int e = 0; e < 2; ++e) {
    recall[e] /= 50;
    precision[e] = successes[e] ? precision[e] / successes[e] : 0.0;
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf), "eps 0.5: P %.4f R %.4f (%d ok); eps 2.0: P %.4f R %.4f (%d ok)", precision[0],
                recall[0], successes[0], precision[1], recall[1], successes[1]);
  return {precision[0] >= precision[1] && recall[0] <= recall[1], buf};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budgetSeconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"C1 ledger equals brute-force oracle", 10, ledgerOracle},
      {"C2 orientation sign affine covariance", 5, signCovariance},
      {"C3 GOR fixed point on exact sets", 0, fixedPoint},
      {"C4 GOR stress precision and recall", 60, stress},
      {"C5 end-to-end rotation 120 cw, scale 0.8", 120,
       [] { return endToEnd([](Point2 c) { return eval::rotationScale(120, 0.8, c); }); }},
      {"C6 end-to-end shear h = v = 0.1", 120,
       [] { return endToEnd([](Point2 c) { return eval::shear(0.1, 0.1, c); }); }},
      {"C7 scaled rmse arithmetic", 0, scaledRmseArithmetic},
      {"C8 LSM exactness", 0, lsmExactness},
      {"C9 segmentation properties", 0, segmentationProperties},
      {"C10 epsilon sensitivity trend", 0, epsilonTrend},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budgetSeconds > 0 && secs >= c.budgetSeconds) {
      o.pass = false;
      o.detail += " (over time budget)";
    }
    failures += !o.pass;
    std::printf("%s %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
