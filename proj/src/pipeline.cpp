#include "alrs/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "alrs/error.hpp"

namespace alrs::pipeline {

void PipelineConfig::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (maxLevels < 1 || maxLevels > 16) throw InvalidArgument("maxLevels must lie in 1..16");
  if (!(tau > 0.0 && tau < 180.0)) throw InvalidArgument("tau must lie in (0, 180) degrees");
  if (!(dRatio > 0.0 && dRatio < 1.0)) throw InvalidArgument("dRatio must lie in (0, 1)");
  if (!(flatThreshold >= 0.0)) throw InvalidArgument("flatThreshold must be non-negative");
  if (minRegionSize < 1) throw InvalidArgument("minRegionSize must be positive");
}

std::string toString(LevelStatus s) {
  switch (s) {
    case LevelStatus::Success: return "success";
    case LevelStatus::AboveEpsilon: return "above_epsilon";
    case LevelStatus::TooFewMatches: return "too_few_matches";
    case LevelStatus::GorDegenerate: return "gor_degenerate";
    case LevelStatus::FitDegenerate: return "fit_degenerate";
  }
  return "unknown";
}

bool RegistrationReport::allLevelsDegenerate() const {
  return std::none_of(levels.begin(), levels.end(), [](const LevelDiagnostics& d) { return d.scaledRmse.has_value(); });
}

AffineTransform rescaleTransform(const AffineTransform& t, int level) {
  if (level < 0) throw InvalidArgument("level must be non-negative");
  AffineTransform out = t;
  out.tx = std::ldexp(t.tx, level);
  out.ty = std::ldexp(t.ty, level);
  return out;
}

double levelFrameOffset(int level) { return 0.5 * (1.0 - std::ldexp(1.0, -level)); }

RegistrationReport registerLevels(const LevelMatcher& matcher, const PipelineConfig& cfg) {
  cfg.validate();
  RegistrationReport report;

  struct Candidate {
    int level;
    double error;
    CorrespondenceSet initial;
    CorrespondenceSet survivors;
    std::vector<gor::RemovalEvent> removals;
  };
  std::optional<Candidate> best;

  for (int level = 0; level < cfg.maxLevels; ++level) {
    LevelMatches lm = matcher(level);
    LevelDiagnostics diag;
    diag.level = level;
    diag.width = lm.width;
    diag.height = lm.height;
    diag.initialMatches = lm.matches.size();

    if (lm.matches.size() < 3) {
      diag.status = LevelStatus::TooFewMatches;
      report.levels.push_back(diag);
      continue;
    }
    const gor::RemovalResult gorResult = gor::removeOutliers(lm.matches);
    diag.survivors = gorResult.survivors.size();
    if (gorResult.degenerate) {
      diag.status = LevelStatus::GorDegenerate;
      report.levels.push_back(diag);
      continue;
    }
    estimate::FitResult fit;
    try {
      fit = estimate::fitAffineLSM(gorResult.survivors);
    } catch (const DegenerateError&) {
      diag.status = LevelStatus::FitDegenerate;
      report.levels.push_back(diag);
      continue;
    }
    const double err = estimate::scaledRmse(fit, level);
    diag.scaledRmse = err;
    diag.status = err < cfg.epsilon ? LevelStatus::Success : LevelStatus::AboveEpsilon;
    report.levels.push_back(diag);

    const double toFull = std::ldexp(1.0, level);
    if (!best || err < best->error)
      best = Candidate{level, err, lm.matches.scaled(toFull), gorResult.survivors.scaled(toFull), gorResult.events};

    if (diag.status == LevelStatus::Success) {
      report.success = true;
      report.finalTransform = rescaleTransform(fit.transform, level);
      break;
    }
  }

  if (best) {
    report.levelUsed = best->level;
    report.scaledRmse = best->error;
    report.initialMatches = std::move(best->initial);
    report.survivors = std::move(best->survivors);
    report.removals = std::move(best->removals);
  }
  return report;
}

LevelMatches matchLevel(const GrayImage& ref, const GrayImage& sensed, int level, const PipelineConfig& cfg,
                        std::vector<LevelProducts>* products) {
  const GrayImage r = downsample(ref, level);
  const GrayImage s = downsample(sensed, level);
  lsr::Segmentation rs = lsr::segment(r, cfg.tau, cfg.flatThreshold, cfg.minRegionSize);
  lsr::Segmentation ss = lsr::segment(s, cfg.tau, cfg.flatThreshold, cfg.minRegionSize);
  const auto rf = features::detectAndDescribe(r, rs.mask, cfg.sift);
  const auto sf = features::detectAndDescribe(s, ss.mask, cfg.sift);
  LevelMatches lm;
  lm.width = r.width();
  lm.height = r.height();
  lm.matches = features::ratioMatch(rf, sf, cfg.dRatio);
  const double off = levelFrameOffset(level);
  for (auto& p : lm.matches.refPoints) p = p + Point2{off, off};
  for (auto& q : lm.matches.sensedPoints) q = q + Point2{off, off};
  if (products) products->push_back({level, std::move(rs), std::move(ss)});
  return lm;
}

RegistrationReport registerImages(const GrayImage& ref, const GrayImage& sensed, const PipelineConfig& cfg,
                                  std::vector<LevelProducts>* products) {
  cfg.validate();
  const int minSide = 1 << cfg.maxLevels;
  if (std::min({ref.width(), ref.height(), sensed.width(), sensed.height()}) < minSide)
    throw InvalidArgument("images too small for the requested number of levels");

  LevelMatcher matcher = [&](int level) { return matchLevel(ref, sensed, level, cfg, products); };
  return registerLevels(matcher, cfg);
}

}  // namespace alrs::pipeline
