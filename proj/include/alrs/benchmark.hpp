#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "alrs/estimate.hpp"
#include "alrs/eval.hpp"
#include "alrs/pipeline.hpp"

// Method comparison over fixture files (the `eval` subcommand).
//
// Fixture JSON:
//   {"name": "...", "kind": "points" | "image",
//    "width": 512, "height": 512,            // points only
//    "inliers": 50, "outliers": 30,          // points only
//    "image": "relative/or/absolute.png",    // image only
//    "inlier_tol": 2.0,                      // optional
//    "transform": {"a":..,"b":..,"tx":..,"c":..,"d":..,"ty":..}
//              or {"rotate_cw_deg":..,"scale":..,"shear_h":..,"shear_v":..}}
// The parametric form is composed about the frame centre as
// shear * scale * rotation.
namespace alrs::bench {

enum class FixtureKind { Points, Image };

struct Fixture {
  std::string name;
  FixtureKind kind = FixtureKind::Points;
  int width = 0;
  int height = 0;
  std::size_t inliers = 0;
  std::size_t outliers = 0;
  std::filesystem::path image;
  eval::GroundTruth truth;
};

Fixture loadFixture(const std::filesystem::path& path);
/// All *.json files of a directory in name order. Throws InvalidArgument
/// when the directory holds none.
std::vector<Fixture> loadFixtureDir(const std::filesystem::path& dir);

enum class Method { Gor, Ransac };

Method parseMethod(const std::string& name);
std::string toString(Method m);

struct Options {
  std::vector<Method> methods{Method::Gor, Method::Ransac};
  std::size_t seeds = 100;
  pipeline::PipelineConfig pipeline;
  estimate::RansacParams ransac;
};

/// Means over trials. Precision averages the trials where it is defined;
/// the registration columns average the trials with at least 4 survivors
/// and a non-degenerate fit, and are NaN when there is none.
struct Summary {
  std::string fixture;
  Method method = Method::Gor;
  std::size_t trials = 0;
  double recall = 0.0;
  double precision = 0.0;
  double nRed = 0.0;
  double rmsAll = 0.0;
  double rmsLoo = 0.0;
  double bpp2 = 0.0;
};

/// Trial s uses seed s for both the point generator and RANSAC. Image
/// fixtures match once at level 0 and rerun only the outlier filter.
std::vector<Summary> runFixture(const Fixture& fixture, const Options& options);

/// Header `fixture,method,recall,precision,n_red,rms_all,rms_loo,bpp2`.
void writeSummaryCsv(std::ostream& out, const std::vector<Summary>& rows);

}  // namespace alrs::bench
