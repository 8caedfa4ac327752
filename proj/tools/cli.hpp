#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alrs/pipeline.hpp"

namespace alrs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRegistrationFailed = 2;

struct RegisterOptions {
  std::filesystem::path ref;
  std::filesystem::path sensed;
  std::filesystem::path out;
  pipeline::PipelineConfig config;
};

struct SegmentOptions {
  std::filesystem::path in;
  std::filesystem::path out;
  double tau = pipeline::PipelineConfig{}.tau;
  int level = 0;
};

struct EvalOptions {
  std::filesystem::path fixtures;
  std::filesystem::path out;
  std::vector<std::string> methods{"gor", "ransac"};
  std::size_t seeds = 100;
};

struct SynthOptions {
  std::filesystem::path out;
  int size = 512;
  std::uint64_t seed = 1;
  double rotateCwDeg = 0.0;
  double scale = 1.0;
  double shearH = 0.0;
  double shearV = 0.0;
};

struct Options {
  RegisterOptions reg;
  SegmentOptions segment;
  EvalOptions eval;
  SynthOptions synth;
};

/// Command tree with defaults taken from `opts`.
std::unique_ptr<CLI::App> buildApp(Options& opts);

int runRegister(const RegisterOptions& o, const std::vector<std::string>& argv);
int runSegment(const SegmentOptions& o, const std::vector<std::string>& argv);
int runEval(const EvalOptions& o, const std::vector<std::string>& argv);
int runSynth(const SynthOptions& o, const std::vector<std::string>& argv);

/// Parses and dispatches; returns the process exit code.
int main(int argc, char** argv);

}  // namespace alrs::cli
