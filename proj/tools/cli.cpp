#include "cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "alrs/benchmark.hpp"
#include "alrs/error.hpp"
#include "alrs/eval.hpp"
#include "alrs/image_io.hpp"
#include "alrs/serialize.hpp"

#ifndef ALRS_VERSION
#define ALRS_VERSION "0.0.0"
#endif

namespace alrs::cli {
namespace fs = std::filesystem;
using io::Json;

namespace {

std::string sha256File(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("unreadable file: " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof(byte), "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

std::string utcNow() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& argv) {
    j_["tool"] = "alrs";
    j_["version"] = ALRS_VERSION;
    j_["command"] = std::move(command);
    j_["argv"] = argv;
    j_["started_at"] = utcNow();
    j_["inputs"] = Json::array();
    j_["outputs"] = Json::array();
  }
  void input(const fs::path& p) { j_["inputs"].push_back({{"path", p.string()}, {"sha256", sha256File(p)}}); }
  void output(const fs::path& p) { j_["outputs"].push_back(p.filename().string()); }
  Json& operator[](const char* key) { return j_[key]; }
  void write(const fs::path& dir) {
    j_["finished_at"] = utcNow();
    io::writeText(dir / "manifest.json", j_.dump(2) + "\n");
  }

 private:
  Json j_;
};

template <typename Fn>
void writeStream(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  fn(out);
  if (!out) throw IoError("cannot write " + path.string());
}

void drawSegment(RgbImage& img, Point2 a, Point2 b, std::array<std::uint8_t, 3> rgb) {
  const int steps = std::max(1, static_cast<int>(std::ceil(4.0 * norm(b - a))));
  for (int i = 0; i <= steps; ++i) {
    const Point2 p = a + (static_cast<double>(i) / steps) * (b - a);
    img.set(static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y)), rgb);
  }
}

void drawRegion(RgbImage& img, const lsr::LineSupportRegion& r) {
  const double rad = r.angleDeg * 3.14159265358979323846 / 180.0;
  const Point2 u{std::cos(rad) * 0.5 * r.length, std::sin(rad) * 0.5 * r.length};
  const Point2 v{-std::sin(rad) * 0.5 * r.width, std::cos(rad) * 0.5 * r.width};
  const Point2 c[4] = {r.center + u + v, r.center + u - v, r.center - u - v, r.center - u + v};
  for (int i = 0; i < 4; ++i) drawSegment(img, c[i], c[(i + 1) % 4], {0, 255, 0});
}

void ensureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

}  // namespace

int runRegister(const RegisterOptions& o, const std::vector<std::string>& argv) {
  o.config.validate();
  Manifest manifest("register", argv);
  const GrayImage ref = loadImage(o.ref);
  const GrayImage sensed = loadImage(o.sensed);
  manifest.input(o.ref);
  manifest.input(o.sensed);
  manifest["config"] = io::toJson(o.config);
  manifest["seed"] = o.config.seed;
  ensureDir(o.out);

  std::vector<pipeline::LevelProducts> products;
  const auto report = pipeline::registerImages(ref, sensed, o.config, &products);

  auto save = [&](const std::string& name, auto&& fn) {
    writeStream(o.out / name, fn);
    manifest.output(o.out / name);
  };
  save("report.json", [&](std::ostream& out) { out << io::toJson(report).dump(2) << '\n'; });
  save("initial_matches.csv", [&](std::ostream& out) { io::writeCorrespondencesCsv(out, report.initialMatches); });
  save("correspondences.csv", [&](std::ostream& out) { io::writeCorrespondencesCsv(out, report.survivors); });
  save("gor_removals.csv", [&](std::ostream& out) { io::writeRemovalsCsv(out, report.removals); });
  for (const auto& p : products) {
    const std::string suffix = "_L" + std::to_string(p.level) + ".png";
    savePng(p.refSegmentation.mask.toImage(), o.out / ("mask_ref" + suffix));
    savePng(p.sensedSegmentation.mask.toImage(), o.out / ("mask_sensed" + suffix));
    manifest.output(o.out / ("mask_ref" + suffix));
    manifest.output(o.out / ("mask_sensed" + suffix));
  }
  if (report.success) {
    const AffineTransform& t = *report.finalTransform;
    save("transform.json", [&](std::ostream& out) { out << io::toJson(t).dump(2) << '\n'; });
    const GrayImage warped = warpImage(sensed, t.inverse(), ref.width(), ref.height());
    savePng(checkerboardMosaic(ref, warped, 32), o.out / "mosaic.png");
    manifest.output(o.out / "mosaic.png");
  }
  manifest["status"] = report.success ? "success" : "failure";
  manifest.write(o.out);

  if (report.success) {
    std::cout << "registered at level " << report.levelUsed << ", scaled rmse " << *report.scaledRmse << ", "
              << report.survivors.size() << " of " << report.initialMatches.size() << " matches kept\n";
    return kExitOk;
  }
  std::cerr << "registration failed";
  if (report.scaledRmse) std::cerr << " (best scaled rmse " << *report.scaledRmse << ")";
  std::cerr << "; see " << (o.out / "report.json").string() << "\n";
  return kExitRegistrationFailed;
}

int runSegment(const SegmentOptions& o, const std::vector<std::string>& argv) {
  if (o.level < 0) throw InvalidArgument("level must be non-negative");
  Manifest manifest("segment", argv);
  const GrayImage full = loadImage(o.in);
  manifest.input(o.in);
  if ((full.width() >> o.level) < 1 || (full.height() >> o.level) < 1)
    throw InvalidArgument("level too deep for the image size");
  const GrayImage img = downsample(full, o.level);
  const pipeline::PipelineConfig defaults;
  const auto seg = lsr::segment(img, o.tau, defaults.flatThreshold, defaults.minRegionSize);
  ensureDir(o.out);

  savePng(seg.mask.toImage(), o.out / "mask.png");
  writeStream(o.out / "regions.csv", [&](std::ostream& out) { io::writeRegionsCsv(out, seg.regions); });
  RgbImage overlay = RgbImage::fromGray(img);
  for (const auto& r : seg.regions) drawRegion(overlay, r);
  savePng(overlay, o.out / "overlay.png");
  for (const char* name : {"mask.png", "regions.csv", "overlay.png"}) manifest.output(o.out / name);
  manifest["config"] = {{"tau", o.tau}, {"level", o.level}};
  manifest.write(o.out);
  std::cout << seg.regions.size() << " regions, " << seg.mask.popcount() << " mask pixels\n";
  return kExitOk;
}

int runEval(const EvalOptions& o, const std::vector<std::string>& argv) {
  bench::Options options;
  options.methods.clear();
  for (const auto& m : o.methods) options.methods.push_back(bench::parseMethod(m));
  options.seeds = o.seeds;
  Manifest manifest("eval", argv);
  const auto fixtures = bench::loadFixtureDir(o.fixtures);
  for (const auto& e : fs::directory_iterator(o.fixtures))
    if (e.path().extension() == ".json") manifest.input(e.path());
  ensureDir(o.out);

  std::vector<bench::Summary> rows;
  for (const auto& f : fixtures) {
    std::cerr << "fixture " << f.name << "\n";
    for (auto& r : bench::runFixture(f, options)) rows.push_back(std::move(r));
  }
  writeStream(o.out / "comparison.csv", [&](std::ostream& out) { bench::writeSummaryCsv(out, rows); });
  manifest.output(o.out / "comparison.csv");
  manifest["seeds"] = o.seeds;
  manifest["methods"] = o.methods;
  manifest.write(o.out);
  bench::writeSummaryCsv(std::cout, rows);
  return kExitOk;
}

int runSynth(const SynthOptions& o, const std::vector<std::string>& argv) {
  if (o.size < 8) throw InvalidArgument("size must be at least 8");
  Manifest manifest("synth", argv);
  ensureDir(o.out);
  const GrayImage scene = eval::renderSyntheticScene(o.size, o.size, o.seed);
  savePng(scene, o.out / "ref.png");
  manifest.output(o.out / "ref.png");
  const Point2 c = eval::imageCenter(scene);
  const AffineTransform t = eval::shear(o.shearH, o.shearV, c) * eval::rotationScale(o.rotateCwDeg, o.scale, c);
  const auto pair = eval::synthesizePair(scene, t);
  savePng(pair.sensed, o.out / "sensed.png");
  io::writeText(o.out / "truth.json", io::toJson(t).dump(2) + "\n");
  manifest.output(o.out / "sensed.png");
  manifest.output(o.out / "truth.json");
  manifest["seed"] = o.seed;
  manifest.write(o.out);
  return kExitOk;
}

std::unique_ptr<CLI::App> buildApp(Options& opts) {
  auto app = std::make_unique<CLI::App>("Affine image registration with line-support regions and geometrical outlier removal",
                                        "alrs");
  app->require_subcommand(1);
  app->option_defaults()->always_capture_default();
  // Keys live in a table named after the subcommand, e.g. [register].
  app->set_config("--config", "", "TOML file with option values");

  auto* reg = app->add_subcommand("register", "Register a sensed image onto a reference image");
  reg->fallthrough();
  reg->add_option("--ref", opts.reg.ref, "Reference image (PNG or PGM)")->required()->check(CLI::ExistingFile);
  reg->add_option("--sensed", opts.reg.sensed, "Sensed image (PNG or PGM)")->required()->check(CLI::ExistingFile);
  reg->add_option("--out", opts.reg.out, "Output directory")->required();
  reg->add_option("--epsilon", opts.reg.config.epsilon, "Success bound on 2^L * rmse");
  reg->add_option("--tau", opts.reg.config.tau, "Region growing angle tolerance (degrees)");
  reg->add_option("--dratio", opts.reg.config.dRatio, "Nearest/second-nearest descriptor distance ratio");
  reg->add_option("--max-levels", opts.reg.config.maxLevels, "Number of coarser pyramid levels to try");
  reg->add_option("--seed", opts.reg.config.seed, "Seed recorded in the manifest");

  auto* seg = app->add_subcommand("segment", "Extract line-support regions and the binary mask");
  seg->fallthrough();
  seg->add_option("--in", opts.segment.in, "Input image (PNG or PGM)")->required()->check(CLI::ExistingFile);
  seg->add_option("--out", opts.segment.out, "Output directory")->required();
  seg->add_option("--tau", opts.segment.tau, "Region growing angle tolerance (degrees)");
  seg->add_option("--level", opts.segment.level, "Pyramid level to segment")->check(CLI::NonNegativeNumber);

  auto* ev = app->add_subcommand("eval", "Compare outlier filters on fixture files");
  ev->fallthrough();
  ev->add_option("--fixtures", opts.eval.fixtures, "Directory of fixture JSON files")->required();
  ev->add_option("--out", opts.eval.out, "Output directory")->required();
  ev->add_option("--methods", opts.eval.methods, "Methods to compare")->delimiter(',')->check(
      CLI::IsMember({"gor", "ransac"}));
  ev->add_option("--seeds", opts.eval.seeds, "Trials per fixture")->check(CLI::PositiveNumber);

  auto* syn = app->add_subcommand("synth", "Render a synthetic scene and a transformed copy");
  syn->add_option("--out", opts.synth.out, "Output directory")->required();
  syn->add_option("--size", opts.synth.size, "Side length in pixels");
  syn->add_option("--seed", opts.synth.seed, "Scene seed");
  syn->add_option("--rotate", opts.synth.rotateCwDeg, "Clockwise rotation about the centre (degrees)");
  syn->add_option("--scale", opts.synth.scale, "Isotropic scale factor");
  syn->add_option("--shear-h", opts.synth.shearH, "Horizontal shear factor");
  syn->add_option("--shear-v", opts.synth.shearV, "Vertical shear factor");
  return app;
}

int main(int argc, char** argv) {
  Options opts;
  auto app = buildApp(opts);
  const std::vector<std::string> args(argv, argv + argc);
  try {
    app->parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app->exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app->exit(e);
  } catch (const CLI::ParseError& e) {
    app->exit(e);
    return kExitUsage;
  }
  try {
    if (app->got_subcommand("register")) return runRegister(opts.reg, args);
    if (app->got_subcommand("segment")) return runSegment(opts.segment, args);
    if (app->got_subcommand("eval")) return runEval(opts.eval, args);
    if (app->got_subcommand("synth")) return runSynth(opts.synth, args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace alrs::cli
