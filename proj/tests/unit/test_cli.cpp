#include <doctest.h>

#include <fstream>

#include "cli.hpp"
#include "radarsr/cloud_io.hpp"
#include "radarsr/config.hpp"
#include "radarsr/pipeline.hpp"

namespace fs = std::filesystem;
using testcli::run;

TEST_CASE("usage errors exit with 2") {
  const fs::path d = testcli::scratch("cli_usage");
  CHECK(run("frobnicate") == 2);
  CHECK(run("") == 2);
  CHECK(run("synth") == 2);  // --out missing
  {
    std::ofstream bad(d / "bad.yaml");
    bad << "seed: 1\nsensorz: {}\n";
  }
  CHECK(run("synth --config " + (d / "bad.yaml").string() + " --out " + (d / "S").string()) == 2);
  CHECK(run("preprocess --in " + (d / "missing").string() + " --out " + (d / "P").string()) == 2);
  CHECK(run("synth --frames 5:2 --out " + (d / "S").string()) == 2);
}

TEST_CASE("corrupt inputs exit with 3") {
  const fs::path d = testcli::scratch("cli_corrupt");
  fs::create_directories(d / "in");
  {
    std::ofstream bin(d / "in" / "000000.bin", std::ios::binary);
    bin << "seventeen bytes!!";
  }
  CHECK(run("project --in " + (d / "in").string() + " --out " + (d / "out").string()) == 3);
}

TEST_CASE("pipeline stages run and echo their configuration") {
  const fs::path d = testcli::scratch("cli_pipeline");
  const std::string cfg = "--config " + testcli::config_file("smoke.yaml").string();
  REQUIRE(run("synth " + cfg + " --out " + (d / "S").string()) == 0);
  CHECK(fs::exists(d / "S" / "frames.txt"));
  CHECK(fs::exists(d / "S" / "lidar" / "000005.bin"));
  CHECK(fs::exists(d / "S" / "radar_map" / "000000.pwm"));
  const auto run_yaml = radarsr::load_config(d / "S" / "run.yaml");
  CHECK(run_yaml.seed == 11);

  REQUIRE(run("preprocess " + cfg + " --in " + (d / "S").string() + " --out " + (d / "P").string()) == 0);
  CHECK(radarsr::list_frames(d / "P" / "target", ".rimg").size() == 6);
  CHECK(radarsr::list_frames(d / "P" / "cond", ".rimg").size() == 6);

  REQUIRE(run("detect " + cfg + " --in " + (d / "S").string() + " --out " + (d / "D").string()) == 0);
  CHECK(radarsr::list_frames(d / "D", ".ply").size() == 6);

  REQUIRE(run("project " + cfg + " --channels 4 --in " + (d / "S" / "lidar").string() + " --out " +
              (d / "R").string()) == 0);
  CHECK(radarsr::list_frames(d / "R", ".rimg").size() == 6);

  // eval of the truth against itself is exact.
  REQUIRE(run("eval " + cfg + " --pred " + (d / "P" / "truth").string() + " --truth " + (d / "P" / "truth").string() +
              " --out " + (d / "E").string()) == 0);
  std::ifstream rows(d / "E" / "metrics.txt");
  std::string line;
  int n = 0;
  while (std::getline(rows, line)) {
    for (const auto& [k, v] : radarsr::parse_kv_line(line)) {
      if (k == "cd" || k == "mhd") CHECK(std::stod(v) == 0.0);
      if (k == "fscore") CHECK(std::stod(v) == 100.0);
    }
    ++n;
  }
  CHECK(n == 6);

  REQUIRE(run("export " + cfg + " --in " + (d / "R").string() + " --out " + (d / "X").string()) == 0);
  CHECK(radarsr::read_ply(d / "X" / "000003.ply").size() > 0);
}

TEST_CASE("frame ranges") {
  CHECK(radarsr::FrameRange::parse("3:7").contains(3));
  CHECK_FALSE(radarsr::FrameRange::parse("3:7").contains(7));
  CHECK(radarsr::FrameRange::parse("4").contains(4));
  CHECK_FALSE(radarsr::FrameRange::parse("4").contains(5));
  CHECK(radarsr::FrameRange::parse(":2").contains(0));
  CHECK(radarsr::FrameRange::parse("9:").contains(100000));
  CHECK_THROWS(radarsr::FrameRange::parse("a:b"));
  CHECK_THROWS(radarsr::FrameRange::parse("-1:3"));
  CHECK(radarsr::frame_name(42) == "000042");
}
