#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "biphoton/config.hpp"
#include "biphoton/error.hpp"
#include "biphoton/experiment.hpp"
#include "biphoton/io.hpp"

using namespace biphoton;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("biphoton-test-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentConfig tiny_fig3(const fs::path& out) {
  ExperimentConfig c;
  c.preset = "fig3";
  c.output = out;
  c.state.signal.envelope.m = 1;
  c.state.idler.envelope.m = 1;
  c.state.signal.mask.m = 1;
  c.state.idler.mask.m = 1;
  c.state.grid = {64, 4.0};
  c.detector.grid = {64, 4.0};
  c.heralding.k_angles = 6;
  c.heralding.orientations = {0.0, kPi / 4};
  c.analysis.n_bins = 36;
  c.analysis.unfold_phi = 90;
  c.analysis.unfold_r = 8;
  c.events = {5'000, 20'000, 5'000};
  return c;
}

}  // namespace

TEST_CASE("angle strings") {
  CHECK(parse_angle("pi/4") == doctest::Approx(kPi / 4));
  CHECK(parse_angle("11pi/6") == doctest::Approx(11 * kPi / 6));
  CHECK(parse_angle("-pi/2") == doctest::Approx(-kPi / 2));
  CHECK(parse_angle("2*pi") == doctest::Approx(kTwoPi));
  CHECK(parse_angle("pi") == doctest::Approx(kPi));
  CHECK(parse_angle("0.5") == 0.5);
  CHECK_THROWS_AS(parse_angle("tau"), ConfigError);
  CHECK_THROWS_AS(parse_angle("pi/0"), ConfigError);
  CHECK_THROWS_AS(parse_angle(""), ConfigError);
}

TEST_CASE("config diagnostics name the offending field") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"state": {"visibility": 1.5}})"), doctest::Contains("state.visibility"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"state": {"sign": "*"}})"), doctest::Contains("state.sign"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"heralding": {"width": "pie"}})"), doctest::Contains("heralding.width"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"detector": {"grid": {"n": 4}}})"), doctest::Contains("detector.grid"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"events": {"singles": 0}})"), doctest::Contains("events.singles"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"bogus": 1})"), doctest::Contains("bogus"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"preset": "fig9"})"), doctest::Contains("preset"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"state": {"signal": {"mask": {"kind": "sector", "levels": [{"start": 0, "end": 1, "phase": 0}]}}}})"),
      doctest::Contains("state.signal.mask"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("{not json"), doctest::Contains("malformed"), ConfigError);
}

TEST_CASE("config round-trips through its JSON form") {
  const auto c = parse_config(R"({
    "preset": "scan", "seed": 99,
    "state": {"sign": "-", "visibility": 0.5,
              "signal": {"envelope": {"kind": "ring_gaussian", "m": 2}, "mask": {"kind": "helical", "m": 2}},
              "idler": {"envelope": {"kind": "gaussian"}, "mask": {"kind": "sector", "equal": ["pi/4", "pi/2", 0]}}},
    "heralding": {"width": "pi/4", "k_angles": 12},
    "analysis": {"annulus": [0.5, 2.0], "n_bins": 60}
  })");
  CHECK(c.state.sign == Sign::minus);
  CHECK(c.state.idler.mask.levels.size() == 3);
  CHECK(c.heralding.width == doctest::Approx(kPi / 4));
  const auto again = parse_config(to_json_text(c));
  CHECK(to_json_text(again) == to_json_text(c));
}

TEST_CASE("PGM round trip and parse errors") {
  TempDir t;
  io::PgmImage img{3, 2, 1000, {0, 1, 2, 300, 999, 1000}};
  io::write_pgm(t.path / "a.pgm", img);
  const auto back = io::read_pgm(t.path / "a.pgm");
  CHECK(back.width == 3);
  CHECK(back.pixels == img.pixels);
  const auto r = io::raster_from_pgm(back);
  CHECK(r.at(1, 2) == 1.0);

  write_text(t.path / "bad.pgm", "P2\n2 2\n255\n");
  CHECK_THROWS_WITH_AS(io::read_pgm(t.path / "bad.pgm"), doctest::Contains("P5"), ParseError);
  write_text(t.path / "short.pgm", std::string("P5\n4 4\n255\n") + "abc");
  CHECK_THROWS_WITH_AS(io::read_pgm(t.path / "short.pgm"), doctest::Contains("truncated"), ParseError);
  write_text(t.path / "comment.pgm", std::string("P5\n# hello\n2 1\n255\n") + "\x01\x02");
  CHECK(io::read_pgm(t.path / "comment.pgm").pixels == std::vector<std::uint16_t>{1, 2});
}

TEST_CASE("image CSV round trip and errors name row and column") {
  TempDir t;
  const std::vector<std::uint32_t> counts{1, 2, 3, 4, 5, 6};
  io::write_image_csv(t.path / "i.csv", counts, 3, 2);
  const auto back = io::read_image_csv(t.path / "i.csv");
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.counts == counts);

  write_text(t.path / "bad.csv", "row,col,count\n0,0,1\n0,1,x\n");
  CHECK_THROWS_WITH_AS(io::read_image_csv(t.path / "bad.csv"), doctest::Contains("row 3"), ParseError);
  CHECK_THROWS_WITH_AS(io::read_image_csv(t.path / "bad.csv"), doctest::Contains("column 3"), ParseError);
  write_text(t.path / "nohead.csv", "0,0,1\n");
  CHECK_THROWS_AS(io::read_image_csv(t.path / "nohead.csv"), ParseError);
}

TEST_CASE("map CSV round trip") {
  TempDir t;
  CoherenceMap m;
  m.phi = {0.1, 0.2, 0.3};
  m.phi_prime = {0.0, 1.5};
  m.values = Field2D(3, 2, 1.25);
  m.values(1, 1) = std::numeric_limits<double>::quiet_NaN();
  m.counts = Field2D(3, 2);
  m.column_valid = {true, true};
  m.column_heralds = {1, 1};
  io::write_map_csv(t.path / "m.csv", m);
  const auto back = io::read_map_csv(t.path / "m.csv");
  CHECK(back.phi == m.phi);
  CHECK(back.phi_prime == m.phi_prime);
  CHECK(back.values(0, 0) == 1.25);
  CHECK(std::isnan(back.values(1, 1)));
  write_text(t.path / "bad.csv", "phi,0\n0.1,abc\n");
  CHECK_THROWS_WITH_AS(io::read_map_csv(t.path / "bad.csv"), doctest::Contains("row 2"), ParseError);
}

TEST_CASE("run writes a bundle and its manifest re-runs identically") {
  TempDir t;
  const auto a = run_experiment(tiny_fig3(t.path / "a"));
  for (const char* f : {"singles.pgm", "singles.csv", "heralded_00.pgm", "heralded_01_unfolded.csv", "G2_map.csv",
                        "g2_map.csv", "metrics.txt", "manifest.json"})
    CHECK(fs::exists(a.directory / f));

  ExperimentConfig again = load_config(a.directory / "manifest.json");
  again.output = t.path / "b";
  const auto b = run_experiment(again);
  for (const auto& f : a.files) {
    const auto ext = fs::path(f).extension();
    if (ext == ".pgm" || ext == ".csv") CHECK_MESSAGE(read_bytes(a.directory / f) == read_bytes(b.directory / f), f);
  }
  // every written map is readable by the re-analysis path
  const auto map = io::read_map_csv(a.directory / "g2_map.csv");
  CHECK(map.n_columns() == 6);
  CHECK(io::read_image_csv(a.directory / "singles.csv").counts.size() == 64 * 64);
}

TEST_CASE("fig5 preset reports region levels") {
  TempDir t;
  ExperimentConfig c;
  c.preset = "fig5";
  c.output = t.path / "f5";
  c.state.signal.envelope.kind = AmplitudeEnvelope::Kind::gaussian;
  c.state.idler.envelope.kind = AmplitudeEnvelope::Kind::gaussian;
  c.detector.grid = {128, 3.0};
  c.fig5.events = 60'000;
  c.fig5.singles = 60'000;
  const auto s = run_experiment(c);
  CHECK(fs::exists(s.directory / "sector_levels.csv"));
  CHECK(fs::exists(s.directory / "bitmap_b2_g2.pgm"));
  for (const auto& [k, v] : s.metrics)
    if (k.size() > 3 && k.substr(k.size() - 3) == ".g2") {
      const auto pred = std::find_if(s.metrics.begin(), s.metrics.end(),
                                     [&](const auto& kv) { return kv.first == k.substr(0, k.size() - 3) + ".predicted"; });
      REQUIRE(pred != s.metrics.end());
      CHECK(std::abs(std::stod(v) - std::stod(pred->second)) < 0.15);
    }
}

TEST_CASE("bitmap paths resolve against the config directory") {
  TempDir t;
  io::PgmImage img{4, 4, 255, std::vector<std::uint16_t>(16, 255)};
  io::write_pgm(t.path / "mask.pgm", img);
  write_text(t.path / "c.json", R"({"state": {"signal": {"mask": {"kind": "bitmap", "bitmap": "mask.pgm"}}}})");
  const auto c = load_config(t.path / "c.json");
  const PhaseMask m = c.state.signal.mask.build(c.base_dir);
  CHECK(m.evaluate({0.1, 0.1}) == doctest::Approx(kPi / 2));
  write_text(t.path / "d.json", R"({"state": {"signal": {"mask": {"kind": "bitmap", "bitmap": "missing.pgm"}}}})");
  CHECK_THROWS_WITH_AS(load_config(t.path / "d.json"), doctest::Contains("state.signal.mask"), ConfigError);
}
