#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "spatia/ambisonics.hpp"
#include "spatia/layout_io.hpp"
#include "spatia/wav.hpp"
#include "support.hpp"

using namespace spatia;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "spatia");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Gain column of a tab-separated pan table.
std::vector<double> gains_of(const std::string& table) {
  std::vector<double> g;
  std::istringstream in(table);
  std::string line;
  std::getline(in, line); // header
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string speaker, az, el, gain;
    row >> speaker >> az >> el >> gain;
    g.push_back(std::stod(gain));
  }
  return g;
}

double rms(const std::vector<double>& x) { return std::sqrt(test::sum_sq(x) / static_cast<double>(x.size())); }

} // namespace

TEST_CASE("help and usage errors") {
  for (const char* cmd : {"pan", "encode", "decode", "rotate", "render", "widen"}) {
    const auto r = run({cmd, "--help"});
    CHECK(r.code == cli::kSuccess);
    CHECK(r.out.find(cmd) != std::string::npos);
  }
  CHECK(run({"--help"}).code == cli::kSuccess);
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"teleport"}).code == cli::kUsage);
  CHECK(run({"pan", "--algo", "vbap", "--bogus"}).code == cli::kUsage);
  CHECK(run({"pan", "--algo", "stereo-tangent", "--azimuth", "10", "--blur", "0.1"}).code == cli::kUsage);
  CHECK(run({"pan", "--algo", "vbap", "--azimuth", "10"}).code == cli::kUsage); // no layout
  CHECK(run({"render", "--scene", "x.json"}).code == cli::kUsage);                // no output
}

TEST_CASE("pan") {
  SUBCASE("vbap on an octagon") {
    const auto r = run({"pan", "--algo", "vbap", "--layout", "preset:octagon", "--azimuth", "0"});
    REQUIRE(r.code == cli::kSuccess);
    const auto g = gains_of(r.out);
    REQUIRE(g.size() == 8);
    CHECK(test::sum_sq(g) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::count_if(g.begin(), g.end(), [](double v) { return v != 0.0; }) <= 2);
  }
  SUBCASE("dbap at the centre of a square") {
    test::TempDir dir;
    save_layout(layouts::quad(std::sqrt(2.0)), dir / "square.json");
    const auto r = run({"pan", "--algo", "dbap", "--layout", (dir / "square.json").string(), "--position", "0,0,0",
                        "--blur", "0"});
    REQUIRE(r.code == cli::kSuccess);
    for (double v : gains_of(r.out)) CHECK(v == 0.5);
  }
  SUBCASE("stereo tangent outside the pair") {
    const auto r = run({"pan", "--algo", "stereo-tangent", "--azimuth", "45"});
    CHECK(r.code == cli::kValidation);
    CHECK(r.err.find("out_of_range") != std::string::npos);
  }
  SUBCASE("stereo delay prints delays") {
    const auto r = run({"pan", "--algo", "stereo-delay", "--azimuth", "15"});
    REQUIRE(r.code == cli::kSuccess);
    CHECK(r.out.find("delay_s") != std::string::npos);
    CHECK(r.out.find("\t0.001\n") != std::string::npos);
  }
  SUBCASE("json output") {
    const auto r = run({"--json", "pan", "--algo", "ring-pairwise", "--layout", "preset:5.0", "--azimuth", "0"});
    REQUIRE(r.code == cli::kSuccess);
    const auto doc = json::parse(r.out);
    CHECK(doc["ok"] == true);
    CHECK(doc["command"] == "pan");
    CHECK(doc["result"]["speakers"][0]["gain"] == 1.0);
    CHECK(doc["result"]["power"].get<double>() == doctest::Approx(1.0));
  }
  SUBCASE("json errors go to stderr") {
    const auto r = run({"pan", "--json", "--algo", "ambisonics", "--layout", "preset:quad", "--azimuth", "0",
                        "--order", "1"});
    CHECK(r.code == cli::kValidation);
    CHECK(r.out.empty());
    const auto doc = json::parse(r.err);
    CHECK(doc["ok"] == false);
    CHECK(doc["error"]["code"] == "layout");
  }
}

TEST_CASE("encode, rotate and decode files") {
  test::TempDir dir;
  const std::string mono = (dir / "mono.wav").string();
  write_wav(mono, AudioBuffer{48000, {test::noise(4800, 1, 0.5)}}, SampleFormat::Float64);

  SUBCASE("source at speaker 3 is loudest on channel 3") {
    const auto oct = layouts::preset("octagon");
    const double az = rad_to_deg(oct.direction(3).azimuth());
    REQUIRE(run({"encode", "--input", mono, "--output", (dir / "b.wav").string(), "--azimuth", std::to_string(az),
                 "--order", "1", "--periphonic", "0"})
                .code == cli::kSuccess);
    REQUIRE(run({"decode", "--input", (dir / "b.wav").string(), "--output", (dir / "spk.wav").string(), "--layout",
                 "preset:octagon"})
                .code == cli::kSuccess);
    const auto spk = read_wav(dir / "spk.wav");
    REQUIRE(spk.channels.size() == 8);
    std::size_t loudest = 0;
    for (std::size_t i = 0; i < 8; ++i)
      if (rms(spk.channels[i]) > rms(spk.channels[loudest])) loudest = i;
    CHECK(loudest == 3);
  }
  SUBCASE("rotation there and back") {
    const std::string b = (dir / "b.wav").string(), r1 = (dir / "r1.wav").string(), r2 = (dir / "r2.wav").string();
    REQUIRE(run({"encode", "--input", mono, "--output", b, "--azimuth", "30", "--elevation", "20", "--fuma",
                 "--format", "float64"})
                .code == cli::kSuccess);
    CHECK(read_ambisonic(b).format == AmbisonicFormat::fuma());
    REQUIRE(run({"rotate", "--input", b, "--output", r1, "--yaw", "90", "--pitch", "10", "--format", "float64"}).code ==
            cli::kSuccess);
    REQUIRE(run({"rotate", "--input", r1, "--output", r2, "--pitch", "-10", "--format", "float64"}).code ==
            cli::kSuccess);
    REQUIRE(run({"rotate", "--input", r2, "--output", r2, "--yaw", "-90", "--format", "float64"}).code ==
            cli::kSuccess);
    const auto a = read_ambisonic(b), c = read_ambisonic(r2);
    for (std::size_t k = 0; k < 4; ++k) CHECK(test::max_abs_diff(a.channels[k], c.channels[k]) < 1e-9);
  }
  SUBCASE("higher-order rotation is refused") {
    const std::string b = (dir / "h.wav").string();
    REQUIRE(run({"encode", "--input", mono, "--output", b, "--order", "2"}).code == cli::kSuccess);
    CHECK(run({"rotate", "--input", b, "--output", (dir / "x.wav").string(), "--yaw", "10"}).code ==
          cli::kValidation);
  }
  SUBCASE("binaural decode with a generated HRIR set") {
    const std::string b = (dir / "b.wav").string(), idx = (dir / "hrir" / "index.json").string();
    std::filesystem::create_directories(dir / "hrir");
    REQUIRE(run({"encode", "--input", mono, "--output", b, "--azimuth", "90"}).code == cli::kSuccess);
    REQUIRE(run({"hrir", "gen", "--output", idx, "--az-step", "15", "--el-step", "45", "--taps", "64"}).code ==
            cli::kSuccess);
    REQUIRE(run({"decode", "--input", b, "--output", (dir / "ears.wav").string(), "--binaural", "--hrir", idx})
                .code == cli::kSuccess);
    const auto ears = read_wav(dir / "ears.wav");
    REQUIRE(ears.channels.size() == 2);
    CHECK(rms(ears.channels[0]) > rms(ears.channels[1]));
  }
  SUBCASE("decode needs exactly one target") {
    const std::string b = (dir / "b.wav").string();
    REQUIRE(run({"encode", "--input", mono, "--output", b}).code == cli::kSuccess);
    CHECK(run({"decode", "--input", b, "--output", (dir / "x.wav").string()}).code == cli::kUsage);
    CHECK(run({"decode", "--input", b, "--output", (dir / "x.wav").string(), "--binaural", "--layout",
               "preset:cube"})
              .code == cli::kUsage);
  }
  SUBCASE("missing input is a runtime error") {
    CHECK(run({"encode", "--input", (dir / "none.wav").string(), "--output", (dir / "x.wav").string()}).code ==
          cli::kRuntime);
  }
}

TEST_CASE("widen") {
  test::TempDir dir;
  const std::string in = (dir / "in.wav").string(), out = (dir / "out.wav").string();
  AudioBuffer st{48000, {test::noise(3000, 1, 0.5), test::noise(3000, 2, 0.5)}};
  for (auto& ch : st.channels)
    for (double& v : ch) v = static_cast<float>(v);
  write_wav(in, st);
  REQUIRE(run({"widen", "--input", in, "--output", out, "--identity"}).code == cli::kSuccess);
  CHECK(read_wav(out).channels == st.channels);
  CHECK(run({"widen", "--input", in, "--output", out, "--identity", "--side-gain", "2"}).code == cli::kUsage);
  CHECK(run({"widen", "--input", in, "--output", out, "--reflection-gain", "2"}).code == cli::kValidation);
  write_wav(dir / "mono.wav", AudioBuffer{48000, {{0.0, 0.1}}});
  CHECK(run({"widen", "--input", (dir / "mono.wav").string(), "--output", out}).code != cli::kSuccess);
}

TEST_CASE("render") {
  test::TempDir dir;
  const std::string scene = (dir / "scene.json").string();
  json doc = json::parse(R"({"sample_rate": 48000, "duration": 0.1, "algorithm": "vbap", "layout": "octagon",
    "sources": [{"name": "a", "audio": {"type": "sine", "frequency": 500}, "keyframes": [{"t": 0, "az_deg": 10}]}]})");
  std::ofstream(scene) << doc.dump();
  const auto ok = run({"--json", "render", "--scene", scene, "--output", (dir / "o.wav").string()});
  REQUIRE(ok.code == cli::kSuccess);
  CHECK(json::parse(ok.out)["result"]["channels"] == 8);
  CHECK(read_wav(dir / "o.wav").frames() == 4800);
  CHECK(run({"render", "--scene", scene, "--check"}).code == cli::kSuccess);

  doc["sample_rate"] = 1000;
  doc["sources"][0]["keyframes"][0]["t"] = 5;
  std::ofstream(scene) << doc.dump();
  const auto bad = run({"render", "--json", "--scene", scene, "--output", (dir / "o.wav").string()});
  CHECK(bad.code == cli::kValidation);
  const auto err = json::parse(bad.err);
  CHECK(err["error"]["code"] == "validation");
  // Sample rate, a sine at Nyquist, and the keyframe past the end.
  REQUIRE(err["error"]["issues"].size() == 3);
  CHECK(err["error"]["issues"][0]["code"] == "sample_rate");
  CHECK(err["error"]["issues"][2]["where"] == "sources[0].keyframes[0].t");
}

TEST_CASE("layout commands") {
  test::TempDir dir;
  const auto list = run({"layout", "list"});
  CHECK(list.code == cli::kSuccess);
  CHECK(list.out.find("octagon") != std::string::npos);
  const std::string file = (dir / "q.json").string();
  CHECK(run({"layout", "preset", "quad", "--output", file}).code == cli::kSuccess);
  CHECK(run({"layout", "validate", file}).code == cli::kSuccess);
  auto l = layouts::quad();
  l.category = LayoutCategory::Regular;
  l.speakers[0] = 3.0 * l.speakers[0];
  save_layout(l, file);
  const auto bad = run({"--json", "layout", "validate", file});
  CHECK(bad.code == cli::kValidation);
  CHECK(bad.err.find("unequal_radius") != std::string::npos);
  CHECK(run({"layout", "preset", "dodecahedron"}).code == cli::kValidation);
}
