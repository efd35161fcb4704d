// Copyright 2026 The combkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "combkit/cli.hpp"
#include "combkit/serialization.hpp"

using namespace combkit;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "combkit");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("combkit_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("Stern-Gerlach table") {
  const Result r = run({"scenario", "stern-gerlach"});
  CHECK(r.code == cli::kOk);
  CHECK(contains(r.out, "0.125"));
  CHECK(contains(r.out, "0.25"));
  CHECK(contains(r.out, "0.5"));
  CHECK(contains(r.out, "all expectations met"));
}

TEST_CASE("every scenario exits zero and is stable across runs") {
  for (const std::string name : {"stern-gerlach", "urn", "random-dilation", "dephasing-markov"}) {
    const Result a = run({"scenario", name, "--seed", "5"});
    const Result b = run({"scenario", name, "--seed", "5"});
    CHECK(a.code == cli::kOk);
    CHECK(a.out == b.out);
  }
  const Result j = run({"scenario", "urn", "--format", "json"});
  CHECK(j.code == cli::kOk);
  CHECK(Json::parse(j.out).at("pass") == true);
}

TEST_CASE("check-get on a dilation restriction family") {
  Scratch s;
  const std::string f = s.file("f.json");
  REQUIRE(run({"scenario", "random-dilation", "--seed", "3", "--out", f}).code == cli::kOk);
  const Result r = run({"check-get", "--family", f, "--tol", "1e-9"});
  CHECK(r.code == cli::kOk);
  CHECK(contains(r.out, "PASS"));
  // Seven members over three times give twelve nested pairs.
  const Result j = run({"check-get", "--family", f, "--format", "json"});
  CHECK(Json::parse(j.out).at("pairs").size() == 12);
}

TEST_CASE("check-ket on Stern-Gerlach outcome distributions") {
  Scratch s;
  const std::string f = s.file("sg-dists.json");
  REQUIRE(run({"scenario", "stern-gerlach", "--emit", "measured", "--out", f}).code ==
          cli::kOk);
  const Result r = run({"check-ket", "--family", f});
  CHECK(r.code == cli::kCheckFailed);
  CHECK(contains(r.out, "{t1,t3}"));
  CHECK(contains(r.out, "{t1,t2,t3}"));
  CHECK(contains(r.out, "FAIL"));
  const Result j = run({"check-ket", "--family", f, "--format", "json"});
  const Json report = Json::parse(j.out);
  REQUIRE(report.at("pairs").size() == 1);
  CHECK(report["pairs"][0]["sub"] == Json::array({"t1", "t3"}));
  CHECK(report["pairs"][0]["super"] == Json::array({"t1", "t2", "t3"}));
  CHECK(report["pairs"][0]["deviation"].get<double>() == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("classicality from the command line") {
  Scratch s;
  const std::string sg = s.file("sg.json");
  REQUIRE(run({"scenario", "stern-gerlach", "--emit", "combs", "--out", sg}).code == cli::kOk);
  const Result r = run({"classical", "--family", sg, "--basis", "z,x,z"});
  CHECK(r.code == cli::kCheckFailed);
  CHECK(contains(r.out, "witness"));
  const Json w = Json::parse(
      run({"classical", "--family", sg, "--basis", "z,x,z", "--format", "json"}).out)["witness"];
  CHECK(w["direct"].get<double>() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(w["marginal"].get<double>() == doctest::Approx(0.25).epsilon(1e-10));

  const std::string deph = s.file("deph.json");
  REQUIRE(run({"scenario", "dephasing-markov", "--emit", "dephasing", "--out", deph}).code ==
          cli::kOk);
  CHECK(run({"classical", "--family", deph, "--basis", "z"}).code == cli::kOk);

  const std::string basis = s.file("basis.json");
  writeJsonFile(basis, toJson(ReferenceBasis::z()));
  CHECK(run({"classical", "--family", deph, "--basis", basis}).code == cli::kOk);
  CHECK(run({"classical", "--family", deph, "--basis", "z,x"}).code == cli::kUsageError);
  CHECK(run({"classical", "--family", deph, "--basis", "q"}).code == cli::kUsageError);
}

TEST_CASE("restrict and contract") {
  Scratch s;
  const std::string fam = s.file("sg.json");
  REQUIRE(run({"scenario", "stern-gerlach", "--emit", "combs", "--out", fam}).code == cli::kOk);
  const CombFamily f = combFamilyFromJson(readJsonFile(fam));
  const std::string comb = s.file("comb.json");
  writeJsonFile(comb, toJson(f.members.at(f.ground)));

  const Result p = run({"contract", "--comb", comb, "--basis", "z,x,z", "--outcome", "up,right,up"});
  CHECK(p.code == cli::kOk);
  CHECK(std::stod(p.out) == doctest::Approx(0.125).epsilon(1e-10));
  // Seventeen significant digits.
  CHECK(p.out.size() >= 18);

  const std::string outer = s.file("outer.json");
  CHECK(run({"restrict", "--comb", comb, "--subset", "t3,t1", "--out", outer}).code == cli::kOk);
  const Result half = run({"contract", "--comb", outer, "--basis", "z", "--outcome", "up,up"});
  CHECK(std::stod(half.out) == doctest::Approx(0.5).epsilon(1e-10));

  const std::string maps = s.file("maps.json");
  writeJsonFile(maps, toJson(MapSequence{{"t2", identityChannel(2)}}));
  const Result one = run({"contract", "--comb", comb, "--maps", maps, "--format", "json"});
  CHECK(Json::parse(one.out).at("probability").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK(run({"contract", "--comb", comb, "--basis", "z", "--outcome", "up,sideways,up"}).code ==
        cli::kUsageError);
  CHECK(run({"restrict", "--comb", comb, "--subset", "t9"}).code == cli::kUsageError);
}

TEST_CASE("embed and verify-extension") {
  Scratch s;
  const std::string idle = s.file("idle.json");
  REQUIRE(run({"scenario", "urn", "--emit", "idle", "--out", idle}).code == cli::kOk);
  const std::string embedded = s.file("embedded.json");
  CHECK(run({"embed", "--dist", idle, "--out", embedded}).code == cli::kOk);
  CHECK(run({"check-get", "--family", embedded}).code == cli::kOk);

  const DistributionFamily df = distributionFamilyFromJson(readJsonFile(idle));
  const std::string single = s.file("single.json");
  writeJsonFile(single, toJson(df.members.at(df.ground)));
  const std::string top = s.file("top.json");
  CHECK(run({"embed", "--dist", single, "--out", top}).code == cli::kOk);
  CHECK(run({"verify-extension", "--comb", top, "--family", embedded}).code == cli::kOk);

  const std::string intervention = s.file("intervention.json");
  REQUIRE(run({"scenario", "urn", "--emit", "intervention", "--out", intervention}).code ==
          cli::kOk);
  CHECK(run({"check-ket", "--family", intervention}).code == cli::kCheckFailed);
}

TEST_CASE("usage errors exit two") {
  CHECK(run({}).code == cli::kUsageError);
  CHECK(run({"frobnicate"}).code == cli::kUsageError);
  CHECK(run({"check-get", "--family", "x.json", "--tol", "0"}).code == cli::kUsageError);
  CHECK(run({"check-get", "--family", "x.json", "--tol", "-1e-9"}).code == cli::kUsageError);
  CHECK(run({"check-get"}).code == cli::kUsageError);
  CHECK(run({"scenario", "nope"}).code == cli::kUsageError);
  CHECK(run({"scenario", "urn", "--format", "xml"}).code == cli::kUsageError);
  const Result missing = run({"check-get", "--family", "/nonexistent/f.json"});
  CHECK(missing.code == cli::kUsageError);
  CHECK_FALSE(missing.err.empty());
  // Several families and no --emit.
  Scratch s;
  CHECK(run({"scenario", "urn", "--out", s.file("x.json")}).code == cli::kUsageError);
}

TEST_CASE("help exits zero") {
  const Result r = run({"--help"});
  CHECK(r.code == cli::kOk);
  CHECK(contains(r.out, "check-get"));
}

TEST_CASE("malformed input reports the schema path") {
  Scratch s;
  const std::string f = s.file("f.json");
  REQUIRE(run({"scenario", "random-dilation", "--out", f}).code == cli::kOk);
  Json j = readJsonFile(f);
  j["members"][2]["payload"]["slots"][0].erase("dim_out");
  writeJsonFile(f, j);
  const Result r = run({"check-get", "--family", f});
  CHECK(r.code == cli::kUsageError);
  CHECK(contains(r.err, "/members/2/payload/slots/0/dim_out"));

  std::ofstream(f) << "{ not json";
  const Result bad = run({"check-get", "--family", f});
  CHECK(bad.code == cli::kUsageError);
  CHECK(contains(bad.err, "malformed JSON"));
}

TEST_CASE("dimension blow-ups are usage errors") {
  const Result r = run({"scenario", "random-dilation", "--sys-dim", "3", "--steps", "4"});
  CHECK(r.code == cli::kUsageError);
  CHECK(contains(r.err, "cap"));
}
