// Copyright 2026 The LeafForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "leafforge/dataset.hpp"
#include "leafforge/hash.hpp"
#include "leafforge/png_io.hpp"
#include "support.hpp"

using namespace leafforge;
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using testing::TempDir;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run lf(std::vector<std::string> args) {
  args.insert(args.begin(), "leafforge");
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("augment is deterministic") {
    TempDir dir("cli");
    save_png(testing::synthetic_leaf(40, 32, 3, false), dir / "in.png");
    const auto a = lf({"augment", "--input", (dir / "in.png").string(), "--seed", "7", "--rep",
                       "3", "--output", (dir / "a.png").string(), "--emit-record",
                       (dir / "a.json").string()});
    const auto b = lf({"augment", "--input", (dir / "in.png").string(), "--seed", "7", "--rep",
                       "3", "--output", (dir / "b.png").string()});
    REQUIRE(a.code == cli::kExitOk);
    REQUIRE(b.code == cli::kExitOk);
    CHECK(testing::file_bytes(dir / "a.png") == testing::file_bytes(dir / "b.png"));
    CHECK(a.out.find("stages fired, sha256 " +
                     sha256_hex(testing::file_bytes(dir / "a.png"))) != std::string::npos);

    std::ifstream rec(dir / "a.json");
    const std::string text((std::istreambuf_iterator<char>(rec)), {});
    const auto record = parse_record(text);
    CHECK(record.seed == SeedSpec{7, (dir / "in.png").string(), 3});
    CHECK(encode_png(apply_plan(load_png(dir / "in.png"), record)) ==
          testing::file_bytes(dir / "a.png"));
  }

  TEST_CASE("augment json summary") {
    TempDir dir("cli");
    save_png(testing::random_image(16, 16, 3, 1), dir / "in.png");
    const auto r = lf({"augment", "--input", (dir / "in.png").string(), "--output",
                       (dir / "o.png").string(), "--json"});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["stages"] == 11);
    CHECK(j["content_hash"] == sha256_hex(testing::file_bytes(dir / "o.png")));
    CHECK(j["record"]["stages"].size() == 11);
  }

  TEST_CASE("augment with a config file") {
    TempDir dir("cli");
    const Image img = testing::random_image(12, 9, 3, 2);
    save_png(img, dir / "in.png");
    write_text(dir / "c.json", R"({"version": 1, "stages": [{"op": "hflip", "probability": 1}]})");
    const auto r = lf({"augment", "--input", (dir / "in.png").string(), "--config",
                       (dir / "c.json").string(), "--output", (dir / "o.png").string()});
    REQUIRE(r.code == 0);
    CHECK(load_png(dir / "o.png") == flip_horizontal(img));
    CHECK(r.out.find("1 of 1 stages fired") != std::string::npos);
  }

  TEST_CASE("augment errors") {
    TempDir dir("cli");
    const auto missing = (dir / "absent.png").string();
    const auto r = lf({"augment", "--input", missing, "--output", (dir / "o.png").string()});
    CHECK(r.code == cli::kExitError);
    CHECK(r.err.find(missing) != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "o.png"));

    save_png(testing::random_image(4, 4, 3, 0), dir / "in.png");
    write_text(dir / "bad.json", R"({"version": 1, "stages": [{"op": "hflip", "probability": 2}]})");
    const auto b = lf({"augment", "--input", (dir / "in.png").string(), "--config",
                       (dir / "bad.json").string(), "--output", (dir / "o.png").string()});
    CHECK(b.code == cli::kExitError);
    CHECK(b.err.find("probability") != std::string::npos);

    CHECK(lf({"augment", "--output", "x.png"}).code == cli::kExitError);
    CHECK(lf({"augment", "--input", "a", "--output", "b", "--bogus"}).code == cli::kExitError);
    CHECK(lf({}).code == cli::kExitError);
    CHECK(lf({"paint"}).code == cli::kExitError);
  }

  TEST_CASE("help exits cleanly") {
    const auto r = lf({"--help"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("build") != std::string::npos);
  }

  TEST_CASE("build, verify and the output contract") {
    TempDir dir("cli");
    testing::write_leaf_tree(dir / "src", {"healthy", "scab", "rust"}, 7, 16);
    const auto out = (dir / "out").string();
    const auto b = lf({"build", "--root", (dir / "src").string(), "--classes", "healthy,scab",
                       "--shots", "5", "--reps", "2", "--seed", "4", "--out", out,
                       "--threads", "2"});
    REQUIRE(b.code == 0);
    CHECK(b.out == "built 30 files (10 seeds, 20 augmented) in " + out + "\n");
    const auto m = load_manifest(dir / "out");
    CHECK(m.classes == std::vector<std::string>{"healthy", "scab"});
    CHECK(fs::exists(dir / "out" / kValidationFile));

    const auto v = lf({"verify", "--manifest", out, "--replay"});
    CHECK(v.code == cli::kExitOk);
    CHECK(v.out == "OK: 30 files checked, 30 replayed, 0 mismatches\n");

    const auto again = lf({"build", "--root", (dir / "src").string(), "--classes",
                           "healthy,scab", "--out", out});
    CHECK(again.code == cli::kExitError);
    CHECK(again.err.find("not empty") != std::string::npos);

    write_file(dir / "out" / m.entries[0].output_path, std::vector<std::uint8_t>{1, 2, 3});
    const auto bad = lf({"verify", "--manifest", out, "--json"});
    CHECK(bad.code == cli::kExitMismatch);
    const auto j = Json::parse(bad.out);
    CHECK(j["ok"] == false);
    CHECK(j["mismatches"].size() == 1);
    CHECK(j["mismatches"][0]["kind"] == "hash_mismatch");

    CHECK(lf({"verify", "--manifest", (dir / "none").string()}).code == cli::kExitError);
  }

  TEST_CASE("build with zero repetitions and json output") {
    TempDir dir("cli");
    testing::write_leaf_tree(dir / "src", {"a", "b"}, 5, 12);
    const auto r = lf({"build", "--root", (dir / "src").string(), "--classes", "a,b", "--reps",
                       "0", "--out", (dir / "out").string(), "--json"});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["total"] == 10);
    CHECK(j["augmented"] == 0);
  }

  TEST_CASE("build reports missing classes") {
    TempDir dir("cli");
    testing::write_leaf_tree(dir / "src", {"a"}, 5, 12);
    const auto r = lf({"build", "--root", (dir / "src").string(), "--classes", "a,zzz", "--out",
                       (dir / "out").string()});
    CHECK(r.code == cli::kExitError);
    CHECK(r.err.find("zzz") != std::string::npos);
  }

  TEST_CASE("stats") {
    TempDir dir("cli");
    const auto r = lf({"stats", "--samples", "10000", "--json"});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["samples"] == 10000);
    REQUIRE(j["stages"].size() == 11);
    CHECK(j["stages"][1]["op"] == "vflip");
    CHECK(std::abs(j["stages"][1]["rate"].get<double>() - 0.2) < 0.012);

    write_text(dir / "zero.json", R"({"version": 1, "stages": [{"op": "hflip", "probability": 0},
      {"op": "blur", "probability": 0}]})");
    const auto z = lf({"stats", "--config", (dir / "zero.json").string(), "--json"});
    REQUIRE(z.code == 0);
    for (const auto& s : Json::parse(z.out)["stages"]) CHECK(s["fired"] == 0);

    const auto text = lf({"stats", "--samples", "500"});
    CHECK(text.out.find("500 plans, seed 0") == 0);
    CHECK(text.out.find("rotate") != std::string::npos);
    CHECK(lf({"stats", "--samples", "0"}).code == cli::kExitError);
  }

  TEST_CASE("show-config") {
    TempDir dir("cli");
    const auto r = lf({"show-config"});
    REQUIRE(r.code == 0);
    CHECK(parse_config(r.out) == default_config());
    write_text(dir / "c.json", R"({"version": 1, "stages": [{"op": "affine", "probability": 1,
      "rotate": [-10, 10]}]})");
    const auto c = lf({"show-config", "--config", (dir / "c.json").string()});
    REQUIRE(c.code == 0);
    CHECK(parse_config(c.out) == load_config((dir / "c.json").string()));
    CHECK(lf({"show-config", "--config", (dir / "none.json").string()}).code == cli::kExitError);
  }
}
