/* Copyright 2026 The IGCA Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "igca_cli.hpp"
#include "test_support.hpp"

namespace igca::cli {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "igca");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  testing_support::TempDir dir;
  std::string registry = testing_support::copy_fixture(dir, "axy.xml").string();
  std::string broker = testing_support::copy_fixture(dir, "broker.xml").string();
};

/// Value column of a `destination,estimate_nominal_w,...` CSV row.
double csv_value(const std::string& csv, const std::string& destination) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(destination + ",", 0) == 0) {
      const auto start = destination.size() + 1;
      return std::stod(line.substr(start, line.find(',', start) - start));
    }
  }
  ADD_FAILURE() << "no row for " << destination << " in\n" << csv;
  return 0;
}

TEST_F(Cli, Table3OrderingsMatch) {
  const auto r = run({"--fixture", registry, "table3"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("ordering J-STORAGE: private < public < local"), std::string::npos);
  EXPECT_EQ(r.out.find("MISMATCH"), std::string::npos);
}

TEST_F(Cli, Table3FlagsOrderingMismatch) {
  auto reg = load(registry);
  reg.infrastructure.public_path = {{"cheap", 1, 1e9}};
  save(registry, reg);
  EXPECT_EQ(run({"--fixture", registry, "table3"}).code, kOrderingMismatch);
}

TEST_F(Cli, ScenarioFrameRateOverride) {
  const auto base = run({"--fixture", registry, "--format", "csv", "scenario", "software"});
  const auto low = run({"--fixture", registry, "--format", "csv", "scenario", "software", "--set", "frame_rate=11.5"});
  ASSERT_EQ(base.code, kOk) << base.err;
  ASSERT_EQ(low.code, kOk) << low.err;
  EXPECT_NEAR(csv_value(low.out, "private") / csv_value(base.out, "private"), 0.365, 0.01);
}

TEST_F(Cli, ScenarioSweepIsLinear) {
  const auto r = run({"--fixture", registry, "--format", "csv", "scenario", "storage", "--sweep",
                      "downloads_per_hour=2..20:18"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("\n2,"), std::string::npos);
  EXPECT_NE(r.out.find("\n20,"), std::string::npos);
}

TEST_F(Cli, EstimateUsesBrokerDirectory) {
  const auto r = run({"--fixture", registry, "--broker-dir", dir.path().string(), "estimate", "J-STORAGE"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("recommendation: private"), std::string::npos);
}

TEST_F(Cli, JobsAdministration) {
  auto r = run({"--fixture", registry, "jobs", "add", "--id", "J-X", "--class", "storage", "--file-size-gb", "3",
                "--destination", "private", "--server", "S_2", "--confirmed-by", "ops", "--clock",
                "2026-02-01T00:00:00Z"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(lookup(load(registry), "J-X").confirmed_at, "2026-02-01T00:00:00Z");

  r = run({"jobs", "set-destination", "J-X", "public", "--fixture", registry});
  EXPECT_EQ(r.code, kOk) << r.err;
  const auto reg = load(registry);
  EXPECT_EQ(reg.revision, 5u);
  EXPECT_EQ(lookup(reg, "J-X").destination.type, Destination::kPublic);

  r = run({"--fixture", registry, "jobs", "list"});
  EXPECT_NE(r.out.find("J-X"), std::string::npos);

  r = run({"--fixture", registry, "jobs", "set-destination", "J-X", "private", "S_9"});
  EXPECT_EQ(r.code, kServiceError);
  EXPECT_NE(r.err.find("UnknownServer"), std::string::npos);
}

TEST_F(Cli, BrokerAdministration) {
  auto r = run({"--broker-dir", broker, "broker", "add-csp", "--id", "D", "--class", "storage", "--intensity", "100",
                "--energy", "1"});
  ASSERT_EQ(r.code, kOk) << r.err;
  r = run({"--broker-dir", broker, "broker", "add-offer", "--id", "D-1", "--csp", "D", "--class", "storage",
           "--price", "10", "--qos", "gold", "--availability", "0.9999", "--window", "1-3"});
  ASSERT_EQ(r.code, kOk) << r.err;
  r = run({"--broker-dir", broker, "broker", "select", "--class", "storage", "--budget", "100"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("D-1"), std::string::npos);
  r = run({"--broker-dir", broker, "broker", "add-offer", "--id", "E-1", "--csp", "E", "--class", "storage",
           "--price", "10", "--availability", "2"});
  EXPECT_NE(r.code, kOk);
}

TEST_F(Cli, EnvironmentSuppliesPaths) {
  ::setenv("IGCA_REGISTRY", registry.c_str(), 1);
  ::setenv("IGCA_BROKER_DIR", dir.path().c_str(), 1);
  const auto r = run({"broker", "select", "--class", "software", "--budget", "100", "--qos", "silver"});
  const auto jobs = run({"jobs", "list"});
  ::unsetenv("IGCA_REGISTRY");
  ::unsetenv("IGCA_BROKER_DIR");
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("B-SW"), std::string::npos);
  EXPECT_EQ(jobs.code, kOk) << jobs.err;
}

TEST_F(Cli, ErrorsMapToExitCodes) {
  EXPECT_EQ(run({}).code, kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kUsage);
  EXPECT_EQ(run({"--fixture", registry, "serve", "--port", "0"}).code, kUsage);
  EXPECT_EQ(run({"--fixture", (dir / "missing.xml").string(), "table3"}).code, kLoadError);
  EXPECT_EQ(run({"--fixture", registry, "scenario", "storage", "--set", "nonsense=1"}).code, kUsage);
  testing_support::TempDir other;
  io::write_file_atomic(other / "bad.xml", "<igca version=\"1\"");
  const auto r = run({"--fixture", (other / "bad.xml").string(), "jobs", "list"});
  EXPECT_EQ(r.code, kLoadError);
  EXPECT_NE(r.err.find("ParseError"), std::string::npos);
}

}  // namespace
}  // namespace igca::cli
