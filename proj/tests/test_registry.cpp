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

#include <atomic>
#include <thread>

#include "igca/registry.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace igca {
namespace {

using testing_support::copy_fixture;
using testing_support::data_file;
using testing_support::TempDir;

RegistryEntry entry(std::string id, Destination type, std::string server = {}) {
  RegistryEntry e;
  e.job.job_id = std::move(id);
  e.job.service_class = ServiceClass::kStorage;
  e.job.file_size_gb = 1;
  e.destination = {type, std::move(server)};
  e.confirmed_by = "ops";
  e.confirmed_at = "2026-01-01T00:00:00Z";
  return e;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

TEST(Registry, FixtureLoads) {
  const auto reg = load(data_file("axy.xml"));
  EXPECT_EQ(reg.revision, 3u);
  ASSERT_EQ(reg.entries.size(), 3u);
  EXPECT_EQ(lookup(reg, "J-STORAGE").destination, (Placement{Destination::kPrivate, "S_2"}));
  EXPECT_EQ(lookup(reg, "J-SOFTWARE").destination.type, Destination::kPublic);
  EXPECT_EQ(reg.reported.size(), 9u);
  EXPECT_EQ(reg.infrastructure.private_path.size(), 5u);
}

TEST(Registry, FixtureIsCanonical) {
  const std::string text = io::read_file(data_file("axy.xml"));
  EXPECT_EQ(serialize(parse_registry(text)), text);
}

TEST(Registry, LookupIsCaseSensitive) {
  const auto reg = load(data_file("axy.xml"));
  EXPECT_EQ(code_of([&] { lookup(reg, "j-storage"); }), ErrorCode::kNotRegistered);
}

TEST(Registry, UpsertInsertsAndReplaces) {
  RegistryFile reg;
  reg.infrastructure.servers = {ServerSpec{"S_2"}};
  reg = upsert(reg, entry("J-1", Destination::kLocal));
  EXPECT_EQ(reg.revision, 1u);
  reg = upsert(reg, entry("J-1", Destination::kPrivate, "S_2"));
  EXPECT_EQ(reg.revision, 2u);
  ASSERT_EQ(reg.entries.size(), 1u);
  EXPECT_EQ(reg.entries[0].destination.server, "S_2");
}

TEST(Registry, UpsertValidatesPlacement) {
  RegistryFile reg;
  EXPECT_EQ(code_of([&] { upsert(reg, entry("J-1", Destination::kPrivate, "S_9")); }), ErrorCode::kUnknownServer);
  EXPECT_EQ(code_of([&] { upsert(reg, entry("J-1", Destination::kPublic, "S_9")); }), ErrorCode::kSchemaError);
  auto bad = entry("J-1", Destination::kLocal);
  bad.confirmed_at = "yesterday";
  EXPECT_EQ(code_of([&] { upsert(reg, bad); }), ErrorCode::kSchemaError);
  EXPECT_EQ(reg.revision, 0u);
}

TEST(Registry, ReplaceInfrastructureKeepsPlacementsResolvable) {
  auto reg = load(data_file("axy.xml"));
  auto infra = reg.infrastructure;
  infra.servers.erase(infra.servers.begin());  // drops S_2
  EXPECT_EQ(code_of([&] { replace_infrastructure(reg, infra, reg.thresholds); }), ErrorCode::kUnknownServer);
  infra = reg.infrastructure;
  infra.content_server_j_per_mb = 0.5;
  const auto next = replace_infrastructure(reg, infra, reg.thresholds);
  EXPECT_EQ(next.revision, reg.revision + 1);
  EXPECT_EQ(next.infrastructure.content_server_j_per_mb, 0.5);
}

TEST(RegistryXml, DuplicateJobIdIsSchemaError) {
  RegistryFile reg;
  reg.entries = {entry("J-1", Destination::kLocal), entry("J-1", Destination::kPublic)};
  EXPECT_EQ(code_of([&] { parse_registry(serialize(reg)); }), ErrorCode::kSchemaError);
}

TEST(RegistryXml, UnknownElementsAndAttributesAreRejected) {
  std::string text = io::read_file(data_file("axy.xml"));
  std::string extra_attr = text;
  extra_attr.replace(extra_attr.find("dept=\"operations\""), 0, "colour=\"blue\" ");
  EXPECT_EQ(code_of([&] { parse_registry(extra_attr); }), ErrorCode::kSchemaError);
  std::string extra_elem = text;
  extra_elem.replace(extra_elem.find("<jobs>"), 0, "<notes/>");
  EXPECT_EQ(code_of([&] { parse_registry(extra_elem); }), ErrorCode::kSchemaError);
  std::string bad_enum = text;
  bad_enum.replace(bad_enum.find("class=\"storage\""), 15, "class=\"archive\"");
  EXPECT_EQ(code_of([&] { parse_registry(bad_enum); }), ErrorCode::kSchemaError);
}

TEST(RegistryXml, MalformedXmlReportsLine) {
  const std::string text = "<igca version=\"1\" revision=\"0\">\n  <infrastructure>\n    <machine id=\"x\"\n";
  try {
    parse_registry(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_GE(e.line(), 3);
  }
}

TEST(RegistryXml, MissingFileIsNotFound) {
  EXPECT_EQ(code_of([] { load("/nonexistent/registry.xml"); }), ErrorCode::kNotFound);
}

TEST(RegistryXml, GeneratedRoundTrip) {
  oracle::Gen gen(51);
  TempDir dir;
  for (int i = 0; i < 200; ++i) {
    const auto reg = gen.registry();
    const auto path = dir / "r.xml";
    save(path, reg);
    const auto back = load(path);
    ASSERT_EQ(back, reg) << serialize(reg);
    EXPECT_EQ(serialize(back), io::read_file(path));
  }
}

TEST(RegistryStore, SnapshotsSurviveConcurrentWrites) {
  TempDir dir;
  const auto path = copy_fixture(dir, "axy.xml");
  RegistryStore store(path);
  std::atomic<bool> done{false};
  std::atomic<int> torn{0};
  std::thread reader([&] {
    while (!done) {
      const auto snap = store.snapshot();
      if (!snap || snap->entries.size() != 3) ++torn;
      try {
        const auto raw = load(path);
        if (raw.entries.size() != 3) ++torn;
      } catch (const Error&) {
        ++torn;
      }
    }
  });
  for (int i = 0; i < 200; ++i) {
    store.mutate([&](const RegistryFile& reg) {
      auto e = lookup(reg, "J-SOFTWARE");
      e.destination = i % 2 ? Placement{Destination::kPublic, ""} : Placement{Destination::kPrivate, "S_2"};
      return upsert(reg, e);
    });
  }
  done = true;
  reader.join();
  EXPECT_EQ(torn.load(), 0);
  EXPECT_EQ(store.snapshot()->revision, 203u);
}

TEST(RegistryStore, PicksUpExternalEditsAndKeepsLastGoodOnCorruption) {
  TempDir dir;
  const auto path = copy_fixture(dir, "axy.xml");
  RegistryStore store(path);
  auto reg = load(path);
  reg.revision = 10;
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  save(path, reg);
  EXPECT_EQ(store.snapshot()->revision, 10u);
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  io::write_file_atomic(path, "<igca");
  EXPECT_EQ(store.snapshot()->revision, 10u);
}

}  // namespace
}  // namespace igca
