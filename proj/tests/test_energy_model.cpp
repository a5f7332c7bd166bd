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

#include "igca/energy_model.hpp"
#include "oracles.hpp"

namespace igca {
namespace {

JobProfile storage_job(double size_gb, double downloads, double users) {
  JobProfile j;
  j.job_id = "J-S";
  j.service_class = ServiceClass::kStorage;
  j.file_size_gb = size_gb;
  j.downloads_per_hour = downloads;
  j.users = users;
  return j;
}

TransportPath single_element(double power, double capacity, double content = 0.0) {
  TransportPath p;
  p.elements = {{"e", power, capacity}};
  p.content_server_j_per_mb = content;
  return p;
}

TransportPath table2_path() {
  TransportPath p;
  p.elements = {{"cisco-4503-a", 474, 64000},
                {"cisco-4503-b", 474, 64000},
                {"cisco-4503-c", 474, 64000},
                {"cisco-6509", 3800, 160000},
                {"juniper-mx960", 5100, 660000}};
  return p;
}

MachineSpec pc() { return {"PC", 210, 20, 0.25}; }

TEST(TransportIntensity, PowerEqualsCapacityGivesOne) {
  EXPECT_DOUBLE_EQ(transport_intensity(single_element(64, 64)), 1.0);
}

TEST(TransportIntensity, EquipmentTableMatchesHandArithmetic) {
  const double expected = oracle::path_intensity(
      {{474, 64000}, {474, 64000}, {474, 64000}, {3800, 160000}, {5100, 660000}});
  EXPECT_NEAR(expected, 0.05370, 5e-6);
  EXPECT_NEAR(transport_intensity(table2_path()), expected, 1e-15);
}

TEST(TransportIntensity, Errors) {
  try {
    transport_intensity(TransportPath{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyPath);
  }
  try {
    transport_intensity(single_element(10, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidElement);
  }
}

TEST(TransportIntensity, MeasuredFigureTakesPrecedence) {
  TransportPath p = table2_path();
  p.measured_j_per_mb = 0.4;
  EXPECT_DOUBLE_EQ(effective_transport_intensity(p), 0.4);
  EXPECT_NEAR(transport_intensity(p), 0.0537, 1e-4);
}

TEST(StorageCloud, ZeroFileSizeIsZero) {
  EXPECT_EQ(storage_cloud_power(storage_job(0, 7, 3), single_element(1, 2, 0.5)).value, 0.0);
}

TEST(StorageCloud, WorkedExample) {
  // 2 GB, 3/hr, 0.5 J/Mb combined, 4 users.
  const auto est = storage_cloud_power(storage_job(2, 3, 4), single_element(1, 4, 0.25));
  const double expected = 2 * 8000 * (3.0 / 3600) * 0.5 * 4;
  EXPECT_NEAR(expected, 26.6667, 1e-4);
  EXPECT_NEAR(est.value, expected, 1e-12);
  EXPECT_EQ(est.combination, Combination::kProduct);
  ASSERT_EQ(est.terms.size(), 4u);
  EXPECT_DOUBLE_EQ(est.terms[0].value, 16000);
}

TEST(StorageCloud, DownloadScalingIsExactlyLinear) {
  const auto path = single_element(3, 7, 0.1);
  const double low = storage_cloud_power(storage_job(1, 2, 5), path).value;
  const double high = storage_cloud_power(storage_job(1, 20, 5), path).value;
  EXPECT_NEAR(high / low, 10.0, 1e-12);
}

TEST(StorageCloud, WrongClassIsRejected) {
  JobProfile j = storage_job(1, 1, 1);
  j.service_class = ServiceClass::kSoftware;
  try {
    storage_cloud_power(j, single_element(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClassMismatch);
  }
}

TEST(StorageLocal, Examples) {
  EXPECT_DOUBLE_EQ(storage_local_power(storage_job(0, 1, 1), pc()).value, 210.0);
  EXPECT_DOUBLE_EQ(storage_local_power(storage_job(1, 1, 1), pc()).value, 210.0125);
  EXPECT_DOUBLE_EQ(storage_local_power(storage_job(10, 1, 1), MachineSpec{"m", 100, 2, 1}).value, 105.0);
}

TEST(StorageLocal, AcceptsSoftwareRejectsProcessing) {
  JobProfile j = storage_job(5, 0, 0);
  j.service_class = ServiceClass::kSoftware;
  EXPECT_DOUBLE_EQ(storage_local_power(j, pc()).value, 210.0625);
  j.service_class = ServiceClass::kProcessing;
  EXPECT_THROW(storage_local_power(j, pc()), Error);
}

JobProfile software_job(double frame_rate, double size_gb) {
  JobProfile j;
  j.job_id = "J-SW";
  j.service_class = ServiceClass::kSoftware;
  j.frame_rate_mbps = frame_rate;
  j.file_size_gb = size_gb;
  return j;
}

ServerSpec dl380(unsigned users) {
  ServerSpec s;
  s.id = "S_2";
  s.power_w = 225;
  s.capacity_mbps = 800;
  s.disk_capacity_gb = 500;
  s.disk_power_w = 2.5;
  s.concurrent_users = users;
  return s;
}

TEST(SoftwareCloud, TransportAndDiskVanish) {
  const auto est = software_cloud_power(software_job(0, 0), pc(), dl380(45), single_element(1, 1));
  EXPECT_DOUBLE_EQ(est.value, 210 + 5);
}

TEST(SoftwareCloud, WorkedExample) {
  TransportPath path;
  path.measured_j_per_mb = 484;
  const auto est = software_cloud_power(software_job(11.5, 5), pc(), dl380(45), path);
  EXPECT_NEAR(est.value, 5781.025, 1e-9);
  EXPECT_NEAR(est.recombine(), est.value, 1e-9 * est.value);
}

TEST(SoftwareCloud, ZeroUsersIsInvalidServer) {
  try {
    software_cloud_power(software_job(1, 1), pc(), dl380(0), single_element(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidServer);
  }
}

TEST(SoftwareCloud, LowerFrameRateStrictlyLowersValue) {
  const auto path = single_element(5, 10);
  double prev = std::numeric_limits<double>::infinity();
  for (double f : {40.0, 31.46, 11.5, 1.0, 0.0}) {
    const double v = software_cloud_power(software_job(f, 5), pc(), dl380(45), path).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

JobProfile processing_job(double enc, double h_enc, double h_week, double frame_rate) {
  JobProfile j;
  j.job_id = "J-PR";
  j.service_class = ServiceClass::kProcessing;
  j.encodings_per_week = enc;
  j.hours_per_encoding = h_enc;
  j.hours_per_week = h_week;
  j.frame_rate_mbps = frame_rate;
  return j;
}

TEST(ProcessingCloud, DegeneratesToLocal) {
  const auto job = processing_job(0, 3, 40, 0);
  EXPECT_DOUBLE_EQ(processing_cloud_energy(job, pc(), dl380(1), single_element(9, 1)).value,
                   processing_local_energy(job, pc()).value);
}

TEST(ProcessingCloud, WorkedExample) {
  EXPECT_DOUBLE_EQ(processing_cloud_energy(processing_job(20, 2, 40, 0), pc(), dl380(1), single_element(1, 1)).value,
                   17400.0);
}

TEST(ProcessingCloud, PublicExceedsPrivateWithCostlierPath) {
  const auto job = processing_job(20, 2, 40, 900);
  const auto priv = processing_cloud_energy(job, pc(), dl380(1), single_element(1, 2), Destination::kPrivate);
  const auto pub = processing_cloud_energy(job, pc(), dl380(1), single_element(3, 2), Destination::kPublic);
  EXPECT_GT(pub.value, priv.value);
  EXPECT_EQ(pub.destination, Destination::kPublic);
}

TEST(ProcessingCloud, ServerModeScalesEncodingTerm) {
  auto server = dl380(1);
  server.mode = ServerMode::kSleep;
  const auto est = processing_cloud_energy(processing_job(20, 2, 0, 0), pc(), server, single_element(1, 1));
  EXPECT_NEAR(est.value, 20 * 2 * 22.5, 1e-9);
}

TEST(ProcessingLocal, Examples) {
  EXPECT_EQ(processing_local_energy(processing_job(1, 1, 0, 0), pc()).value, 0.0);
  EXPECT_DOUBLE_EQ(processing_local_energy(processing_job(1, 1, 40, 0), pc()).value, 8400.0);
  EXPECT_DOUBLE_EQ(processing_local_energy(processing_job(1, 1, 1, 0), MachineSpec{"m", 1, 1, 0}).value, 1.0);
}

TEST(JobValidation, RejectsNegativeAndOverlongWeeks) {
  auto j = processing_job(1, 1, 169, 0);
  EXPECT_THROW(processing_local_energy(j, pc()), Error);
  j.hours_per_week = -1;
  EXPECT_THROW(processing_local_energy(j, pc()), Error);
}

InfrastructureSpec infra() {
  InfrastructureSpec s;
  s.machines = {pc()};
  auto storage = dl380(45);
  storage.function = ServerFunction::kStorage;
  auto proc = dl380(45);
  proc.id = "S_3";
  proc.function = ServerFunction::kProcessing;
  proc.power_w = 300;
  s.servers = {storage, proc};
  s.private_path = table2_path().elements;
  s.public_path = {{"internet", 2746.38, 809.55}};
  s.content_server_j_per_mb = 0.23;
  return s;
}

TEST(Estimate, DispatchMatchesDirectFormulaCalls) {
  const auto spec = infra();
  auto job = processing_job(20, 2, 40, 10);
  EXPECT_EQ(estimate(job, spec, Destination::kLocal).value, processing_local_energy(job, pc()).value);
  EXPECT_EQ(estimate(job, spec, Destination::kPrivate).value,
            processing_cloud_energy(job, pc(), spec.servers[1], *spec.path_for(Destination::kPrivate)).value);

  auto sjob = storage_job(1, 2, 5);
  const auto priv = estimate(sjob, spec, Destination::kPrivate);
  EXPECT_EQ(priv.value, storage_cloud_power(sjob, *spec.path_for(Destination::kPrivate)).value);
  EXPECT_GT(estimate(sjob, spec, Destination::kPublic).value, priv.value);
}

TEST(Estimate, SoftwareLocalUsesStorageLocalFormula) {
  const auto spec = infra();
  auto job = software_job(10, 5);
  EXPECT_EQ(estimate(job, spec, Destination::kLocal).value, storage_local_power(job, pc()).value);
}

TEST(Estimate, PinnedServerOverridesFunctionMatch) {
  const auto spec = infra();
  auto job = processing_job(20, 2, 40, 0);
  EXPECT_DOUBLE_EQ(estimate(job, spec, Destination::kPrivate, std::string("S_2")).value, 8400 + 40 * 225.0);
  EXPECT_DOUBLE_EQ(estimate(job, spec, Destination::kPrivate).value, 8400 + 40 * 300.0);
}

TEST(Estimate, UnboundDestinations) {
  auto spec = infra();
  spec.public_path.clear();
  try {
    estimate(storage_job(1, 1, 1), spec, Destination::kPublic);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnboundDestination);
  }
  spec.machines.clear();
  EXPECT_THROW(estimate(storage_job(1, 1, 1), spec, Destination::kLocal), Error);
}

TEST(Estimate, MissingClassWorkloadIsClassMismatch) {
  try {
    estimate(storage_job(0, 0, 0), infra(), Destination::kLocal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClassMismatch);
  }
}

TEST(Estimate, PrivateOverrideReplacesElementSum) {
  auto spec = infra();
  spec.transport_override_j_per_mb = 0.5;
  EXPECT_DOUBLE_EQ(effective_transport_intensity(*spec.path_for(Destination::kPrivate)), 0.5);
  EXPECT_NEAR(effective_transport_intensity(*spec.path_for(Destination::kPublic)), 2746.38 / 809.55, 1e-12);
}

// ---------------------------------------------------------------------------
// Properties

TEST(EnergyProperties, LinearInEachStorageFactor) {
  oracle::Gen gen(11);
  for (int i = 0; i < 300; ++i) {
    const auto job = gen.job(ServiceClass::kStorage);
    const auto path = gen.path();
    const double base = storage_cloud_power(job, path).value;
    const double k = gen.uniform(0.1, 10);
    for (double JobProfile::*field : {&JobProfile::file_size_gb, &JobProfile::downloads_per_hour, &JobProfile::users}) {
      auto scaled = job;
      scaled.*field *= k;
      EXPECT_TRUE(oracle::close_rel(storage_cloud_power(scaled, path).value, k * base, 1e-12));
    }
  }
}

TEST(EnergyProperties, TermsRecombineAndAreNonNegative) {
  oracle::Gen gen(12);
  const auto spec = infra();
  for (int i = 0; i < 300; ++i) {
    for (auto cls : {ServiceClass::kStorage, ServiceClass::kSoftware, ServiceClass::kProcessing}) {
      const auto job = gen.job(cls);
      for (auto d : kAllDestinations) {
        const auto est = estimate(job, spec, d);
        EXPECT_GE(est.value, 0.0);
        EXPECT_TRUE(oracle::close_rel(est.recombine(), est.value, 1e-9));
        EXPECT_EQ(est.destination, d);
      }
    }
  }
}

TEST(EnergyProperties, MonotoneInFrameRateAndEncodings) {
  oracle::Gen gen(13);
  for (int i = 0; i < 200; ++i) {
    const auto machine = gen.machine();
    const auto server = gen.server();
    const auto path = gen.path();
    auto sw = gen.job(ServiceClass::kSoftware);
    auto sw_more = sw;
    sw_more.frame_rate_mbps += gen.uniform(0.01, 100);
    EXPECT_LT(software_cloud_power(sw, machine, server, path).value,
              software_cloud_power(sw_more, machine, server, path).value);

    auto pr = gen.job(ServiceClass::kProcessing);
    auto pr_more = pr;
    pr_more.encodings_per_week += 1;
    EXPECT_LT(processing_cloud_energy(pr, machine, server, path).value,
              processing_cloud_energy(pr_more, machine, server, path).value);
  }
}

TEST(EnergyProperties, ProcessingDegenerateEquivalence) {
  oracle::Gen gen(14);
  for (int i = 0; i < 200; ++i) {
    auto job = gen.job(ServiceClass::kProcessing);
    job.encodings_per_week = 0;
    job.frame_rate_mbps = 0;
    const auto machine = gen.machine();
    EXPECT_EQ(processing_cloud_energy(job, machine, gen.server(), gen.path()).value,
              processing_local_energy(job, machine).value);
  }
}

}  // namespace
}  // namespace igca
