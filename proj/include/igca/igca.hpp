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

#pragma once

#include "igca/broker.hpp"
#include "igca/broker_xml.hpp"
#include "igca/clock.hpp"
#include "igca/decision.hpp"
#include "igca/energy_model.hpp"
#include "igca/error.hpp"
#include "igca/json_codec.hpp"
#include "igca/policy.hpp"
#include "igca/registry.hpp"
#include "igca/routing.hpp"
#include "igca/service.hpp"
#include "igca/types.hpp"
