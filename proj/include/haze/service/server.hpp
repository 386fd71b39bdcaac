//*****************************************************************************
// Copyright 2026 The haze-restore Authors
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
//*****************************************************************************

#pragma once

#include "haze/service/service.hpp"
#include "httplib.h"

namespace haze::service {

/// Registers the /api routes on `server`. `service` must outlive it.
void mount(httplib::Server& server, RestoreService& service);

/// Blocks serving on host:port, sweeping expired artifacts hourly.
int serve(const ServiceConfig& cfg, const std::string& host = "0.0.0.0");

}  // namespace haze::service
