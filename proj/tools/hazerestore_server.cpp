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

#include <iostream>

#include "CLI11.hpp"
#include "haze/error.hpp"
#include "haze/service/server.hpp"

int main(int argc, char** argv) {
    CLI::App app{"HTTP restoration service"};
    haze::service::ServiceConfig cfg;
    try {
        cfg = haze::service::ServiceConfig::from_env();
    } catch (const haze::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    std::string host = "0.0.0.0";
    std::string ckpt = cfg.checkpoint_dir.string();
    std::string artifacts;
    long long ttl_hours = cfg.artifact_ttl.count() / 3600;
    app.add_option("--host", host)->capture_default_str();
    app.add_option("--port", cfg.port, "Overrides HAZE_RESTORE_PORT")->capture_default_str();
    app.add_option("--checkpoint-dir", ckpt, "Overrides HAZE_RESTORE_CKPT_DIR")->capture_default_str();
    app.add_option("--artifact-dir", artifacts, "Restored image store (default <checkpoint-dir>/artifacts)");
    app.add_option("--image-size", cfg.image_size, "Inference resize side; 0 uses the checkpoint's size")
        ->capture_default_str();
    app.add_option("--max-upload-bytes", cfg.max_upload_bytes)->capture_default_str();
    app.add_option("--artifact-ttl-hours", ttl_hours)->capture_default_str();
    CLI11_PARSE(app, argc, argv);
    cfg.checkpoint_dir = ckpt;
    cfg.artifact_dir = artifacts;
    cfg.artifact_ttl = std::chrono::hours(ttl_hours);
    try {
        return haze::service::serve(cfg, host);
    } catch (const haze::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
