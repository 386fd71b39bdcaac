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

// Inference backend behind the HTTP API: a lazily loaded registry of the
// fine-tuned generator variants plus a content-addressed store of restored
// images. Transport independent; see server.hpp for the HTTP binding.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "haze/nn/ffa.hpp"
#include "haze/train/checkpoint.hpp"
#include "json.hpp"

namespace haze::service {

inline constexpr std::size_t kDefaultUploadCap = 16u << 20;

struct ServiceConfig {
    std::filesystem::path checkpoint_dir = "checkpoints";
    std::filesystem::path artifact_dir;  // defaults to checkpoint_dir/artifacts
    std::size_t max_upload_bytes = kDefaultUploadCap;
    /// Square side every upload is resized to before inference; 0 uses the
    /// resize size recorded in the variant's checkpoint.
    int image_size = 256;
    std::chrono::seconds artifact_ttl{24 * 3600};
    std::string device = "cpu";
    int port = 8080;

    /// Reads HAZE_RESTORE_CKPT_DIR, HAZE_RESTORE_DEVICE and HAZE_RESTORE_PORT
    /// on top of the defaults.
    static ServiceConfig from_env();
    void validate() const;
};

/// Error surfaced to clients as {"error": {"code", "message"}}.
class ApiError : public std::runtime_error {
public:
    ApiError(int status, std::string code, const std::string& message)
        : std::runtime_error(message), status_(status), code_(std::move(code)) {}
    [[nodiscard]] int status() const noexcept { return status_; }
    [[nodiscard]] const std::string& code() const noexcept { return code_; }
    [[nodiscard]] nlohmann::json body() const;

private:
    int status_;
    std::string code_;
};

struct LoadedVariant {
    int k = 0;
    std::filesystem::path path;
    nn::FFA net;
    data::AugmentationConfig aug;
};

enum class VariantStatus { ready, unavailable };
std::string_view status_name(VariantStatus s);

/// K -> generator. A variant is ready when finetune_k{K}_*.ckpt exists in the
/// checkpoint directory and loads; the newest epoch wins. Loading happens on
/// first use, guarded per variant; failures are retried on the next request.
class VariantRegistry {
public:
    explicit VariantRegistry(std::filesystem::path checkpoint_dir);

    [[nodiscard]] static std::vector<int> allowed();
    [[nodiscard]] static bool is_allowed(int k);

    /// Null when no loadable checkpoint exists for k.
    std::shared_ptr<const LoadedVariant> get(int k);
    VariantStatus status(int k);
    /// Checkpoint that get(k) would load, if any.
    [[nodiscard]] std::optional<std::filesystem::path> locate(int k) const;
    /// Reason of the last failed load for k, empty otherwise.
    [[nodiscard]] std::string last_error(int k) const;

private:
    struct Slot {
        mutable std::mutex mu;
        std::shared_ptr<const LoadedVariant> loaded;
        std::string error;
    };
    Slot& slot(int k);
    [[nodiscard]] const Slot& slot(int k) const;

    std::filesystem::path dir_;
    std::vector<std::unique_ptr<Slot>> slots_;  // parallel to allowed()
};

/// Reported reference numbers, read from variants.json beside the checkpoints.
struct ReportedEntry {
    double ssim;
    double psnr_db;
};
std::optional<ReportedEntry> reported_for(const nlohmann::json& manifest, int k);

struct RestoreRequest {
    std::string image;  // raw upload bytes
    std::string variant;
    std::optional<std::string> reference;
};

struct RestoreResult {
    std::string job_id;
    std::string restored_image_url;
    std::optional<double> psnr_db;
    std::optional<double> ssim;
    [[nodiscard]] nlohmann::json to_json() const;
};

class RestoreService {
public:
    explicit RestoreService(ServiceConfig cfg);

    /// Throws ApiError for every client-visible failure.
    RestoreResult restore(const RestoreRequest& req);
    /// One {k, status, ssim_reported, psnr_reported, reported_source} per variant.
    nlohmann::json variants();
    /// PNG bytes of a stored artifact; throws ApiError 400 on malformed ids
    /// and 404 when absent or expired.
    std::string artifact(const std::string& id) const;
    /// Deletes artifacts older than the TTL; returns how many were removed.
    std::size_t sweep_artifacts(std::filesystem::file_time_type now = std::filesystem::file_time_type::clock::now());

    [[nodiscard]] const ServiceConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] VariantRegistry& registry() noexcept { return registry_; }

private:
    [[nodiscard]] std::filesystem::path artifact_path(const std::string& id) const;
    [[nodiscard]] nlohmann::json manifest() const;

    ServiceConfig cfg_;
    VariantRegistry registry_;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
/// Artifact key: SHA-256 over the upload bytes, K, the checkpoint file name
/// and the inference size.
std::string job_id(std::string_view image, int k, const std::string& checkpoint_name, int size);

}  // namespace haze::service
