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

#include "haze/service/service.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <random>
#include <span>
#include <sstream>

#include <spdlog/spdlog.h>

#include "haze/data/image_io.hpp"
#include "haze/metrics/metrics.hpp"
#include "haze/train/trainer.hpp"

namespace haze::service {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc{} || r.ptr != end) return std::nullopt;
    return v;
}

std::string allowed_list() {
    std::string out;
    for (int k : VariantRegistry::allowed()) {
        if (!out.empty()) out += ", ";
        out += std::to_string(k);
    }
    return out;
}

bool is_hex_id(const std::string& id) {
    return id.size() == 64 &&
           std::all_of(id.begin(), id.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

Tensor decode_upload(const std::string& bytes, std::size_t cap, const char* field) {
    if (bytes.size() > cap) {
        throw ApiError(400, "payload_too_large",
                       std::string(field) + " is " + std::to_string(bytes.size()) + " bytes; the limit is " +
                           std::to_string(cap));
    }
    try {
        const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data());
        return data::decode_image(std::span<const std::uint8_t>(p, bytes.size()));
    } catch (const InputError& e) {
        throw ApiError(400, "unsupported_format", std::string(field) + ": " + e.what() + " (accepted: PNG, JPEG)");
    }
}

void write_atomically(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
    // Unique temp name so concurrent writers of the same id never collide.
    static thread_local std::mt19937_64 gen{std::random_device{}()};
    const fs::path tmp = p.string() + "." + std::to_string(gen()) + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!os) throw Error("cannot write artifact " + tmp.string());
    }
    fs::rename(tmp, p);
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) return {};
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

// ------------------------------------------------------------------ config

ServiceConfig ServiceConfig::from_env() {
    ServiceConfig c;
    if (auto v = env("HAZE_RESTORE_CKPT_DIR")) c.checkpoint_dir = *v;
    if (auto v = env("HAZE_RESTORE_DEVICE")) c.device = *v;
    if (auto v = env("HAZE_RESTORE_PORT")) {
        const auto port = parse_int(*v);
        if (!port) throw ConfigError("HAZE_RESTORE_PORT is not an integer: " + *v);
        c.port = *port;
    }
    return c;
}

void ServiceConfig::validate() const {
    if (device != "cpu") throw ConfigError("unsupported device '" + device + "'; this build runs on cpu only");
    if (port < 0 || port > 65535) throw ConfigError("port out of range: " + std::to_string(port));
    if (image_size < 0) throw ConfigError("image_size must be non-negative");
    if (max_upload_bytes == 0) throw ConfigError("max_upload_bytes must be positive");
}

nlohmann::json ApiError::body() const { return {{"error", {{"code", code_}, {"message", what()}}}}; }

std::string_view status_name(VariantStatus s) { return s == VariantStatus::ready ? "ready" : "unavailable"; }

// ------------------------------------------------------------------ registry

VariantRegistry::VariantRegistry(fs::path checkpoint_dir) : dir_(std::move(checkpoint_dir)) {
    for (std::size_t i = 0; i < allowed().size(); ++i) slots_.push_back(std::make_unique<Slot>());
}

std::vector<int> VariantRegistry::allowed() {
    return {std::begin(train::kVariantCounts), std::end(train::kVariantCounts)};
}

bool VariantRegistry::is_allowed(int k) { return train::is_standard_variant(k); }

VariantRegistry::Slot& VariantRegistry::slot(int k) {
    const auto ks = allowed();
    return *slots_.at(static_cast<std::size_t>(std::find(ks.begin(), ks.end(), k) - ks.begin()));
}

const VariantRegistry::Slot& VariantRegistry::slot(int k) const {
    return const_cast<VariantRegistry*>(this)->slot(k);
}

std::optional<fs::path> VariantRegistry::locate(int k) const {
    std::error_code ec;
    if (!fs::is_directory(dir_, ec)) return std::nullopt;
    const std::string prefix = "finetune_" + train::variant_name(k) + "_";
    std::optional<fs::path> best;
    long long best_epoch = -1;
    for (const auto& e : fs::directory_iterator(dir_, ec)) {
        const std::string name = e.path().filename().string();
        if (!e.is_regular_file() || !name.starts_with(prefix) || !name.ends_with(".ckpt")) continue;
        const std::string_view digits =
            std::string_view(name).substr(prefix.size(), name.size() - prefix.size() - 5);
        long long epoch = 0;
        const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), epoch);
        if (digits.empty() || r.ec != std::errc{} || r.ptr != digits.data() + digits.size()) continue;
        if (epoch > best_epoch) {
            best_epoch = epoch;
            best = e.path();
        }
    }
    return best;
}

std::shared_ptr<const LoadedVariant> VariantRegistry::get(int k) {
    if (!is_allowed(k)) return nullptr;
    Slot& s = slot(k);
    std::lock_guard lock(s.mu);
    if (s.loaded) return s.loaded;
    const auto path = locate(k);
    if (!path) {
        s.error = "no finetune_" + train::variant_name(k) + "_*.ckpt in " + dir_.string();
        return nullptr;
    }
    try {
        const train::Checkpoint ckpt = train::load_checkpoint(*path);
        if (ckpt.phase != train::Phase::finetune || ckpt.variant != train::variant_name(k)) {
            throw CheckpointError(path->string() + " holds " + std::string(train::phase_name(ckpt.phase)) + "/" +
                                  ckpt.variant + ", expected finetune/" + train::variant_name(k));
        }
        auto v = std::make_shared<LoadedVariant>();
        v->k = k;
        v->path = *path;
        v->net = train::load_generator(ckpt);
        v->aug = ckpt.aug;
        s.loaded = std::move(v);
        s.error.clear();
        spdlog::info("loaded variant K={} from {}", k, path->string());
    } catch (const std::exception& e) {
        s.error = e.what();
        spdlog::warn("variant K={} unavailable: {}", k, e.what());
    }
    return s.loaded;
}

VariantStatus VariantRegistry::status(int k) {
    return get(k) != nullptr ? VariantStatus::ready : VariantStatus::unavailable;
}

std::string VariantRegistry::last_error(int k) const {
    if (!is_allowed(k)) return "unknown variant";
    const Slot& s = slot(k);
    std::lock_guard lock(s.mu);
    return s.error;
}

std::optional<ReportedEntry> reported_for(const nlohmann::json& manifest, int k) {
    if (!manifest.is_object() || !manifest.contains("variants") || !manifest["variants"].is_array()) {
        return std::nullopt;
    }
    for (const auto& v : manifest["variants"]) {
        if (!v.is_object() || !v.contains("k") || v["k"] != k) continue;
        const auto ssim = v.find("ssim_reported");
        const auto psnr = v.find("psnr_reported");
        if (ssim == v.end() || psnr == v.end() || !ssim->is_number() || !psnr->is_number()) return std::nullopt;
        return ReportedEntry{ssim->get<double>(), psnr->get<double>()};
    }
    return std::nullopt;
}

// ------------------------------------------------------------------ hashing

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 15]);
    }
    return out;
}

std::string job_id(std::string_view image, int k, const std::string& checkpoint_name, int size) {
    std::string key(image);
    key += '\0';
    key += "k=" + std::to_string(k) + ";ckpt=" + checkpoint_name + ";size=" + std::to_string(size);
    return sha256_hex(key);
}

// ------------------------------------------------------------------ service

nlohmann::json RestoreResult::to_json() const {
    nlohmann::json j{{"job_id", job_id}, {"restored_image_url", restored_image_url}};
    if (psnr_db) j["psnr_db"] = *psnr_db;
    if (ssim) j["ssim"] = *ssim;
    return j;
}

RestoreService::RestoreService(ServiceConfig cfg) : cfg_(std::move(cfg)), registry_(cfg_.checkpoint_dir) {
    cfg_.validate();
    if (cfg_.artifact_dir.empty()) cfg_.artifact_dir = cfg_.checkpoint_dir / "artifacts";
    fs::create_directories(cfg_.artifact_dir);
}

fs::path RestoreService::artifact_path(const std::string& id) const { return cfg_.artifact_dir / (id + ".png"); }

nlohmann::json RestoreService::manifest() const {
    const fs::path p = cfg_.checkpoint_dir / "variants.json";
    const std::string text = read_file(p);
    if (text.empty()) return nullptr;
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        spdlog::warn("ignoring malformed manifest {}: {}", p.string(), e.what());
        return nullptr;
    }
}

nlohmann::json RestoreService::variants() {
    const nlohmann::json m = manifest();
    const nlohmann::json source =
        m.is_object() && m.contains("source") ? m["source"] : nlohmann::json("paper-reported");
    nlohmann::json list = nlohmann::json::array();
    for (int k : VariantRegistry::allowed()) {
        const auto reported = reported_for(m, k);
        list.push_back({
            {"k", k},
            {"status", status_name(registry_.status(k))},
            {"ssim_reported", reported ? nlohmann::json(reported->ssim) : nlohmann::json(nullptr)},
            {"psnr_reported", reported ? nlohmann::json(reported->psnr_db) : nlohmann::json(nullptr)},
            {"reported_source", reported ? source : nlohmann::json(nullptr)},
        });
    }
    return list;
}

RestoreResult RestoreService::restore(const RestoreRequest& req) {
    const auto k = parse_int(req.variant);
    if (!k || !VariantRegistry::is_allowed(*k)) {
        throw ApiError(404, "unknown_variant",
                       "unknown variant '" + req.variant + "'; allowed: " + allowed_list());
    }
    // Validate uploads before touching the model so bad input never waits on a load.
    Tensor input = decode_upload(req.image, cfg_.max_upload_bytes, "image");
    std::optional<Tensor> reference;
    if (req.reference) reference = decode_upload(*req.reference, cfg_.max_upload_bytes, "reference");

    const auto variant = registry_.get(*k);
    if (!variant) {
        throw ApiError(503, "variant_unavailable",
                       "variant " + std::to_string(*k) + " is unavailable: " + registry_.last_error(*k));
    }
    const int h = cfg_.image_size > 0 ? cfg_.image_size : variant->aug.resize_height;
    const int w = cfg_.image_size > 0 ? cfg_.image_size : variant->aug.resize_width;

    RestoreResult out;
    out.job_id = job_id(req.image, *k, variant->path.filename().string(), cfg_.image_size);
    out.restored_image_url = "/api/artifacts/" + out.job_id;
    const fs::path stored = artifact_path(out.job_id);

    Tensor restored;
    std::error_code ec;
    if (fs::exists(stored, ec)) {
        const std::string bytes = read_file(stored);
        const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data());
        restored = data::decode_image(std::span<const std::uint8_t>(p, bytes.size()));
        fs::last_write_time(stored, fs::file_time_type::clock::now(), ec);  // refresh TTL
    } else {
        const Tensor x = data::resize(input, h, w);
        const Tensor y = train::run_generator(variant->net, x, variant->aug);
        const auto png = data::encode_png(y);
        write_atomically(stored, png);
        // Metrics are computed on what the client downloads: the 8-bit PNG.
        restored = data::decode_image(png);
    }
    if (reference) {
        const Tensor ref = data::resize(*reference, h, w);
        out.psnr_db = metrics::psnr(restored, ref);
        out.ssim = metrics::ssim(restored, ref);
    }
    return out;
}

std::string RestoreService::artifact(const std::string& id) const {
    std::string key = id;
    if (key.ends_with(".png")) key.resize(key.size() - 4);
    if (!is_hex_id(key)) throw ApiError(400, "invalid_artifact_id", "artifact ids are 64 lowercase hex digits");
    const fs::path p = artifact_path(key);
    std::error_code ec;
    const auto mtime = fs::last_write_time(p, ec);
    if (ec || fs::file_time_type::clock::now() - mtime > cfg_.artifact_ttl) {
        throw ApiError(404, "artifact_not_found", "no artifact " + key);
    }
    std::string bytes = read_file(p);
    if (bytes.empty()) throw ApiError(404, "artifact_not_found", "no artifact " + key);
    return bytes;
}

std::size_t RestoreService::sweep_artifacts(fs::file_time_type now) {
    std::size_t removed = 0;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(cfg_.artifact_dir, ec)) {
        if (!e.is_regular_file(ec)) continue;
        const auto mtime = e.last_write_time(ec);
        if (ec) continue;
        if (now - mtime > cfg_.artifact_ttl && fs::remove(e.path(), ec)) ++removed;
    }
    if (removed > 0) spdlog::info("swept {} expired artifacts", removed);
    return removed;
}

}  // namespace haze::service
