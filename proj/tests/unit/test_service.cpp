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

#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "haze/data/image_io.hpp"
#include "haze/metrics/metrics.hpp"
#include "haze/service/server.hpp"
#include "haze/service/service.hpp"
#include "test_support.hpp"

namespace {

using namespace haze;
using haze::testing::ScratchDir;
namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kSide = 32;

std::string png_bytes(int h, int w, std::uint64_t seed) {
    Tensor t = haze::testing::random_tensor<float>(Shape{1, 3, h, w}, seed, 0.0, 1.0);
    for (float& v : t.data()) v = std::round(v * 255.0f) / 255.0f;
    const auto b = data::encode_png(t);
    return {b.begin(), b.end()};
}

Tensor decode(const std::string& s) {
    return data::decode_image(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

void write_variant(const fs::path& dir, int k, std::int64_t epoch) {
    const auto c = haze::testing::zero_gan_checkpoint(train::Phase::finetune, train::variant_name(k),
                                                      haze::testing::tiny_ffa(), haze::testing::tiny_disc(), kSide);
    train::save_checkpoint(dir / train::checkpoint_filename(train::Phase::finetune, train::variant_name(k), epoch), c);
}

/// Checkpoints for every variant except K=0, plus the reported manifest.
class ServiceTest : public ::testing::Test {
protected:
    void SetUp() override {
        for (int k : {25, 20, 10, 5}) write_variant(dir_.path(), k, 1);
        std::ofstream(dir_ / "variants.json") << train::reported_manifest().dump(2);
        cfg_.checkpoint_dir = dir_.path();
        cfg_.artifact_dir = dir_ / "artifacts";
        cfg_.image_size = kSide;
        cfg_.max_upload_bytes = 64 * 1024;
        service_ = std::make_unique<service::RestoreService>(cfg_);
        service::mount(server_, *service_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    void TearDown() override {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    httplib::Result post(const httplib::MultipartFormDataItems& items) {
        httplib::Client cli("127.0.0.1", port_);
        return cli.Post("/api/restore", items);
    }
    httplib::Result get(const std::string& path) {
        httplib::Client cli("127.0.0.1", port_);
        return cli.Get(path);
    }
    static httplib::MultipartFormDataItems form(const std::string& image, const std::string& variant,
                                                const std::optional<std::string>& ref = std::nullopt) {
        httplib::MultipartFormDataItems items{{"image", image, "in.png", "image/png"}, {"variant", variant, "", ""}};
        if (ref) items.push_back({"reference", *ref, "ref.png", "image/png"});
        return items;
    }
    static void expect_error(const httplib::Result& r, int status, const std::string& code) {
        ASSERT_TRUE(r) << "no response";
        EXPECT_EQ(r->status, status) << r->body;
        const json j = json::parse(r->body);
        EXPECT_EQ(j.at("error").at("code"), code) << r->body;
        EXPECT_FALSE(j.at("error").at("message").get<std::string>().empty());
    }

    ScratchDir dir_{"service"};
    service::ServiceConfig cfg_;
    std::unique_ptr<service::RestoreService> service_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

TEST_F(ServiceTest, VariantsListStatusesAndReportedNumbers) {
    const auto r = get("/api/variants");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
    const json j = json::parse(r->body);
    ASSERT_TRUE(j.is_array());
    ASSERT_EQ(j.size(), 5u);
    const int ks[] = {25, 20, 10, 5, 0};
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(j[i].at("k"), ks[i]);
        EXPECT_EQ(j[i].at("status"), ks[i] == 0 ? "unavailable" : "ready");
        EXPECT_EQ(j[i].at("reported_source"), "paper-reported");
    }
    EXPECT_DOUBLE_EQ(j[0].at("ssim_reported").get<double>(), 0.9084);
    EXPECT_DOUBLE_EQ(j[0].at("psnr_reported").get<double>(), 19.16);
    EXPECT_DOUBLE_EQ(j[4].at("psnr_reported").get<double>(), 18.02);
}

TEST_F(ServiceTest, MissingManifestGivesNullReportedFields) {
    fs::remove(dir_ / "variants.json");
    const json j = json::parse(get("/api/variants")->body);
    for (const auto& v : j) {
        EXPECT_TRUE(v.at("ssim_reported").is_null());
        EXPECT_TRUE(v.at("psnr_reported").is_null());
        EXPECT_TRUE(v.at("reported_source").is_null());
    }
}

TEST_F(ServiceTest, RestoreIsDeterministicAndFetchable) {
    const std::string img = png_bytes(40, 36, 1);
    const auto a = post(form(img, "25"));
    ASSERT_TRUE(a);
    ASSERT_EQ(a->status, 200) << a->body;
    const json ja = json::parse(a->body);
    const std::string id = ja.at("job_id");
    EXPECT_EQ(id.size(), 64u);
    EXPECT_EQ(ja.at("restored_image_url"), "/api/artifacts/" + id);
    EXPECT_FALSE(ja.contains("psnr_db") && !ja["psnr_db"].is_null());

    const auto b = post(form(img, "25"));
    EXPECT_EQ(json::parse(b->body).at("job_id"), id);
    const auto c = post(form(img, "20"));
    EXPECT_NE(json::parse(c->body).at("job_id"), id);
    const auto d = post(form(png_bytes(40, 36, 2), "25"));
    EXPECT_NE(json::parse(d->body).at("job_id"), id);

    const auto art = get("/api/artifacts/" + id);
    ASSERT_TRUE(art);
    EXPECT_EQ(art->status, 200);
    EXPECT_EQ(art->get_header_value("Content-Type"), "image/png");
    const Tensor out = decode(art->body);
    EXPECT_EQ(out.shape(), (Shape{1, 3, kSide, kSide}));
    // Identity generator: the artifact is the resized upload.
    EXPECT_LE(max_abs_diff(out, data::resize(decode(img), kSide, kSide)), 0.5 / 255.0 + 1e-6);
    EXPECT_EQ(get("/api/artifacts/" + id + ".png")->body, art->body);
}

TEST_F(ServiceTest, MetricsOnlyWithReference) {
    const std::string img = png_bytes(kSide, kSide, 3);
    const auto r = post(form(img, "10", img));
    ASSERT_EQ(r->status, 200) << r->body;
    const json j = json::parse(r->body);
    EXPECT_DOUBLE_EQ(j.at("ssim").get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(j.at("psnr_db").get<double>(), 100.0);

    const std::string other = png_bytes(kSide, kSide, 4);
    const json k = json::parse(post(form(img, "10", other))->body);
    EXPECT_NEAR(k.at("psnr_db").get<double>(), metrics::psnr(decode(img), decode(other)), 1e-9);
    EXPECT_NEAR(k.at("ssim").get<double>(), metrics::ssim(decode(img), decode(other)), 1e-9);
    EXPECT_EQ(k.at("job_id"), j.at("job_id"));
}

TEST_F(ServiceTest, UnknownVariantIs404WithAllowedList) {
    const std::string img = png_bytes(kSide, kSide, 5);
    for (const char* v : {"7", "abc", "-1", ""}) {
        const auto r = post(form(img, v));
        expect_error(r, 404, "unknown_variant");
        EXPECT_NE(r->body.find("25, 20, 10, 5, 0"), std::string::npos) << r->body;
    }
}

TEST_F(ServiceTest, ClientErrorsAre400) {
    expect_error(post(form("plain text, not an image", "25")), 400, "unsupported_format");
    expect_error(post(form(png_bytes(kSide, kSide, 6), "25", std::string("GIF89a...."))), 400, "unsupported_format");
    expect_error(post({{"variant", "25", "", ""}}), 400, "missing_field");
    expect_error(post({{"image", png_bytes(kSide, kSide, 6), "a.png", "image/png"}}), 400, "missing_field");
    // Above the per-file cap but within the transport limit.
    expect_error(post(form(png_bytes(160, 160, 7), "25")), 400, "payload_too_large");
    // Above the transport limit.
    expect_error(post(form(std::string(cfg_.max_upload_bytes * 3, 'x'), "25")), 400, "payload_too_large");
    httplib::Client cli("127.0.0.1", port_);
    expect_error(cli.Post("/api/restore", "{}", "application/json"), 400, "bad_request");
}

TEST_F(ServiceTest, MissingCheckpointIs503AndRecovers) {
    const std::string img = png_bytes(kSide, kSide, 8);
    const auto r = post(form(img, "0"));
    expect_error(r, 503, "variant_unavailable");
    write_variant(dir_.path(), 0, 2);
    EXPECT_EQ(post(form(img, "0"))->status, 200);
}

TEST_F(ServiceTest, CorruptCheckpointIs503) {
    { std::ofstream(dir_ / "finetune_k0_9.ckpt") << "junk"; }
    expect_error(post(form(png_bytes(kSide, kSide, 9), "0")), 503, "variant_unavailable");
    const json j = json::parse(get("/api/variants")->body);
    EXPECT_EQ(j[4].at("status"), "unavailable");
}

TEST_F(ServiceTest, NewestEpochWins) {
    write_variant(dir_.path(), 5, 12);
    write_variant(dir_.path(), 5, 3);
    EXPECT_EQ(service_->registry().locate(5)->filename(), "finetune_k5_12.ckpt");
}

TEST_F(ServiceTest, ArtifactErrors) {
    expect_error(get("/api/artifacts/not-an-id"), 400, "invalid_artifact_id");
    expect_error(get("/api/artifacts/" + std::string(64, 'A')), 400, "invalid_artifact_id");
    expect_error(get("/api/artifacts/" + std::string(64, 'a')), 404, "artifact_not_found");
    expect_error(get("/api/nowhere"), 404, "not_found");
}

TEST_F(ServiceTest, PreflightAllowsCrossOrigin) {
    httplib::Client cli("127.0.0.1", port_);
    const auto r = cli.Options("/api/restore");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 204);
    EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
    EXPECT_NE(r->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
}

TEST_F(ServiceTest, SweepRemovesExpiredArtifacts) {
    const json j = json::parse(post(form(png_bytes(kSide, kSide, 10), "25"))->body);
    const std::string id = j.at("job_id");
    const auto now = fs::file_time_type::clock::now();
    EXPECT_EQ(service_->sweep_artifacts(now), 0u);
    EXPECT_EQ(get("/api/artifacts/" + id)->status, 200);
    EXPECT_EQ(service_->sweep_artifacts(now + std::chrono::hours(25)), 1u);
    expect_error(get("/api/artifacts/" + id), 404, "artifact_not_found");
}

TEST_F(ServiceTest, ConcurrentIdenticalUploadsAgree) {
    const std::string img = png_bytes(kSide, kSide, 11);
    std::vector<std::string> ids(4);
    std::vector<std::thread> ts;
    for (int i = 0; i < 4; ++i) {
        ts.emplace_back([&, i] {
            const auto r = post(form(img, "20"));
            if (r && r->status == 200) ids[i] = json::parse(r->body).at("job_id");
        });
    }
    for (auto& t : ts) t.join();
    for (const auto& id : ids) EXPECT_EQ(id, ids[0]);
    EXPECT_FALSE(ids[0].empty());
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(cfg_.artifact_dir)) files += e.path().extension() == ".png";
    EXPECT_EQ(files, 1u);
}

TEST(ServiceConfig, ValidationAndEnvironment) {
    service::ServiceConfig c;
    c.device = "cuda";
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.max_upload_bytes = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    ::setenv("HAZE_RESTORE_CKPT_DIR", "/tmp/somewhere", 1);
    ::setenv("HAZE_RESTORE_PORT", "9123", 1);
    const auto e = service::ServiceConfig::from_env();
    EXPECT_EQ(e.checkpoint_dir, "/tmp/somewhere");
    EXPECT_EQ(e.port, 9123);
    ::setenv("HAZE_RESTORE_PORT", "http", 1);
    EXPECT_THROW(service::ServiceConfig::from_env(), ConfigError);
    ::unsetenv("HAZE_RESTORE_CKPT_DIR");
    ::unsetenv("HAZE_RESTORE_PORT");
}

TEST(JobId, DependsOnEveryInput) {
    EXPECT_EQ(service::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const auto base = service::job_id("img", 25, "finetune_k25_3.ckpt", 256);
    EXPECT_EQ(base, service::job_id("img", 25, "finetune_k25_3.ckpt", 256));
    EXPECT_NE(base, service::job_id("img", 20, "finetune_k25_3.ckpt", 256));
    EXPECT_NE(base, service::job_id("img", 25, "finetune_k25_4.ckpt", 256));
    EXPECT_NE(base, service::job_id("img", 25, "finetune_k25_3.ckpt", 128));
    EXPECT_NE(base, service::job_id("imh", 25, "finetune_k25_3.ckpt", 256));
}

}  // namespace
