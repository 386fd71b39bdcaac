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

#include "haze/service/server.hpp"

#include <atomic>
#include <condition_variable>
#include <thread>

#include <spdlog/spdlog.h>

namespace haze::service {

namespace {

void send_error(httplib::Response& res, const ApiError& e) {
    res.status = e.status();
    res.set_content(e.body().dump(), "application/json");
}

std::optional<std::string> form_field(const httplib::Request& req, const std::string& name) {
    if (!req.has_file(name)) return std::nullopt;
    return req.get_file_value(name).content;
}

template <class F>
void guarded(httplib::Response& res, F&& body) {
    try {
        body();
    } catch (const ApiError& e) {
        send_error(res, e);
    } catch (const std::exception& e) {
        spdlog::error("request failed: {}", e.what());
        send_error(res, ApiError(500, "internal_error", e.what()));
    }
}

}  // namespace

void mount(httplib::Server& server, RestoreService& service) {
    // Multipart framing and an optional reference both ride on top of the
    // per-file cap; per-file limits are checked in the handler.
    server.set_payload_max_length(2 * service.config().max_upload_bytes + (1u << 20));
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    server.Post("/api/restore", [&service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            if (!req.is_multipart_form_data()) {
                throw ApiError(400, "bad_request", "expected multipart/form-data with fields image and variant");
            }
            RestoreRequest r;
            auto image = form_field(req, "image");
            auto variant = form_field(req, "variant");
            if (!image) throw ApiError(400, "missing_field", "multipart field 'image' is required");
            if (!variant) throw ApiError(400, "missing_field", "multipart field 'variant' is required");
            r.image = std::move(*image);
            r.variant = std::move(*variant);
            r.reference = form_field(req, "reference");
            res.set_content(service.restore(r).to_json().dump(), "application/json");
        });
    });

    server.Get("/api/variants", [&service](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { res.set_content(service.variants().dump(), "application/json"); });
    });

    server.Get(R"(/api/artifacts/([^/]+))", [&service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            res.set_content(service.artifact(req.matches[1]), "image/png");
            res.set_header("Cache-Control", "public, max-age=86400, immutable");
        });
    });

    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    // Anything httplib rejects on its own (unknown route, oversized body)
    // still answers with the JSON error shape; oversize is a plain 400.
    server.set_error_handler([&service](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
        if (res.status == 413) {
            send_error(res, ApiError(400, "payload_too_large",
                                     "upload exceeds " + std::to_string(service.config().max_upload_bytes) +
                                         " bytes per image"));
        } else if (res.status == 404) {
            send_error(res, ApiError(404, "not_found", "no such endpoint"));
        } else {
            send_error(res, ApiError(res.status, "bad_request", "malformed request"));
        }
        return httplib::Server::HandlerResponse::Handled;
    });
}

int serve(const ServiceConfig& cfg, const std::string& host) {
    RestoreService service(cfg);
    service.sweep_artifacts();
    httplib::Server server;
    mount(server, service);

    std::mutex mu;
    std::condition_variable cv;
    bool stop = false;
    std::thread sweeper([&] {
        std::unique_lock lock(mu);
        while (!cv.wait_for(lock, std::chrono::hours(1), [&] { return stop; })) service.sweep_artifacts();
    });

    spdlog::info("serving on {}:{} (checkpoints: {})", host, cfg.port, cfg.checkpoint_dir.string());
    const bool ok = server.listen(host, cfg.port);
    {
        std::lock_guard lock(mu);
        stop = true;
    }
    cv.notify_all();
    sweeper.join();
    if (!ok) {
        spdlog::error("cannot listen on {}:{}", host, cfg.port);
        return 1;
    }
    return 0;
}

}  // namespace haze::service
