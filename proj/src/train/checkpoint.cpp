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

#include "haze/train/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <set>

namespace haze::train {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

const Tensor* Checkpoint::find(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return &t.value;
    }
    return nullptr;
}

void Checkpoint::capture(const nn::ParameterSet<float>& set) {
    for (const auto& p : set.params) tensors.push_back({p.name, p.param->value});
    for (const auto& b : set.buffers) tensors.push_back({b.name, *b.tensor});
}

void Checkpoint::restore_into(nn::ParameterSet<float>& set) const {
    auto copy = [&](const std::string& name, Tensor& dst) {
        const Tensor* src = find(name);
        if (src == nullptr) throw CheckpointError("checkpoint lacks tensor '" + name + "'");
        if (src->shape() != dst.shape()) {
            throw CheckpointError("tensor '" + name + "' has shape " + src->shape().str() + ", model expects " +
                                  dst.shape().str());
        }
        dst = *src;
    };
    for (auto& p : set.params) copy(p.name, p.param->value);
    for (auto& b : set.buffers) copy(b.name, *b.tensor);
}

std::string Checkpoint::generator_prefix() const { return phase == Phase::ffa_pretrain ? "ffa" : "g_xy"; }

namespace {

json history_json(const std::vector<HistoryRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(json{{"epoch", r.epoch}, {"step", r.step}, {"values", r.values}});
    return arr;
}

}  // namespace

void save_checkpoint(const fs::path& path, const Checkpoint& c) {
    json header{{"format", "haze-restore checkpoint"},
                {"version", c.version},
                {"phase", phase_name(c.phase)},
                {"variant", c.variant},
                {"epoch", c.epoch},
                {"step", c.step},
                {"train", to_json(c.train)},
                {"ffa", to_json(c.ffa)},
                {"discriminator", to_json(c.disc)},
                {"loss", to_json(c.loss)},
                {"augmentation", to_json(c.aug)},
                {"counters", c.counters},
                {"scalars", c.scalars},
                {"history", history_json(c.history)}};
    json index = json::array();
    std::uint64_t offset = 0;
    for (const auto& t : c.tensors) {
        const Shape& s = t.value.shape();
        index.push_back(json{{"name", t.name}, {"shape", {s.n, s.c, s.h, s.w}}, {"offset", offset}});
        offset += t.value.numel();
    }
    header["tensors"] = std::move(index);
    const std::string text = header.dump();

    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
        out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
        const std::uint64_t len = text.size();
        out.write(reinterpret_cast<const char*>(&len), sizeof(len));
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        for (const auto& t : c.tensors) {
            out.write(reinterpret_cast<const char*>(t.value.ptr()),
                      static_cast<std::streamsize>(t.value.numel() * sizeof(float)));
        }
        if (!out) throw CheckpointError("failed while writing checkpoint " + path.string());
    }
    fs::rename(tmp, path);
}

Checkpoint load_checkpoint(const fs::path& path) {
    const std::string where = " (" + path.string() + ")";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    char magic[sizeof(kCheckpointMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw CheckpointError("not a haze-restore checkpoint" + where);
    }
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    const auto file_size = fs::file_size(path);
    if (!in || len > file_size) throw CheckpointError("truncated checkpoint header" + where);
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    if (!in) throw CheckpointError("truncated checkpoint header" + where);

    Checkpoint c;
    try {
        const json h = json::parse(text);
        c.version = h.at("version").get<int>();
        if (c.version > kCheckpointVersion) {
            throw CheckpointError("checkpoint version " + std::to_string(c.version) + " is newer than supported" + where);
        }
        const auto phase = parse_phase(h.at("phase").get<std::string>());
        if (!phase) throw CheckpointError("unknown phase in checkpoint" + where);
        c.phase = *phase;
        c.variant = h.at("variant").get<std::string>();
        c.epoch = h.at("epoch").get<std::int64_t>();
        c.step = h.at("step").get<std::int64_t>();
        c.train = train_config_from_json(h.at("train"));
        c.ffa = ffa_config_from_json(h.at("ffa"));
        c.disc = disc_config_from_json(h.at("discriminator"));
        c.loss = loss_config_from_json(h.at("loss"));
        c.aug = aug_config_from_json(h.at("augmentation"));
        c.counters = h.value("counters", std::map<std::string, std::int64_t>{});
        c.scalars = h.value("scalars", std::map<std::string, double>{});
        for (const auto& r : h.at("history")) {
            c.history.push_back(HistoryRow{r.at("epoch").get<std::int64_t>(), r.at("step").get<std::int64_t>(),
                                           r.at("values").get<std::map<std::string, double>>()});
        }
        const std::uint64_t data_start = sizeof(kCheckpointMagic) + sizeof(len) + len;
        std::uint64_t expected = 0;
        for (const auto& e : h.at("tensors")) {
            const auto dims = e.at("shape").get<std::vector<int>>();
            if (dims.size() != 4) throw CheckpointError("bad tensor shape in checkpoint" + where);
            const Shape s{dims[0], dims[1], dims[2], dims[3]};
            if (e.at("offset").get<std::uint64_t>() != expected) {
                throw CheckpointError("inconsistent tensor index" + where);
            }
            if (data_start + (expected + s.numel()) * sizeof(float) > file_size) {
                throw CheckpointError("truncated tensor data" + where);
            }
            Tensor t(s);
            in.read(reinterpret_cast<char*>(t.ptr()), static_cast<std::streamsize>(s.numel() * sizeof(float)));
            if (!in) throw CheckpointError("truncated tensor data" + where);
            c.tensors.push_back({e.at("name").get<std::string>(), std::move(t)});
            expected += s.numel();
        }
        c.ffa.validate();
    } catch (const json::exception& e) {
        throw CheckpointError(std::string("malformed checkpoint header: ") + e.what() + where);
    } catch (const CheckpointError&) {
        throw;
    } catch (const Error& e) {
        throw CheckpointError(std::string(e.what()) + where);
    }
    return c;
}

std::string checkpoint_filename(Phase phase, const std::string& variant, std::int64_t epoch) {
    return std::string(phase_name(phase)) + "_" + variant + "_" + std::to_string(epoch) + ".ckpt";
}

nn::FFA load_generator(const Checkpoint& ckpt) {
    nn::FFA net(ckpt.ffa);
    auto set = net.parameters(ckpt.generator_prefix());
    ckpt.restore_into(set);
    return net;
}

void write_history_csv(const fs::path& path, const std::vector<HistoryRow>& rows) {
    std::set<std::string> keys;
    for (const auto& r : rows) {
        for (const auto& [k, v] : r.values) keys.insert(k);
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "epoch,step";
    for (const auto& k : keys) out << ',' << k;
    out << '\n';
    out.precision(10);
    for (const auto& r : rows) {
        out << r.epoch << ',' << r.step;
        for (const auto& k : keys) {
            out << ',';
            if (const auto it = r.values.find(k); it != r.values.end()) out << it->second;
        }
        out << '\n';
    }
}

}  // namespace haze::train
