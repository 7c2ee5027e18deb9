// SPDX-License-Identifier: Apache-2.0
//
// cfad - grant-free activity detection for cell-free massive MIMO
// Copyright (C) 2026 The cfad authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfad/dataset.hpp"

#include "cfad/binary_io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace cfad {

Eigen::MatrixXd Geometry::beta_lin() const {
    return beta_db.unaryExpr([](double db) { return std::pow(10.0, db / 10.0); });
}

const std::vector<Sample>& Dataset::split(Split s) const {
    switch (s) {
        case Split::train: return train;
        case Split::validation: return validation;
        case Split::test: return test;
    }
    throw std::invalid_argument("unknown split");
}

bool Dataset::operator==(const Dataset& o) const {
    return num_aps == o.num_aps && antennas == o.antennas && pilot_len == o.pilot_len &&
           num_devices == o.num_devices && cluster_size == o.cluster_size && pilots.pilots == o.pilots.pilots &&
           geometries == o.geometries && train == o.train && validation == o.validation && test == o.test;
}

ReceivedSignal to_received(const Sample& sample, int num_aps, int antennas, int pilot_len) {
    ReceivedSignal y(num_aps, antennas, pilot_len);
    if (sample.y.size() != y.data().size()) throw std::invalid_argument("to_received: sample size mismatch");
    std::ranges::transform(sample.y, y.data().begin(), [](std::complex<float> v) { return cdouble(v); });
    return y;
}

namespace {

Geometry make_geometry(const SystemConfig& cfg, std::uint64_t seed, Stream tag) {
    Rng placement = tag == Stream::deployment ? make_stream(seed, Stream::deployment)
                                              : make_stream(seed, tag, 0);
    Rng shadow = tag == Stream::deployment ? make_stream(seed, Stream::shadowing) : make_stream(seed, tag, 1);
    const Deployment dep = place_network(cfg, placement);
    const LargeScaleFading fading = compute_beta(dep, cfg, shadow);
    return {fading.beta_db, select_clusters(fading.beta_db, cfg.cluster_size)};
}

}  // namespace

Dataset generate_dataset(const SystemConfig& cfg, SampleCounts counts, std::uint64_t seed,
                         const DatasetOptions& opts) {
    cfg.validate();
    Dataset ds;
    ds.num_aps = cfg.num_aps;
    ds.antennas = cfg.antennas_per_ap;
    ds.pilot_len = cfg.pilot_len;
    ds.num_devices = cfg.num_devices;
    ds.cluster_size = cfg.cluster_size;
    Rng pilot_rng = make_stream(seed, Stream::pilots);
    ds.pilots = generate_pilots(cfg.pilot_len, cfg.num_devices, pilot_rng, opts.unit_norm_pilots);
    ds.geometries.push_back(make_geometry(cfg, seed, Stream::deployment));
    if (opts.fresh_test_geometry) ds.geometries.push_back(make_geometry(cfg, seed, Stream::test_geometry));

    std::uint64_t index = 0;
    auto fill = [&](std::vector<Sample>& out, std::size_t count, const Geometry& geo) {
        const Eigen::MatrixXd beta_lin = geo.beta_lin();
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i, ++index) {
            Rng rng = make_stream(seed, Stream::dataset, index);
            Sample sample;
            sample.labels = sample_activity(cfg.activity_prob, cfg.num_devices, rng);
            const ReceivedSignal y = simulate_received(beta_lin, ds.pilots, sample.labels, cfg, rng);
            sample.y.resize(y.data().size());
            std::ranges::transform(y.data(), sample.y.begin(), [](cdouble v) { return std::complex<float>(v); });
            out.push_back(std::move(sample));
        }
    };
    fill(ds.train, counts.train, ds.geometries.front());
    fill(ds.validation, counts.validation, ds.geometries.front());
    fill(ds.test, counts.test, ds.geometries.back());
    return ds;
}

namespace {
constexpr char kMagic[4] = {'C', 'F', 'A', 'D'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_dataset(std::ostream& os, const Dataset& ds) {
    BinaryWriter w(os);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    for (int v : {ds.num_aps, ds.antennas, ds.pilot_len, ds.num_devices, ds.cluster_size})
        w.u32(static_cast<std::uint32_t>(v));
    w.u64(ds.train.size());
    w.u64(ds.validation.size());
    w.u64(ds.test.size());
    w.u32(static_cast<std::uint32_t>(ds.geometries.size()));
    w.u32(0);

    for (int k = 0; k < ds.num_devices; ++k)
        for (int l = 0; l < ds.pilot_len; ++l) {
            w.f64(ds.pilots.pilots(l, k).real());
            w.f64(ds.pilots.pilots(l, k).imag());
        }
    for (const auto& geo : ds.geometries) {
        for (int m = 0; m < ds.num_aps; ++m)
            for (int k = 0; k < ds.num_devices; ++k) w.f64(geo.beta_db(m, k));
        for (int idx : geo.clusters.indices()) w.u32(static_cast<std::uint32_t>(idx));
    }

    const std::size_t entries = static_cast<std::size_t>(ds.num_aps) * ds.antennas * ds.pilot_len;
    auto records = [&](const std::vector<Sample>& samples, Split tag) {
        for (const auto& s : samples) {
            if (s.y.size() != entries || s.labels.size() != static_cast<std::size_t>(ds.num_devices))
                throw std::invalid_argument("write_dataset: sample with wrong dimensions");
            w.u8(static_cast<std::uint8_t>(tag));
            for (auto v : s.y) {
                w.f32(v.real());
                w.f32(v.imag());
            }
            w.bytes(reinterpret_cast<const char*>(s.labels.data()), s.labels.size());
        }
    };
    records(ds.train, Split::train);
    records(ds.validation, Split::validation);
    records(ds.test, Split::test);
    w.finish("write_dataset");
}

Dataset read_dataset(std::istream& is) {
    BinaryReader r(is, "read_dataset");
    char magic[4];
    r.bytes(magic, 4);
    if (!std::equal(magic, magic + 4, kMagic)) r.fail("bad magic, not a CFAD dataset");
    if (const auto version = r.u32(); version != kVersion) r.fail("unsupported version " + std::to_string(version));

    Dataset ds;
    ds.num_aps = static_cast<int>(r.u32());
    ds.antennas = static_cast<int>(r.u32());
    ds.pilot_len = static_cast<int>(r.u32());
    ds.num_devices = static_cast<int>(r.u32());
    ds.cluster_size = static_cast<int>(r.u32());
    if (ds.num_aps <= 0 || ds.antennas <= 0 || ds.pilot_len <= 0 || ds.num_devices <= 0 || ds.cluster_size <= 0 ||
        ds.cluster_size > ds.num_aps)
        r.fail("invalid dimensions in header");
    const std::uint64_t counts[3] = {r.u64(), r.u64(), r.u64()};
    const std::uint32_t geometry_count = r.u32();
    if (geometry_count != 1 && geometry_count != 2) r.fail("geometry count must be 1 or 2");
    r.u32();

    ds.pilots.pilots.resize(ds.pilot_len, ds.num_devices);
    for (int k = 0; k < ds.num_devices; ++k)
        for (int l = 0; l < ds.pilot_len; ++l) {
            const double re = r.f64();
            const double im = r.f64();
            ds.pilots.pilots(l, k) = {re, im};
        }
    for (std::uint32_t g = 0; g < geometry_count; ++g) {
        Geometry geo;
        geo.beta_db.resize(ds.num_aps, ds.num_devices);
        for (int m = 0; m < ds.num_aps; ++m)
            for (int k = 0; k < ds.num_devices; ++k) geo.beta_db(m, k) = r.f64();
        std::vector<int> idx(static_cast<std::size_t>(ds.num_devices) * ds.cluster_size);
        for (auto& v : idx) {
            v = static_cast<int>(r.u32());
            if (v >= ds.num_aps) r.fail("cluster AP index out of range");
        }
        geo.clusters = ClusterAssignment(ds.num_devices, ds.cluster_size, std::move(idx));
        ds.geometries.push_back(std::move(geo));
    }

    const std::size_t entries = static_cast<std::size_t>(ds.num_aps) * ds.antennas * ds.pilot_len;
    std::vector<Sample>* targets[3] = {&ds.train, &ds.validation, &ds.test};
    for (int split = 0; split < 3; ++split) {
        targets[split]->reserve(counts[split]);
        for (std::uint64_t i = 0; i < counts[split]; ++i) {
            if (const auto tag = r.u8(); tag != split) r.fail("unexpected split tag " + std::to_string(tag));
            Sample s;
            s.y.resize(entries);
            for (auto& v : s.y) {
                const float re = r.f32();
                const float im = r.f32();
                v = {re, im};
            }
            s.labels.resize(ds.num_devices);
            r.bytes(reinterpret_cast<char*>(s.labels.data()), s.labels.size());
            for (auto l : s.labels)
                if (l > 1) r.fail("label byte is not 0 or 1");
            targets[split]->push_back(std::move(s));
        }
    }
    return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_dataset: cannot open " + path.string());
    write_dataset(os, ds);
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_dataset: cannot open " + path.string());
    return read_dataset(is);
}

}  // namespace cfad
