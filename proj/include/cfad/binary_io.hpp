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

#ifndef CFAD_BINARY_IO_HPP
#define CFAD_BINARY_IO_HPP

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cfad {

// Little-endian primitives for the dataset and checkpoint containers.
class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& os) : os_(os) {}

    void bytes(const char* data, std::size_t n) { os_.write(data, static_cast<std::streamsize>(n)); }
    void u8(std::uint8_t v) { os_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) { put_le(v); }
    void u64(std::uint64_t v) { put_le(v); }
    void f32(float v) { put_le(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }

    void finish(const char* who) {
        os_.flush();
        if (!os_) throw std::runtime_error(std::string(who) + ": write failed");
    }

private:
    template <typename U>
    void put_le(U v) {
        char buf[sizeof(U)];
        for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        os_.write(buf, sizeof(U));
    }

    std::ostream& os_;
};

class BinaryReader {
public:
    BinaryReader(std::istream& is, std::string who) : is_(is), who_(std::move(who)) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error(who_ + ": " + what + " at byte offset " + std::to_string(offset_));
    }

    void bytes(char* data, std::size_t n) {
        is_.read(data, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n) fail("unexpected end of file");
        offset_ += n;
    }
    std::uint8_t u8() {
        char c;
        bytes(&c, 1);
        return static_cast<std::uint8_t>(c);
    }
    std::uint32_t u32() { return get_le<std::uint32_t>(); }
    std::uint64_t u64() { return get_le<std::uint64_t>(); }
    float f32() { return std::bit_cast<float>(get_le<std::uint32_t>()); }
    double f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }

    std::uint64_t offset() const { return offset_; }

private:
    template <typename U>
    U get_le() {
        unsigned char buf[sizeof(U)];
        bytes(reinterpret_cast<char*>(buf), sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
        return v;
    }

    std::istream& is_;
    std::string who_;
    std::uint64_t offset_ = 0;
};

}  // namespace cfad

#endif
