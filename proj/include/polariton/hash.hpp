#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace polariton {

/// 64-bit FNV-1a, used for provenance hashes of tabulated inputs and outputs.
class ContentHash {
public:
    ContentHash& add(std::string_view bytes) {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    ContentHash& add(std::uint64_t value) {
        for (int shift = 0; shift < 64; shift += 8) {
            state_ ^= (value >> shift) & 0xffU;
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    ContentHash& add(double value) { return add(std::bit_cast<std::uint64_t>(value)); }
    ContentHash& add(std::span<const double> values) {
        add(static_cast<std::uint64_t>(values.size()));
        for (double v : values) add(v);
        return *this;
    }

    std::uint64_t value() const { return state_; }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace polariton
