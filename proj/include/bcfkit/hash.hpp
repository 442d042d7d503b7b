// hash.hpp — FNV-1a 64-bit, used for provenance records and run manifests

#pragma once

#include <cstdint>
#include <string_view>

namespace bcfkit {

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <class T>
std::uint64_t fnv1a_value(const T& v, std::uint64_t h) {
    return fnv1a(std::string_view(reinterpret_cast<const char*>(&v), sizeof(T)), h);
}

} // namespace bcfkit
