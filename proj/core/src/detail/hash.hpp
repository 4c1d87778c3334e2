#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>
#include <type_traits>

namespace fbsurf::detail {

// 64-bit FNV-1a. Input is hashed as the little-endian byte image of each value.
class Fnv1a {
public:
    void bytes(const void* data, std::size_t size) noexcept {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }

    template <typename T>
    void value(const T& v) noexcept {
        static_assert(std::is_trivially_copyable_v<T>);
        bytes(&v, sizeof(T));
    }

    void string(std::string_view s) noexcept {
        value(static_cast<std::uint64_t>(s.size()));
        bytes(s.data(), s.size());
    }

    std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace fbsurf::detail
