#pragma once

#include <compare>
#include <cstddef>

namespace everwill {

/// Dense index of a person in a society (0..|P|-1).
struct PersonId {
    std::size_t value = 0;
    constexpr PersonId() = default;
    constexpr explicit PersonId(std::size_t v) : value(v) {}
    friend constexpr auto operator<=>(PersonId, PersonId) = default;
};

/// Dense index of a good in the social estate (0..|E|-1).
struct GoodId {
    std::size_t value = 0;
    constexpr GoodId() = default;
    constexpr explicit GoodId(std::size_t v) : value(v) {}
    friend constexpr auto operator<=>(GoodId, GoodId) = default;
};

/// Dense index of a force carrier (0..|C|-1).
struct CarrierId {
    std::size_t value = 0;
    constexpr CarrierId() = default;
    constexpr explicit CarrierId(std::size_t v) : value(v) {}
    friend constexpr auto operator<=>(CarrierId, CarrierId) = default;
};

}  // namespace everwill
