/*
 * Copyright (C) 2026 The capire authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef CAPIRE_COURSE_SET_H
#define CAPIRE_COURSE_SET_H

#include <bit>
#include <cstdint>
#include <vector>

namespace capire
{

using CourseIndex = int;

/// Maximum number of courses a curriculum may hold (one bit per course).
inline constexpr int max_courses = 64;

/// Set of course indices of one curriculum, stored as a bit mask.
class CourseSet
{
public:
    constexpr CourseSet() = default;

    static constexpr CourseSet from_bits(std::uint64_t bits)
    {
        CourseSet s;
        s.m_bits = bits;
        return s;
    }

    /// The set {0, ..., n-1}.
    static constexpr CourseSet first_n(int n)
    {
        return from_bits(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
    }

    constexpr bool contains(CourseIndex c) const
    {
        return (m_bits >> c) & 1u;
    }
    constexpr void insert(CourseIndex c)
    {
        m_bits |= std::uint64_t{1} << c;
    }
    constexpr void erase(CourseIndex c)
    {
        m_bits &= ~(std::uint64_t{1} << c);
    }
    constexpr int size() const
    {
        return std::popcount(m_bits);
    }
    constexpr bool empty() const
    {
        return m_bits == 0;
    }
    constexpr bool is_subset_of(CourseSet other) const
    {
        return (m_bits & ~other.m_bits) == 0;
    }
    constexpr std::uint64_t bits() const
    {
        return m_bits;
    }

    constexpr CourseSet operator|(CourseSet o) const
    {
        return from_bits(m_bits | o.m_bits);
    }
    constexpr CourseSet operator&(CourseSet o) const
    {
        return from_bits(m_bits & o.m_bits);
    }
    /// Set difference.
    constexpr CourseSet operator-(CourseSet o) const
    {
        return from_bits(m_bits & ~o.m_bits);
    }
    constexpr CourseSet& operator|=(CourseSet o)
    {
        m_bits |= o.m_bits;
        return *this;
    }
    constexpr CourseSet& operator-=(CourseSet o)
    {
        m_bits &= ~o.m_bits;
        return *this;
    }
    constexpr bool operator==(const CourseSet&) const = default;

    /// Members in ascending index order.
    std::vector<CourseIndex> indices() const
    {
        std::vector<CourseIndex> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (auto b = m_bits; b != 0; b &= b - 1) {
            out.push_back(std::countr_zero(b));
        }
        return out;
    }

    template <class F>
    void for_each(F&& f) const
    {
        for (auto b = m_bits; b != 0; b &= b - 1) {
            f(static_cast<CourseIndex>(std::countr_zero(b)));
        }
    }

private:
    std::uint64_t m_bits = 0;
};

} // namespace capire

#endif // CAPIRE_COURSE_SET_H
