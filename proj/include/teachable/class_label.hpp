#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace teachable {

/// AG News topic. Integer codes match the dataset's label column.
enum class ClassLabel : int { World = 1, Sports = 2, Business = 3, SciTech = 4 };

inline constexpr std::size_t kNumClasses = 4;

inline constexpr std::array<ClassLabel, kNumClasses> kAllClasses = {
    ClassLabel::World, ClassLabel::Sports, ClassLabel::Business, ClassLabel::SciTech};

/// Per-class table indexed by `class_index`.
template <typename T>
using PerClass = std::array<T, kNumClasses>;

constexpr std::size_t class_index(ClassLabel label) noexcept {
    return static_cast<std::size_t>(label) - 1;
}

constexpr int class_code(ClassLabel label) noexcept { return static_cast<int>(label); }

constexpr ClassLabel class_from_index(std::size_t index) noexcept {
    return static_cast<ClassLabel>(static_cast<int>(index) + 1);
}

std::optional<ClassLabel> class_from_code(int code) noexcept;

std::string_view class_name(ClassLabel label) noexcept;

/// Accepts the display name ("Sports") case-insensitively, or the code as text.
std::optional<ClassLabel> parse_class(std::string_view text) noexcept;

}  // namespace teachable
