#include "teachable/class_label.hpp"

#include <cctype>
#include <string>

namespace teachable {

std::optional<ClassLabel> class_from_code(int code) noexcept {
    if (code < 1 || code > static_cast<int>(kNumClasses))
        return std::nullopt;
    return static_cast<ClassLabel>(code);
}

std::string_view class_name(ClassLabel label) noexcept {
    switch (label) {
    case ClassLabel::World: return "World";
    case ClassLabel::Sports: return "Sports";
    case ClassLabel::Business: return "Business";
    case ClassLabel::SciTech: return "SciTech";
    }
    return "?";
}

std::optional<ClassLabel> parse_class(std::string_view text) noexcept {
    if (text.size() == 1 && text[0] >= '1' && text[0] <= '4')
        return class_from_code(text[0] - '0');
    std::string lower;
    for (char c : text)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (ClassLabel label : kAllClasses) {
        std::string name;
        for (char c : class_name(label))
            name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (lower == name)
            return label;
    }
    if (lower == "sci/tech" || lower == "sci-tech")
        return ClassLabel::SciTech;
    return std::nullopt;
}

}  // namespace teachable
