#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace explcorpus {

/// An arXiv subcategory symbol such as "math.AG", or the Unknown sentinel.
class CategoryTag {
  public:
    /// Throws std::invalid_argument when `value` is blank.
    explicit CategoryTag(std::string value);

    static CategoryTag unknown() { return CategoryTag(); }

    /// Blank text and the literal "unknown" (any case) yield Unknown.
    static CategoryTag from_text(std::string_view text);

    bool is_unknown() const noexcept { return !value_.has_value(); }
    /// Empty string for Unknown.
    const std::string& value() const noexcept;

    friend bool operator==(const CategoryTag&, const CategoryTag&) = default;

  private:
    CategoryTag() = default;
    std::optional<std::string> value_;
};

enum class SubjectArea {
    Geometry,
    Algebra,
    Analysis,
    Topology,
    Combinatorics,
    NumberTheory,
    ProbabilityStatistics,
    LogicSetTheory,
    Other,
};

inline constexpr std::array<SubjectArea, 9> kAllAreas = {
    SubjectArea::Geometry,      SubjectArea::Algebra,      SubjectArea::Analysis,
    SubjectArea::Topology,      SubjectArea::Combinatorics, SubjectArea::NumberTheory,
    SubjectArea::ProbabilityStatistics, SubjectArea::LogicSetTheory, SubjectArea::Other,
};

/// The eight named areas, in report order (Other excluded).
inline constexpr std::array<SubjectArea, 8> kNamedAreas = {
    SubjectArea::Geometry,      SubjectArea::Algebra,      SubjectArea::Analysis,
    SubjectArea::Topology,      SubjectArea::Combinatorics, SubjectArea::NumberTheory,
    SubjectArea::ProbabilityStatistics, SubjectArea::LogicSetTheory,
};

/// Config identifier, e.g. "NumberTheory".
std::string_view to_string(SubjectArea area) noexcept;
/// Human-readable label, e.g. "Number theory".
std::string_view display_name(SubjectArea area) noexcept;
std::optional<SubjectArea> parse_subject_area(std::string_view name) noexcept;

/// Tag to subject area table. Lookups trim whitespace and ignore case; any tag
/// not in the table (including Unknown) falls to Other.
class Taxonomy {
  public:
    /// The built-in grouping of mathematics subcategories.
    static const Taxonomy& builtin();

    /// Loads a JSON object mapping area names to tag arrays, e.g.
    /// {"Geometry": ["math.AG"], ...}. A tag listed under two areas, an
    /// unknown area name or a tag under "Other" is rejected.
    static Taxonomy load(const std::filesystem::path& path);
    static Taxonomy from_json_text(std::string_view json, const std::filesystem::path& origin = {});

    SubjectArea classify(const CategoryTag& tag) const;
    SubjectArea classify(std::string_view tag) const;

    std::size_t size() const noexcept { return table_.size(); }

  private:
    std::unordered_map<std::string, SubjectArea> table_;
};

/// Classifies with the built-in table.
SubjectArea classify_tag(const CategoryTag& tag);

}  // namespace explcorpus
