#include "explcorpus/taxonomy.hpp"

#include "detail/fs_util.hpp"
#include "explcorpus/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <utility>

namespace explcorpus {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::string fold(std::string_view tag) {
    std::string out(trim(tag));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

struct Group {
    SubjectArea area;
    std::initializer_list<const char*> tags;
};

const std::initializer_list<Group> kBuiltinGroups = {
    {SubjectArea::Geometry, {"math.AG", "math.DG", "math.MG", "math.SG"}},
    {SubjectArea::Algebra, {"math.AC", "math.CT", "math.GR", "math.OA", "math.QA", "math.RA", "math.RT"}},
    {SubjectArea::Analysis, {"math.AP", "math.CA", "math.CV", "math.DS", "math.FA", "math.NA"}},
    {SubjectArea::Topology, {"math.AT", "math.GN", "math.GT"}},
    {SubjectArea::Combinatorics, {"math.CO"}},
    {SubjectArea::NumberTheory, {"math.NT"}},
    {SubjectArea::ProbabilityStatistics, {"math.PR", "math.ST"}},
    {SubjectArea::LogicSetTheory, {"math.LO"}},
};

}  // namespace

CategoryTag::CategoryTag(std::string value) {
    auto t = trim(value);
    if (t.empty()) {
        throw std::invalid_argument("category tag must not be empty");
    }
    value_ = std::string(t);
}

CategoryTag CategoryTag::from_text(std::string_view text) {
    auto t = trim(text);
    if (t.empty() || fold(t) == "unknown") {
        return unknown();
    }
    return CategoryTag(std::string(t));
}

const std::string& CategoryTag::value() const noexcept {
    static const std::string kEmpty;
    return value_ ? *value_ : kEmpty;
}

std::string_view to_string(SubjectArea area) noexcept {
    switch (area) {
        case SubjectArea::Geometry: return "Geometry";
        case SubjectArea::Algebra: return "Algebra";
        case SubjectArea::Analysis: return "Analysis";
        case SubjectArea::Topology: return "Topology";
        case SubjectArea::Combinatorics: return "Combinatorics";
        case SubjectArea::NumberTheory: return "NumberTheory";
        case SubjectArea::ProbabilityStatistics: return "ProbabilityStatistics";
        case SubjectArea::LogicSetTheory: return "LogicSetTheory";
        case SubjectArea::Other: return "Other";
    }
    return "Other";
}

std::string_view display_name(SubjectArea area) noexcept {
    switch (area) {
        case SubjectArea::Geometry: return "Geometry";
        case SubjectArea::Algebra: return "Algebra";
        case SubjectArea::Analysis: return "Analysis";
        case SubjectArea::Topology: return "Topology";
        case SubjectArea::Combinatorics: return "Combinatorics";
        case SubjectArea::NumberTheory: return "Number theory";
        case SubjectArea::ProbabilityStatistics: return "Probability and statistics";
        case SubjectArea::LogicSetTheory: return "Logic and set theory";
        case SubjectArea::Other: return "Other";
    }
    return "Other";
}

std::optional<SubjectArea> parse_subject_area(std::string_view name) noexcept {
    for (auto area : kAllAreas) {
        if (to_string(area) == name) {
            return area;
        }
    }
    return std::nullopt;
}

const Taxonomy& Taxonomy::builtin() {
    static const Taxonomy instance = [] {
        Taxonomy t;
        for (const auto& group : kBuiltinGroups) {
            for (const char* tag : group.tags) {
                t.table_.emplace(fold(tag), group.area);
            }
        }
        return t;
    }();
    return instance;
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
    return from_json_text(detail::read_file(path), path);
}

Taxonomy Taxonomy::from_json_text(std::string_view json, const std::filesystem::path& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(origin, 1, std::string("taxonomy config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw FormatError(origin, 1, "taxonomy config must be a JSON object of area -> tag list");
    }
    Taxonomy t;
    for (const auto& [name, tags] : doc.items()) {
        auto area = parse_subject_area(name);
        if (!area) {
            throw FormatError(origin, 1, "unknown subject area '" + name + "'");
        }
        if (*area == SubjectArea::Other) {
            throw FormatError(origin, 1, "tags cannot be assigned to Other explicitly");
        }
        if (!tags.is_array()) {
            throw FormatError(origin, 1, "area '" + name + "' must map to an array of tags");
        }
        for (const auto& tag : tags) {
            if (!tag.is_string() || trim(tag.get<std::string>()).empty()) {
                throw FormatError(origin, 1, "area '" + name + "' contains a non-string or blank tag");
            }
            auto key = fold(tag.get<std::string>());
            auto [it, inserted] = t.table_.emplace(key, *area);
            if (!inserted && it->second != *area) {
                throw FormatError(origin, 1, "tag '" + tag.get<std::string>() + "' assigned to two areas");
            }
        }
    }
    return t;
}

SubjectArea Taxonomy::classify(const CategoryTag& tag) const {
    if (tag.is_unknown()) {
        return SubjectArea::Other;
    }
    return classify(std::string_view(tag.value()));
}

SubjectArea Taxonomy::classify(std::string_view tag) const {
    auto it = table_.find(fold(tag));
    return it == table_.end() ? SubjectArea::Other : it->second;
}

SubjectArea classify_tag(const CategoryTag& tag) { return Taxonomy::builtin().classify(tag); }

}  // namespace explcorpus
