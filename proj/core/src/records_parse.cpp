#include "explcorpus/records.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <sstream>

namespace explcorpus {

namespace {

enum class Field { Filename, Title, Authors, Finding, Quote, Commentary, Page };

struct Synonym {
    std::string_view label;
    Field field;
};

constexpr std::array<Synonym, 26> kSynonyms = {{
    {"filename", Field::Filename},   {"file name", Field::Filename}, {"file", Field::Filename},
    {"source file", Field::Filename}, {"source", Field::Filename},   {"document", Field::Filename},
    {"title", Field::Title},         {"paper title", Field::Title},
    {"author", Field::Authors},      {"authors", Field::Authors},    {"author(s)", Field::Authors},
    {"example", Field::Finding},     {"finding", Field::Finding},    {"summary", Field::Finding},
    {"summary of example", Field::Finding},
    {"quote", Field::Quote},         {"quotation", Field::Quote},    {"direct quote", Field::Quote},
    {"context", Field::Commentary},  {"commentary", Field::Commentary}, {"comment", Field::Commentary},
    {"gemini's commentary", Field::Commentary}, {"model commentary", Field::Commentary},
    {"page", Field::Page},           {"page number", Field::Page},   {"pages", Field::Page},
}};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_markup(char c) { return c == '*' || c == '_'; }

std::string_view strip_markup_prefix(std::string_view s) {
    while (!s.empty() && is_markup(s.front())) s.remove_prefix(1);
    return s;
}

// Removes a bullet marker ("-", "*", "+", "•", "1.", "2)") followed by a space.
std::string_view strip_bullet(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s[0] == '-' || s[0] == '+' || s[0] == '*') && s[1] == ' ') {
        return trim(s.substr(2));
    }
    if (s.rfind("\xE2\x80\xA2", 0) == 0) {  // U+2022 bullet
        return trim(s.substr(3));
    }
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i > 0 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') && s[i + 1] == ' ') {
        return trim(s.substr(i + 2));
    }
    return s;
}

struct LabelLine {
    Field field;
    std::string value;
};

// Recognizes "**Label:** value", "**Label**: value", "Label (note): value", ...
std::optional<LabelLine> match_label(std::string_view line) {
    auto s = strip_markup_prefix(strip_bullet(line));
    auto colon = s.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon > 40) {
        return std::nullopt;
    }
    auto label = s.substr(0, colon);
    while (!label.empty() && (is_markup(label.back()) || std::isspace(static_cast<unsigned char>(label.back())))) {
        label.remove_suffix(1);
    }
    // Drop a trailing parenthetical note such as "Example (Analysis)".
    if (!label.empty() && label.back() == ')') {
        auto open = label.rfind('(');
        if (open != std::string_view::npos && lower(label) != "author(s)") {
            label = trim(label.substr(0, open));
            while (!label.empty() && is_markup(label.back())) label.remove_suffix(1);
        }
    }
    auto key = lower(trim(label));
    for (const auto& syn : kSynonyms) {
        if (syn.label == key) {
            auto rest = s.substr(colon + 1);
            // Closing markup after the colon, as in "**Title:** value".
            while (!rest.empty() && is_markup(rest.front())) rest.remove_prefix(1);
            return LabelLine{syn.field, std::string(trim(rest))};
        }
    }
    return std::nullopt;
}

bool is_rule(std::string_view s) {
    s = trim(s);
    if (s.size() < 3) return false;
    char c = s[0];
    if (c != '-' && c != '*' && c != '_' && c != '=') return false;
    return std::all_of(s.begin(), s.end(), [c](char x) { return x == c || x == ' '; });
}

bool mentions_batch_file(std::string_view s) {
    static const std::regex kBatch(R"(batch_\d+_(output|filtered)\.txt)", std::regex::icase);
    return std::regex_search(s.begin(), s.end(), kBatch);
}

std::optional<std::string> payload_header_doc(std::string_view s) {
    static const std::regex kHeader(R"(^\s*===\s*FILE:\s*(\S+)(?:\s.*)?===\s*$)");
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_match(s.begin(), s.end(), m, kHeader)) {
        return m[1].str();
    }
    return std::nullopt;
}

bool says_no_examples(std::string_view text) {
    static const std::regex kNone(
        R"(\bno\s+(relevant\s+|such\s+|clear\s+|explicit\s+)?(examples?|instances?|findings?|cases?)\b|did\s+not\s+(find|identify)\s+any|none\s+of\s+the\s+(papers|documents|files))",
        std::regex::icase);
    return std::regex_search(text.begin(), text.end(), kNone);
}

// Wrapping markup around a whole value, e.g. *"..."* or **...**.
std::string_view strip_wrapping_markup(std::string_view v) {
    while (v.size() >= 2 && is_markup(v.front()) && v.back() == v.front()) {
        v = trim(v.substr(1, v.size() - 2));
    }
    return v;
}

std::optional<int> take_page_suffix(std::string& value) {
    static const std::regex kPage(R"(\s*\((?:p|pp|page|pages)\.?\s*(\d+)(?:\s*[-–]\s*\d+)?\)\s*\.?\s*$)",
                                  std::regex::icase);
    std::smatch m;
    if (std::regex_search(value, m, kPage)) {
        int page = std::stoi(m[1].str());
        value.erase(static_cast<std::size_t>(m.position(0)));
        return page;
    }
    return std::nullopt;
}

bool strip_outer_quotes(std::string& v) {
    struct Pair {
        std::string_view open, close;
    };
    static constexpr Pair kPairs[] = {
        {"\"", "\""}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"``", "''"}, {"\xC2\xAB", "\xC2\xBB"},
        {"\xE2\x80\x9E", "\xE2\x80\x9C"},
    };
    for (const auto& p : kPairs) {
        if (v.size() >= p.open.size() + p.close.size() && v.compare(0, p.open.size(), p.open) == 0 &&
            v.compare(v.size() - p.close.size(), p.close.size(), p.close) == 0) {
            v = v.substr(p.open.size(), v.size() - p.open.size() - p.close.size());
            return true;
        }
    }
    return false;
}

struct Item {
    std::optional<std::string> fields[7];
    std::optional<Field> last;
    std::size_t first_line = 0;
    std::string context_doc;

    bool has(Field f) const { return fields[static_cast<int>(f)].has_value(); }
    std::optional<std::string>& at(Field f) { return fields[static_cast<int>(f)]; }
    bool has_content() const {
        for (auto f : {Field::Finding, Field::Quote, Field::Commentary}) {
            if (has(f) && !fields[static_cast<int>(f)]->empty()) return true;
        }
        return false;
    }
    bool started() const {
        return std::any_of(std::begin(fields), std::end(fields), [](const auto& f) { return f.has_value(); });
    }
};

class Parser {
  public:
    explicit Parser(std::uint32_t batch_index) : batch_(batch_index) {}

    ParseResult run(std::string_view text) {
        std::size_t pos = 0;
        std::size_t line_no = 0;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            auto line = text.substr(pos, end - pos);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            ++line_no;
            handle(line, line_no);
            if (end == text.size()) break;
            pos = end + 1;
        }
        close_stretch();
        finish_item();
        if (result_.records.empty() && items_seen_ == 0 && says_no_examples(text)) {
            result_.warnings.clear();
        }
        return std::move(result_);
    }

  private:
    void handle(std::string_view raw, std::size_t line_no) {
        auto line = trim(raw);
        if (line.empty()) {
            close_stretch();
            item_.last.reset();
            return;
        }
        if (auto doc = payload_header_doc(line)) {
            close_stretch();
            finish_item();
            context_doc_ = *doc;
            return;
        }
        bool heading = line.front() == '#';
        auto body = heading ? trim(line.substr(line.find_first_not_of('#'))) : line;
        if (auto label = match_label(body)) {
            close_stretch();
            on_label(*label, line_no);
            return;
        }
        if (heading || is_rule(line) || mentions_batch_file(line)) {
            close_stretch();
            finish_item();
            return;
        }
        if (item_.started() && item_.last) {
            auto& v = item_.at(*item_.last);
            if (v->empty()) {
                *v = std::string(line);
            } else {
                *v += "\n";
                *v += line;
            }
            return;
        }
        if (!stretch_line_) {
            stretch_line_ = line_no;
            stretch_item_ = item_.started() ? items_seen_ : 0;
        }
    }

    void on_label(const LabelLine& label, std::size_t line_no) {
        bool restart = item_.has(label.field);
        // A file or title line after a blank line opens the next item; inside
        // one contiguous block fields may come in any order.
        if ((label.field == Field::Filename || label.field == Field::Title) && item_.has_content() && !item_.last) {
            restart = true;
        }
        if (restart) {
            finish_item();
        }
        if (!item_.started()) {
            ++items_seen_;
            item_.first_line = line_no;
            item_.context_doc = context_doc_;
        }
        item_.at(label.field) = label.value;
        item_.last = label.field;
    }

    void close_stretch() {
        if (stretch_line_) {
            warn(stretch_item_, *stretch_line_, "unrecognized text");
            stretch_line_.reset();
        }
    }

    void warn(std::size_t item, std::size_t line, std::string message) {
        result_.warnings.push_back({batch_, item, line, std::move(message)});
    }

    void finish_item() {
        if (!item_.started()) {
            item_ = Item{};
            return;
        }
        std::size_t ordinal = items_seen_;
        if (!item_.has_content()) {
            warn(ordinal, item_.first_line, "item has no example, quote or context; dropped");
            item_ = Item{};
            return;
        }
        ExampleRecord r;
        r.batch_index = batch_;
        if (item_.has(Field::Filename)) {
            r.source_doc_id = doc_id_from_filename(*item_.at(Field::Filename));
        } else {
            r.source_doc_id = item_.context_doc;
        }
        r.title = std::string(strip_wrapping_markup(item_.at(Field::Title).value_or("")));
        if (item_.has(Field::Authors) && !item_.at(Field::Authors)->empty()) {
            r.authors = std::string(strip_wrapping_markup(*item_.at(Field::Authors)));
        }
        r.finding = std::string(strip_wrapping_markup(item_.at(Field::Finding).value_or("")));
        r.commentary = std::string(strip_wrapping_markup(item_.at(Field::Commentary).value_or("")));
        if (item_.has(Field::Quote) && !item_.at(Field::Quote)->empty()) {
            std::string q(strip_wrapping_markup(*item_.at(Field::Quote)));
            r.page = take_page_suffix(q);
            q = std::string(strip_wrapping_markup(trim(q)));
            if (strip_outer_quotes(q) && !r.page) {
                r.page = take_page_suffix(q);
            }
            if (!q.empty()) {
                r.quote = std::move(q);
            }
        }
        if (!r.page && item_.has(Field::Page)) {
            static const std::regex kNum(R"(\d+)");
            std::smatch m;
            const auto& p = *item_.at(Field::Page);
            if (std::regex_search(p, m, kNum)) {
                r.page = std::stoi(m.str());
            }
        }
        if (!r.quote) {
            warn(ordinal, item_.first_line, "item has no quote");
        }
        result_.records.push_back(std::move(r));
        item_ = Item{};
    }

    std::uint32_t batch_;
    ParseResult result_;
    Item item_;
    std::size_t items_seen_ = 0;
    std::string context_doc_;
    std::optional<std::size_t> stretch_line_;
    std::size_t stretch_item_ = 0;
};

}  // namespace

std::string doc_id_from_filename(std::string_view filename) {
    auto s = trim(strip_wrapping_markup(trim(filename)));
    while (!s.empty() && (s.front() == '"' || s.front() == '`' || s.front() == '\'')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == '"' || s.back() == '`' || s.back() == '\'' || s.back() == ',')) s.remove_suffix(1);
    auto slash = s.find_last_of("/\\");
    if (slash != std::string_view::npos) s = s.substr(slash + 1);
    auto l = lower(s);
    for (std::string_view ext : {".pdf", ".txt"}) {
        if (l.size() > ext.size() && l.compare(l.size() - ext.size(), ext.size(), ext) == 0) {
            s.remove_suffix(ext.size());
            break;
        }
    }
    return std::string(trim(s));
}

ParseResult parse_batch_output(std::string_view text, std::uint32_t batch_index) {
    return Parser(batch_index).run(text);
}

std::string render_record(const ExampleRecord& r) {
    std::ostringstream out;
    auto line = [&](std::string_view label, const std::string& value) {
        out << "- **" << label << ":** ";
        // Continuation lines are indented so they stay attached to the field.
        std::size_t start = 0;
        while (true) {
            auto nl = value.find('\n', start);
            out << value.substr(start, nl == std::string::npos ? std::string::npos : nl - start) << "\n";
            if (nl == std::string::npos) break;
            out << "  ";
            start = nl + 1;
        }
    };
    if (!r.source_doc_id.empty()) line("Filename", r.source_doc_id);
    if (!r.title.empty()) line("Title", r.title);
    if (r.authors) line("Authors", *r.authors);
    if (!r.finding.empty()) line("Finding", r.finding);
    if (r.quote) {
        std::string q = "\"" + *r.quote + "\"";
        if (r.page) q += " (p. " + std::to_string(*r.page) + ")";
        line("Quote", q);
    } else if (r.page) {
        line("Page", std::to_string(*r.page));
    }
    if (!r.commentary.empty()) line("Context", r.commentary);
    return out.str();
}

std::string render_records(const std::vector<ExampleRecord>& records) {
    std::string out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i) out += "\n";
        out += render_record(records[i]);
    }
    return out;
}

}  // namespace explcorpus
