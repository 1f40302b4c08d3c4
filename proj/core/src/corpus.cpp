#include "explcorpus/corpus.hpp"

#include "detail/fs_util.hpp"
#include "detail/hash.hpp"
#include "detail/parallel.hpp"
#include "detail/utf8.hpp"
#include "explcorpus/error.hpp"
#include "explcorpus/normalize.hpp"
#include "pdf_info.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace explcorpus {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kManifestFormat = "explcorpus.manifest";
constexpr int kManifestVersion = 1;

bool has_pdf_extension(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".pdf";
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('\'');
    return out;
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
        s.replace(pos, from.size(), to);
    }
}

std::vector<std::string> split_authors(const std::string& text) {
    std::string s = text;
    replace_all(s, " and ", ";");
    replace_all(s, ",", ";");
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ';')) {
        auto b = part.find_first_not_of(" \t");
        auto e = part.find_last_not_of(" \t");
        if (b != std::string::npos) {
            out.push_back(part.substr(b, e - b + 1));
        }
    }
    return out;
}

// Uniform integer in [0, bound) from raw 64-bit engine output. Rejection keeps
// the result identical on every standard library.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

template <typename T>
std::optional<T> opt_field(const json& obj, const char* key, const fs::path& origin, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return std::nullopt;
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw FormatError(origin, line, std::string("field '") + key + "' has the wrong type");
    }
}

json parse_line(std::string_view line, const fs::path& origin, std::size_t line_no) {
    try {
        auto j = json::parse(line);
        if (!j.is_object()) {
            throw FormatError(origin, line_no, "expected a JSON object");
        }
        return j;
    } catch (const json::parse_error& e) {
        throw FormatError(origin, line_no, std::string("malformed record: ") + e.what());
    }
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++line_no;
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        fn(line, line_no);
        pos = end + 1;
    }
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

CorpusManifest::CorpusManifest(std::vector<DocumentRef> documents, std::optional<std::int64_t> sample_seed,
                               std::optional<std::uint64_t> parent_size)
    : documents_(std::move(documents)), sample_seed_(sample_seed) {
    std::sort(documents_.begin(), documents_.end(),
              [](const DocumentRef& a, const DocumentRef& b) { return a.doc_id < b.doc_id; });
    for (std::size_t i = 1; i < documents_.size(); ++i) {
        if (documents_[i].doc_id == documents_[i - 1].doc_id) {
            throw std::invalid_argument("duplicate doc_id '" + documents_[i].doc_id + "' in manifest");
        }
    }
    parent_size_ = parent_size.value_or(documents_.size());
}

const DocumentRef* CorpusManifest::find(std::string_view doc_id) const noexcept {
    auto it = std::lower_bound(documents_.begin(), documents_.end(), doc_id,
                               [](const DocumentRef& d, std::string_view id) { return d.doc_id < id; });
    if (it == documents_.end() || it->doc_id != doc_id) {
        return nullptr;
    }
    return &*it;
}

MetadataIndex MetadataIndex::load(const fs::path& path) { return parse(detail::read_file(path), path); }

MetadataIndex MetadataIndex::parse(std::string_view jsonl, const fs::path& origin) {
    MetadataIndex index;
    for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
        if (blank(line)) {
            return;
        }
        auto j = parse_line(line, origin, line_no);
        MetadataEntry entry;
        auto id = opt_field<std::string>(j, "doc_id", origin, line_no);
        if (!id || id->empty()) {
            throw FormatError(origin, line_no, "metadata record lacks doc_id");
        }
        entry.doc_id = *id;
        if (auto p = opt_field<std::string>(j, "path", origin, line_no)) entry.path = fs::path(*p);
        if (auto p = opt_field<std::string>(j, "text_path", origin, line_no)) entry.text_path = fs::path(*p);
        entry.title = opt_field<std::string>(j, "title", origin, line_no);
        entry.authors = opt_field<std::vector<std::string>>(j, "authors", origin, line_no);
        entry.category_tag = opt_field<std::string>(j, "category_tag", origin, line_no);
        if (!index.entries_.emplace(entry.doc_id, entry).second) {
            throw FormatError(origin, line_no, "duplicate doc_id '" + entry.doc_id + "'");
        }
    });
    return index;
}

const MetadataEntry* MetadataIndex::find(std::string_view doc_id) const {
    auto it = entries_.find(doc_id);
    return it == entries_.end() ? nullptr : &it->second;
}

std::optional<std::string> category_from_filename(std::string_view filename) {
    return detail::find_category_tag(filename);
}

CategoryTag resolve_category(const DocumentRef& ref, const MetadataIndex* metadata) {
    if (metadata) {
        if (const auto* entry = metadata->find(ref.doc_id); entry && entry->category_tag) {
            auto tag = CategoryTag::from_text(*entry->category_tag);
            if (!tag.is_unknown()) {
                return tag;
            }
        }
    }
    if (!ref.path.empty()) {
        if (auto info = detail::read_pdf_info(ref.path)) {
            for (auto key : {"Subject", "Keywords", "Title"}) {
                if (auto v = info->get(key)) {
                    if (auto tag = detail::find_category_tag(*v)) {
                        return CategoryTag(*tag);
                    }
                }
            }
        }
    }
    for (const auto& p : {ref.path, ref.text_path}) {
        if (!p.empty()) {
            if (auto tag = category_from_filename(p.filename().string())) {
                return CategoryTag(*tag);
            }
        }
    }
    return CategoryTag::unknown();
}

CategoryTag resolve_category(const DocumentRef& ref, const std::optional<fs::path>& metadata_file) {
    if (!metadata_file) {
        return resolve_category(ref, static_cast<const MetadataIndex*>(nullptr));
    }
    auto index = MetadataIndex::load(*metadata_file);
    return resolve_category(ref, &index);
}

std::string load_text(const DocumentRef& ref) {
    std::string raw;
    try {
        raw = detail::read_file(ref.text_path);
    } catch (const IoError&) {
        throw MissingTextError(ref.doc_id, ref.text_path);
    }
    return normalize(raw);
}

IngestResult ingest(const fs::path& source_dir, const std::optional<fs::path>& metadata_file,
                    const IngestOptions& options) {
    std::error_code ec;
    if (!fs::is_directory(source_dir, ec)) {
        throw IoError(source_dir, "not a readable directory");
    }
    std::optional<MetadataIndex> metadata;
    if (metadata_file) {
        metadata = MetadataIndex::load(*metadata_file);
    }

    std::map<std::string, DocumentRef> candidates;
    fs::directory_iterator it(source_dir, ec);
    if (ec) {
        throw IoError(source_dir, "cannot list directory: " + ec.message());
    }
    for (const auto& entry : it) {
        if (entry.is_regular_file() && has_pdf_extension(entry.path())) {
            DocumentRef ref;
            ref.doc_id = entry.path().stem().string();
            ref.path = source_dir / entry.path().filename();
            candidates.emplace(ref.doc_id, std::move(ref));
        }
    }
    if (metadata) {
        for (const auto& [id, entry] : metadata->entries()) {
            auto& ref = candidates[id];
            ref.doc_id = id;
            if (entry.path) {
                ref.path = entry.path->is_absolute() ? *entry.path : source_dir / *entry.path;
            }
            if (entry.text_path) {
                ref.text_path = entry.text_path->is_absolute() ? *entry.text_path : source_dir / *entry.text_path;
            }
        }
    }

    std::vector<DocumentRef> refs;
    refs.reserve(candidates.size());
    for (auto& [id, ref] : candidates) {
        if (ref.text_path.empty()) {
            ref.text_path = ref.path.empty() ? source_dir / (id + ".txt")
                                             : ref.path.parent_path() / (ref.path.stem().string() + ".txt");
        }
        refs.push_back(std::move(ref));
    }

    std::vector<std::optional<std::string>> failures(refs.size());
    const MetadataIndex* meta = metadata ? &*metadata : nullptr;
    detail::parallel_for(refs.size(), options.threads, [&](std::size_t i) {
        auto& ref = refs[i];
        std::error_code exists_ec;
        if (!fs::exists(ref.text_path, exists_ec) && options.extract_command && !ref.path.empty() &&
            fs::exists(ref.path, exists_ec)) {
            std::string cmd = *options.extract_command;
            replace_all(cmd, "{pdf}", shell_quote(ref.path.string()));
            replace_all(cmd, "{txt}", shell_quote(ref.text_path.string()));
            if (std::system(cmd.c_str()) != 0) {
                failures[i] = "extraction command failed";
                return;
            }
        }
        std::string text;
        try {
            text = load_text(ref);
        } catch (const MissingTextError&) {
            failures[i] = "no extracted text at " + ref.text_path.string();
            return;
        }
        ref.char_count = detail::codepoint_count(text);

        const MetadataEntry* entry = meta ? meta->find(ref.doc_id) : nullptr;
        std::optional<detail::PdfInfo> info;
        if (!ref.path.empty()) {
            info = detail::read_pdf_info(ref.path);
        }
        if (entry && entry->title) {
            ref.title = *entry->title;
        } else if (info && info->get("Title")) {
            ref.title = *info->get("Title");
        }
        if (entry && entry->authors) {
            ref.authors = *entry->authors;
        } else if (info && info->get("Author")) {
            ref.authors = split_authors(*info->get("Author"));
        }
        ref.category_tag = resolve_category(ref, meta);
    });

    IngestResult result;
    std::vector<DocumentRef> kept;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (failures[i]) {
            result.skipped.push_back({refs[i].doc_id, refs[i].path, *failures[i]});
        } else {
            kept.push_back(std::move(refs[i]));
        }
    }
    result.manifest = CorpusManifest(std::move(kept));
    return result;
}

CorpusManifest sample(const CorpusManifest& manifest, std::size_t n, std::int64_t seed) {
    const auto& docs = manifest.documents();
    if (n == 0) {
        throw std::invalid_argument("sample size must be positive");
    }
    if (n > docs.size()) {
        throw std::invalid_argument("sample size " + std::to_string(n) + " exceeds corpus size " +
                                    std::to_string(docs.size()));
    }
    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    for (std::size_t i = 0; i < n; ++i) {
        auto j = i + static_cast<std::size_t>(bounded(rng, order.size() - i));
        std::swap(order[i], order[j]);
    }
    std::vector<DocumentRef> picked;
    picked.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        picked.push_back(docs[order[i]]);
    }
    return CorpusManifest(std::move(picked), seed, docs.size());
}

std::string manifest_to_jsonl(const CorpusManifest& manifest) {
    std::string out;
    ordered_json header;
    header["format"] = kManifestFormat;
    header["version"] = kManifestVersion;
    header["document_count"] = manifest.size();
    header["parent_size"] = manifest.parent_size();
    header["sample_seed"] = manifest.sample_seed() ? json(*manifest.sample_seed()) : json(nullptr);
    out += header.dump() + "\n";
    for (const auto& d : manifest.documents()) {
        ordered_json j;
        j["doc_id"] = d.doc_id;
        j["path"] = d.path.generic_string();
        j["text_path"] = d.text_path.generic_string();
        j["title"] = d.title;
        j["authors"] = d.authors;
        j["category_tag"] = d.category_tag.is_unknown() ? json(nullptr) : json(d.category_tag.value());
        j["char_count"] = d.char_count;
        out += j.dump() + "\n";
    }
    return out;
}

CorpusManifest manifest_from_jsonl(std::string_view text, const fs::path& origin) {
    std::optional<json> header;
    std::size_t header_line = 0;
    std::vector<DocumentRef> docs;
    std::set<std::string> seen;
    std::size_t last_line = 0;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        last_line = line_no;
        if (blank(line)) {
            return;
        }
        auto j = parse_line(line, origin, line_no);
        if (!header) {
            if (j.value("format", "") != kManifestFormat) {
                throw FormatError(origin, line_no, "missing manifest header");
            }
            if (j.value("version", 0) != kManifestVersion) {
                throw FormatError(origin, line_no, "unsupported manifest version");
            }
            header = std::move(j);
            header_line = line_no;
            return;
        }
        DocumentRef d;
        auto id = opt_field<std::string>(j, "doc_id", origin, line_no);
        if (!id || id->empty()) {
            throw FormatError(origin, line_no, "document record lacks doc_id");
        }
        if (!seen.insert(*id).second) {
            throw FormatError(origin, line_no, "duplicate doc_id '" + *id + "'");
        }
        d.doc_id = *id;
        d.path = opt_field<std::string>(j, "path", origin, line_no).value_or("");
        d.text_path = opt_field<std::string>(j, "text_path", origin, line_no).value_or("");
        d.title = opt_field<std::string>(j, "title", origin, line_no).value_or("");
        d.authors = opt_field<std::vector<std::string>>(j, "authors", origin, line_no).value_or(std::vector<std::string>{});
        if (auto tag = opt_field<std::string>(j, "category_tag", origin, line_no)) {
            d.category_tag = CategoryTag::from_text(*tag);
        }
        d.char_count = opt_field<std::uint64_t>(j, "char_count", origin, line_no).value_or(0);
        docs.push_back(std::move(d));
    });
    if (!header) {
        if (text.empty()) {
            throw FormatError(origin, 1, "empty manifest file");
        }
        throw FormatError(origin, last_line, "missing manifest header");
    }
    auto expected = opt_field<std::uint64_t>(*header, "document_count", origin, header_line);
    if (expected && *expected != docs.size()) {
        throw FormatError(origin, last_line + 1,
                          "manifest truncated: header announces " + std::to_string(*expected) +
                              " documents, found " + std::to_string(docs.size()));
    }
    auto seed = opt_field<std::int64_t>(*header, "sample_seed", origin, header_line);
    auto parent = opt_field<std::uint64_t>(*header, "parent_size", origin, header_line);
    return CorpusManifest(std::move(docs), seed, parent);
}

void save_manifest(const CorpusManifest& manifest, const fs::path& path) {
    detail::write_file_atomic(path, manifest_to_jsonl(manifest));
}

CorpusManifest load_manifest(const fs::path& path) {
    return manifest_from_jsonl(detail::read_file(path), path);
}

std::string manifest_digest(const CorpusManifest& manifest) {
    return detail::sha256_hex(manifest_to_jsonl(manifest));
}

}  // namespace explcorpus
