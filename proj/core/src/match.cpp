#include "explcorpus/verify.hpp"

#include "detail/utf8.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>

namespace explcorpus {

namespace {

// One quote fragment. A slot with wild[i] > 0 is a math wildcard that absorbs
// up to wild[i] document characters at no cost.
struct Pattern {
    std::u32string chars;
    std::vector<std::uint32_t> wild;
    std::size_t literal_len = 0;
    std::size_t wild_total = 0;
    std::size_t nominal_len = 0;
};

struct Window {
    double score = -1.0;
    std::size_t start = 0;
    std::size_t len = 0;
};

bool better(const Window& a, const Window& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.start != b.start) return a.start < b.start;
    return a.len < b.len;
}

std::u32string_view trim(std::u32string_view s) {
    while (!s.empty() && s.front() == U' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == U' ') s.remove_suffix(1);
    return s;
}

// Position just past the closing delimiter of a math segment opened at i, or npos.
std::size_t math_end(std::u32string_view s, std::size_t i) {
    auto find_close = [&](std::size_t from, std::u32string_view close) -> std::size_t {
        auto pos = s.find(close, from);
        return pos == std::u32string_view::npos ? pos : pos + close.size();
    };
    if (s[i] == U'$') {
        if (i + 1 < s.size() && s[i + 1] == U'$') {
            auto end = find_close(i + 2, U"$$");
            return end != std::u32string_view::npos && end > i + 4 ? end : std::u32string_view::npos;
        }
        auto end = find_close(i + 1, U"$");
        return end != std::u32string_view::npos && end > i + 2 ? end : std::u32string_view::npos;
    }
    if (s[i] == U'\\' && i + 1 < s.size() && (s[i + 1] == U'(' || s[i + 1] == U'[')) {
        std::u32string close = s[i + 1] == U'(' ? U"\\)" : U"\\]";
        auto end = find_close(i + 2, close);
        return end != std::u32string_view::npos && end > i + 4 ? end : std::u32string_view::npos;
    }
    return std::u32string_view::npos;
}

Pattern compile(std::u32string_view fragment) {
    Pattern p;
    p.nominal_len = fragment.size();
    for (std::size_t i = 0; i < fragment.size();) {
        auto end = math_end(fragment, i);
        if (end != std::u32string_view::npos) {
            auto span = static_cast<std::uint32_t>(3 * (end - i));
            p.chars.push_back(U'\0');
            p.wild.push_back(span);
            p.wild_total += span;
            i = end;
            continue;
        }
        p.chars.push_back(fragment[i]);
        p.wild.push_back(0);
        ++p.literal_len;
        ++i;
    }
    return p;
}

// Splits on elision marks ("..." after normalization, optionally bracketed).
std::vector<std::u32string_view> split_fragments(std::u32string_view q) {
    std::vector<std::u32string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < q.size();) {
        if (q.compare(i, 3, U"...") == 0) {
            auto cut_begin = i;
            auto cut_end = i + 3;
            while (cut_end < q.size() && q[cut_end] == U'.') ++cut_end;
            if (cut_begin > 0 && q[cut_begin - 1] == U'[' && cut_end < q.size() && q[cut_end] == U']') {
                --cut_begin;
                ++cut_end;
            }
            auto frag = trim(q.substr(start, cut_begin - start));
            if (!frag.empty()) out.push_back(frag);
            start = cut_end;
            i = cut_end;
            continue;
        }
        ++i;
    }
    auto tail = trim(q.substr(std::min(start, q.size())));
    if (!tail.empty()) out.push_back(tail);
    return out;
}

// Bit-parallel edit distance (Myers, blocked as in Hyyro) for patterns
// without wildcards: one pass over a window gives D(pattern, doc[s, s+j)) for
// every j.
class BitScorer {
  public:
    BitScorer(const Pattern& p, std::u32string_view doc) : n_(p.chars.size()), blocks_((n_ + 63) / 64) {
        std::vector<char32_t> alphabet(p.chars.begin(), p.chars.end());
        std::sort(alphabet.begin(), alphabet.end());
        alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
        // Slot 0 is every character absent from the pattern.
        peq_.assign((alphabet.size() + 1) * blocks_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            auto slot = 1 + (std::lower_bound(alphabet.begin(), alphabet.end(), p.chars[i]) - alphabet.begin());
            peq_[slot * blocks_ + i / 64] |= std::uint64_t{1} << (i % 64);
        }
        slots_.resize(doc.size());
        for (std::size_t j = 0; j < doc.size(); ++j) {
            auto it = std::lower_bound(alphabet.begin(), alphabet.end(), doc[j]);
            slots_[j] = (it != alphabet.end() && *it == doc[j])
                            ? static_cast<std::uint32_t>(1 + (it - alphabet.begin()))
                            : 0u;
        }
        pv_.resize(blocks_);
        mv_.resize(blocks_);
    }

    // out[j] = distance to the window of length j, for j in [0, width].
    void distances(std::size_t s, std::size_t width, std::vector<std::uint32_t>& out) {
        std::fill(pv_.begin(), pv_.end(), ~std::uint64_t{0});
        std::fill(mv_.begin(), mv_.end(), 0);
        const unsigned last_bit = static_cast<unsigned>((n_ - 1) % 64);
        std::int64_t score = static_cast<std::int64_t>(n_);
        out[0] = static_cast<std::uint32_t>(n_);
        for (std::size_t j = 1; j <= width; ++j) {
            const std::uint64_t* eq_col = &peq_[slots_[s + j - 1] * blocks_];
            int hin = 1;
            for (std::size_t b = 0; b < blocks_; ++b) {
                const std::uint64_t pv = pv_[b];
                const std::uint64_t mv = mv_[b];
                const std::uint64_t hin_neg = hin < 0 ? 1u : 0u;
                const std::uint64_t eq = eq_col[b] | hin_neg;
                const std::uint64_t xv = eq_col[b] | mv;
                const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
                std::uint64_t ph = mv | ~(xh | pv);
                std::uint64_t mh = pv & xh;
                if (b + 1 == blocks_) {
                    score += static_cast<std::int64_t>((ph >> last_bit) & 1u) -
                             static_cast<std::int64_t>((mh >> last_bit) & 1u);
                }
                const int hout = static_cast<int>(ph >> 63) - static_cast<int>(mh >> 63);
                ph = (ph << 1) | (hin > 0 ? 1u : 0u);
                mh = (mh << 1) | hin_neg;
                pv_[b] = mh | ~(xv | ph);
                mv_[b] = ph & xv;
                hin = hout;
            }
            out[j] = static_cast<std::uint32_t>(score);
        }
    }

  private:
    std::size_t n_;
    std::size_t blocks_;
    std::vector<std::uint64_t> peq_;
    std::vector<std::uint32_t> slots_;
    std::vector<std::uint64_t> pv_;
    std::vector<std::uint64_t> mv_;
};

class WindowScorer {
  public:
    WindowScorer(const Pattern& p, std::u32string_view doc) : p_(p), doc_(doc) {
        if (p.wild_total == 0 && !p.chars.empty()) bits_.emplace(p, doc);
        min_len_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.8 * p.literal_len)));
        max_len_ = static_cast<std::size_t>(std::ceil(1.2 * p.literal_len)) + p.wild_total;
        prev_.resize(max_len_ + 1);
        cur_.resize(max_len_ + 1);
    }

    std::size_t last_start() const {
        return doc_.size() > min_len_ ? doc_.size() - min_len_ : 0;
    }

    Window score(std::size_t s) {
        std::size_t width = std::min(max_len_, doc_.size() - std::min(s, doc_.size()));
        if (bits_) {
            bits_->distances(s, width, prev_);
            return pick(s, width);
        }
        for (std::size_t j = 0; j <= width; ++j) prev_[j] = static_cast<std::uint32_t>(j);
        for (std::size_t i = 0; i < p_.chars.size(); ++i) {
            if (p_.wild[i] > 0) {
                sliding_min(width, p_.wild[i]);
            } else {
                char32_t c = p_.chars[i];
                cur_[0] = prev_[0] + 1;
                for (std::size_t j = 1; j <= width; ++j) {
                    std::uint32_t sub = prev_[j - 1] + (doc_[s + j - 1] == c ? 0u : 1u);
                    cur_[j] = std::min({prev_[j] + 1, cur_[j - 1] + 1, sub});
                }
            }
            std::swap(prev_, cur_);
        }
        return pick(s, width);
    }

  private:
    // Best window among the lengths allowed at start s, distances in prev_.
    Window pick(std::size_t s, std::size_t width) const {
        Window best;
        std::size_t lo = std::min(min_len_, width);
        for (std::size_t len = lo; len <= width; ++len) {
            if (len == 0) continue;
            double denom = static_cast<double>(std::max(p_.nominal_len, len));
            double sc = std::max(0.0, 1.0 - static_cast<double>(prev_[len]) / denom);
            Window w{sc, s, len};
            if (better(w, best)) best = w;
        }
        return best;
    }

    void sliding_min(std::size_t width, std::uint32_t span) {
        std::deque<std::size_t> q;
        for (std::size_t j = 0; j <= width; ++j) {
            while (!q.empty() && prev_[q.back()] >= prev_[j]) q.pop_back();
            q.push_back(j);
            while (q.front() + span < j) q.pop_front();
            cur_[j] = prev_[q.front()];
        }
    }

    const Pattern& p_;
    std::u32string_view doc_;
    std::size_t min_len_ = 1;
    std::size_t max_len_ = 1;
    std::vector<std::uint32_t> prev_;
    std::vector<std::uint32_t> cur_;
    std::optional<BitScorer> bits_;
};

Window search(const Pattern& p, std::u32string_view doc, const MatchOptions& opt) {
    if (p.wild_total == 0) {
        auto pos = doc.find(std::u32string_view(p.chars));
        if (pos != std::u32string_view::npos) {
            return {1.0, pos, p.chars.size()};
        }
    }
    if (doc.empty()) {
        return {0.0, 0, 0};
    }
    WindowScorer scorer(p, doc);
    const std::size_t last = scorer.last_start();
    const std::size_t stride = std::max<std::size_t>(1, p.nominal_len / 10);
    const std::size_t k = std::max<std::size_t>(1, opt.refine_candidates);

    Window best;
    if (opt.exhaustive || (last + 1) <= 2 * k * stride + 1) {
        for (std::size_t s = 0; s <= last; ++s) {
            auto w = scorer.score(s);
            if (better(w, best)) best = w;
            if (best.score >= 1.0) break;
        }
        return best;
    }

    std::vector<Window> coarse;
    for (std::size_t s = 0;; s += stride) {
        if (s > last) s = last;
        coarse.push_back(scorer.score(s));
        if (s == last) break;
    }
    std::sort(coarse.begin(), coarse.end(), better);
    coarse.resize(std::min(coarse.size(), k));
    for (const auto& c : coarse) {
        if (better(c, best)) best = c;
        std::size_t from = c.start >= stride ? c.start - stride + 1 : 0;
        std::size_t to = std::min(last, c.start + stride - 1);
        for (std::size_t s = from; s <= to; ++s) {
            auto w = scorer.score(s);
            if (better(w, best)) best = w;
        }
    }
    return best;
}

}  // namespace

PreparedText::PreparedText(std::string_view text) : text_(detail::to_u32(normalize(text))) {}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

VerificationResult best_match(std::string_view quote, std::string_view doc_text, double threshold,
                              const MatchOptions& options) {
    return best_match(quote, PreparedText(doc_text), threshold, options);
}

VerificationResult best_match(std::string_view quote, const PreparedText& doc, double threshold,
                              const MatchOptions& options) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("threshold must lie in (0, 1]");
    }
    const auto q = detail::to_u32(normalize(quote));
    if (q.empty()) {
        throw std::invalid_argument("quote must not be empty");
    }
    std::u32string_view text = doc.codepoints();

    std::vector<std::u32string_view> fragments;
    if (text.find(q) == std::u32string_view::npos) {
        fragments = split_fragments(q);
    }
    if (fragments.empty()) {
        fragments.push_back(q);
    }

    double weighted = 0.0;
    double weight = 0.0;
    std::size_t span_start = std::numeric_limits<std::size_t>::max();
    std::size_t span_end = 0;
    for (auto frag : fragments) {
        auto pattern = compile(frag);
        auto w = search(pattern, text, options);
        weighted += w.score * static_cast<double>(pattern.nominal_len);
        weight += static_cast<double>(pattern.nominal_len);
        span_start = std::min(span_start, w.start);
        span_end = std::max(span_end, w.start + w.len);
    }
    VerificationResult r;
    r.similarity = std::clamp(weighted / weight, 0.0, 1.0);
    r.threshold_used = threshold;
    r.matched = r.similarity >= threshold;
    if (r.matched) {
        r.span_start = span_start;
        r.span_end = span_end;
    }
    return r;
}

}  // namespace explcorpus
