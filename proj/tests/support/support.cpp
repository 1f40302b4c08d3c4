#include "support.hpp"

#include <explcorpus/normalize.hpp>
#include <explcorpus/provider.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace testsupport {

using namespace explcorpus;

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("explcorpus-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path golden_dir() { return EXPLCORPUS_TEST_GOLDEN_DIR; }
fs::path source_dir() { return EXPLCORPUS_TEST_SOURCE_DIR; }

bool matches_golden(const std::string& name, const std::string& actual, std::string* golden_out) {
    const auto path = golden_dir() / name;
    if (std::getenv("EXPLCORPUS_UPDATE_GOLDEN")) write_file(path, actual);
    if (!fs::exists(path)) return false;
    auto golden = read_file(path);
    if (golden_out) *golden_out = golden;
    return golden == actual;
}

std::uint64_t Gen::below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_);
}

std::int64_t Gen::between(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
}

bool Gen::chance(double p) { return std::bernoulli_distribution(p)(rng_); }

std::string Gen::word() {
    static const char* kSyllables[] = {"ka", "lo", "mer", "tis", "an", "qu", "ver", "do", "ne", "ra",
                                       "sim", "pol", "ex", "ti", "gro", "hom", "al", "ge", "bra", "top"};
    std::string w;
    const auto n = between(1, 4);
    for (int i = 0; i < n; ++i) w += kSyllables[below(std::size(kSyllables))];
    return w;
}

std::string Gen::sentence(int min_words, int max_words) {
    std::string s;
    const auto n = between(min_words, max_words);
    for (int i = 0; i < n; ++i) {
        if (i) s += ' ';
        auto w = word();
        if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        s += w;
    }
    return s + ".";
}

std::string Gen::paragraph(int sentences) {
    std::string p;
    for (int i = 0; i < sentences; ++i) {
        if (i) p += ' ';
        p += sentence();
    }
    return p;
}

std::string Gen::messy_text(std::size_t max_len) {
    static const char* kPieces[] = {"a", "b", "Z", " ", "  ", "\t", "\n", "\r\n", "-", "-\n", "\xEF\xAC\x81",
                                    "\xEF\xAC\x82", "\xC2\xAD", "\xC2\xAD\n", "\xE2\x80\x90\n", "\xC3\xA9",
                                    "e\xCC\x81", "\xEF\xBC\xA1", "\xE2\x91\xA0", "x", "7", ".", "$", "\xE2\x80\x83"};
    std::string out;
    const auto n = below(max_len + 1);
    for (std::size_t i = 0; i < n; ++i) out += kPieces[below(std::size(kPieces))];
    return out;
}

std::u32string Gen::letters(std::size_t len, std::u32string_view alphabet) {
    std::u32string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[below(alphabet.size())]);
    return s;
}

std::size_t reference_distance(const std::u32string& a, const std::u32string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
        }
    }
    return d[a.size()][b.size()];
}

double reference_similarity(const std::u32string& quote, const std::u32string& doc) {
    const std::size_t q = quote.size();
    const std::size_t lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.8 * q)));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(1.2 * q));
    double best = 0.0;
    if (doc.size() < lo) {
        if (!doc.empty()) {
            best = 1.0 - static_cast<double>(reference_distance(quote, doc)) / std::max(q, doc.size());
        }
        return std::max(0.0, best);
    }
    for (std::size_t s = 0; s + lo <= doc.size(); ++s) {
        for (std::size_t len = lo; len <= hi && s + len <= doc.size(); ++len) {
            const double d = static_cast<double>(reference_distance(quote, doc.substr(s, len)));
            best = std::max(best, 1.0 - d / static_cast<double>(std::max(q, len)));
        }
    }
    return best;
}

CorpusManifest synthetic_manifest(std::size_t n, std::uint64_t char_count) {
    std::vector<DocumentRef> docs;
    docs.reserve(n);
    char id[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(id, sizeof id, "doc%05zu", i);
        DocumentRef d;
        d.doc_id = id;
        d.path = std::string("/corpus/") + id + ".pdf";
        d.text_path = std::string("/corpus/") + id + ".txt";
        d.title = std::string("Synthetic paper ") + id;
        d.char_count = char_count;
        docs.push_back(std::move(d));
    }
    return CorpusManifest(std::move(docs));
}

OfflineCorpus write_offline_corpus(const fs::path& dir, std::size_t n, Gen& g) {
    static const char* kTags[] = {"math.AG", "math.AG", "math.CO", "math.LO", "math.DG", "math.GT", "math.NT", "hep-th"};
    fs::create_directories(dir);
    OfflineCorpus out;
    std::vector<DocumentRef> docs;
    char id[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(id, sizeof id, "p%05zu", i);
        auto text = g.paragraph(static_cast<int>(g.between(8, 20)));
        write_file(dir / (std::string(id) + ".txt"), text);
        DocumentRef d;
        d.doc_id = id;
        d.text_path = dir / (std::string(id) + ".txt");
        d.title = "Paper " + std::to_string(i);
        d.category_tag = CategoryTag(kTags[i % 8]);
        auto norm = normalize(text);
        d.char_count = norm.size();
        out.texts[id] = norm;
        docs.push_back(std::move(d));
    }
    out.manifest = CorpusManifest(std::move(docs));
    return out;
}

std::size_t write_stub_fixtures(const fs::path& fixtures, const OfflineCorpus& corpus, const BatchPlan& plan,
                                std::size_t per_batch, std::size_t keep) {
    fs::create_directories(fixtures);
    std::size_t total = 0;
    for (const auto& job : plan.jobs) {
        std::vector<ExampleRecord> recs;
        const auto& doc = job.doc_ids.front();
        const auto& text = corpus.texts.at(doc);
        for (std::size_t k = 0; k < per_batch; ++k) {
            ExampleRecord r;
            r.source_doc_id = doc;
            r.title = "Paper title";
            r.finding = "example " + std::to_string(k) + " of batch " + std::to_string(job.index);
            r.quote = text.substr(std::min(text.size() - 1, k * 7), 60);
            while (!r.quote->empty() && r.quote->back() == ' ') r.quote->pop_back();
            while (!r.quote->empty() && r.quote->front() == ' ') r.quote->erase(0, 1);
            r.page = static_cast<int>(k + 1);
            r.commentary = "commentary";
            r.batch_index = job.index;
            recs.push_back(std::move(r));
        }
        total += recs.size();
        write_file(fixtures / (stub_fixture_key(PromptKind::Annotation, job.doc_ids) + ".txt"), render_records(recs));
        recs.resize(std::min(keep, recs.size()));
        auto kept = recs.empty() ? std::string("No examples meet the strict criteria.\n") : render_records(recs);
        for (const auto& name : {batch_output_path("", job.index), batch_filtered_path("", job.index)}) {
            write_file(fixtures / (stub_fixture_key(PromptKind::Filter, {name.filename().string()}) + ".txt"), kept);
        }
    }
    return total;
}

void write_paper(const fs::path& dir, const std::string& id, const std::string& title, const std::string& tag,
                 const std::string& text) {
    std::string pdf = "%PDF-1.4\n1 0 obj\n<< /Title (" + title + ") /Author (A. Author; B. Writer)";
    if (!tag.empty()) pdf += " /Subject (" + tag + ")";
    pdf += " >>\nendobj\ntrailer\n<< /Info 1 0 R >>\n%%EOF\n";
    write_file(dir / (id + ".pdf"), pdf);
    write_file(dir / (id + ".txt"), text);
}

namespace {

std::string lines(Gen& g, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) {
        if (i) s += '\n';
        s += g.sentence();
    }
    return s;
}

}  // namespace

ExampleRecord random_record(Gen& g, bool multiline) {
    ExampleRecord r;
    r.source_doc_id = "paper" + std::to_string(g.below(100000));
    if (g.chance(0.9)) r.title = g.sentence(2, 8);
    if (g.chance(0.7)) r.authors = g.word() + " " + g.word();
    const int n = multiline ? static_cast<int>(g.between(1, 3)) : 1;
    if (g.chance(0.85)) r.finding = lines(g, n);
    if (g.chance(0.8)) r.quote = lines(g, n);
    if (g.chance(0.8) || (r.finding.empty() && !r.quote)) r.commentary = lines(g, n);
    if (g.chance(0.6)) r.page = static_cast<int>(g.between(1, 400));
    r.batch_index = static_cast<std::uint32_t>(g.below(200));
    return r;
}

ExampleRecord random_stored_record(Gen& g) {
    ExampleRecord r;
    r.source_doc_id = g.chance(0.1) ? std::string() : g.word() + "." + std::to_string(g.below(10000));
    r.title = g.chance(0.2) ? g.messy_text(20) : g.sentence(0, 8);
    if (g.chance(0.6)) r.authors = g.messy_text(30);
    r.finding = g.paragraph(static_cast<int>(g.below(3)));
    if (g.chance(0.8)) r.quote = g.messy_text(120) + "\"quoted\" \\ \x01";
    r.commentary = g.messy_text(60);
    if (g.chance(0.5)) r.page = static_cast<int>(g.between(-5, 100000));
    if (r.finding.empty() && !r.quote && r.commentary.empty()) r.finding = g.sentence();
    r.batch_index = static_cast<std::uint32_t>(g.below(5000));
    if (g.chance(0.5)) {
        VerificationResult v;
        v.similarity = std::uniform_real_distribution<double>(0.0, 1.0)(g.engine());
        v.threshold_used = g.chance(0.5) ? 0.85 : std::uniform_real_distribution<double>(0.01, 1.0)(g.engine());
        v.matched = v.similarity >= v.threshold_used;
        if (v.matched) {
            v.span_start = g.below(100000);
            v.span_end = *v.span_start + g.below(1000);
        }
        r.verification = v;
    }
    if (g.chance(0.3)) {
        static const QualityLabel kLabels[] = {QualityLabel::High, QualityLabel::Borderline, QualityLabel::Low};
        r.quality_label = kLabels[g.below(3)];
    }
    return r;
}

namespace {

ExampleRecord rec(std::string id, std::string title, std::optional<std::string> authors, std::string finding,
                  std::optional<std::string> quote, std::optional<int> page, std::string commentary,
                  std::uint32_t batch) {
    ExampleRecord r;
    r.source_doc_id = std::move(id);
    r.title = std::move(title);
    r.authors = std::move(authors);
    r.finding = std::move(finding);
    r.quote = std::move(quote);
    r.page = page;
    r.commentary = std::move(commentary);
    r.batch_index = batch;
    return r;
}

std::vector<ExampleRecord> build_canonical() {
    std::vector<ExampleRecord> v;
    v.push_back(rec(
        "vdkallen2000", "From Mennicke Symbols to Euler Class Groups", "Wilberd van der Kallen",
        "An analogy with topology is cited as providing an explanation for an algebraic structure.",
        "Let us now take $A$ to be the Banach algebra of continuous real valued functions on some finite "
        "$d$-dimensional CW complex $X$. Then one knows that for $n\\ge3$ the orbit set "
        "$\\mathrm{Um}_{n}\\left(A\\right)/E_{n}\\left(A\\right)$ is in bijective correspondence with the set "
        "$\\left[X,\\mathbb{R}^{n}-0\\right]$ of homotopy classes of maps from $X$ to "
        "$\\mathbb{R}^{n}-0=\\mathrm{Um}_{n}\\left(\\mathbb{R}\\right)$. This gives a topological explanation why "
        "for $2\\le d\\le2n-4$ one has a group structure on $\\mathrm{Um}_{n}\\left(A\\right)/E_{n}\\left(A\\right)$",
        10,
        "Discussing orbit sets over Banach algebras $A=C(X)$. The author explicitly labels the connection to "
        "homotopy theory as a \xE2\x80\x9Ctopological explanation\xE2\x80\x9D for the existence of a group structure.",
        0));
    v.push_back(rec(
        "alekseev2000", "Formulas of Verlinde Type for Non-Simply Connected Groups", "A. Alekseev et al.",
        "Page 1 (Introduction): States the motivation is to apply the fixed point formula from the companion paper "
        "to understand Verlinde's formula for geometric quantization of moduli spaces, connecting index theory on "
        "loop group spaces to formulas arising in conformal field theory and algebraic geometry.",
        "In this paper we give applications of the fixed point formula proved in the companion paper. Our original "
        "motivation was to understand a formula of E. Verlinde for the geometric quantization of the moduli space "
        "of flat connections on a Riemann surface. In particular A. Szenes suggested to us that the Verlinde "
        "formula should follow from an equivariant index theorem, much as the Weyl or Steinberg formulas can be "
        "interpreted as fixed point formulas for flag varieties",
        1,
        "This explicitly frames the work as seeking an explanation (\xE2\x80\x9Cunderstand a formula of E. "
        "Verlinde\xE2\x80\x9D) by deriving it from a more general principle (equivariant index theorem / fixed point "
        "formula), thus providing deeper insight into the Verlinde formula's origins and connections, explaining "
        "why it holds.",
        0));
    v.push_back(rec(
        "gannon2002", "Modular Data: The Algebraic Combinatorics of Conformal Field Theory", "Terry Gannon",
        "Discussion of seeking underlying reasons for observed patterns.",
        "Patterns such as A-D-E are usually explained by identifying an underlying combinatorial fact which is "
        "responsible for its various incarnations. The A-D-E combinatorial fact is probably the classification of "
        "symmetric matrices over $\\mathbb{Z}_{\\geq}$ ... Perhaps the only A-D-E classification which still "
        "resists this \xE2\x80\x98" "explanation\xE2\x80\x99 is that of $A_{1}^{\\left(1\\right)}$ modular invariants",
        29,
        "The author discusses the recurrence of A-D-E classification schemes in various mathematical contexts and "
        "notes that these patterns are typically explained by finding a common underlying combinatorial structure. "
        "The quote highlights the search for such an explanation for the $A_{1}^{\\left(1\\right)}$ modular "
        "invariants, noting it as a current explanatory gap.",
        3));
    v.push_back(rec(
        "milson2000",
        "Composition Sum Identities Related to the Distribution of Coordinate Values in a Discrete Simplex",
        "Robert Milson",
        "Explaining the reason behind a mathematical property (exact solvability) by relating it to a known "
        "structure or equivalence.",
        "Interesting composition sum identities will appear in the present context when we consider "
        "exactly-solvable differential equations. We present three such examples below, and discuss the "
        "enumerative interpretations in the next section. In each case the exact solvability comes about because "
        "the equation is gauge-equivalent to either the hypergeometric, or the confluent hypergeometric equation",
        8,
        "Introducing three examples of second-order differential equations whose series solutions lead to "
        "composition sum identities (Propositions 4.2, 4.3, 4.4). The author explains why these specific "
        "equations are exactly solvable, attributing it to their gauge-equivalence to standard, well-understood "
        "hypergeometric equations.",
        7));
    v.push_back(rec(
        "guillemin2000", "Combinatorial Formulas for Products of Thom Classes", "V. Guillemin and C. Zara",
        "The authors are discussing the organization of the paper and highlighting a particularly interesting "
        "aspect of their formula (1.11) for Thom classes in equivariant cohomology.",
        "In Section 5 we will attempt to demystify what is perhaps the most puzzling feature of the formula (1.11), "
        "the fact that all the summands are rational functions (elements of the quotient field, "
        "$Q\\left(\\mathfrak{g}^{*}\\right)$), whereas the sum itself is a polynomial. This indicates that a lot of "
        "mysterious cancellations are occurring in this summation; and we will show how these cancellations occur "
        "in a few simple but enlightening examples",
        6,
        "The terms \xE2\x80\x9C" "demystify\xE2\x80\x9D, \xE2\x80\x9Cpuzzling feature\xE2\x80\x9D, \xE2\x80\x9Cmysterious "
        "cancellations\xE2\x80\x9D, and \xE2\x80\x9C" "enlightening examples\xE2\x80\x9D strongly indicate a concern for "
        "explanation. The authors acknowledge that the formula, while correct, has a feature that lacks immediate "
        "understanding (why rational functions sum to a polynomial).",
        11));

    // Shape variations.
    v.push_back(rec("2101.00001", "A quote without a page", std::nullopt, "Unifying proof of two lemmas.",
                    "The second proof shows why both statements hold at once", std::nullopt,
                    "Explanation by unification.", 12));
    v.push_back(rec("2101.00002", "Page but no quote", "Ada Lovelace", "Remark on a purely computational proof.",
                    std::nullopt, 44, "Verification without insight.", 12));
    v.push_back(rec("2101.00003", "", std::nullopt, "Finding with no title.", "We now see the reason for the bound",
                    3, "", 13));
    v.push_back(rec("2101.00004", "Commentary only", std::nullopt, "", std::nullopt, std::nullopt,
                    "The model notes an explanatory gap without quoting.", 13));
    v.push_back(rec("2101.00005", "Quote only", std::nullopt, "", "This is the real reason behind it", 120, "", 14));
    v.push_back(rec("2101.00006", "Multi-line fields", "Emmy Noether",
                    "First line of the finding.\nSecond line of the finding.",
                    "A quote that was wrapped\nacross two lines", 7,
                    "Commentary line one.\nCommentary line two.\nCommentary line three.", 14));
    v.push_back(rec("2101.00007", "Unicode: \xC3\x89tale cohomology and \xCE\xB6-functions", "Jean-Pierre S\xC3\xA9rre",
                    "Uses \xE2\x80\x9C" "conceptual\xE2\x80\x9D reasoning.",
                    "The \xCE\xB6-function explains the pattern \xE2\x80\x94 conceptually", 5,
                    "Greek letters and accents survive.", 15));
    v.push_back(rec("2101.00008", "Inner quotation marks", "J. Doe",
                    "Quote with nested quotes.", "He called it \"the explanation\" of the phenomenon", 9,
                    "Nested quotes kept verbatim.", 15));
    v.push_back(rec("2101.00009", "Elided quote", "R. Roe", "Quote with an elision.",
                    "The lemma is true ... but it does not tell us why", 2, "Elision marker kept.", 16));
    v.push_back(rec("2101.00010", "Parenthetical inside quote", "K. Gauss",
                    "Quote mentions a page mid-sentence.",
                    "As shown (p. 4) the identity follows from symmetry", 12,
                    "Only the trailing page marker is taken as the page.", 16));
    v.push_back(rec("math0003117", "Explanatory proofs in combinatorics", "P. Erd\xC5\x91s and J. Spencer",
                    "Bijective proof preferred over induction.",
                    "The bijection explains why the two counts agree, whereas induction merely verifies it", 17,
                    "Classic contrast between explanatory and non-explanatory proof.", 21));
    v.push_back(rec("2101.00012", "Colons: in the title", "A. Author", "Finding: with a colon later",
                    "Ratio 3:2 appears", 1, "Commentary: also with a colon.", 22));
    v.push_back(rec("2101.00013", "Title only finding", std::nullopt, "Just a finding, nothing else.", std::nullopt,
                    std::nullopt, "", 23));
    v.push_back(rec("2101.00014", "Large page number", "Z. Author", "A long monograph.",
                    "The deepest reason lies in the representation theory", 1234, "Monograph page.", 199));
    v.push_back(rec("2101.00015", "Symbols & markup-like text", "M. Math",
                    "Expression a*b*c and x_1 appear mid-text.", "Since a*b = b*a the result is symmetric", 33,
                    "Markup characters in the middle of values are plain text.", 199));
    return v;
}

}  // namespace

const std::vector<ExampleRecord>& canonical_records() {
    static const auto v = build_canonical();
    return v;
}

}  // namespace testsupport
