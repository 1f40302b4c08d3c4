#include "explcorpus/analytics.hpp"
#include "explcorpus/error.hpp"

#include "detail/fs_util.hpp"

#include <cstdarg>
#include <cstdio>

namespace explcorpus {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::string row(std::string_view label, std::uint64_t cn, double cs, std::uint64_t dn, double ds,
                const std::string& coef) {
    return fmt("%-28.*s %9llu %8.1f %10llu %10.1f %6s\n", static_cast<int>(label.size()), label.data(),
               static_cast<unsigned long long>(cn), cs * 100.0, static_cast<unsigned long long>(dn), ds * 100.0,
               coef.c_str());
}

}  // namespace

std::string render_report(const ReportInputs& in) {
    std::string out = "Subject-area distribution and explanatory richness\n\n";
    out += fmt("%-28s %9s %8s %10s %10s %6s\n", "Area", "Corpus n", "C %", "Dataset n", "D %", "D/C");
    for (const auto& r : richness_table(in.corpus, in.dataset)) {
        out += row(display_name(r.area), in.corpus.count(r.area), r.corpus_share, in.dataset.count(r.area),
                   r.dataset_share, r.coefficient ? fmt("%.2f", *r.coefficient) : "-");
    }
    out += row("Other (outside the table)", in.corpus.count(SubjectArea::Other), in.corpus.share(SubjectArea::Other),
               in.dataset.count(SubjectArea::Other), in.dataset.share(SubjectArea::Other), "");
    out += row("Total", in.corpus.total(), in.corpus.empty() ? 0.0 : 1.0, in.dataset.total(),
               in.dataset.empty() ? 0.0 : 1.0, "");
    if (!in.unresolved_doc_ids.empty()) {
        out += fmt("\nSources missing from the manifest (excluded): %zu\n", in.unresolved_doc_ids.size());
        for (const auto& id : in.unresolved_doc_ids) out += "  " + id + "\n";
    }

    out += "\nPrevalence\n\n";
    out += fmt("Tiers used: high %.2f, borderline %.2f, low %.2f\n", in.tiers.high, in.tiers.borderline,
               in.tiers.low);
    if (in.dataset.empty() || in.corpus.empty()) {
        out += fmt("Contributing papers: 0 of %llu\n", static_cast<unsigned long long>(in.corpus.total()));
        out += "No contributing papers; coefficients and rates not computed.\n";
        return out;
    }
    const auto p = prevalence_estimate(std::min(in.dataset.total(), in.corpus.total()), in.corpus.total(), in.tiers);
    out += fmt("Contributing papers: %llu of %llu\n", static_cast<unsigned long long>(p.contributing_papers),
               static_cast<unsigned long long>(p.total_papers));
    out += fmt("Clear explanation claims: %.1f%% (%.4f)\n", p.clear_rate * 100.0, p.clear_rate);
    out += fmt("Borderline or better: %.1f%% (%.4f)\n", p.borderline_or_better_rate * 100.0,
               p.borderline_or_better_rate);
    return out;
}

std::string render_richness_csv(const ReportInputs& in) {
    std::string out = "area,corpus_count,corpus_share,dataset_count,dataset_share,coefficient\n";
    auto line = [&](SubjectArea a, const std::optional<double>& coef) {
        out += fmt("%.*s,%llu,%.6f,%llu,%.6f,", static_cast<int>(to_string(a).size()), to_string(a).data(),
                   static_cast<unsigned long long>(in.corpus.count(a)), in.corpus.share(a),
                   static_cast<unsigned long long>(in.dataset.count(a)), in.dataset.share(a));
        if (coef) out += fmt("%.6f", *coef);
        out += '\n';
    };
    for (const auto& r : richness_table(in.corpus, in.dataset)) line(r.area, r.coefficient);
    line(SubjectArea::Other, std::nullopt);
    return out;
}

ReportFiles emit_report(const ReportInputs& in, const fs::path& destination) {
    std::error_code ec;
    fs::create_directories(destination, ec);
    if (ec) throw IoError(destination, ec.message());
    ReportFiles files{destination / "report.txt", destination / "richness.csv"};
    detail::write_file_atomic(files.text, render_report(in));
    detail::write_file_atomic(files.csv, render_richness_csv(in));
    return files;
}

}  // namespace explcorpus
