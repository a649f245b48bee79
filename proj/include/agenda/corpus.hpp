#pragma once

#include "agenda/common.hpp"
#include "agenda/record_parser.hpp"

#include <Eigen/SparseCore>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace agenda {

struct PreprocessConfig {
    std::unordered_set<std::string> stopwords;
    /// Multiword expressions as token sequences, e.g. {"new", "south", "wales"}.
    std::vector<std::vector<std::string>> multiword;
    SubstitutionTable substitutions;
    int min_term_count = 5;

    /// Built-in English stopword list, parliamentary multiword list and OCR
    /// substitutions; min_term_count 5.
    static PreprocessConfig defaults();

    /// Key-value file (`key = value`, '#' comments) with optional keys
    /// `stopwords_path`, `mwe_path`, `substitutions_path`, `min_term_count`.
    /// Relative paths resolve against the config file's directory; missing
    /// keys keep the defaults.
    static PreprocessConfig load(const std::filesystem::path& path);
    /// Same keys from a map; relative paths resolve against `base`.
    static PreprocessConfig from_values(const std::unordered_map<std::string, std::string>& values,
                                        const std::filesystem::path& base = {});

    void add_stopword(std::string_view word);
    void add_multiword(std::string_view phrase);
};

/// Lowercases ASCII, deletes digits and ASCII punctuation (keeping '_'),
/// treats Unicode punctuation and whitespace as separators.
std::vector<std::string> tokenize(std::string_view text);

/// Full pipeline: substitutions, tokenize, stopword removal, then multiword
/// joining (longest match first, phrases matched without their stopwords).
/// No stemming.
std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config);

std::vector<std::string> default_stopwords();
std::vector<std::string> default_multiwords();

class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> terms);

    /// Id of `term`, or -1 when absent.
    int id(std::string_view term) const;
    int add(const std::string& term);
    const std::string& term(int id) const { return terms_.at(static_cast<std::size_t>(id)); }
    const std::vector<std::string>& terms() const { return terms_; }
    int size() const { return static_cast<int>(terms_.size()); }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, int> index_;
};

using CountMatrix = Eigen::SparseMatrix<int, Eigen::RowMajor>;

/// Day-level word counts: rows are documents, columns vocabulary terms.
struct DocTermMatrix {
    std::vector<DocKey> docs; ///< may be empty for synthetic corpora
    CountMatrix counts;

    int rows() const { return static_cast<int>(counts.rows()); }
    int cols() const { return static_cast<int>(counts.cols()); }
    long long doc_length(int d) const;
    long long total_tokens() const;
    /// Sub-matrix of the given rows, in the given order.
    DocTermMatrix select_rows(const std::vector<int>& rows) const;
};

DocTermMatrix make_dtm(const Eigen::MatrixXi& dense, std::vector<DocKey> docs = {});

struct CorpusMatrix {
    Vocabulary vocabulary;
    DocTermMatrix dtm;
    std::vector<DocKey> dropped; ///< documents left with no tokens
};

/// One document per (chamber, date), ordered by date then chamber. Term ids
/// follow first appearance; terms with corpus count below min_term_count are
/// removed. Throws InputError on an empty corpus.
CorpusMatrix build_matrix(const std::vector<TidyRow>& rows, const PreprocessConfig& config);

/// Groups sitting days into periods: a new period starts whenever the gap to
/// the previous sitting day is 7 or more calendar days.
struct SittingCalendar {
    std::vector<Date> days;
    std::vector<int> period_of_day;
    int period_count = 0;

    /// Period id of a sitting day; throws InputError for a non-sitting day.
    int period_of(Date day) const;
};

inline constexpr int kPeriodGapDays = 7;

SittingCalendar derive_sitting_periods(std::vector<Date> days);

struct DayShare {
    DocKey doc;
    long long probe_count = 0;
    long long total_count = 0;
    double share = 0.0;
};

std::vector<std::string> default_probe_words();

/// Proportion of raw (pre-stopword) tokens per day that are probe words.
std::vector<DayShare> stopword_share(const std::vector<TidyRow>& rows,
                                     const std::vector<std::string>& probe = default_probe_words());

// File formats
void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary read_vocabulary(const std::filesystem::path& path);
/// Sparse triplets `doc_id,term_id,count`, row-major order.
void write_triplets(std::ostream& out, const DocTermMatrix& dtm);
DocTermMatrix read_triplets(const std::filesystem::path& path, int rows, int cols);
/// `doc_id,chamber,date`
void write_docs(std::ostream& out, const std::vector<DocKey>& docs);
std::vector<DocKey> read_docs(const std::filesystem::path& path);
/// `date,chamber,period_id`, one row per document.
void write_calendar(std::ostream& out, const SittingCalendar& calendar, const std::vector<DocKey>& docs);

} // namespace agenda
