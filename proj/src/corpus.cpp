#include "agenda/corpus.hpp"

#include "agenda/csv.hpp"
#include "agenda/log.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace agenda {

namespace {

std::unordered_map<std::string, std::string> read_key_values(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open config " + path.string());
    std::unordered_map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
    return kv;
}

std::vector<std::string> read_word_list(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open word list " + path.string());
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (!s.empty() && s.front() != '#')
            words.push_back(s);
    }
    return words;
}

} // namespace

std::vector<std::string> default_stopwords()
{
    // Snowball English list
    return {"i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours", "yourself",
            "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself",
            "they", "them", "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that",
            "these", "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had",
            "having", "do", "does", "did", "doing", "would", "should", "could", "ought", "i'm", "you're", "he's",
            "she's", "it's", "we're", "they're", "i've", "you've", "we've", "they've", "i'd", "you'd", "he'd",
            "she'd", "we'd", "they'd", "i'll", "you'll", "he'll", "she'll", "we'll", "they'll", "isn't",
            "aren't", "wasn't", "weren't", "hasn't", "haven't", "hadn't", "doesn't", "don't", "didn't", "won't",
            "wouldn't", "shan't", "shouldn't", "can't", "cannot", "couldn't", "mustn't", "let's", "that's",
            "who's", "what's", "here's", "there's", "when's", "where's", "why's", "how's", "a", "an", "the",
            "and", "but", "if", "or", "because", "as", "until", "while", "of", "at", "by", "for", "with",
            "about", "against", "between", "into", "through", "during", "before", "after", "above", "below",
            "to", "from", "up", "down", "in", "out", "on", "off", "over", "under", "again", "further", "then",
            "once", "here", "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
            "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than", "too",
            "very"};
}

std::vector<std::string> default_multiwords()
{
    return {"new south wales", "south australia", "western australia", "northern territory",
            "australian capital territory", "prime minister", "united states", "united nations",
            "united kingdom", "great britain", "new zealand", "high court", "per cent", "royal commission",
            "labor party", "liberal party", "standing orders", "governor general", "commonwealth bank",
            "child care", "defence force"};
}

void PreprocessConfig::add_stopword(std::string_view word)
{
    for (auto& t : tokenize(word))
        stopwords.insert(std::move(t));
}

void PreprocessConfig::add_multiword(std::string_view phrase)
{
    auto tokens = tokenize(phrase);
    if (tokens.size() >= 2)
        multiword.push_back(std::move(tokens));
}

PreprocessConfig PreprocessConfig::defaults()
{
    PreprocessConfig config;
    for (const auto& w : default_stopwords())
        config.add_stopword(w);
    for (const auto& m : default_multiwords())
        config.add_multiword(m);
    config.substitutions = SubstitutionTable::defaults();
    return config;
}

PreprocessConfig PreprocessConfig::load(const std::filesystem::path& path)
{
    return from_values(read_key_values(path), path.parent_path());
}

PreprocessConfig PreprocessConfig::from_values(const std::unordered_map<std::string, std::string>& kv,
                                               const std::filesystem::path& base)
{
    PreprocessConfig config = defaults();
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    if (auto it = kv.find("stopwords_path"); it != kv.end()) {
        config.stopwords.clear();
        for (const auto& w : read_word_list(resolve(it->second)))
            config.add_stopword(w);
    }
    if (auto it = kv.find("mwe_path"); it != kv.end()) {
        config.multiword.clear();
        for (const auto& m : read_word_list(resolve(it->second)))
            config.add_multiword(m);
    }
    if (auto it = kv.find("substitutions_path"); it != kv.end())
        config.substitutions = SubstitutionTable::load(resolve(it->second));
    if (auto it = kv.find("min_term_count"); it != kv.end()) {
        config.min_term_count = static_cast<int>(csv::parse_integer(it->second));
        if (config.min_term_count < 1)
            throw InputError("min_term_count must be >= 1");
    }
    return config;
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty())
            tokens.push_back(std::move(current));
        current.clear();
    };

    for (std::size_t i = 0; i < text.size();) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            if (c >= 'A' && c <= 'Z')
                current.push_back(static_cast<char>(c - 'A' + 'a'));
            else if ((c >= 'a' && c <= 'z') || c == '_')
                current.push_back(static_cast<char>(c));
            else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v')
                flush();
            // digits and other ASCII punctuation are deleted in place
            ++i;
            continue;
        }
        // multi-byte UTF-8 sequence
        std::size_t len = (c >= 0xF0) ? 4 : (c >= 0xE0) ? 3 : (c >= 0xC0) ? 2 : 1;
        len = std::min(len, text.size() - i);
        unsigned cp = 0;
        if (len == 2)
            cp = ((c & 0x1Fu) << 6) | (static_cast<unsigned char>(text[i + 1]) & 0x3Fu);
        else if (len == 3)
            cp = ((c & 0x0Fu) << 12) | ((static_cast<unsigned char>(text[i + 1]) & 0x3Fu) << 6) |
                 (static_cast<unsigned char>(text[i + 2]) & 0x3Fu);
        const bool separator = (cp >= 0x00A0 && cp <= 0x00BF) || (cp >= 0x2000 && cp <= 0x206F) || cp == 0x00D7 ||
                               (cp >= 0x3000 && cp <= 0x303F);
        if (separator)
            flush();
        else
            current.append(text.substr(i, len));
        i += len;
    }
    flush();
    return tokens;
}

std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config)
{
    std::vector<std::string> tokens = tokenize(text);
    if (config.substitutions.size() > 0)
        for (auto& t : tokens)
            if (const auto* to = config.substitutions.lookup(t))
                t = *to;

    std::erase_if(tokens, [&](const std::string& t) { return config.stopwords.contains(t); });

    // multiword phrases are matched on the stopword-free sequence, which keeps
    // the whole transformation idempotent
    std::vector<std::vector<std::string>> phrases;
    phrases.reserve(config.multiword.size());
    for (const auto& mwe : config.multiword) {
        std::vector<std::string> p;
        for (const auto& t : mwe)
            if (!config.stopwords.contains(t))
                p.push_back(t);
        if (p.size() >= 2)
            phrases.push_back(std::move(p));
    }

    std::vector<std::string> joined;
    joined.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size();) {
        const std::vector<std::string>* best = nullptr;
        for (const auto& p : phrases) {
            if ((best && p.size() <= best->size()) || i + p.size() > tokens.size())
                continue;
            if (std::equal(p.begin(), p.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i)))
                best = &p;
        }
        if (best) {
            std::string token = (*best)[0];
            for (std::size_t k = 1; k < best->size(); ++k)
                token += "_" + (*best)[k];
            joined.push_back(std::move(token));
            i += best->size();
        } else {
            joined.push_back(std::move(tokens[i]));
            ++i;
        }
    }
    return joined;
}

Vocabulary::Vocabulary(std::vector<std::string> terms)
{
    for (auto& t : terms)
        add(t);
}

int Vocabulary::id(std::string_view term) const
{
    const auto it = index_.find(std::string(term));
    return it == index_.end() ? -1 : it->second;
}

int Vocabulary::add(const std::string& term)
{
    const auto [it, inserted] = index_.emplace(term, size());
    if (inserted)
        terms_.push_back(term);
    return it->second;
}

long long DocTermMatrix::doc_length(int d) const
{
    long long n = 0;
    for (CountMatrix::InnerIterator it(counts, d); it; ++it)
        n += it.value();
    return n;
}

long long DocTermMatrix::total_tokens() const
{
    long long n = 0;
    for (int d = 0; d < rows(); ++d)
        n += doc_length(d);
    return n;
}

DocTermMatrix DocTermMatrix::select_rows(const std::vector<int>& rows) const
{
    std::vector<Eigen::Triplet<int>> trips;
    DocTermMatrix out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (CountMatrix::InnerIterator it(counts, rows[i]); it; ++it)
            trips.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), it.value());
        if (!docs.empty())
            out.docs.push_back(docs.at(static_cast<std::size_t>(rows[i])));
    }
    out.counts.resize(static_cast<Eigen::Index>(rows.size()), counts.cols());
    out.counts.setFromTriplets(trips.begin(), trips.end());
    return out;
}

DocTermMatrix make_dtm(const Eigen::MatrixXi& dense, std::vector<DocKey> docs)
{
    DocTermMatrix dtm;
    dtm.docs = std::move(docs);
    dtm.counts = dense.sparseView();
    dtm.counts.makeCompressed();
    return dtm;
}

CorpusMatrix build_matrix(const std::vector<TidyRow>& rows, const PreprocessConfig& config)
{
    if (rows.empty())
        throw InputError("empty corpus");

    // documents in (date, chamber) order, turns in file order within a document
    std::map<DocKey, std::vector<const TidyRow*>> by_doc;
    for (const auto& r : rows)
        by_doc[DocKey{r.chamber, r.date}].push_back(&r);

    std::vector<DocKey> keys;
    std::vector<std::vector<int>> doc_tokens;
    Vocabulary full;
    std::vector<long long> term_total;
    for (const auto& [key, turns] : by_doc) {
        std::vector<int> ids;
        for (const auto* r : turns)
            for (const auto& t : preprocess(r->text, config)) {
                const int id = full.add(t);
                if (id == static_cast<int>(term_total.size()))
                    term_total.push_back(0);
                ++term_total[static_cast<std::size_t>(id)];
                ids.push_back(id);
            }
        keys.push_back(key);
        doc_tokens.push_back(std::move(ids));
    }

    std::vector<int> remap(term_total.size(), -1);
    CorpusMatrix result;
    for (std::size_t v = 0; v < term_total.size(); ++v)
        if (term_total[v] >= config.min_term_count)
            remap[v] = result.vocabulary.add(full.term(static_cast<int>(v)));

    std::vector<Eigen::Triplet<int>> trips;
    for (std::size_t d = 0; d < keys.size(); ++d) {
        std::map<int, int> counts;
        for (int id : doc_tokens[d])
            if (remap[static_cast<std::size_t>(id)] >= 0)
                ++counts[remap[static_cast<std::size_t>(id)]];
        if (counts.empty()) {
            result.dropped.push_back(keys[d]);
            warn("dropping " + std::string(to_string(keys[d].chamber)) + " " + format_date(keys[d].date) +
                 ": no tokens after preprocessing");
            continue;
        }
        const int row = static_cast<int>(result.dtm.docs.size());
        for (const auto& [col, n] : counts)
            trips.emplace_back(row, col, n);
        result.dtm.docs.push_back(keys[d]);
    }
    if (result.dtm.docs.empty())
        throw InputError("corpus has no tokens after preprocessing");
    result.dtm.counts.resize(static_cast<Eigen::Index>(result.dtm.docs.size()), result.vocabulary.size());
    result.dtm.counts.setFromTriplets(trips.begin(), trips.end());
    result.dtm.counts.makeCompressed();
    return result;
}

int SittingCalendar::period_of(Date day) const
{
    const auto it = std::lower_bound(days.begin(), days.end(), day);
    if (it == days.end() || *it != day)
        throw InputError(format_date(day) + " is not a sitting day");
    return period_of_day[static_cast<std::size_t>(it - days.begin())];
}

SittingCalendar derive_sitting_periods(std::vector<Date> days)
{
    if (days.empty())
        throw InputError("no sitting days");
    std::sort(days.begin(), days.end());
    days.erase(std::unique(days.begin(), days.end()), days.end());

    SittingCalendar cal;
    cal.period_of_day.reserve(days.size());
    int period = 0;
    for (std::size_t i = 0; i < days.size(); ++i) {
        if (i > 0 && days_between(days[i - 1], days[i]) >= kPeriodGapDays)
            ++period;
        cal.period_of_day.push_back(period);
    }
    cal.period_count = period + 1;
    cal.days = std::move(days);
    return cal;
}

std::vector<std::string> default_probe_words() { return {"and", "be", "of", "the", "to"}; }

std::vector<DayShare> stopword_share(const std::vector<TidyRow>& rows, const std::vector<std::string>& probe)
{
    const std::unordered_set<std::string> probe_set(probe.begin(), probe.end());
    std::map<DocKey, DayShare> by_doc;
    for (const auto& r : rows) {
        auto& entry = by_doc[DocKey{r.chamber, r.date}];
        entry.doc = DocKey{r.chamber, r.date};
        for (const auto& t : tokenize(r.text)) {
            ++entry.total_count;
            if (probe_set.contains(t))
                ++entry.probe_count;
        }
    }
    std::vector<DayShare> out;
    out.reserve(by_doc.size());
    for (auto& [key, entry] : by_doc) {
        entry.share = entry.total_count > 0 ? static_cast<double>(entry.probe_count) / entry.total_count : 0.0;
        out.push_back(entry);
    }
    return out;
}

void write_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path.string());
    for (const auto& t : vocab.terms())
        out << t << '\n';
}

Vocabulary read_vocabulary(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path.string());
    Vocabulary vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (vocab.id(line) >= 0)
            throw InputError(path.string() + ": duplicate term '" + line + "'");
        vocab.add(line);
    }
    return vocab;
}

void write_triplets(std::ostream& out, const DocTermMatrix& dtm)
{
    out << "doc_id,term_id,count\n";
    for (int d = 0; d < dtm.rows(); ++d)
        for (CountMatrix::InnerIterator it(dtm.counts, d); it; ++it)
            out << d << ',' << it.col() << ',' << it.value() << '\n';
}

DocTermMatrix read_triplets(const std::filesystem::path& path, int rows, int cols)
{
    const auto table = csv::Table::read(path);
    const auto cd = table.column("doc_id"), ct = table.column("term_id"), cc = table.column("count");
    std::vector<Eigen::Triplet<int>> trips;
    trips.reserve(table.size());
    for (const auto& r : table.rows()) {
        const auto d = csv::parse_integer(r[cd]), t = csv::parse_integer(r[ct]), n = csv::parse_integer(r[cc]);
        if (d < 0 || d >= rows || t < 0 || t >= cols || n < 0)
            throw InputError(path.string() + ": triplet out of range");
        trips.emplace_back(static_cast<int>(d), static_cast<int>(t), static_cast<int>(n));
    }
    DocTermMatrix dtm;
    dtm.counts.resize(rows, cols);
    dtm.counts.setFromTriplets(trips.begin(), trips.end());
    dtm.counts.makeCompressed();
    return dtm;
}

void write_docs(std::ostream& out, const std::vector<DocKey>& docs)
{
    out << "doc_id,chamber,date\n";
    for (std::size_t d = 0; d < docs.size(); ++d)
        out << d << ',' << to_string(docs[d].chamber) << ',' << format_date(docs[d].date) << '\n';
}

std::vector<DocKey> read_docs(const std::filesystem::path& path)
{
    const auto table = csv::Table::read(path);
    const auto cid = table.column("doc_id"), cc = table.column("chamber"), cd = table.column("date");
    std::vector<DocKey> docs;
    for (const auto& r : table.rows()) {
        if (csv::parse_integer(r[cid]) != static_cast<long long>(docs.size()))
            throw InputError(path.string() + ": doc ids must be 0..D-1 in order");
        docs.push_back(DocKey{parse_chamber(r[cc]), parse_date(r[cd])});
    }
    return docs;
}

void write_calendar(std::ostream& out, const SittingCalendar& calendar, const std::vector<DocKey>& docs)
{
    out << "date,chamber,period_id\n";
    for (const auto& d : docs)
        out << format_date(d.date) << ',' << to_string(d.chamber) << ',' << calendar.period_of(d.date) << '\n';
}

} // namespace agenda
