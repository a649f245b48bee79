#include "support.hpp"

#include "agenda/record_parser.hpp"

#include <doctest.h>

#include <sstream>

using namespace agenda;

namespace {

const Date kDay = parse_date("2010-03-01");

std::vector<std::string> texts(const std::vector<PageLine>& lines)
{
    std::vector<std::string> out;
    for (const auto& l : lines)
        out.push_back(l.text);
    return out;
}

std::vector<std::string> split_lines(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("column reflow puts the left column first within a region")
{
    const RawPage page = parse_page("L|L1\nR|R1\nL|L2\nR|R2\n", Chamber::Senate, kDay);
    CHECK(texts(reflow_columns(page)) == std::vector<std::string>{"L1", "L2", "R1", "R2"});
}

TEST_CASE("a page of full-width lines keeps its order")
{
    const RawPage page = parse_page("F|one\nF|two\nF|three\n", Chamber::Senate, kDay);
    CHECK(texts(reflow_columns(page)) == std::vector<std::string>{"one", "two", "three"});
}

TEST_CASE("two-region fixture matches the hand-ordered golden file")
{
    const RawPage page = parse_page(test::slurp(test::fixture("reflow_page.txt")), Chamber::HouseOfRepresentatives, kDay);
    CHECK(texts(reflow_columns(page)) == split_lines(test::slurp(test::fixture("reflow_expected.txt"))));
}

TEST_CASE("untagged line inside a two-column region names its line number")
{
    const RawPage page = parse_page("F|top\nL|left\nstray\nR|right\n", Chamber::Senate, kDay);
    try {
        (void)reflow_columns(page);
        FAIL("expected an InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("untagged lines alone form their own region")
{
    const RawPage page = parse_page("plain text\nmore text\n", Chamber::Senate, kDay);
    CHECK(texts(reflow_columns(page)) == std::vector<std::string>{"plain text", "more text"});
}

TEST_CASE("page file names carry chamber and date")
{
    const auto [c, d] = parse_page_filename("senate_1901-05-09.txt");
    CHECK(c == Chamber::Senate);
    CHECK(d == parse_date("1901-05-09"));
    CHECK(parse_page_filename("hor_2010-03-01.txt").first == Chamber::HouseOfRepresentatives);
    CHECK_THROWS_AS(parse_page_filename("senate-1901-05-09.txt"), InputError);
    CHECK_THROWS_AS(parse_page_filename("senate_1901-13-09.txt"), InputError);
    CHECK_THROWS_AS(parse_page_filename("lords_1901-05-09.txt"), InputError);
    CHECK_THROWS_AS(parse_page_filename("senate_1901-05-09.csv"), InputError);
}

TEST_CASE("two introductions give two turns")
{
    const auto turns = split_speakers(std::string_view("Mr SMITH— Hello. Mr JONES— Reply."), Chamber::HouseOfRepresentatives,
                                      kDay, SpeakerPatterns::defaults());
    REQUIRE(turns.size() == 2);
    CHECK(turns[0].speaker == "SMITH");
    CHECK(turns[0].text == "Hello.");
    CHECK(turns[1].speaker == "JONES");
    CHECK(turns[1].text == "Reply.");
    CHECK(turns[1].turn_index == 1);
}

TEST_CASE("text without an introduction is one unattributed turn")
{
    const auto turns = split_speakers(std::string_view("Question put and passed."), Chamber::Senate, kDay,
                                      SpeakerPatterns::defaults());
    REQUIRE(turns.size() == 1);
    CHECK(turns[0].speaker == kUnattributed);
    CHECK(turns[0].text == "Question put and passed.");
}

TEST_CASE("empty stream gives no turns")
{
    CHECK(split_speakers(std::vector<PageLine>{}, Chamber::Senate, kDay, SpeakerPatterns::defaults()).empty());
    CHECK(split_speakers(std::string_view("  \n "), Chamber::Senate, kDay, SpeakerPatterns::defaults()).empty());
}

TEST_CASE("presiding officers, electorates and multiword surnames")
{
    const auto turns = split_speakers(
        std::string_view("The DEPUTY SPEAKER— Order. Mr VAN MANEN (Forde) — Thanks. Senator O'BRIEN -- Yes."),
        Chamber::HouseOfRepresentatives, kDay, SpeakerPatterns::defaults());
    REQUIRE(turns.size() == 3);
    CHECK(turns[0].speaker == "DEPUTY SPEAKER");
    CHECK(turns[1].speaker == "VAN MANEN");
    CHECK(turns[1].text == "Thanks.");
    CHECK(turns[2].speaker == "O'BRIEN");
}

TEST_CASE("custom speaker patterns use capture group 1")
{
    const auto p = SpeakerPatterns::from_strings({R"(([A-Z]+):)"});
    const auto turns = split_speakers(std::string_view("ALICE: hi BOB: hey"), Chamber::Senate, kDay, p);
    REQUIRE(turns.size() == 2);
    CHECK(turns[0].speaker == "ALICE");
    CHECK(turns[1].text == "hey");
    CHECK_THROWS_AS(SpeakerPatterns::from_strings({"("}), InputError);
}

TEST_CASE("export keeps one row per turn in order")
{
    const auto turns = split_speakers(std::string_view("Mr AX— one. Mr BY— two."), Chamber::Senate, kDay,
                                      SpeakerPatterns::defaults());
    const auto rows = export_tidy(turns);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].speaker == "AX");
    CHECK(rows[1].speaker == "BY");
}

TEST_CASE("tidy export and import round-trip")
{
    const auto turns = split_speakers(std::string_view("lead in Mr AX— one, \"two\". Mr BY— three\nfour."), Chamber::Senate,
                                      kDay, SpeakerPatterns::defaults());
    std::stringstream buf;
    write_tidy_csv(buf, export_tidy(turns));
    const auto back = import_tidy(read_tidy_csv(buf));
    REQUIRE(back.size() == turns.size());
    for (std::size_t i = 0; i < turns.size(); ++i) {
        CHECK(back[i].speaker == turns[i].speaker);
        CHECK(back[i].text == turns[i].text);
        CHECK(back[i].date == turns[i].date);
        CHECK(back[i].chamber == turns[i].chamber);
        CHECK(back[i].turn_index == turns[i].turn_index);
    }
}

TEST_CASE("five-turn day across both chambers matches the golden CSV")
{
    std::vector<TidyRow> rows;
    for (const char* name : {"hor_2010-03-01.txt", "senate_2010-03-01.txt"}) {
        const RawPage page = load_page(test::fixture("pages") / name);
        const auto day = export_tidy(split_speakers(reflow_columns(page), page.chamber, page.date, SpeakerPatterns::defaults()));
        rows.insert(rows.end(), day.begin(), day.end());
    }
    int attributed = 0;
    for (const auto& r : rows)
        attributed += r.speaker != kUnattributed;
    CHECK(attributed == 5);

    std::ostringstream out;
    write_tidy_csv(out, rows);
    const auto golden = split_lines(test::slurp(test::fixture("golden_tidy.csv")));
    const std::vector<std::string> expected(golden.begin(), golden.begin() + 1 + static_cast<long>(rows.size()));
    CHECK(split_lines(out.str()) == expected);
}

TEST_CASE("OCR substitutions are whole-word")
{
    SubstitutionTable t;
    t.add("thc", "the");
    REQUIRE(t.lookup("thc"));
    CHECK(*t.lookup("thc") == "the");
    CHECK(t.lookup("thcx") == nullptr);
}
