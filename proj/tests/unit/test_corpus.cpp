#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "topicbench/corpus.hpp"
#include "topicbench/error.hpp"

using namespace topicbench;
using Tokens = std::vector<std::string>;

namespace {

const std::string kHeader =
    "Date received,Product,Consumer complaint narrative,Company,Complaint ID\n";

std::string error_of(const std::string& csv) {
    try {
        parse_complaints(csv);
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Ingest, KeepsNarrativeVerbatim) {
    auto r = parse_complaints(kHeader + "2023-01-02,Mortgage,\"Late fee, again\",Acme,11\n"
                                        "01/03/2023,Card,Charged twice,Beta,12\n");
    ASSERT_EQ(r.complaints.size(), 2u);
    EXPECT_EQ(r.complaints[0].narrative, "Late fee, again");
    EXPECT_EQ(r.complaints[0].complaint_id, 11);
    EXPECT_EQ(r.complaints[1].narrative, "Charged twice");
    EXPECT_EQ(r.complaints[1].product, "Card");
    ASSERT_TRUE(r.complaints[1].date_received);
    EXPECT_EQ(*r.complaints[1].date_received,
              std::chrono::year_month_day(std::chrono::year(2023), std::chrono::month(1),
                                          std::chrono::day(3)));
    EXPECT_EQ(r.total_rows, 2u);
    EXPECT_EQ(r.dropped_rows, 0u);
}

TEST(Ingest, EmptyNarrativeIsDroppedAndCounted) {
    auto r = parse_complaints(kHeader + "2023-01-02,Mortgage,,Acme,11\n"
                                        "2023-01-02,Mortgage,\"  \",Acme,12\n"
                                        "2023-01-02,Mortgage,text,Acme,13\n");
    ASSERT_EQ(r.complaints.size(), 1u);
    EXPECT_EQ(r.complaints[0].complaint_id, 13);
    EXPECT_EQ(r.dropped_rows, 2u);
    EXPECT_EQ(r.total_rows, 3u);
}

TEST(Ingest, MissingColumnIsNamed) {
    try {
        parse_complaints("Complaint ID,Product\n1,x\n");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("Consumer complaint narrative"), std::string::npos);
    }
}

TEST(Ingest, DuplicateIdBadIdAndBadDateAreRejected) {
    EXPECT_NE(error_of(kHeader + ",P,a,C,5\n,P,b,C,5\n").find("duplicate complaint id 5"),
              std::string::npos);
    EXPECT_NE(error_of(kHeader + ",P,a,C,5x\n").find("not an integer"), std::string::npos);
    EXPECT_NE(error_of(kHeader + "2023-13-40,P,a,C,5\n").find("unrecognized date"),
              std::string::npos);
    EXPECT_NE(error_of(kHeader + ",P,a,C\n").find("record 2"), std::string::npos);
}

TEST(Ingest, MissingFileIsInputError) {
    EXPECT_THROW(load_csv("/nonexistent/complaints.csv"), InputError);
}

TEST(Ingest, FixtureMatchesReferenceParser) {
    const auto path = std::filesystem::path(TOPICBENCH_TEST_DATA) / "cfpb_fixture.csv";
    auto r = load_csv(path);
    EXPECT_EQ(r.total_rows, 2000u);
    EXPECT_EQ(r.dropped_rows, 10u);
    ASSERT_EQ(r.complaints.size(), 1990u);
    // Expected text from Python's csv module on the same file.
    EXPECT_EQ(r.complaints[0].complaint_id, 4000000);
    EXPECT_EQ(r.complaints[0].narrative,
              "On\nXX/XX/XXXX I paid $3450.00, escrow service month days escrow refinance company "
              "lender mortgage customer mortgage told letter escrow foreclosure received time "
              "servicer mortgage foreclosure called contacted manager time company information "
              "received, and then XXXX said \"wait\".");
}

TEST(Tokenize, LetterRuns) {
    EXPECT_EQ(tokenize("Charged a late fee, twice!"),
              (Tokens{"charged", "a", "late", "fee", "twice"}));
    EXPECT_EQ(tokenize(""), Tokens{});
}

TEST(Tokenize, RedactionsAndDigitsDropped) {
    EXPECT_EQ(tokenize("XXXX owed 100"), Tokens{"owed"});
    EXPECT_EQ(tokenize("XX/XX/2020 x marks"), (Tokens{"x", "marks"}));
}

TEST(Tokenize, UnicodeLettersAreLowercased) {
    EXPECT_EQ(tokenize("Café ÉCOLE naïve"), (Tokens{"café", "école", "naïve"}));
}

TEST(Normalize, StemAndStopwords) {
    EXPECT_EQ(normalize({"charged", "a", "late", "fee"}, StopwordSet{"a"}, true),
              (Tokens{"charg", "late", "fee"}));
    EXPECT_EQ(normalize({"a", "the"}, StopwordSet{"a", "the"}, true), Tokens{});
    EXPECT_EQ(normalize({"charged", "a", "fees"}, StopwordSet{"a"}, false),
              (Tokens{"charged", "fees"}));
}

TEST(Normalize, LemmaDictionaryRunsBeforeStemming) {
    NormalizeOptions opts;
    opts.stopwords = {};
    opts.lemmas = {{"paid", "pay"}};
    // "pay" then stems to "pai", the same stem as "paying"
    EXPECT_EQ(normalize({"paid", "paying"}, opts), (Tokens{"pai", "pai"}));
    EXPECT_EQ(normalize_word("paid", opts), "pai");
    opts.stem = false;
    EXPECT_EQ(normalize({"paid", "paying"}, opts), (Tokens{"pay", "paying"}));
}

TEST(Normalize, WordThatNormalizesAwayIsEmpty) {
    NormalizeOptions opts;
    EXPECT_EQ(normalize_word("the", opts), "");
    EXPECT_EQ(normalize_word("charged", opts), "charg");
}

TEST(Normalize, FingerprintTracksOptions) {
    NormalizeOptions a, b;
    EXPECT_EQ(a.fingerprint(), b.fingerprint());
    b.stem = false;
    EXPECT_NE(a.fingerprint(), b.fingerprint());
}

TEST(BuildCorpus, DeterministicAndOrdered) {
    auto r = parse_complaints(kHeader + ",P,Charged a late fee,C,2\n,P,Fee charged twice,C,1\n");
    NormalizeOptions opts;
    auto c1 = build_corpus(r.complaints, opts);
    auto c2 = build_corpus(r.complaints, opts);
    ASSERT_EQ(c1.size(), 2u);
    EXPECT_EQ(c1.documents[0].id, "2");
    EXPECT_EQ(c1.documents[1].id, "1");
    EXPECT_EQ(c1.documents[0].tokens, (Tokens{"charg", "late", "fee"}));
    for (std::size_t i = 0; i < c1.size(); ++i)
        EXPECT_EQ(c1.documents[i].tokens, c2.documents[i].tokens);
    EXPECT_EQ(c1.options_fingerprint, c2.options_fingerprint);
}
