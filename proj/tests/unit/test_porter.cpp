#include <gtest/gtest.h>

#include <utility>
#include <vector>

#include "topicbench/porter.hpp"

// Vectors from the published Porter test vocabulary (reference C behavior).
TEST(Porter, PublishedVectors) {
    const std::vector<std::pair<const char*, const char*>> cases = {
        {"caresses", "caress"}, {"ponies", "poni"}, {"ties", "ti"}, {"agreed", "agre"},
        {"motoring", "motor"}, {"conflated", "conflat"}, {"hopping", "hop"}, {"filing", "file"},
        {"happy", "happi"}, {"relational", "relat"}, {"conditional", "condit"},
        {"digitizer", "digit"}, {"conformabli", "conform"}, {"vietnamization", "vietnam"},
        {"decisiveness", "decis"}, {"sensibiliti", "sensibl"}, {"electrical", "electr"},
        {"adjustable", "adjust"}, {"bowdlerize", "bowdler"}, {"generalizations", "gener"},
        {"oscillators", "oscil"}, {"charged", "charg"}, {"fraudulent", "fraudul"},
        {"identity", "ident"}, {"reporting", "report"}, {"archaeology", "archaeolog"},
        {"generously", "gener"}, {"anomaly", "anomali"}, {"sky", "sky"}, {"sized", "size"},
        {"falling", "fall"}, {"hissing", "hiss"}, {"fizzed", "fizz"}, {"tanned", "tan"},
        {"troubled", "troubl"}, {"plastered", "plaster"}, {"bled", "bled"}, {"feed", "feed"},
        {"sing", "sing"}, {"controll", "control"}, {"cease", "ceas"}, {"probate", "probat"},
        {"rate", "rate"}, {"roll", "roll"},
    };
    for (const auto& [in, out] : cases) EXPECT_EQ(topicbench::porter_stem(in), out) << in;
}

TEST(Porter, ShortWordsUnchanged) {
    EXPECT_EQ(topicbench::porter_stem("as"), "as");
    EXPECT_EQ(topicbench::porter_stem("a"), "a");
    EXPECT_EQ(topicbench::porter_stem(""), "");
}
