#include <gtest/gtest.h>

#include "wtk/unicode.hpp"

using namespace wtk;

TEST(Utf8, RoundTripsMultiByte) {
  const std::string s = "a\xC3\xA9\xE4\xB8\xAD\xF0\x9F\x98\x80";  // a é 中 😀
  const auto t = utf8_decode(s);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[1], U'é');
  EXPECT_EQ(t[3], U'\U0001F600');
  EXPECT_EQ(utf8_encode(t), s);
}

TEST(Utf8, RejectsMalformed) {
  for (const std::string bad : {"\xC0\xAF", "\xE0\x80\xAF", "\xED\xA0\x80", "\xC3", "\x80", "\xF5\x80\x80\x80",
                                "\xF4\x90\x80\x80"}) {
    try {
      utf8_decode(bad);
      ADD_FAILURE() << "accepted malformed input";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidUtf8);
    }
  }
}

TEST(Utf8, EncodeRejectsSurrogate) {
  const Text t(1, static_cast<char32_t>(0xD800));
  EXPECT_THROW(utf8_encode(t), Error);
}

TEST(Chars, WhitespaceAndWordChars) {
  EXPECT_TRUE(is_space(U' '));
  EXPECT_TRUE(is_space(U'\n'));
  EXPECT_TRUE(is_space(U'　'));
  EXPECT_FALSE(is_space(U'x'));
  EXPECT_TRUE(is_word_char(U'x'));
  EXPECT_TRUE(is_word_char(U'7'));
  EXPECT_TRUE(is_word_char(U'中'));
  EXPECT_TRUE(is_word_char(U'é'));
  EXPECT_FALSE(is_word_char(U'.'));
  EXPECT_FALSE(is_word_char(U'—'));
  EXPECT_FALSE(is_word_char(U'\U0001F600'));
}
