// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "gknn/core_types.hpp"
#include "gknn/error.hpp"
#include "test_util.hpp"

using namespace gknn;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("classify_token") {
  CHECK(classify_token("<blk>") == TokenClass::kBlank);
  CHECK(classify_token("猫") == TokenClass::kCN);
  CHECK(classify_token("cat") == TokenClass::kEN);
  CHECK(classify_token("3") == TokenClass::kEN);
  CHECK(classify_token("a猫") == TokenClass::kCN);
  CHECK(classify_token("\xe3\x90\x80") == TokenClass::kCN);  // U+3400, extension A
  CHECK(kind_of([] { classify_token(""); }) == ErrorKind::kInvalidToken);
  CHECK(kind_of([] { classify_token("\xff\xfe"); }) == ErrorKind::kInvalidToken);
}

TEST_CASE("utf8 round trip") {
  const std::u32string cps = decode_utf8("我like猫");
  REQUIRE(cps.size() == 6);
  CHECK(cps[0] == U'我');
  CHECK(encode_utf8(U'猫') == "猫");
}

TEST_CASE("vocabulary validation") {
  CHECK_NOTHROW(Vocabulary({"<blk>"}));
  CHECK(kind_of([] { Vocabulary({"a", "<blk>"}); }) == ErrorKind::kInvalidToken);
  CHECK(kind_of([] { Vocabulary({"<blk>", "a", "a"}); }) == ErrorKind::kInvalidToken);
  CHECK(kind_of([] { Vocabulary({"<blk>", "a", "<blk>"}); }) == ErrorKind::kInvalidToken);
  CHECK(kind_of([] { Vocabulary(std::vector<std::string>{}); }) == ErrorKind::kInvalidToken);

  const Vocabulary v = testing::toy_vocab();
  CHECK(v.size() == 5);
  CHECK(v.token_class(0) == TokenClass::kBlank);
  CHECK(v.token_class(2) == TokenClass::kCN);
  CHECK(v.token_class(4) == TokenClass::kEN);
  CHECK(v.find("like") == TokenId{3});
  CHECK_FALSE(v.find("dog").has_value());
  CHECK(v.language_mask(Lang::kCN).isApprox(Eigen::ArrayXd::Map(std::vector<double>{0, 1, 1, 0, 0}.data(), 5)));
  CHECK(v.language_mask(Lang::kEN).sum() == 2.0);
}

TEST_CASE("vocabulary file round trip") {
  testing::TempDir dir("vocab");
  const Vocabulary v = testing::toy_vocab();
  v.save(dir / "v.txt");
  CHECK(Vocabulary::load(dir / "v.txt").tokens() == v.tokens());
  CHECK(kind_of([&] { Vocabulary::load(dir / "missing.txt"); }) == ErrorKind::kIo);
}

TEST_CASE("normalize examples") {
  const ProbDist a = normalize(Eigen::Vector2d(2, 2));
  CHECK(a[0] == 0.5);
  CHECK(a[1] == 0.5);

  const ProbDist b = normalize(Eigen::Vector3d(1, 0, 0));
  CHECK(b.values() == Eigen::Vector3d(1, 0, 0));

  const ProbDist c = normalize(Eigen::Vector2d(1, 3));
  CHECK(c[0] == 0.25);
  CHECK(c[1] == 0.75);
}

TEST_CASE("normalize rejects degenerate input") {
  CHECK(kind_of([] { normalize(Eigen::Vector2d(0, 0)); }) == ErrorKind::kDegenerateDistribution);
  CHECK(kind_of([] { normalize(Eigen::Vector2d(-1, 2)); }) == ErrorKind::kDegenerateDistribution);
  CHECK(kind_of([] { normalize(Eigen::Vector2d(std::nan(""), 1)); }) ==
        ErrorKind::kDegenerateDistribution);
  CHECK(kind_of([] { normalize(Eigen::VectorXd(0)); }) == ErrorKind::kDegenerateDistribution);
  CHECK(kind_of([] { ProbDist::from_normalized(Eigen::Vector2d(0.5, 0.6)); }) ==
        ErrorKind::kDegenerateDistribution);
}

TEST_CASE("normalize is idempotent bit for bit") {
  const ProbDist p = normalize(Eigen::Vector4d(0.3, 1.7, 2.9, 0.1));
  CHECK(normalize(p) == p);
}

TEST_CASE("argmax ties go to the lowest id") {
  CHECK(normalize(Eigen::Vector3d(0.4, 0.4, 0.2)).argmax() == 0);
  CHECK(normalize(Eigen::Vector3d(0.2, 0.4, 0.4)).argmax() == 1);
  CHECK_FALSE(argmax_lowest(Eigen::Vector2d(1, std::nan(""))).has_value());
}

TEST_CASE("LogitMatrix") {
  Eigen::MatrixXd probs(2, 3);
  probs << 2, 1, 1, 0, 0, 5;
  const LogitMatrix m = LogitMatrix::from_probs(probs);
  CHECK(m.frames() == 2);
  CHECK(m.vocab_size() == 3);
  CHECK(m.row(0)[0] == 0.5);
  CHECK(m.row(1)[2] == 1.0);

  Eigen::MatrixXd logp(1, 2);
  logp << std::log(0.25), std::log(0.75);
  const LogitMatrix l = LogitMatrix::from_logprobs(logp);
  CHECK(l.row(0)[1] == doctest::Approx(0.75).epsilon(1e-12));

  Eigen::MatrixXd bad(1, 2);
  bad << std::nan(""), 1;
  CHECK(kind_of([&] { LogitMatrix::from_probs(bad); }) == ErrorKind::kInvalidLogits);
  CHECK(kind_of([&] { LogitMatrix::from_logprobs(bad); }) == ErrorKind::kInvalidLogits);
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 3);
  CHECK(kind_of([&] { LogitMatrix::from_probs(zero); }) == ErrorKind::kInvalidLogits);
}
