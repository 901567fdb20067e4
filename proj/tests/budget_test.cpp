#include "silcert/budget.hpp"

#include <gtest/gtest.h>

#include <random>

#include "silcert/error.hpp"

namespace silcert::budget {
namespace {

using classifier::CertifiedError;

CertifiedError certified(double value, double gamma) {
  return {Probability(0.0), Probability(0.0), Probability(value), Probability(gamma),
          classifier::DangerousKind::FirstKind};
}

TEST(PfdThreshold, BuiltInLevels) {
  EXPECT_EQ(pfd_threshold(SilLevel::SIL1).value(), 0.1);
  EXPECT_EQ(pfd_threshold(SilLevel::SIL4).value(), 0.0001);
  EXPECT_THROW(pfd_threshold(SilLevel::SIL2), NotSpecified);
  EXPECT_THROW(pfd_threshold(SilLevel::SIL3), NotSpecified);
}

TEST(PfdThreshold, ConfiguredIntermediateLevels) {
  ThresholdOverrides o;
  o.sil2 = 0.01;
  EXPECT_EQ(pfd_threshold(SilLevel::SIL2, o).value(), 0.01);
  EXPECT_THROW(pfd_threshold(SilLevel::SIL3, o), NotSpecified);
  o.sil3 = 2.0;
  EXPECT_THROW(pfd_threshold(SilLevel::SIL3, o), InvalidArgument);
}

TEST(ParseSil, AcceptsCommonSpellings) {
  EXPECT_EQ(parse_sil("SIL1"), SilLevel::SIL1);
  EXPECT_EQ(parse_sil("sil4"), SilLevel::SIL4);
  EXPECT_EQ(parse_sil("3"), SilLevel::SIL3);
  EXPECT_THROW(parse_sil("SIL5"), InvalidArgument);
}

TEST(Allocate, DefaultSplitForSil1) {
  const auto b = allocate(SilLevel::SIL1, 0.05, DefaultSplit{});
  EXPECT_EQ(b.ai_share.value(), 0.05);
  EXPECT_EQ(b.alpha_max.value(), 0.025);
  EXPECT_EQ(b.gamma.value(), 0.0125);
  EXPECT_EQ(b.alpha_max + 2.0 * b.gamma, b.ai_share.value());
}

TEST(Allocate, Errors) {
  EXPECT_THROW(allocate(SilLevel::SIL1, 0.1, DefaultSplit{}), InvalidArgument);
  EXPECT_THROW(allocate(SilLevel::SIL1, 0.2, DefaultSplit{}), InvalidArgument);
  EXPECT_THROW(allocate(SilLevel::SIL1, -0.01, DefaultSplit{}), InvalidArgument);
  EXPECT_THROW(allocate(SilLevel::SIL1, 0.05, ExplicitSplit{0.03, 0.02}), InvalidArgument);
  EXPECT_THROW(allocate(SilLevel::SIL2, 0.0, DefaultSplit{}), NotSpecified);
}

TEST(Allocate, ExplicitSplit) {
  const auto b = allocate(SilLevel::SIL1, 0.05, ExplicitSplit{0.03, 0.01});
  EXPECT_EQ(b.alpha_max.value(), 0.03);
  EXPECT_EQ(b.gamma.value(), 0.01);
  EXPECT_NEAR(b.alpha_max + 2.0 * b.gamma, b.ai_share.value(), 1e-12);
}

TEST(AllocateProperty, SharesStayWithinThreshold) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  ThresholdOverrides o{0.01, 0.001};
  for (auto level : {SilLevel::SIL1, SilLevel::SIL2, SilLevel::SIL3, SilLevel::SIL4}) {
    const double t = pfd_threshold(level, o);
    for (int i = 0; i < 2000; ++i) {
      const double hw = t * frac(gen) * 0.999999;
      const auto b = allocate(level, hw, DefaultSplit{}, o);
      EXPECT_LE(b.hardware_share + b.ai_share, b.pfd_threshold.value());
      EXPECT_EQ(b.alpha_max + 2.0 * b.gamma, b.ai_share.value());
    }
  }
}

TEST(Verdict, Examples) {
  const auto b = allocate(SilLevel::SIL1, 0.05, DefaultSplit{});
  EXPECT_TRUE(verdict(b, certified(0.05, 0.0125)).pass);
  const auto over = verdict(b, certified(0.0501, 0.0125));
  EXPECT_FALSE(over.pass);
  EXPECT_NEAR(over.margin, 0.0001, 1e-15);
  EXPECT_TRUE(verdict(b, certified(0.0, 0.0125)).pass);
  // No confidence bounds used: compatible with any budget gamma.
  EXPECT_TRUE(verdict(b, certified(0.01, 0.0)).pass);
  EXPECT_THROW(verdict(b, certified(0.01, 0.01)), InvalidArgument);
}

TEST(VerdictProperty, MonotoneInCertifiedValue) {
  const auto b = allocate(SilLevel::SIL1, 0.05, DefaultSplit{});
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  for (int i = 0; i < 1000; ++i) {
    double hi = u(gen), lo = u(gen);
    if (lo > hi) std::swap(lo, hi);
    if (verdict(b, certified(hi, 0.0125)).pass) {
      EXPECT_TRUE(verdict(b, certified(lo, 0.0125)).pass);
    }
  }
}

TEST(ProvenInUse, Hours) {
  EXPECT_EQ(proven_in_use_hours(SilLevel::SIL1), 3'000'000.0);
  EXPECT_EQ(proven_in_use_hours(SilLevel::SIL4), 300'000'000.0);
  EXPECT_THROW(proven_in_use_hours(SilLevel::SIL3), NotSpecified);
  EXPECT_THROW(proven_in_use_hours(SilLevel::SIL2), NotSpecified);
}

}  // namespace
}  // namespace silcert::budget
