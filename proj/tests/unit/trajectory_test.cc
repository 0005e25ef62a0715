#include <gtest/gtest.h>

#include <functional>

#include "arthro/error.h"
#include "arthro/trajectory.h"
#include "oracles.h"

namespace arthro {
namespace {

ErrorCategory category_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.category();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCategory::kInput;
}

TEST(Trajectory, RejectsNonIncreasingTimestamps) {
  EXPECT_EQ(category_of([] { Trajectory(std::vector<TimedPose>{{1.0, {}}, {1.0, {}}}); }), ErrorCategory::kOrder);
  EXPECT_EQ(category_of([] { Trajectory(std::vector<TimedPose>{{1.0, {}}, {0.5, {}}}); }), ErrorCategory::kOrder);
  Trajectory t(std::vector<TimedPose>{{0.0, {}}});
  EXPECT_EQ(category_of([&] { t.push_back({-1.0, {}}); }), ErrorCategory::kOrder);
  t.push_back({0.1, {}});
  EXPECT_EQ(t.size(), 2u);
}

TEST(Trajectory, UnitConversion) {
  Trajectory mm(std::vector<TimedPose>{{0.0, {Rotation(), Vec3(1000, -250, 5)}}});
  const Trajectory m = mm.converted_to(LengthUnit::kMetre);
  EXPECT_EQ(m.unit(), LengthUnit::kMetre);
  EXPECT_NEAR(m[0].pose.translation.x(), 1.0, 1e-15);
  EXPECT_NEAR(m[0].pose.translation.y(), -0.25, 1e-15);
  const Trajectory back = m.converted_to(LengthUnit::kMillimetre);
  EXPECT_LT((back[0].pose.translation - mm[0].pose.translation).norm(), 1e-12);
  EXPECT_EQ(to_millimetres(LengthUnit::kMetre), 1000.0);
  EXPECT_EQ(parse_unit("m"), LengthUnit::kMetre);
  EXPECT_EQ(unit_name(LengthUnit::kMillimetre), "mm");
  EXPECT_EQ(category_of([] { parse_unit("cm"); }), ErrorCategory::kInput);
}

TEST(AssociateByTime, IdenticalTimestampsPairEverySample) {
  Rng rng(1);
  const Trajectory a = oracle::random_trajectory(rng, 30);
  const Trajectory b = oracle::random_trajectory(rng, 30);
  const auto pairs = associate_by_time(a, b, 0.05);
  ASSERT_EQ(pairs.size(), a.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(pairs[i].timestamp, a[i].timestamp);
    EXPECT_EQ(pairs[i].b.translation, b[i].pose.translation);
    EXPECT_EQ(pairs[i].a.translation, a[i].pose.translation);
  }
}

TEST(AssociateByTime, InterpolatesInsideBracket) {
  const Trajectory a(std::vector<TimedPose>{{0.05, {}}});
  const Trajectory b(std::vector<TimedPose>{{0.0, {Rotation(), Vec3(0, 0, 0)}}, {0.1, {Rotation(), Vec3(4, 0, 0)}}});
  const auto pairs = associate_by_time(a, b, 0.2);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].timestamp, 0.05);
  EXPECT_LT((pairs[0].b.translation - Vec3(2, 0, 0)).norm(), 1e-12);
}

TEST(AssociateByTime, SkipsWideGapsAndOutOfSpan) {
  const Trajectory a(std::vector<TimedPose>{{-1.0, {}}, {0.05, {}}, {0.5, {}}, {3.0, {}}});
  const Trajectory b(std::vector<TimedPose>{{0.0, {}}, {0.1, {}}, {1.0, {}}});
  const auto pairs = associate_by_time(a, b, 0.2);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].timestamp, 0.05);
}

TEST(AssociateByTime, DisjointRangesAreNoOverlap) {
  const Trajectory a(std::vector<TimedPose>{{0.0, {}}, {1.0, {}}});
  const Trajectory b(std::vector<TimedPose>{{5.0, {}}, {6.0, {}}});
  EXPECT_EQ(category_of([&] { associate_by_time(a, b, 0.05); }), ErrorCategory::kNoOverlap);
  EXPECT_EQ(category_of([&] { associate_by_time(a, b, 0.0); }), ErrorCategory::kInput);
}

}  // namespace
}  // namespace arthro
