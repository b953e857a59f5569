#include "posvcg/representation.hpp"
#include "posvcg/utility.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace posvcg;
using namespace testing_support;

TEST(Alternatives, RejectsEmptyAndDuplicates) {
  EXPECT_THROW(AlternativeSet(std::vector<std::string>{}), Error);
  EXPECT_THROW(AlternativeSet({"a", "b", "a"}), Error);
  const auto alts = abc();
  EXPECT_EQ(alts.index_of("c"), 2u);
  EXPECT_FALSE(alts.find("z"));
  try {
    (void)alts.index_of("z");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownAlternative);
  }
}

TEST(UtilityEval, Examples) {
  EXPECT_EQ(utility_eval(w_example(), "a", R(6)), R(-5));
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto v = random_valuation(rng, abc());
    const auto u = ql_from_valuation(v);
    for (std::size_t a = 0; a < 3; ++a) EXPECT_EQ(u.eval(a, v[a]), R(0));
  }
  EXPECT_EQ(utility_eval(kinked(), "c", R(-2)), R(1));
  EXPECT_EQ(closed_form::kinked('c', R(-2)), R(1));
}

TEST(UtilityEval, UnknownAlternative) {
  try {
    (void)utility_eval(kinked(), "d", R(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownAlternative);
  }
}

TEST(QuasiLinear, Examples) {
  const auto u = ql_from_valuation(val(abc(), {R(1), R(2), R(3)}));
  EXPECT_EQ(utility_eval(u, "b", R(0)), R(2));
  const AlternativeSet single({"a"});
  const auto zero = ql_from_valuation(val(single, {R(0)}));
  for (const auto& z : mesh(-3, 3, 2)) EXPECT_EQ(utility_eval(zero, "a", z), -z);
  const auto shadow = ql_from_valuation(val(abc(), {R(-3), R(-2), R(-1)}));
  EXPECT_EQ(utility_eval(shadow, "a", R(5)), R(-8));
}

TEST(QuasiLinear, CurvesAreUnitSlopeKinks) {
  const auto u = ql_from_valuation(val(abc(), {R(5), R(7), R(11)}));
  for (std::size_t a = 0; a < 3; ++a) {
    ASSERT_EQ(u.curve(a).points().size(), 1u);
    EXPECT_EQ(u.curve(a).points()[0].u, R(0));
    EXPECT_EQ(u.curve(a).left_slope(), R(-1));
    EXPECT_EQ(u.curve(a).right_slope(), R(-1));
  }
}

TEST(Prefers, Examples) {
  const auto w = w_example();
  EXPECT_EQ(prefers(w, {"a", R(6)}, {"c", R(6)}), std::strong_ordering::greater);
  EXPECT_EQ(prefers(kinked(), {"b", R(2)}, {"b", R(2)}), std::strong_ordering::equal);
  const auto q = ql_from_valuation(val(abc(), {R(1), R(2), R(3)}));
  EXPECT_EQ(prefers(q, {"a", R(0)}, {"b", R(1)}), std::strong_ordering::equal);
  EXPECT_THROW((void)prefers(q, {"x", R(0)}, {"b", R(1)}), Error);
}

TEST(UtilityProperty, ReparameterizationKeepsEveryComparison) {
  Rng rng(22);
  const auto grid = mesh(-4, 4, 2);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<PiecewiseLinearCurve> curves;
    for (int a = 0; a < 3; ++a) curves.push_back(random_curve(rng));
    const UtilityFunction u(abc(), curves);
    const auto psi = random_increasing_map(rng);
    const auto v = reparameterize(u, psi);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        for (std::size_t k = 0; k < grid.size(); k += 3) {
          for (std::size_t l = 0; l < grid.size(); l += 2) {
            const Bundle x{a, grid[k]}, y{b, grid[l]};
            EXPECT_EQ(prefers(u, x, y), prefers(v, x, y));
          }
        }
      }
    }
  }
}

TEST(UtilityProperty, QuasiLinearClassifiesAsRepresented) {
  Rng rng(23);
  for (int iter = 0; iter < 200; ++iter) {
    const auto v = random_valuation(rng, alternatives(1 + rng.index(4)));
    const auto cls = classify(ql_from_valuation(v));
    ASSERT_EQ(cls.kind, Classification::Kind::RepresentedQL);
    const Rational shift = (*cls.valuation)[0] - v[0];
    for (std::size_t a = 0; a < v.size(); ++a) EXPECT_EQ((*cls.valuation)[a] - v[a], shift);
  }
}
