#include <doctest.h>

#include <cmath>
#include <sstream>

#include "biosec/error.hpp"
#include "biosec/stats.hpp"
#include "quantile_table.hpp"
#include "support.hpp"

using namespace biosec;
using namespace biosec::stats;
using biosec::test::rel_diff;

TEST_CASE("estimate_fmr applies the step convention literally") {
  const Context ctx;
  auto est = estimate_fmr(ctx, ScoreVector{{0.1, 0.9}, 0.5});
  CHECK(est.fmr_hat == 0.5);
  CHECK(est.n == 2);
  est = estimate_fmr(ctx, ScoreVector{{0.5}, 0.5});
  CHECK(est.fmr_hat == 1.0);
  est = estimate_fmr(ctx, ScoreVector{{0.6, 0.7, 0.8}, 0.5});
  CHECK(est.fmr_hat.is_zero());
  CHECK_THROWS_AS(estimate_fmr(ctx, ScoreVector{{}, 0.5}), PreconditionError);
}

TEST_CASE("read_scores skips blanks and comments") {
  std::istringstream in("# impostor scores\n0.1\n\n0.9\n  0.4  \n");
  const auto scores = read_scores(in);
  REQUIRE(scores.size() == 3);
  CHECK(scores[2] == 0.4);
  std::istringstream bad("0.1\nabc\n");
  CHECK_THROWS_AS(read_scores(bad), PreconditionError);
}

TEST_CASE("FmrEstimate validation") {
  const Context ctx;
  CHECK_THROWS_AS((FmrEstimate{ctx.real(0.5), 1, 0.05}.validate()), PreconditionError);
  CHECK_THROWS_AS((FmrEstimate{ctx.real(1.5), 10, 0.05}.validate()), PreconditionError);
  CHECK_THROWS_AS((FmrEstimate{ctx.real(0.5), 10, 1.0}.validate()), PreconditionError);
  const auto est = FmrEstimate::from_counts(ctx, 3, 12);
  CHECK(est.fmr_hat == 0.25);
  CHECK(est.n == 12);
  CHECK_THROWS_AS(FmrEstimate::from_counts(ctx, 13, 12), PreconditionError);
}

TEST_CASE("t quantiles reproduce the tabulated values") {
  const Context ctx;
  int checked = 0;
  for (const auto& row : test::kQuantileTable) {
    const std::uint64_t df = row.df == 0 ? 1'000'000'000ULL : row.df;
    for (std::size_t c = 0; c < test::kTailColumns.size(); ++c) {
      const double q = t_quantile(ctx, df, ctx.real(1.0 - test::kTailColumns[c])).to_double();
      CHECK_MESSAGE(std::fabs(q - row.values[c]) <= 0.001, "df=" << row.df << " column=" << test::kTailColumns[c]);
      ++checked;
    }
  }
  CHECK(checked == 192);
}

TEST_CASE("t quantile examples") {
  const Context ctx;
  CHECK(t_quantile(ctx, 10, ctx.real(0.95)).to_double() == doctest::Approx(1.812).epsilon(3e-4));
  CHECK(t_quantile(ctx, 2, ctx.real(0.975)).to_double() == doctest::Approx(4.303).epsilon(3e-4));
  CHECK(t_quantile(ctx, 1'000'000'000, ctx.real(0.95)).to_double() == doctest::Approx(1.645).epsilon(3e-4));
  CHECK(t_quantile(ctx, 7, ctx.real(0.5)).is_zero());
  CHECK_THROWS_AS(t_quantile(ctx, 0, ctx.real(0.95)), DomainError);
  CHECK_THROWS_AS(t_quantile(ctx, 5, ctx.real(0.4)), DomainError);
  CHECK_THROWS_AS(t_quantile(ctx, 5, ctx.real(1.0)), DomainError);
}

TEST_CASE("t quantiles match closed forms at df 1 and 2") {
  const Context ctx;
  test::Sampler sampler(5);
  for (int i = 0; i < 200; ++i) {
    const double p = sampler.uniform(0.5001, 0.9999);
    const BigReal bp = ctx.real(p);
    // df = 1 is Cauchy: tan(pi (p - 1/2)).
    const BigReal half_angle = ctx.pi() * (bp - 0.5);
    BigReal cauchy(ctx.precision_bits());
    mpfr_tan(cauchy.get(), half_angle.get(), MPFR_RNDN);
    CHECK(rel_diff(t_quantile(ctx, 1, bp), cauchy) < 1e-9);
    // df = 2: (2p - 1) / sqrt(2 p (1 - p)).
    const BigReal closed = (2.0 * bp - 1.0) / sqrt(2.0 * bp * (1.0 - bp));
    CHECK(rel_diff(t_quantile(ctx, 2, bp), closed) < 1e-9);
  }
}

TEST_CASE("t cdf inverts the quantile") {
  const Context ctx;
  for (std::uint64_t df : {1ULL, 3ULL, 30ULL, 1000ULL, 100000ULL}) {
    for (double p : {0.6, 0.9, 0.999}) {
      const BigReal q = t_quantile(ctx, df, ctx.real(p));
      CHECK(t_cdf(df, q).to_double() == doctest::Approx(p).epsilon(1e-10));
    }
  }
}

TEST_CASE("quantile monotonicity") {
  const Context ctx;
  for (std::uint64_t df : {1ULL, 2ULL, 5ULL, 40ULL, 10000ULL}) {
    BigReal prev = t_quantile(ctx, df, ctx.real(0.55));
    for (double p = 0.6; p < 0.999; p += 0.05) {
      const BigReal q = t_quantile(ctx, df, ctx.real(p));
      CHECK(q > prev);
      prev = q;
    }
  }
  for (double p : {0.75, 0.95, 0.995}) {
    BigReal prev = t_quantile(ctx, 1, ctx.real(p));
    for (std::uint64_t df : {2ULL, 3ULL, 10ULL, 100ULL, 10000ULL, 100000ULL}) {
      const BigReal q = t_quantile(ctx, df, ctx.real(p));
      CHECK(q < prev);
      prev = q;
    }
  }
}

TEST_CASE("normal quantile") {
  const Context ctx;
  CHECK(normal_quantile(ctx.real(0.975)).to_double() == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(ctx.real(0.5)).is_zero());
}

TEST_CASE("confidence interval examples") {
  const Context ctx;
  auto ci = confidence_interval(FmrEstimate{ctx.real(0.5), 10001, 0.05}, Sided::two_sided);
  CHECK(ci.upper.to_double() == doctest::Approx(0.5098).epsilon(1e-4));
  CHECK(ci.c_alpha.to_double() == doctest::Approx(1.960).epsilon(3e-4));
  ci = confidence_interval(FmrEstimate{ctx.real(0.1), 101, 0.05}, Sided::one_sided);
  CHECK(ci.upper.to_double() == doctest::Approx(0.1498).epsilon(1e-3));
  ci = confidence_interval(FmrEstimate{ctx.real(0.0), 500, 0.05});
  CHECK(ci.lower.is_zero());
  CHECK(ci.upper.is_zero());
  CHECK(ci.degenerate);
  ci = confidence_interval(FmrEstimate{ctx.real(1.0), 500, 0.05});
  CHECK(ci.lower == 1.0);
  CHECK(ci.degenerate);
}

TEST_CASE("confidence interval is clamped to [0, 1] around the estimate") {
  const Context ctx;
  test::Sampler sampler(17);
  for (int i = 0; i < 300; ++i) {
    const double f = sampler.uniform(0.0, 1.0);
    const auto n = sampler.integer(2, 1000);
    const auto ci = confidence_interval(FmrEstimate{ctx.real(f), n, 0.05});
    CHECK(ci.lower >= 0.0);
    CHECK(ci.lower <= ci.estimate);
    CHECK(ci.estimate <= ci.upper);
    CHECK(ci.upper <= 1.0);
  }
  const auto ci = confidence_interval(FmrEstimate{ctx.real(0.01), 3, 0.05});
  CHECK(ci.lower.is_zero());
}

TEST_CASE("interval nesting and width scaling") {
  const Context ctx;
  const auto wide = confidence_interval(FmrEstimate{ctx.real(0.2), 200, 0.01});
  const auto narrow = confidence_interval(FmrEstimate{ctx.real(0.2), 200, 0.05});
  CHECK(wide.lower <= narrow.lower);
  CHECK(wide.upper >= narrow.upper);

  const auto small = confidence_interval(FmrEstimate{ctx.real(0.3), 101, 0.05});
  const auto large = confidence_interval(FmrEstimate{ctx.real(0.3), 10001, 0.05});
  const double ratio = ((large.upper - large.lower) / (small.upper - small.lower)).to_double();
  CHECK(ratio == doctest::Approx(0.1).epsilon(0.02));
}

TEST_CASE("sided parsing") {
  CHECK(parse_sided("one") == Sided::one_sided);
  CHECK(parse_sided("two_sided") == Sided::two_sided);
  CHECK_THROWS_AS(parse_sided("three"), PreconditionError);
}
