#include "biosec/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

#include "biosec/error.hpp"

namespace biosec::oracle {

namespace {

constexpr double kMaxRounds = 9.2e18;

std::mt19937_64 partition_engine(std::uint64_t seed, std::uint64_t partition) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(partition), static_cast<std::uint32_t>(partition >> 32)};
  return std::mt19937_64(seq);
}

// Uniform on the open interval (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t nearest_rank(const std::vector<std::uint64_t>& sorted, double quantile) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(quantile * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

}  // namespace

SimReport simulate_untargeted(const SimConfig& config) {
  if (config.trials < 1) throw PreconditionError("simulation needs at least one trial");
  if (config.n_users < 1) throw PreconditionError("simulation needs at least one user");
  if (!(config.fmr > 0.0 && config.fmr < 1.0)) {
    throw PreconditionError("simulation FMR must lie in (0, 1), got " + config.fmr.to_string(6));
  }
  const int precision = config.fmr.precision();
  BigReal users(precision);
  mpfr_set_uj(users.get(), config.n_users, MPFR_RNDN);
  const double success_prob = one_minus_pow(config.fmr, users).to_double();
  const double log_failure = (users * log1p(-config.fmr)).to_double();
  if (!(success_prob > 0.0) || log_failure == 0.0) {
    throw DomainError("per-round success probability underflows to 0 in double precision");
  }
  if (!(success_prob < 1.0) || !std::isfinite(log_failure)) {
    throw DomainError("per-round success probability rounds to 1; every attack succeeds in round one");
  }
  // ln U >= ln(2^-54) bounds the largest sample.
  if (-std::log(0x1.0p-54) / -log_failure > kMaxRounds) {
    throw DomainError("success probability too small: first-success rounds would overflow 64-bit counts");
  }

  std::vector<std::uint64_t> rounds(config.trials);
  const std::uint64_t partitions = (config.trials + kTrialsPerPartition - 1) / kTrialsPerPartition;
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t part = next++; part < partitions; part = next++) {
      auto engine = partition_engine(config.seed, part);
      const std::uint64_t begin = part * kTrialsPerPartition;
      const std::uint64_t end = std::min(config.trials, begin + kTrialsPerPartition);
      for (std::uint64_t i = begin; i < end; ++i) {
        const double r = std::ceil(std::log(open_uniform(engine)) / log_failure);
        rounds[i] = r < 1.0 ? 1 : static_cast<std::uint64_t>(r);
      }
    }
  };
  unsigned workers = config.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.workers;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, partitions));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();

  long double total_rounds = 0.0L;
  for (std::uint64_t r : rounds) total_rounds += static_cast<long double>(r);
  std::sort(rounds.begin(), rounds.end());

  SimReport report;
  report.median_rounds = nearest_rank(rounds, 0.5);
  report.q1 = nearest_rank(rounds, 0.25);
  report.q3 = nearest_rank(rounds, 0.75);
  report.empirical_success_prob = static_cast<double>(static_cast<long double>(config.trials) / total_rounds);
  report.success_prob = success_prob;
  report.trials = config.trials;
  report.seed = config.seed;
  report.generator = "mt19937_64/seed_seq(seed,partition)/16384-per-partition/v1";
  return report;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __extension__ using u128 = unsigned __int128;
  u128 result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    result = result * (n - i) / (i + 1);
    if (result > UINT64_MAX) throw DomainError("binomial coefficient overflows 64 bits");
  }
  return static_cast<std::uint64_t>(result);
}

Rational enumerate_birthday(unsigned k_pairs, unsigned false_pairs, unsigned draw) {
  if (k_pairs > 30) throw PreconditionError("enumeration is limited to k_pairs <= 30");
  if (false_pairs > k_pairs) throw PreconditionError("false_pairs exceeds k_pairs");
  if (draw > k_pairs) throw PreconditionError("draw exceeds k_pairs");
  const std::uint64_t all = binomial(k_pairs, draw);
  const std::uint64_t clean = binomial(k_pairs - false_pairs, draw);
  const std::uint64_t hit = all - clean;
  const std::uint64_t g = std::gcd(hit, all);
  return Rational{hit / g, all / g};
}

std::uint64_t scan_first_success_median(const BigReal& success_prob) {
  if (!(success_prob > 0.0 && success_prob < 1.0)) {
    throw DomainError("scan requires 0 < p < 1, got " + success_prob.to_string(6));
  }
  const BigReal failure = 1.0 - success_prob;
  BigReal survival(1.0, success_prob.precision());
  for (std::uint64_t m = 1; m <= kScanCap; ++m) {
    survival *= failure;
    if (survival <= 0.5) return m;
  }
  throw DomainError("first-success median exceeds the scan cap of " + std::to_string(kScanCap) + " rounds");
}

}  // namespace biosec::oracle
