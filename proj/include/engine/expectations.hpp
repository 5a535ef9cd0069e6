#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace engine {

enum class Direction { Increase, Decrease, NoChange };

std::string_view to_string(Direction d);

struct SecurityBelief {
  double price_now = 0.0;
  Direction direction = Direction::NoChange;
  double p = 1.0;
  double price_min = 0.0;
  double price_max = 0.0;
};

enum class FuturesSide { Buy, Sell };
enum class OptionKind { Call, Put };

struct FuturesSpec {
  double strike_basis = 0.0;  // K
  double carry_cost = 0.0;    // c
  FuturesSide side = FuturesSide::Buy;
  SecurityBelief belief;
  std::int64_t held_volume = 0;

  double threshold() const { return strike_basis + carry_cost; }
};

struct OptionsSpec {
  double strike = 0.0;   // K
  double premium = 0.0;  // gamma
  OptionKind kind = OptionKind::Call;
  SecurityBelief belief;
  std::int64_t held_volume = 0;

  double threshold() const { return strike + premium; }
};

using Holdings = std::map<std::size_t, std::int64_t>;

struct Partition {
  std::vector<std::size_t> plus;
  std::vector<std::size_t> minus;
  std::vector<std::size_t> zero;
  Holdings held;
  std::vector<std::size_t> hat_plus;
  std::vector<std::size_t> hat_minus;
  std::vector<std::size_t> hat_zero;
  // Held instruments with positive expected gain are kept, the rest sold.
  std::vector<std::size_t> hold;
  std::vector<std::size_t> sell;

  bool in_hat(std::size_t i) const;
};

inline constexpr double kPositiveTol = 1e-9;

void validate_belief(const SecurityBelief& b);

// Weighted mean of the three conditional means for the belief's direction.
double expected_price(const SecurityBelief& b);

// Per-unit expected financial result of one futures contract.
double futures_unit_expectation(const FuturesSpec& f);
double futures_expected_finres(const FuturesSpec& f, std::int64_t volume);

// Per-unit expected result of one options contract, each term floored at -premium.
double options_unit_expectation(const OptionsSpec& o);
double options_expected_finres(const OptionsSpec& o, std::int64_t volume);

Partition classify_positive(std::span<const SecurityBelief> beliefs, const Holdings& held);
Partition classify_positive(std::span<const FuturesSpec> futures);
Partition classify_positive(std::span<const OptionsSpec> options);

}  // namespace engine
