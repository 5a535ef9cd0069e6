#include "engine/expectations.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "engine/errors.hpp"

namespace engine {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Increase: return "Increase";
    case Direction::Decrease: return "Decrease";
    case Direction::NoChange: return "NoChange";
  }
  return "?";
}

bool Partition::in_hat(std::size_t i) const {
  auto has = [i](const std::vector<std::size_t>& v) { return std::find(v.begin(), v.end(), i) != v.end(); };
  return has(hat_plus) || has(hat_minus) || has(hat_zero);
}

void validate_belief(const SecurityBelief& b) {
  if (!std::isfinite(b.price_now) || !std::isfinite(b.price_min) || !std::isfinite(b.price_max) || !std::isfinite(b.p))
    throw EngineError(ErrorCode::InvalidBelief, "belief fields must be finite");
  if (!(b.price_min <= b.price_now && b.price_now <= b.price_max))
    throw EngineError(ErrorCode::InvalidBelief, "price_min <= price_now <= price_max violated");
  if (!(b.p > 0.0 && b.p <= 1.0)) throw EngineError(ErrorCode::InvalidBelief, "p must lie in (0, 1]");
}

namespace {

struct Weights {
  // Scenario prices and the weight of each: p, (1-p)/2, (1-p)/2.
  double m[3];
  double w[3];
};

// Conditional means around an anchor a: up = (a + max)/2, down = (min + a)/2.
Weights scenario(Direction d, double p, double anchor, double lo, double hi) {
  const double up = (anchor + hi) / 2.0;
  const double down = (lo + anchor) / 2.0;
  const double q = (1.0 - p) / 2.0;
  switch (d) {
    case Direction::Increase: return {{up, down, anchor}, {p, q, q}};
    case Direction::Decrease: return {{down, up, anchor}, {p, q, q}};
    case Direction::NoChange: return {{anchor, down, up}, {p, q, q}};
  }
  return {{anchor, anchor, anchor}, {p, q, q}};
}

void validate_threshold(const SecurityBelief& b, double h) {
  if (!(b.price_min <= h && h <= b.price_max))
    throw EngineError(ErrorCode::InvalidSpec, "threshold K + cost must lie within the belief bounds");
}

}  // namespace

double expected_price(const SecurityBelief& b) {
  validate_belief(b);
  const Weights s = scenario(b.direction, b.p, b.price_now, b.price_min, b.price_max);
  return s.w[0] * s.m[0] + s.w[1] * s.m[1] + s.w[2] * s.m[2];
}

double futures_unit_expectation(const FuturesSpec& f) {
  validate_belief(f.belief);
  if (!(f.strike_basis >= 0.0) || !(f.carry_cost >= 0.0))
    throw EngineError(ErrorCode::InvalidSpec, "strike_basis and carry_cost must be nonnegative");
  const double h = f.threshold();
  validate_threshold(f.belief, h);
  const Weights s = scenario(f.belief.direction, f.belief.p, h, f.belief.price_min, f.belief.price_max);
  const double sign = f.side == FuturesSide::Buy ? 1.0 : -1.0;
  double total = 0.0;
  for (int k = 0; k < 3; ++k) total += s.w[k] * (sign * (s.m[k] - h));
  return total;
}

double futures_expected_finres(const FuturesSpec& f, std::int64_t volume) {
  if (volume < 0) throw EngineError(ErrorCode::InvalidSpec, "volume must be nonnegative");
  return static_cast<double>(volume) * futures_unit_expectation(f);
}

double options_unit_expectation(const OptionsSpec& o) {
  validate_belief(o.belief);
  if (!(o.strike >= 0.0) || !(o.premium >= 0.0))
    throw EngineError(ErrorCode::InvalidSpec, "strike and premium must be nonnegative");
  const double h = o.threshold();
  validate_threshold(o.belief, h);
  const Weights s = scenario(o.belief.direction, o.belief.p, h, o.belief.price_min, o.belief.price_max);
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double payoff = o.kind == OptionKind::Call ? s.m[k] - h : h - s.m[k];
    total += s.w[k] * std::max(payoff, -o.premium);
  }
  return total;
}

double options_expected_finres(const OptionsSpec& o, std::int64_t volume) {
  if (volume < 0) throw EngineError(ErrorCode::InvalidSpec, "volume must be nonnegative");
  return static_cast<double>(volume) * options_unit_expectation(o);
}

namespace {

template <typename Item, typename Gain, typename HeldGain>
Partition classify(std::span<const Item> items, const Holdings& held, Gain gain, HeldGain held_gain,
                   const SecurityBelief& (*belief_of)(const Item&)) {
  Partition part;
  part.held = held;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const SecurityBelief& b = belief_of(items[i]);
    const bool hat = gain(items[i]) > kPositiveTol;
    switch (b.direction) {
      case Direction::Increase:
        part.plus.push_back(i);
        if (hat) part.hat_plus.push_back(i);
        break;
      case Direction::Decrease:
        part.minus.push_back(i);
        if (hat) part.hat_minus.push_back(i);
        break;
      case Direction::NoChange:
        part.zero.push_back(i);
        if (hat) part.hat_zero.push_back(i);
        break;
    }
  }
  for (const auto& [i, v] : held) {
    if (v <= 0 || i >= items.size()) continue;
    (held_gain(items[i]) > kPositiveTol ? part.hold : part.sell).push_back(i);
  }
  return part;
}

const SecurityBelief& self(const SecurityBelief& b) { return b; }
const SecurityBelief& futures_belief(const FuturesSpec& f) { return f.belief; }
const SecurityBelief& options_belief(const OptionsSpec& o) { return o.belief; }

double security_gain(const SecurityBelief& b) { return expected_price(b) - b.price_now; }

}  // namespace

Partition classify_positive(std::span<const SecurityBelief> beliefs, const Holdings& held) {
  return classify(beliefs, held, security_gain, security_gain, &self);
}

Partition classify_positive(std::span<const FuturesSpec> futures) {
  Holdings held;
  for (std::size_t j = 0; j < futures.size(); ++j)
    if (futures[j].held_volume > 0) held[j] = futures[j].held_volume;
  return classify(futures, held, futures_unit_expectation,
                  [](const FuturesSpec& f) { return security_gain(f.belief); }, &futures_belief);
}

Partition classify_positive(std::span<const OptionsSpec> options) {
  Holdings held;
  for (std::size_t l = 0; l < options.size(); ++l)
    if (options[l].held_volume > 0) held[l] = options[l].held_volume;
  return classify(options, held, options_unit_expectation,
                  [](const OptionsSpec& o) { return security_gain(o.belief); }, &options_belief);
}

}  // namespace engine
