#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace engine {

enum class Move { Up, NotUp };

std::string_view to_string(Move d);
Move parse_move(std::string_view s);  // "up" / "not_up", case-insensitive

struct TimeSeries {
  std::string instrument_id;
  std::vector<std::int64_t> timestamps;  // seconds since the Unix epoch, UTC
  std::vector<double> prices;

  std::size_t size() const { return prices.size(); }
  // Throws ValidationError: equal lengths, strictly increasing timestamps, prices > 0.
  void validate() const;
};

// "timestamp,price" rows; timestamps as ISO 8601 dates/date-times or integer
// epoch seconds. A non-numeric first row is treated as a header.
TimeSeries read_series_csv(std::istream& in, std::string instrument_id = {});
TimeSeries read_series_csv_file(const std::string& path);
std::int64_t parse_timestamp(std::string_view text);
std::string format_timestamp(std::int64_t epoch_seconds);

// A trial segment of `length` points starting at `offset`: the trader sees the
// first length-1 points and predicts the move to the last one.
struct TrialRecord {
  std::size_t segment_offset = 0;
  std::size_t segment_length = 0;
  Move prediction = Move::Up;
  Move actual = Move::Up;
  bool correct = false;

  bool operator==(const TrialRecord&) const = default;
};

Move actual_move(const TimeSeries& s, std::size_t offset, std::size_t length);
TrialRecord make_record(const TimeSeries& s, std::size_t offset, std::size_t length, Move prediction);

// Number of admissible offsets for segments of this length.
std::size_t segment_positions(const TimeSeries& s, std::size_t length);

// Uniform offsets, distinct while n <= positions, otherwise drawn with replacement.
std::vector<std::size_t> sample_segments(const TimeSeries& s, std::size_t length, std::size_t n, std::uint64_t seed);

enum class CiMethod { Normal, Exact };

struct AbilityEstimate {
  double p_hat = 0.0;
  std::size_t n_trials = 0;
  std::size_t n_correct = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  CiMethod method = CiMethod::Normal;
};

// Normal: p_hat -/+ 1.96 sqrt(p_hat (1 - p_hat) / n). Exact: Clopper-Pearson.
AbilityEstimate estimate_ability(const std::vector<TrialRecord>& records, CiMethod method = CiMethod::Normal);

bool check_consistency(const AbilityEstimate& estimate, const std::vector<TrialRecord>& live, double tolerance = 0.05);

// What a predictor sees: prices up to and including `end`.
struct Window {
  std::span<const double> prices;
  std::size_t end = 0;  // index of the last visible point in the series
};

using Predictor = std::function<Move(const Window&)>;
using Sizing = std::function<std::int64_t(std::size_t step)>;

std::vector<TrialRecord> run_trials(const TimeSeries& s, const std::vector<std::size_t>& offsets, std::size_t length,
                                    const Predictor& predict);

// Synthetic trader that peeks at the next point and answers correctly with probability p.
Predictor make_oracle_predictor(const TimeSeries& s, double p, std::uint64_t seed);
// Up after an up move, NotUp otherwise.
Predictor make_momentum_predictor();

struct TradingStep {
  std::size_t step = 0;
  Move prediction = Move::Up;
  std::int64_t position = 0;  // signed units held over the step
  double pnl = 0.0;
  double cumulative = 0.0;
};

struct TradingSummary {
  std::vector<TradingStep> trace;
  double total = 0.0;
  double hit_rate = 0.0;  // correct predictions over steps
  std::size_t steps = 0;
  std::size_t trades = 0;
};

// Walks consecutive moments; long `size` units on Up, short on NotUp.
// A step with nonzero size pays `cost_per_trade`.
TradingSummary simulate_trading(const TimeSeries& s, const Predictor& predict, const Sizing& sizing,
                                double cost_per_trade = 0.0);

// One JSON object per line.
void write_trials_jsonl(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_trials_jsonl(std::istream& in);

// Interactive trial session: serves segments one at a time and records answers.
class TrialSession {
 public:
  TrialSession(TimeSeries series, std::size_t length, std::size_t trials, std::uint64_t seed);

  bool done() const { return records_.size() == offsets_.size(); }
  std::size_t answered() const { return records_.size(); }
  std::size_t total() const { return offsets_.size(); }
  std::size_t length() const { return length_; }
  // Visible part of the current segment; throws ValidationError when the session is done.
  Window current() const;
  std::size_t current_offset() const;
  TrialRecord answer(Move prediction);
  // The revealed next price for an answered trial.
  double revealed_price(std::size_t trial) const;
  const std::vector<TrialRecord>& records() const { return records_; }
  AbilityEstimate estimate(CiMethod method = CiMethod::Normal) const;
  const TimeSeries& series() const { return series_; }

 private:
  TimeSeries series_;
  std::size_t length_;
  std::vector<std::size_t> offsets_;
  std::vector<TrialRecord> records_;
};

}  // namespace engine
