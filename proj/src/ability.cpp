#include "engine/ability.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <unordered_map>

#include "engine/errors.hpp"
#include "engine/rng.hpp"
#include "json.hpp"

namespace engine {

std::string_view to_string(Move d) { return d == Move::Up ? "up" : "not_up"; }

Move parse_move(std::string_view s) {
  std::string t(s);
  for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "up") return Move::Up;
  if (t == "not_up" || t == "notup" || t == "down") return Move::NotUp;
  throw EngineError(ErrorCode::ValidationError, "prediction must be \"up\" or \"not_up\"", "prediction");
}

void TimeSeries::validate() const {
  if (timestamps.size() != prices.size())
    throw EngineError(ErrorCode::ValidationError, "timestamps and prices differ in length", "timestamps");
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0) || !std::isfinite(prices[i]))
      throw EngineError(ErrorCode::ValidationError, "prices must be positive", "prices[" + std::to_string(i) + "]");
    if (i > 0 && timestamps[i] <= timestamps[i - 1])
      throw EngineError(ErrorCode::ValidationError, "timestamps must be strictly increasing",
                        "timestamps[" + std::to_string(i) + "]");
  }
}

std::int64_t parse_timestamp(std::string_view text) {
  std::string t(text);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  std::int64_t epoch = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), epoch);
  if (ec == std::errc() && ptr == t.data() + t.size()) return epoch;

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, used = 0;
  if (std::sscanf(t.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &used) != 3)
    throw EngineError(ErrorCode::ValidationError, "unrecognised timestamp '" + t + "'", "timestamp");
  std::string rest = t.substr(static_cast<std::size_t>(used));
  if (!rest.empty()) {
    int used2 = 0;
    if ((rest[0] != 'T' && rest[0] != ' ') ||
        std::sscanf(rest.c_str() + 1, "%2d:%2d:%2d%n", &h, &mi, &s, &used2) != 3)
      throw EngineError(ErrorCode::ValidationError, "unrecognised timestamp '" + t + "'", "timestamp");
    rest = rest.substr(1 + static_cast<std::size_t>(used2));
    if (!rest.empty() && rest != "Z")
      throw EngineError(ErrorCode::ValidationError, "only UTC timestamps are supported: '" + t + "'", "timestamp");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59)
    throw EngineError(ErrorCode::ValidationError, "invalid date '" + t + "'", "timestamp");
  return sys_days{ymd}.time_since_epoch().count() * 86400LL + h * 3600LL + mi * 60LL + s;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
  using namespace std::chrono;
  const std::int64_t days = (epoch_seconds >= 0 ? epoch_seconds : epoch_seconds - 86399) / 86400;
  const std::int64_t secs = epoch_seconds - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(secs / 3600),
                static_cast<int>(secs / 60 % 60), static_cast<int>(secs % 60));
  return buf;
}

TimeSeries read_series_csv(std::istream& in, std::string instrument_id) {
  TimeSeries s;
  s.instrument_id = std::move(instrument_id);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw EngineError(ErrorCode::ValidationError, "expected 'timestamp,price'", "line " + std::to_string(lineno));
    const std::string ts = line.substr(0, comma), px = line.substr(comma + 1);
    double price = 0.0;
    const char* b = px.data();
    while (*b == ' ') ++b;
    auto [ptr, ec] = std::from_chars(b, px.data() + px.size(), price);
    if (ec != std::errc()) {
      if (s.prices.empty() && lineno == 1) continue;  // header
      throw EngineError(ErrorCode::ValidationError, "bad price '" + px + "'", "line " + std::to_string(lineno));
    }
    (void)ptr;
    s.timestamps.push_back(parse_timestamp(ts));
    s.prices.push_back(price);
  }
  s.validate();
  return s;
}

TimeSeries read_series_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw EngineError(ErrorCode::NotFound, "cannot open series file " + path, path);
  auto stem = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem.resize(dot);
  return read_series_csv(f, stem);
}

std::size_t segment_positions(const TimeSeries& s, std::size_t length) {
  if (length < 2) throw EngineError(ErrorCode::ValidationError, "segment length must be at least 2", "length");
  if (length > s.size())
    throw EngineError(ErrorCode::LengthTooLong,
                      "segment length " + std::to_string(length) + " exceeds series length " + std::to_string(s.size()),
                      "length");
  return s.size() - length + 1;
}

Move actual_move(const TimeSeries& s, std::size_t offset, std::size_t length) {
  const std::size_t last = offset + length - 1;
  return s.prices[last] > s.prices[last - 1] ? Move::Up : Move::NotUp;
}

TrialRecord make_record(const TimeSeries& s, std::size_t offset, std::size_t length, Move prediction) {
  TrialRecord r;
  r.segment_offset = offset;
  r.segment_length = length;
  r.prediction = prediction;
  r.actual = actual_move(s, offset, length);
  r.correct = r.prediction == r.actual;
  return r;
}

std::vector<std::size_t> sample_segments(const TimeSeries& s, std::size_t length, std::size_t n, std::uint64_t seed) {
  const std::size_t positions = segment_positions(s, length);
  std::vector<std::size_t> out;
  if (n == 0) return out;
  auto rng = make_rng(seed);
  if (n <= positions) {
    // partial Fisher-Yates over an implicit identity permutation
    std::unordered_map<std::size_t, std::size_t> moved;
    auto at = [&](std::size_t i) {
      auto it = moved.find(i);
      return it == moved.end() ? i : it->second;
    };
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + uniform_index(rng, positions - i);
      const std::size_t vi = at(i), vj = at(j);
      moved[j] = vi;
      out.push_back(vj);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) out.push_back(uniform_index(rng, positions));
  }
  return out;
}

AbilityEstimate estimate_ability(const std::vector<TrialRecord>& records, CiMethod method) {
  if (records.empty()) throw EngineError(ErrorCode::NoTrials, "no trials to estimate from", "records");
  AbilityEstimate e;
  e.method = method;
  e.n_trials = records.size();
  for (const auto& r : records) e.n_correct += r.correct ? 1 : 0;
  const double n = static_cast<double>(e.n_trials), k = static_cast<double>(e.n_correct);
  e.p_hat = k / n;
  if (method == CiMethod::Normal) {
    const double half = 1.96 * std::sqrt(e.p_hat * (1.0 - e.p_hat) / n);
    e.ci_lo = e.p_hat - half;
    e.ci_hi = e.p_hat + half;
  } else {
    e.ci_lo = e.n_correct == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1, 0.025);
    e.ci_hi = e.n_correct == e.n_trials ? 1.0 : boost::math::ibeta_inv(k + 1, n - k, 0.975);
  }
  return e;
}

bool check_consistency(const AbilityEstimate& estimate, const std::vector<TrialRecord>& live, double tolerance) {
  if (live.empty()) throw EngineError(ErrorCode::NoTrials, "no live trials to compare", "live");
  std::size_t correct = 0;
  for (const auto& r : live) correct += r.correct ? 1 : 0;
  const double freq = static_cast<double>(correct) / static_cast<double>(live.size());
  return std::abs(freq - estimate.p_hat) <= tolerance;
}

std::vector<TrialRecord> run_trials(const TimeSeries& s, const std::vector<std::size_t>& offsets, std::size_t length,
                                    const Predictor& predict) {
  segment_positions(s, length);
  std::vector<TrialRecord> out;
  out.reserve(offsets.size());
  for (std::size_t o : offsets) {
    if (o + length > s.size())
      throw EngineError(ErrorCode::LengthTooLong, "segment runs past the end of the series", "offsets");
    const Window w{std::span<const double>(s.prices.data() + o, length - 1), o + length - 2};
    out.push_back(make_record(s, o, length, predict(w)));
  }
  return out;
}

Predictor make_oracle_predictor(const TimeSeries& s, double p, std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(make_rng(seed, 1));
  const auto* prices = &s.prices;
  return [rng, prices, p](const Window& w) {
    const std::size_t next = w.end + 1;
    const Move truth =
        next < prices->size() && (*prices)[next] > (*prices)[w.end] ? Move::Up : Move::NotUp;
    if (bernoulli(*rng, p)) return truth;
    return truth == Move::Up ? Move::NotUp : Move::Up;
  };
}

Predictor make_momentum_predictor() {
  return [](const Window& w) {
    const std::size_t n = w.prices.size();
    return n >= 2 && w.prices[n - 1] > w.prices[n - 2] ? Move::Up : Move::NotUp;
  };
}

TradingSummary simulate_trading(const TimeSeries& s, const Predictor& predict, const Sizing& sizing,
                                double cost_per_trade) {
  if (s.size() < 2) throw EngineError(ErrorCode::LengthTooLong, "simulation needs at least two points", "series");
  TradingSummary out;
  std::size_t hits = 0;
  for (std::size_t t = 0; t + 1 < s.size(); ++t) {
    TradingStep st;
    st.step = t;
    st.prediction = predict(Window{std::span<const double>(s.prices.data(), t + 1), t});
    const std::int64_t size = sizing(t);
    if (size < 0) throw EngineError(ErrorCode::ValidationError, "position size must be nonnegative", "sizing");
    st.position = st.prediction == Move::Up ? size : -size;
    const double move = s.prices[t + 1] - s.prices[t];
    st.pnl = static_cast<double>(st.position) * move - (size != 0 ? cost_per_trade : 0.0);
    out.total += st.pnl;
    st.cumulative = out.total;
    out.trades += size != 0 ? 1 : 0;
    const Move actual = move > 0 ? Move::Up : Move::NotUp;
    hits += st.prediction == actual ? 1 : 0;
    out.trace.push_back(st);
  }
  out.steps = out.trace.size();
  out.hit_rate = static_cast<double>(hits) / static_cast<double>(out.steps);
  return out;
}

void write_trials_jsonl(std::ostream& out, const std::vector<TrialRecord>& records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["segment_offset"] = r.segment_offset;
    j["segment_length"] = r.segment_length;
    j["prediction"] = to_string(r.prediction);
    j["actual"] = to_string(r.actual);
    j["correct"] = r.correct;
    out << j.dump() << '\n';
  }
}

std::vector<TrialRecord> read_trials_jsonl(std::istream& in) {
  std::vector<TrialRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TrialRecord r;
      r.segment_offset = j.at("segment_offset").get<std::size_t>();
      r.segment_length = j.at("segment_length").get<std::size_t>();
      r.prediction = parse_move(j.at("prediction").get<std::string>());
      r.actual = parse_move(j.at("actual").get<std::string>());
      r.correct = j.at("correct").get<bool>();
      if (r.correct != (r.prediction == r.actual))
        throw EngineError(ErrorCode::ValidationError, "correct disagrees with prediction and actual", "correct");
      out.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw EngineError(ErrorCode::ValidationError, e.what(), "line " + std::to_string(lineno));
    }
  }
  return out;
}

TrialSession::TrialSession(TimeSeries series, std::size_t length, std::size_t trials, std::uint64_t seed)
    : series_(std::move(series)), length_(length) {
  series_.validate();
  offsets_ = sample_segments(series_, length_, trials, seed);
}

std::size_t TrialSession::current_offset() const {
  if (done()) throw EngineError(ErrorCode::ValidationError, "the session has no further trials", "session");
  return offsets_[records_.size()];
}

Window TrialSession::current() const {
  const std::size_t o = current_offset();
  return Window{std::span<const double>(series_.prices.data() + o, length_ - 1), o + length_ - 2};
}

TrialRecord TrialSession::answer(Move prediction) {
  const std::size_t o = current_offset();
  records_.push_back(make_record(series_, o, length_, prediction));
  return records_.back();
}

double TrialSession::revealed_price(std::size_t trial) const {
  if (trial >= records_.size()) throw EngineError(ErrorCode::NotFound, "trial not answered yet", "trial");
  return series_.prices[records_[trial].segment_offset + length_ - 1];
}

AbilityEstimate TrialSession::estimate(CiMethod method) const { return estimate_ability(records_, method); }

}  // namespace engine
