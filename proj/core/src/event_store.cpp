#include "dhp/event_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace dhp {

namespace {

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct RawRow {
  double time;
  std::string label;
  std::size_t line;
};

class LabelIndex {
 public:
  explicit LabelIndex(const std::optional<std::vector<std::string>>& manifest) {
    if (manifest) {
      fixed_ = true;
      for (const auto& label : *manifest) add(label);
    }
  }

  std::size_t lookup(const std::string& label, std::size_t line) {
    if (const auto it = index_.find(label); it != index_.end()) return it->second;
    if (fixed_) throw Error(line_error(line, "mark '" + label + "' is not in the manifest"));
    return add(label);
  }

  std::vector<std::string> labels() const { return labels_; }

 private:
  std::size_t add(const std::string& label) {
    if (index_.count(label)) throw Error("duplicate mark label '" + label + "'");
    index_.emplace(label, labels_.size());
    labels_.push_back(label);
    return labels_.size() - 1;
  }

  bool fixed_ = false;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> labels_;
};

std::vector<RawRow> read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> time_col, mark_col;
  std::size_t width = 0;
  std::vector<RawRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (!time_col) {
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c] == "time") time_col = c;
        if (fields[c] == "mark") mark_col = c;
      }
      if (!time_col || !mark_col) throw Error(line_error(line_no, "header must name 'time' and 'mark' columns"));
      width = fields.size();
      continue;
    }
    if (fields.size() != width) throw Error(line_error(line_no, "malformed row (expected " + std::to_string(width) + " fields)"));
    const auto t = parse_double(fields[*time_col]);
    if (!t) throw Error(line_error(line_no, "malformed time '" + std::string(fields[*time_col]) + "'"));
    if (fields[*mark_col].empty()) throw Error(line_error(line_no, "empty mark"));
    rows.push_back({*t, std::string(fields[*mark_col]), line_no});
  }
  return rows;
}

std::vector<RawRow> read_jsonl(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<RawRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(line_error(line_no, "malformed JSON"));
    }
    if (!obj.is_object() || !obj.contains("time") || !obj.contains("mark"))
      throw Error(line_error(line_no, "object must carry 'time' and 'mark'"));
    const auto& t = obj["time"];
    if (!t.is_number()) throw Error(line_error(line_no, "time must be a number"));
    const auto& m = obj["mark"];
    std::string label;
    if (m.is_string()) {
      label = m.get<std::string>();
    } else if (m.is_number_integer()) {
      label = std::to_string(m.get<long long>());
    } else {
      throw Error(line_error(line_no, "mark must be a string or integer"));
    }
    rows.push_back({t.get<double>(), std::move(label), line_no});
  }
  return rows;
}

}  // namespace

EventSequence::EventSequence(std::vector<Event> events, std::size_t num_marks, double horizon,
                             std::vector<std::string> mark_labels, std::string time_unit,
                             double start)
    : events_(std::move(events)),
      num_marks_(num_marks),
      start_(start),
      horizon_(horizon),
      mark_labels_(std::move(mark_labels)),
      time_unit_(std::move(time_unit)) {
  if (num_marks_ == 0) throw std::invalid_argument("EventSequence: num_marks must be >= 1");
  if (!std::isfinite(horizon_) || horizon_ <= 0.0)
    throw std::invalid_argument("EventSequence: horizon must be positive and finite");
  if (!std::isfinite(start_) || start_ < 0.0 || start_ > horizon_)
    throw std::invalid_argument("EventSequence: window start must lie in [0, horizon]");
  if (mark_labels_.empty()) {
    for (std::size_t m = 0; m < num_marks_; ++m) mark_labels_.push_back(std::to_string(m));
  }
  if (mark_labels_.size() != num_marks_)
    throw std::invalid_argument("EventSequence: need one label per mark");
  std::unordered_set<std::string> seen(mark_labels_.begin(), mark_labels_.end());
  if (seen.size() != mark_labels_.size()) throw std::invalid_argument("EventSequence: mark labels must be unique");

  double prev = 0.0;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    if (!std::isfinite(e.time) || e.time < 0.0)
      throw std::invalid_argument("EventSequence: event times must be finite and >= 0");
    if (e.time < prev) throw std::invalid_argument("EventSequence: events must be sorted by time");
    if (e.time >= horizon_) throw std::invalid_argument("EventSequence: event time at or beyond horizon");
    if (e.mark >= num_marks_) throw std::invalid_argument("EventSequence: mark out of range");
    prev = e.time;
  }
  scored_begin_ = static_cast<std::size_t>(
      std::lower_bound(events_.begin(), events_.end(), start_,
                       [](const Event& e, double t) { return e.time < t; }) -
      events_.begin());
}

EventSequence EventSequence::window(double start, double horizon) const {
  std::vector<Event> kept;
  for (const auto& e : events_) {
    if (e.time >= horizon) break;
    kept.push_back(e);
  }
  return EventSequence(std::move(kept), num_marks_, horizon, mark_labels_, time_unit_, start);
}

EventFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return EventFormat::Csv;
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return EventFormat::Jsonl;
  throw std::invalid_argument("cannot infer event format from extension '" + ext + "'");
}

EventSequence parse_events(std::istream& in, EventFormat format, const LoadOptions& options) {
  if (!(options.time_scale > 0.0) || !std::isfinite(options.time_scale))
    throw std::invalid_argument("time scale must be positive");
  auto rows = format == EventFormat::Csv ? read_csv(in) : read_jsonl(in);
  if (rows.empty()) throw Error("empty file: no events");

  for (auto& row : rows) {
    if (!std::isfinite(row.time)) throw Error(line_error(row.line, "non-finite time"));
    if (row.time < 0.0) throw Error(line_error(row.line, "negative time"));
    row.time *= options.time_scale;
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].time < rows[i - 1].time) {
      if (!options.sort) throw Error(line_error(rows[i].line, "unsorted input (pass --sort to reorder)"));
      std::stable_sort(rows.begin(), rows.end(),
                       [](const RawRow& a, const RawRow& b) { return a.time < b.time; });
      break;
    }
  }

  LabelIndex labels(options.manifest);
  std::vector<Event> events;
  events.reserve(rows.size());
  for (const auto& row : rows) events.push_back({row.time, labels.lookup(row.label, row.line)});

  double horizon = 0.0;
  if (options.horizon) {
    horizon = *options.horizon * options.time_scale;
  } else {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < events.size(); ++i) {
      const double d = events[i].time - events[i - 1].time;
      if (d > 0.0) gap = std::min(gap, d);
    }
    if (!std::isfinite(gap)) gap = options.time_scale;
    horizon = events.back().time + gap;
  }
  if (events.back().time >= horizon) throw Error("horizon must exceed the last event time");

  auto label_list = labels.labels();
  const auto num_marks = label_list.size();
  return EventSequence(std::move(events), num_marks, horizon, std::move(label_list), options.time_unit);
}

EventSequence load_events(const std::filesystem::path& path, EventFormat format,
                          const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open event file '" + path.string() + "'");
  return parse_events(in, format, options);
}

EventSequence load_events(const std::filesystem::path& path, const LoadOptions& options) {
  return load_events(path, format_from_path(path), options);
}

void save_events(const EventSequence& seq, std::ostream& out) {
  out << "time,mark\n";
  for (const auto& e : seq.events()) out << format_double(e.time) << ',' << seq.mark_labels()[e.mark] << '\n';
}

void save_events(const EventSequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  save_events(seq, out);
}

std::vector<std::string> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("manifest '" + path.string() + "': " + e.what());
  }
  if (!j.is_array()) throw Error("manifest must be a JSON array of labels");
  auto labels = j.get<std::vector<std::string>>();
  if (labels.empty()) throw Error("manifest is empty");
  return labels;
}

void save_manifest(const std::vector<std::string>& labels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << nlohmann::json(labels).dump() << '\n';
}

void SplitSpec::validate() const {
  for (double f : {train, validation, test}) {
    if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("split fractions must lie in (0, 1)");
  }
  if (std::abs(train + validation + test - 1.0) > 1e-9)
    throw std::invalid_argument("split fractions must sum to 1");
}

SplitResult chronological_split(const EventSequence& seq, const SplitSpec& spec) {
  spec.validate();
  const auto base = seq.scored_begin();
  const auto n = seq.scored_count();
  if (n == 0) throw std::invalid_argument("split produces empty partition: no events");

  const auto n_train = static_cast<std::size_t>(std::floor(spec.train * static_cast<double>(n) + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(spec.validation * static_cast<double>(n) + 1e-9));

  // Advance a cut past any run of tied timestamps.
  auto cut_at = [&](std::size_t k) {
    while (k > 0 && k < seq.size() && seq[k].time == seq[k - 1].time) ++k;
    return k;
  };
  const auto k1 = cut_at(base + n_train);
  const auto k2 = cut_at(std::max(base + n_train + n_val, k1));
  if (k1 == base || k2 <= k1 || k2 >= seq.size())
    throw std::invalid_argument("split produces empty partition");

  auto boundary = [&](std::size_t k) { return 0.5 * (seq[k - 1].time + seq[k].time); };
  const double b1 = boundary(k1);
  const double b2 = boundary(k2);

  return {seq.window(seq.start(), b1), seq.window(b1, b2), seq.window(b2, seq.horizon())};
}

std::size_t CountGrid::total() const {
  std::size_t sum = 0;
  for (const auto& row : counts)
    for (auto c : row) sum += c;
  return sum;
}

std::vector<std::size_t> CountGrid::column_totals(std::size_t num_marks) const {
  std::vector<std::size_t> out(num_marks, 0);
  for (const auto& row : counts)
    for (std::size_t m = 0; m < num_marks && m < row.size(); ++m) out[m] += row[m];
  return out;
}

std::vector<double> interval_boundaries(double start, double end, double width) {
  if (!(start < end)) throw std::invalid_argument("interval grid requires start < end");
  if (!(width > 0.0)) throw std::invalid_argument("interval width must be positive");
  const auto s = static_cast<std::size_t>(std::ceil((end - start) / width));
  std::vector<double> b;
  b.reserve(s + 1);
  for (std::size_t k = 0; k < s; ++k) b.push_back(start + static_cast<double>(k) * width);
  b.push_back(end);
  return b;
}

CountGrid count_events(std::span<const Event> events, std::size_t num_marks,
                       std::span<const double> boundaries) {
  if (boundaries.size() < 2) throw std::invalid_argument("need at least two boundaries");
  for (std::size_t k = 1; k < boundaries.size(); ++k)
    if (!(boundaries[k] > boundaries[k - 1])) throw std::invalid_argument("boundaries must increase");
  CountGrid grid;
  grid.boundaries.assign(boundaries.begin(), boundaries.end());
  grid.counts.assign(boundaries.size() - 1, std::vector<std::size_t>(num_marks, 0));
  for (const auto& e : events) {
    if (e.time <= boundaries.front() || e.time > boundaries.back()) continue;
    // First boundary >= time closes the interval (t_{s}, t_{s+1}].
    const auto it = std::lower_bound(boundaries.begin(), boundaries.end(), e.time);
    const auto s = static_cast<std::size_t>(it - boundaries.begin()) - 1;
    ++grid.counts[s][e.mark];
  }
  return grid;
}

CountGrid slice_counts(const EventSequence& seq, double start, double end, double width) {
  const auto b = interval_boundaries(start, end, width);
  return count_events(seq.events(), seq.num_marks(), b);
}

}  // namespace dhp
