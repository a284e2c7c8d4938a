#include "quant/history.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>

namespace quant {

const char* kind_name(MethodKind k) {
  switch (k) {
    case MethodKind::Producer: return "PROD";
    case MethodKind::Consumer: return "CONS";
    case MethodKind::Reader: return "READ";
    case MethodKind::Writer: return "WRIT";
  }
  return "????";
}

std::optional<MethodKind> kind_from_name(const std::string& name) {
  if (name == "PROD") return MethodKind::Producer;
  if (name == "CONS") return MethodKind::Consumer;
  if (name == "READ") return MethodKind::Reader;
  if (name == "WRIT") return MethodKind::Writer;
  return std::nullopt;
}

std::string describe_malformed(const MethodCall& c) {
  const bool in = c.item_in.has_value();
  const bool out = c.item_out.has_value();
  const bool prev = c.prev.has_value();
  switch (c.kind) {
    case MethodKind::Producer:
      if (!in) return "producer missing item_in";
      if (out || prev) return "producer carries item_out/prev";
      break;
    case MethodKind::Consumer:
    case MethodKind::Reader:
      if (in || prev) return "consumer/reader carries item_in/prev";
      if (c.completed() && !out) return "completed consumer/reader missing item_out";
      if (!c.completed() && out) return "pending consumer/reader carries item_out";
      break;
    case MethodKind::Writer:
      if (!in) return "writer missing item_in";
      if (out) return "writer carries item_out";
      if (c.completed() && !prev) return "completed writer missing prev";
      break;
  }
  if (c.completed() && *c.response_ns < c.invoke_ns)
    return "response_ns precedes invoke_ns";
  return {};
}

std::size_t ConfigHash::operator()(const Config& c) const noexcept {
  // splitmix64 over the packed pair
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return static_cast<std::size_t>(
      mix(static_cast<std::uint64_t>(c.object) * 0x9e3779b97f4a7c15ULL ^
          mix(static_cast<std::uint64_t>(c.item))));
}

std::size_t Basis::index_of(ObjectId object, Item item) {
  Config cfg{object, item};
  auto [it, inserted] = map_.try_emplace(cfg, reverse_.size());
  if (inserted) reverse_.push_back(cfg);
  return it->second;
}

std::optional<std::size_t> Basis::find(ObjectId object, Item item) const {
  auto it = map_.find(Config{object, item});
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

const Config& Basis::config_at(std::size_t index) const {
  return reverse_.at(index);
}

History History::from_calls(std::vector<MethodCall> calls) {
  History h;
  h.calls = std::move(calls);
  for (const MethodCall& c : h.calls) {
    if (c.item_in) h.basis.index_of(c.object, *c.item_in);
    if (c.item_out) h.basis.index_of(c.object, *c.item_out);
    if (c.prev) h.basis.index_of(c.object, *c.prev);
  }
  return h;
}

History project(const History& h, ObjectId object) {
  std::vector<MethodCall> calls;
  for (const MethodCall& c : h.calls)
    if (c.object == object) calls.push_back(c);
  return History::from_calls(std::move(calls));
}

// ---------------------------------------------------------------------------
// Recorder

struct Recorder::Handle::Log {
  std::vector<MethodCall> calls;
  std::atomic<bool> open{true};
};

struct Recorder::Impl {
  std::mutex registry_mu;  // guards registration only, not recording
  std::vector<std::unique_ptr<Handle::Log>> logs;
};

Recorder::Recorder() : impl_(std::make_unique<Impl>()) {}
Recorder::~Recorder() = default;

void Recorder::Handle::record(MethodCall call) {
  log_->calls.push_back(std::move(call));
}

void Recorder::Handle::close() { log_->open.store(false); }

bool Recorder::Handle::open() const { return log_->open.load(); }

Recorder::Handle Recorder::register_thread() {
  std::lock_guard<std::mutex> lock(impl_->registry_mu);
  impl_->logs.push_back(std::make_unique<Handle::Log>());
  return Handle(impl_->logs.back().get());
}

std::size_t Recorder::recorded_count() const {
  std::size_t n = 0;
  for (const auto& log : impl_->logs) n += log->calls.size();
  return n;
}

History Recorder::merge() {
  for (const auto& log : impl_->logs)
    if (log->open.load())
      throw std::logic_error("Recorder::merge: a thread buffer is still open");

  std::vector<MethodCall> all;
  all.reserve(recorded_count());
  for (auto& log : impl_->logs)
    for (MethodCall& c : log->calls) all.push_back(c);

  std::stable_sort(all.begin(), all.end(),
                   [](const MethodCall& a, const MethodCall& b) {
                     if (a.invoke_ns != b.invoke_ns) return a.invoke_ns < b.invoke_ns;
                     if (a.thread != b.thread) return a.thread < b.thread;
                     return a.seq < b.seq;
                   });
  for (std::size_t i = 0; i < all.size(); ++i) all[i].seq = i;
  return History::from_calls(std::move(all));
}

std::int64_t Recorder::now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ---------------------------------------------------------------------------
// File format

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

constexpr const char* kHeader =
    "seq,thread,kind,object,item_in,item_out,prev,invoke_ns,response_ns";

void put_field(std::ostream& out, const std::optional<Item>& v) {
  if (v) out << *v;
}

// One line split into exactly 9 fields; records the 1-based start column of
// each field so errors can point at it.
struct SplitLine {
  std::vector<std::string> fields;
  std::vector<std::size_t> columns;
};

SplitLine split_line(const std::string& line, std::size_t line_no) {
  SplitLine s;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    s.columns.push_back(start + 1);
    if (comma == std::string::npos) {
      s.fields.push_back(line.substr(start));
      break;
    }
    s.fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (s.fields.size() != 9)
    throw ParseError(line_no, 1,
                     "expected 9 comma-separated fields, got " +
                         std::to_string(s.fields.size()));
  return s;
}

std::int64_t parse_int(const std::string& field, std::size_t line_no,
                       std::size_t column, const char* what) {
  std::int64_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line_no, column, std::string("expected decimal integer for ") + what);
  return value;
}

std::optional<Item> parse_opt(const std::string& field, std::size_t line_no,
                              std::size_t column, const char* what) {
  if (field.empty()) return std::nullopt;
  return parse_int(field, line_no, column, what);
}

}  // namespace

void write_history(const History& h, std::ostream& out) {
  out << kHeader << '\n';
  for (const MethodCall& c : h.calls) {
    out << c.seq << ',' << c.thread << ',' << kind_name(c.kind) << ',' << c.object << ',';
    put_field(out, c.item_in);
    out << ',';
    put_field(out, c.item_out);
    out << ',';
    put_field(out, c.prev);
    out << ',' << c.invoke_ns << ',';
    if (c.response_ns) out << *c.response_ns;
    out << '\n';
  }
}

History read_history(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<MethodCall> calls;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      throw ParseError(line_no, line.size(), "CRLF line ending; history files are LF-only");
    if (!saw_header) {
      if (line != kHeader)
        throw ParseError(1, 1, std::string("missing or malformed header; expected \"") +
                                   kHeader + "\"");
      saw_header = true;
      continue;
    }
    if (line.empty())
      throw ParseError(line_no, 1, "empty line");

    SplitLine s = split_line(line, line_no);
    MethodCall c;
    c.seq = static_cast<std::uint64_t>(
        parse_int(s.fields[0], line_no, s.columns[0], "seq"));
    std::int64_t thread = parse_int(s.fields[1], line_no, s.columns[1], "thread");
    if (thread < 0)
      throw ParseError(line_no, s.columns[1], "thread id must be non-negative");
    c.thread = static_cast<ThreadId>(thread);
    auto kind = kind_from_name(s.fields[2]);
    if (!kind)
      throw ParseError(line_no, s.columns[2],
                       "unknown kind \"" + s.fields[2] + "\" (want PROD/CONS/READ/WRIT)");
    c.kind = *kind;
    c.object = parse_int(s.fields[3], line_no, s.columns[3], "object");
    c.item_in = parse_opt(s.fields[4], line_no, s.columns[4], "item_in");
    c.item_out = parse_opt(s.fields[5], line_no, s.columns[5], "item_out");
    c.prev = parse_opt(s.fields[6], line_no, s.columns[6], "prev");
    c.invoke_ns = parse_int(s.fields[7], line_no, s.columns[7], "invoke_ns");
    if (!s.fields[8].empty())
      c.response_ns = parse_int(s.fields[8], line_no, s.columns[8], "response_ns");

    std::string reason = describe_malformed(c);
    if (!reason.empty()) throw ParseError(line_no, 1, reason);
    calls.push_back(std::move(c));
  }
  if (!saw_header)
    throw ParseError(1, 1, std::string("missing header; expected \"") + kHeader + "\"");
  return History::from_calls(std::move(calls));
}

void save_history(const History& h, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: keep LF on every platform
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_history(h, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

History load_history(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return read_history(in);
}

}  // namespace quant
