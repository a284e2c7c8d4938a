// Domain types for concurrent method-call histories: calls, configuration
// indexing, thread-local recording, and a line-based file format.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace quant {

using Item = std::int64_t;
using ObjectId = std::int64_t;
using ThreadId = std::uint32_t;

enum class MethodKind : std::uint8_t { Producer, Consumer, Reader, Writer };

// Four-letter tags used by the history file format.
const char* kind_name(MethodKind k);
std::optional<MethodKind> kind_from_name(const std::string& name);

struct MethodCall {
  std::uint64_t seq = 0;
  ThreadId thread = 0;
  MethodKind kind = MethodKind::Producer;
  ObjectId object = 0;
  std::optional<Item> item_in;   // producer/writer input
  std::optional<Item> item_out;  // consumer/reader output
  std::optional<Item> prev;      // writer's overwritten value
  std::int64_t invoke_ns = 0;
  std::optional<std::int64_t> response_ns;  // absent while pending

  bool completed() const { return response_ns.has_value(); }
  bool operator==(const MethodCall&) const = default;
};

// Returns a non-empty reason if the call breaks the per-kind payload rules
// (producer carries item_in only, consumer/reader item_out only, writer
// item_in+prev) or has response_ns < invoke_ns.
std::string describe_malformed(const MethodCall& c);

// An (object, item payload) pair; the unit the verifier sums over.
struct Config {
  ObjectId object = 0;
  Item item = 0;
  bool operator==(const Config&) const = default;
};

struct ConfigHash {
  std::size_t operator()(const Config& c) const noexcept;
};

// Bijection between observed configurations and dense indices [0, count).
// First encounter allocates the next free index; lookups are stable.
class Basis {
 public:
  std::size_t index_of(ObjectId object, Item item);
  std::optional<std::size_t> find(ObjectId object, Item item) const;
  const Config& config_at(std::size_t index) const;
  std::size_t count() const { return reverse_.size(); }

 private:
  std::unordered_map<Config, std::size_t, ConfigHash> map_;
  std::vector<Config> reverse_;
};

inline std::size_t params_to_index(Basis& basis, ObjectId object, Item item) {
  return basis.index_of(object, item);
}

struct History {
  std::vector<MethodCall> calls;
  Basis basis;

  // Builds the basis over every payload field present in `calls`, in call
  // order (item_in, item_out, prev within one call). Call order and seq
  // values are preserved as given.
  static History from_calls(std::vector<MethodCall> calls);

  std::size_t size() const { return calls.size(); }
  bool operator==(const History& other) const { return calls == other.calls; }
};

// Subhistory of all calls on one object (H|x). Seq values are preserved.
History project(const History& h, ObjectId object);

// Thread-local recording. Each worker owns a Handle; recording never blocks
// another recorder. merge() requires every handle to be closed.
class Recorder {
 public:
  class Handle {
   public:
    void record(MethodCall call);
    void close();
    bool open() const;

   private:
    friend class Recorder;
    struct Log;
    explicit Handle(Log* log) : log_(log) {}
    Log* log_;
  };

  Recorder();
  ~Recorder();
  Recorder(const Recorder&) = delete;
  Recorder& operator=(const Recorder&) = delete;

  // Safe to call concurrently; the returned handle is for one thread only.
  Handle register_thread();

  // All handles must be closed. Calls are sorted by invoke_ns (ties broken
  // by thread id and record order) and seq is re-densified to 0..n-1.
  History merge();

  std::size_t recorded_count() const;

  static std::int64_t now_ns();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// History file format: UTF-8, LF newlines, header line exactly
//   seq,thread,kind,object,item_in,item_out,prev,invoke_ns,response_ns
// kind in {PROD,CONS,READ,WRIT}; absent payloads are empty fields; all
// numbers decimal; no quoting. CRLF input is rejected.
void write_history(const History& h, std::ostream& out);
History read_history(std::istream& in);
void save_history(const History& h, const std::string& path);
History load_history(const std::string& path);

}  // namespace quant
