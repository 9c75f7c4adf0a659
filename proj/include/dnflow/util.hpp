#ifndef DNFLOW_UTIL_HPP
#define DNFLOW_UTIL_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dnflow {

// Error taxonomy; the CLI maps these onto exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Global worker count for chunked reductions. Results are independent of
// this value: partial sums are formed per fixed-size chunk and combined in
// chunk order.
int thread_count();
void set_thread_count(int n);

// Runs fn(chunk_begin, chunk_end, chunk_index) over [0,total) in chunks of
// fixed size. Chunk boundaries do not depend on the worker count.
void for_each_chunk(std::size_t total,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Deterministic chunked sum of term(i) over [0,total).
double chunked_sum(std::size_t total, const std::function<double(std::size_t)>& term);

// splitmix64; used to derive stream seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// xorshift-style generator with explicit state; gives the same stream on
// every platform (std::distributions are not pinned by the standard).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  double uniform01();                       // [0,1)
  double uniform(double a, double b);       // [a,b)
  double log_uniform(double lo, double hi); // log-uniform magnitude
  double normal();                          // Box-Muller, deterministic

 private:
  std::uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// FNV-1a 64-bit, hex string; manifest checksums.
std::string fnv1a_hex(const std::string& bytes);

// Shortest round-trip formatting for doubles (%.17g trimmed); used by every
// exporter so that re-reading a file reproduces the exact bits.
std::string format_double(double v);

}  // namespace dnflow

#endif
