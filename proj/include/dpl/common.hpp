#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpl {

using Shape = std::vector<int64_t>;

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string shape_str(const Shape& s);
int64_t numel_of(const Shape& s);
std::vector<int64_t> row_major_strides(const Shape& s);

/// FNV-1a over arbitrary bytes, used to derive per-sample seeds and to
/// fingerprint config snapshots.
uint64_t fnv1a(const void* data, size_t n, uint64_t seed = 0xcbf29ce484222325ull);
uint64_t hash_combine(uint64_t a, uint64_t b);
uint64_t derive_seed(uint64_t base, const std::string& tag, uint64_t index);

/// Deterministic random source. Wraps a fixed-algorithm engine and provides
/// explicit sampling routines so results do not depend on the standard
/// library's unspecified distribution implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi);
    /// i in [0, n).
    int64_t uniform_int(int64_t n);
    /// Standard normal via Box-Muller.
    double normal();
    double normal(double mean, double stddev);
    /// Marsaglia-Tsang, valid for any alpha > 0.
    double gamma(double alpha);
    double beta(double a, double b);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int64_t i = static_cast<int64_t>(v.size()) - 1; i > 0; --i) {
            std::swap(v[i], v[uniform_int(i + 1)]);
        }
    }
    std::vector<int64_t> permutation(int64_t n);

  private:
    uint64_t state_;
};

}  // namespace dpl
