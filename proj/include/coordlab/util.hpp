#ifndef COORDLAB_UTIL_HPP
#define COORDLAB_UTIL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace coordlab {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

std::vector<std::string> split_ws(const std::string& s);
std::vector<std::string> split_on(const std::string& s, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

// FNV-1a over bytes, used for cache stamps.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 1469598103934665603ull);
std::string hash_hex(std::uint64_t h);

// SplitMix64; drives per-entry RNG seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

double logsumexp(const std::vector<double>& xs);
double logadd(double a, double b);

constexpr double kNegInf = -1e300;

}  // namespace coordlab

#endif
