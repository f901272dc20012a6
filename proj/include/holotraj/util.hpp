#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace holotraj {

// FNV-1a 64-bit. Used for content fingerprints and cell addressing; not
// cryptographic.
constexpr std::uint64_t fnv1a(std::string_view bytes,
                              std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v);

std::uint64_t hash_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Shortest round-trip decimal text for a double (locale independent).
std::string format_double(double v);

// Runs fn(i) for i in [0, n) on `jobs` threads. Work items are claimed from a
// shared counter; callers must make fn(i) independent of execution order.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

int physical_cores();

}  // namespace holotraj
