// Copyright 2026 The sg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace sg {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit digest, hex encoded.
inline std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a64_hex(ss.str());
}

// Full round-trip precision for CSV output.
inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunManifest {
  std::string command_line;
  std::string input_hash;  // digest of the game file / builtin token
  std::optional<std::uint64_t> seed;
  std::string tool_version = kToolVersion;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j{{"command_line", command_line},
                     {"game_file_hash", input_hash},
                     {"tool_version", tool_version},
                     {"wall_seconds", wall_seconds}};
    if (seed) j["seed"] = *seed;
    return j;
  }

  // Written next to the artifact as <path>.manifest.json.
  void write_alongside(const std::string& artifact_path) const {
    std::ofstream out(artifact_path + ".manifest.json");
    out << to_json().dump(2) << "\n";
  }
};

// Chunked parallel map over [0, n); results must be written to
// preallocated slots so the output order is independent of scheduling.
// The first exception thrown by any worker is rethrown on the caller.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex mu;
  std::exception_ptr first_error;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body, &mu, &first_error] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("SG_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  return hw > 0 ? hw : 1;
}

}  // namespace sg
