// oracles.hpp - test-only reference computations and helpers.
//
// Nothing here calls into the code paths it is used to check.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

namespace oracle {

/// Textbook O(nm) LCS length.
template <typename S>
std::size_t lcs_length(const S& a, const S& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Minimal Insert+Delete cost between two sequences.
template <typename S>
std::size_t min_edit_cost(const S& a, const S& b) {
  return a.size() + b.size() - 2 * lcs_length(a, b);
}

struct BitConfusion {
  std::size_t tp = 0, fp = 0, fn = 0;
};

/// Rows are bit patterns; counts each (slot, bit) pair separately.
inline BitConfusion brute_confusion(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                                    unsigned width) {
  BitConfusion c;
  for (std::size_t s = 0; s < a.size(); ++s) {
    for (unsigned bit = 0; bit < width; ++bit) {
      const bool x = a[s] >> bit & 1u;
      const bool y = b[s] >> bit & 1u;
      if (x && y) ++c.tp;
      if (x && !y) ++c.fp;
      if (!x && y) ++c.fn;
    }
  }
  return c;
}

/// Every valid pattern of the ten-bit simple schema, built constructively:
/// {None} alone, or any choice of intentions with any subset of their actions.
/// Bits: 0 Planning, 1 generation, 2 organization, 3 Implementation,
/// 4 lexical_chaining, 5 Revision, 6 syntactic, 7 lexical, 8 structural, 9 None.
inline std::set<std::uint32_t> valid_simple_patterns() {
  std::set<std::uint32_t> out{1u << 9};
  const std::vector<std::pair<unsigned, std::vector<unsigned>>> tree = {
      {0, {1, 2}}, {3, {4}}, {5, {6, 7, 8}}};
  std::vector<std::uint32_t> partial{0};
  for (const auto& [intent, acts] : tree) {
    std::vector<std::uint32_t> next;
    for (auto p : partial) {
      next.push_back(p);  // intention absent
      for (std::uint32_t sub = 0; sub < (1u << acts.size()); ++sub) {
        std::uint32_t q = p | (1u << intent);
        for (std::size_t k = 0; k < acts.size(); ++k)
          if (sub >> k & 1u) q |= 1u << acts[k];
        next.push_back(q);
      }
    }
    partial = std::move(next);
  }
  out.insert(partial.begin(), partial.end());
  return out;
}

// --- random text --------------------------------------------------------------

inline const std::vector<char32_t>& alphabet() {
  static const std::vector<char32_t> a = {
      U'a', U'b', U'c', U'd', U'e', U' ', U' ', U'.', U'\n', U'\\', U'{', U'}',
      U'é', U'ü', U'中', U'文', U'\U0001F600', U'Ж', U'—'};
  return a;
}

inline std::u32string random_text(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet().size() - 1);
  std::u32string s(len(rng), U'a');
  for (auto& c : s) c = alphabet()[pick(rng)];
  return s;
}

/// A handful of random splices of `old`, like successive edits between snapshots.
inline std::u32string mutate(std::mt19937_64& rng, std::u32string s, std::size_t max_len) {
  std::uniform_int_distribution<int> n_edits(1, 6);
  const int n = n_edits(rng);
  for (int k = 0; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> at(0, s.size());
    const auto pos = at(rng);
    std::uniform_int_distribution<std::size_t> del(0, std::min<std::size_t>(s.size() - pos, 40));
    s.erase(pos, del(rng));
    auto ins = random_text(rng, 40);
    s.insert(pos, ins);
    if (s.size() > max_len) s.resize(max_len);
  }
  return s;
}

// --- files and processes ------------------------------------------------------

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(WTK_FIXTURES) / name; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wtk-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs the wtk binary; args are passed through a shell and must not need escaping.
inline RunResult run_cli(const std::string& args, const std::filesystem::path& work) {
  std::filesystem::create_directories(work);
  const auto out = work / "stdout.txt";
  const auto err = work / "stderr.txt";
  const std::string cmd = std::string("\"") + WTK_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

}  // namespace oracle
