#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "laakso_lab/tree_space.hpp"

namespace laakso_lab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// "{1,3}", "1,3", "{}" or "" (root).
TreeNode parse_tree_node(const std::string& text);

struct VerifyAllOptions {
  std::uint64_t seed = 0;
  std::optional<TreeNode> fault;  // injected into phi on G_2, b = 2
  bool timings = false;           // wall-clock times break byte-identical output
};

struct VerifyAllResult {
  bool passed = true;
  std::string json;
};

// Every suite at desk-scale defaults.
VerifyAllResult verify_all(const VerifyAllOptions& options = {});

// Entry point of the laakso-lab tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace laakso_lab::cli
