#pragma once

// Command workflows over network descriptions and trace files, producing
// Verdicts that render either as text or as key=value lines.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpanet/network.hpp"

namespace tpanet {

struct CommandOptions {
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> bound;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::optional<std::string> net;  // defaults to the last net, else the last automaton
};

struct Verdict {
  enum class Status { Ok, Witness, Error };

  std::string command;
  Status status = Status::Ok;
  int exit_code = 0;  // 0 ok, 1 witness, 2 usage/parse, 3 budget
  std::vector<std::pair<std::string, std::string>> fields;
  std::string text;  // human-readable payload

  std::string render(bool machine) const;
};

std::string to_string(Verdict::Status s);

/// `files` are network descriptions, or two trace files for `dist`.
Verdict run_command(const std::string& command, const std::vector<std::string>& files,
                    const CommandOptions& opts = {});

/// Same on already-loaded inputs (texts instead of paths).
Verdict run_command_on_text(const std::string& command, const std::vector<std::string>& texts,
                            const CommandOptions& opts = {});

}  // namespace tpanet
