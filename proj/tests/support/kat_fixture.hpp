#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrmc/pcg.hpp"

namespace rrmc::testing {

struct KatCase {
  uint128 init_state;
  std::uint64_t stream;
  std::vector<std::uint64_t> outputs;
};

inline uint128 parse_hex128(const std::string& text) {
  std::string digits = text.rfind("0x", 0) == 0 ? text.substr(2) : text;
  uint128 v = 0;
  for (char c : digits) {
    v = (v << 4) | static_cast<uint128>(std::stoul(std::string(1, c), nullptr, 16));
  }
  return v;
}

inline std::vector<KatCase> load_kat(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open fixture " + path);
  }
  std::vector<KatCase> cases;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    if (head == "case") {
      std::string seed, stream;
      ss >> seed >> stream;
      cases.push_back({parse_hex128(seed), static_cast<std::uint64_t>(parse_hex128(stream)), {}});
    } else {
      cases.back().outputs.push_back(static_cast<std::uint64_t>(parse_hex128(head)));
    }
  }
  return cases;
}

inline std::string kat_path() { return std::string(RRMC_FIXTURE_DIR) + "/pcg64_kat.txt"; }

}  // namespace rrmc::testing
