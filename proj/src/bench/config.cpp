#include "tetra/bench/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

#include "tetra/common.hpp"

namespace tetra::bench {

namespace {

struct Field {
  std::string_view key;
  std::variant<std::uint64_t WorkloadConfig::*, unsigned WorkloadConfig::*,
               double WorkloadConfig::*, bool WorkloadConfig::*>
      member;
  double lo = 0.0;
  double hi = 0.0;
};

constexpr double kMaxCount = 1e15;

// Probabilities live in [0, 1]; counts in [lo, kMaxCount].
const Field kFields[] = {
    {"seed", &WorkloadConfig::seed, 0, 0},
    {"nodes", &WorkloadConfig::nodes, 2, kMaxCount},
    {"ba_m", &WorkloadConfig::ba_m, 1, kMaxCount},
    {"alpha", &WorkloadConfig::alpha, 0, 1e6},
    {"hot_fraction", &WorkloadConfig::hot_fraction, 0, 1},
    {"hot_access", &WorkloadConfig::hot_access, 0, 1},
    {"traverse_fraction", &WorkloadConfig::traverse_fraction, 0, 1},
    {"read_ratio", &WorkloadConfig::read_ratio, 0, 1},
    {"hops", &WorkloadConfig::hops, 1, 64},
    {"value_min", &WorkloadConfig::value_min, 1, kMaxCount},
    {"value_max", &WorkloadConfig::value_max, 1, kMaxCount},
    {"duplicate_ratio", &WorkloadConfig::duplicate_ratio, 0, 1},
    {"warmup_ops", &WorkloadConfig::warmup_ops, 0, kMaxCount},
    {"window_ops", &WorkloadConfig::window_ops, 1, kMaxCount},
    {"trials", &WorkloadConfig::trials, 1, kMaxCount},
    {"block_ops", &WorkloadConfig::block_ops, 1, kMaxCount},
    {"commit_every", &WorkloadConfig::commit_every, 1, kMaxCount},
    {"objects", &WorkloadConfig::objects, 1, kMaxCount},
    {"max_chain", &WorkloadConfig::max_chain, 1, kMaxCount},
    {"cache_capacity", &WorkloadConfig::cache_capacity, 0, kMaxCount},
    {"segment_bytes", &WorkloadConfig::segment_bytes, 64, kMaxCount},
    {"verify_on_get", &WorkloadConfig::verify_on_get, 0, 1},
    {"deduplicate", &WorkloadConfig::deduplicate, 0, 1},
    {"enforce_capability", &WorkloadConfig::enforce_capability, 0, 1},
    {"ownership", &WorkloadConfig::ownership, 0, 1},
    {"graph_split", &WorkloadConfig::graph_split, 0, 1},
    {"resamples", &WorkloadConfig::resamples, 1, kMaxCount},
    {"horizon", &WorkloadConfig::horizon, 1, kMaxCount},
    {"reps", &WorkloadConfig::reps, 1, kMaxCount},
};

std::string_view strip(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::size_t line, std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": bad value '" + std::string(value) +
                                          "' for " + std::string(key), line);
}

template <class T>
T parse_integer(std::string_view value, std::size_t line, const Field& f) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(line, f.key, value);
  if (f.hi > 0 && (static_cast<double>(out) < f.lo || static_cast<double>(out) > f.hi)) bad_value(line, f.key, value);
  return out;
}

void assign(WorkloadConfig& c, const Field& f, std::string_view value, std::size_t line) {
  std::visit(
      [&](auto member) {
        using T = std::remove_cvref_t<decltype(c.*member)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1") {
            c.*member = true;
          } else if (value == "false" || value == "0") {
            c.*member = false;
          } else {
            bad_value(line, f.key, value);
          }
        } else if constexpr (std::is_same_v<T, double>) {
          double out = 0.0;
          try {
            std::size_t used = 0;
            out = std::stod(std::string(value), &used);
            if (used != value.size()) bad_value(line, f.key, value);
          } catch (const std::logic_error&) {
            bad_value(line, f.key, value);
          }
          if (!(out >= f.lo && out <= f.hi)) bad_value(line, f.key, value);
          c.*member = out;
        } else {
          c.*member = parse_integer<T>(value, line, f);
        }
      },
      f.member);
}

}  // namespace

void WorkloadConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidConfig, why); };
  if (ba_m >= nodes) fail("ba_m must be below nodes");
  if (value_min > value_max) fail("value_min exceeds value_max");
  if (hot_fraction * static_cast<double>(nodes) < 1.0 && hot_access > 0.0) fail("hot set is empty");
  if (objects > nodes) fail("more objects than nodes");
}

WorkloadConfig parse_config(std::string_view text) {
  WorkloadConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    auto line = strip(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": expected key=value", line_no);
    }
    const auto key = strip(line.substr(0, eq));
    const auto value = strip(line.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& f : kFields) {
      if (f.key == key) field = &f;
    }
    if (!field) throw Error(ErrorCode::kUnknownKey, std::string(key), line_no);
    assign(config, *field, value, line_no);
  }
  config.validate();
  return config;
}

WorkloadConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_text(const WorkloadConfig& config) {
  std::ostringstream out;
  for (const auto& f : kFields) {
    out << f.key << '=';
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(config.*member)>;
          if constexpr (std::is_same_v<T, bool>) {
            out << (config.*member ? "true" : "false");
          } else if constexpr (std::is_same_v<T, double>) {
            char buf[32];
            auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), config.*member);
            out << std::string_view(buf, static_cast<std::size_t>(end - buf));
          } else {
            out << config.*member;
          }
        },
        f.member);
    out << '\n';
  }
  return out.str();
}

}  // namespace tetra::bench
