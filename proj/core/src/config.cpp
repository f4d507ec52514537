#include "ddinv/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "ddinv/errors.hpp"
#include "ddinv/text_format.hpp"

namespace ddinv::experiment {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParseError("invalid integer for '" + std::string(key) + "': '" +
                         std::string(value) + "'",
                     0);
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  try {
    return io::parse_double(value);
  } catch (const ParseError&) {
    throw ParseError("invalid number for '" + std::string(key) + "': '" +
                         std::string(value) + "'",
                     0);
  }
}

}  // namespace

std::string_view to_string(SystemChoice choice) {
  switch (choice) {
    case SystemChoice::StableZeros: return "stable-zeros";
    case SystemChoice::NoZeros: return "no-zeros";
    case SystemChoice::UnstableZero: return "unstable-zero";
    case SystemChoice::FromFile: return "from-file";
  }
  return "unknown";
}

SystemChoice parse_system(std::string_view name) {
  for (auto c : {SystemChoice::StableZeros, SystemChoice::NoZeros,
                 SystemChoice::UnstableZero, SystemChoice::FromFile}) {
    if (name == to_string(c)) return c;
  }
  throw ParseError("unknown system '" + std::string(name) +
                       "' (expected stable-zeros, no-zeros, unstable-zero or from-file)",
                   0);
}

void apply_setting(ScenarioConfig& config, std::string_view key,
                   std::string_view value) {
  if (key == "system") {
    config.system = parse_system(value);
  } else if (key == "N") {
    config.past = parse_int<Index>(key, value);
  } else if (key == "L") {
    if (value == "auto") {
      config.delay.reset();
    } else {
      config.delay = parse_int<Index>(key, value);
    }
  } else if (key == "n") {
    config.state_dim = parse_int<Index>(key, value);
  } else if (key == "data_length") {
    config.data_length = parse_int<Index>(key, value);
  } else if (key == "seed") {
    config.seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "horizon") {
    config.horizon = parse_int<Index>(key, value);
  } else if (key == "init_guess") {
    if (value == "zero") {
      config.init.kind = InitialGuess::Kind::Zero;
    } else if (value == "random") {
      config.init.kind = InitialGuess::Kind::SeededRandom;
    } else {
      throw ParseError("init_guess must be 'zero' or 'random'", 0);
    }
  } else if (key == "init_scale") {
    config.init.scale = parse_real(key, value);
  } else if (key == "rank_tol") {
    config.tolerances.rank_tol = parse_real(key, value);
  } else if (key == "y_trunc") {
    config.tolerances.y_trunc = parse_real(key, value);
  } else if (key == "ls_trunc") {
    config.tolerances.ls_trunc = parse_real(key, value);
  } else if (key == "zero_margin") {
    config.zero_margin = parse_real(key, value);
  } else if (key == "offline_data") {
    config.offline_data = std::string(value);
  } else if (key == "online_data") {
    config.online_data = std::string(value);
  } else {
    throw ParseError("unknown config key '" + std::string(key) + "'", 0);
  }
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    const std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no);
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseError("expected 'key = value'", line_no);
    }
    try {
      apply_setting(config, key, value);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_text(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "system = " << to_string(c.system) << '\n'
      << "N = " << c.past << '\n'
      << "L = " << (c.delay ? std::to_string(*c.delay) : std::string("auto")) << '\n';
  if (c.state_dim) out << "n = " << *c.state_dim << '\n';
  out << "data_length = " << c.data_length << '\n'
      << "seed = " << c.seed << '\n'
      << "horizon = " << c.horizon << '\n'
      << "init_guess = "
      << (c.init.kind == InitialGuess::Kind::Zero ? "zero" : "random") << '\n'
      << "init_scale = " << io::format_double(c.init.scale) << '\n'
      << "rank_tol = " << io::format_double(c.tolerances.rank_tol) << '\n'
      << "y_trunc = " << io::format_double(c.tolerances.y_trunc) << '\n'
      << "ls_trunc = " << io::format_double(c.tolerances.ls_trunc) << '\n'
      << "zero_margin = " << io::format_double(c.zero_margin) << '\n';
  if (!c.offline_data.empty()) out << "offline_data = " << c.offline_data << '\n';
  if (!c.online_data.empty()) out << "online_data = " << c.online_data << '\n';
  return out.str();
}

void validate(const ScenarioConfig& c) {
  if (c.past < 1) throw ValidationError("N must be >= 1");
  if (c.delay && *c.delay < 0) throw ValidationError("L must be >= 0 or 'auto'");
  if (c.horizon < 1) throw ValidationError("horizon must be >= 1");
  if (c.data_length < 1) throw ValidationError("data_length must be >= 1");
  if (!(c.init.scale >= 0.0)) throw ValidationError("init_scale must be >= 0");
  if (!(c.zero_margin >= 0.0)) throw ValidationError("zero_margin must be >= 0");
  try {
    c.tolerances.validate();
  } catch (const InvalidInputError& e) {
    throw ValidationError(e.what());
  }
  if (c.state_dim && *c.state_dim < 1) throw ValidationError("n must be >= 1");
  if (c.system == SystemChoice::FromFile) {
    if (c.offline_data.empty()) {
      throw ValidationError("system = from-file requires offline_data");
    }
    if (!c.state_dim) throw ValidationError("system = from-file requires n");
    if (!c.delay) throw ValidationError("system = from-file requires an explicit L");
  }
}

}  // namespace ddinv::experiment
