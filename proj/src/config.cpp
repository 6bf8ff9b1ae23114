#include "dashapp/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "dashapp/errors.hpp"

namespace dashapp {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, int line) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) {
    throw ParseError(line, "malformed number '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& v, int line) {
  long long out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) {
    throw ParseError(line, "malformed integer '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& v, int line) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) {
    throw ParseError(line, "malformed unsigned integer '" + v + "'");
  }
  return out;
}

}  // namespace

const char* gamma_source_name(GammaSource g) {
  switch (g) {
    case GammaSource::Theory:
      return "theory";
    case GammaSource::Grid:
      return "grid";
    case GammaSource::Fixed:
      return "fixed";
  }
  return "?";
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig c;
  std::string section;
  std::string raw;
  int line = 0;
  bool any = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const std::size_t hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    any = true;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "problem" && section != "participation" &&
          section != "compressor" && section != "variant" &&
          section != "run") {
        throw ParseError(line, "unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line, "expected key = value, got '" + s + "'");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw ParseError(line, "empty key or value");
    }
    if (section.empty()) {
      throw ParseError(line, "key '" + key + "' outside any section");
    }

    if (section == "problem") {
      if (key == "dataset") {
        c.dataset_path = val;
      } else if (key == "loss") {
        if (val == "squared_sigmoid") {
          c.loss = Loss::SquaredSigmoid;
        } else if (val == "softmax_nonconvex") {
          c.loss = Loss::SoftmaxNonconvexReg;
        } else {
          throw ParseError(line, "unknown loss '" + val + "'");
        }
      } else if (key == "lambda") {
        c.lambda = to_double(val, line);
      } else if (key == "noise_sigma") {
        c.noise_sigma = to_double(val, line);
      } else if (key == "n") {
        c.n = static_cast<int>(to_int(val, line));
      } else if (key == "m") {
        c.synthetic.m = static_cast<int>(to_int(val, line));
      } else if (key == "d") {
        c.synthetic.d = static_cast<int>(to_int(val, line));
      } else if (key == "density") {
        c.synthetic.density = to_double(val, line);
      } else if (key == "flip_prob") {
        c.synthetic.flip_prob = to_double(val, line);
      } else if (key == "data_seed") {
        c.data_seed = to_u64(val, line);
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [problem]");
      }
    } else if (section == "participation") {
      if (key == "scheme") {
        if (val == "full") {
          c.scheme = ParticipationScheme::Kind::Full;
        } else if (val == "s_nice") {
          c.scheme = ParticipationScheme::Kind::SNice;
        } else if (val == "independent") {
          c.scheme = ParticipationScheme::Kind::Independent;
        } else {
          throw ParseError(line, "unknown scheme '" + val + "'");
        }
      } else if (key == "s") {
        c.s = static_cast<int>(to_int(val, line));
      } else if (key == "p") {
        c.p = to_double(val, line);
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [participation]");
      }
    } else if (section == "compressor") {
      if (key == "kind") {
        if (val == "identity") {
          c.compressor = Compressor::Kind::Identity;
        } else if (val == "rand_k") {
          c.compressor = Compressor::Kind::RandK;
        } else {
          throw ParseError(line, "unknown compressor '" + val + "'");
        }
      } else if (key == "K") {
        c.K = static_cast<int>(to_int(val, line));
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [compressor]");
      }
    } else if (section == "variant") {
      if (key == "name") {
        try {
          c.variant = variant_from_name(val);
        } catch (const InvalidArgumentError&) {
          throw ParseError(line, "unknown variant '" + val + "'");
        }
      } else if (key == "B") {
        c.B = static_cast<int>(to_int(val, line));
      } else if (key == "B_prime") {
        c.B_prime = static_cast<int>(to_int(val, line));
      } else if (key == "B_init") {
        c.B_init = static_cast<int>(to_int(val, line));
      } else if (key == "p_page") {
        c.p_page = to_double(val, line);
      } else if (key == "p_mega") {
        c.p_mega = to_double(val, line);
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [variant]");
      }
    } else {  // run
      if (key == "T") {
        c.T = static_cast<int>(to_int(val, line));
      } else if (key == "seeds") {
        c.seeds.clear();
        std::stringstream items(val);
        std::string item;
        while (std::getline(items, item, ',')) {
          item = trim(item);
          if (item.empty()) throw ParseError(line, "empty seed entry");
          c.seeds.push_back(to_u64(item, line));
        }
      } else if (key == "gamma") {
        if (val == "theory") {
          c.gamma_source = GammaSource::Theory;
        } else if (val == "grid") {
          c.gamma_source = GammaSource::Grid;
        } else {
          c.gamma_source = GammaSource::Fixed;
          c.gamma_fixed = to_double(val, line);
        }
      } else if (key == "grid_i_min") {
        c.grid_i_min = static_cast<int>(to_int(val, line));
      } else if (key == "grid_i_max") {
        c.grid_i_max = static_cast<int>(to_int(val, line));
      } else if (key == "epsilon") {
        c.epsilon = to_double(val, line);
      } else if (key == "output_dir") {
        c.output_dir = val;
      } else {
        throw ParseError(line, "unknown key '" + key + "' in [run]");
      }
    }
  }
  if (!any) throw ParseError(0, "empty config");

  if (c.n < 1) throw ParseError(0, "n must be >= 1");
  if (c.T < 1) throw ParseError(0, "T must be >= 1");
  if (c.seeds.empty()) throw ParseError(0, "seed list must be nonempty");
  if (c.grid_i_min > c.grid_i_max) {
    throw ParseError(0, "grid_i_min must be <= grid_i_max");
  }
  if (c.gamma_source == GammaSource::Fixed && !(c.gamma_fixed > 0.0)) {
    throw ParseError(0, "fixed gamma must be > 0");
  }
  c.synthetic.n = c.n;
  if (c.s == 0) c.s = c.n;
  return c;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgumentError("cannot open config file: " + path);
  }
  return parse_experiment_config(in);
}

}  // namespace dashapp
