#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cwsplit/error.hpp"
#include "cwsplit/scheme.hpp"

namespace cwsplit {

// Text form: a header line `# dim=<N> order=<p> label=<text>` followed by one
// `coord re im` line per factor, coefficients printed with 17 significant digits.
inline void write_scheme(std::ostream& os, const Scheme& s) {
  os << "# dim=" << s.dim << " order=" << s.declared_order << " label=" << s.label << '\n';
  char buf[96];
  for (const Factor& f : s.factors) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", f.coord, f.coeff.real(), f.coeff.imag());
    os << buf;
  }
}

inline Scheme read_scheme(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::io, "scheme file is empty");

  Scheme s;
  bool have_dim = false;
  {
    if (line.rfind('#', 0) != 0) throw Error(ErrorKind::invalid_argument, "scheme header must start with '#'");
    const auto label_pos = line.find("label=");
    std::string head = line.substr(1, label_pos == std::string::npos ? std::string::npos : label_pos - 1);
    if (label_pos != std::string::npos) s.label = line.substr(label_pos + 6);
    std::istringstream hs(head);
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const std::string value = tok.substr(eq + 1);
      try {
        if (key == "dim") {
          s.dim = std::stoi(value);
          have_dim = true;
        } else if (key == "order") {
          s.declared_order = std::stoi(value);
        }
      } catch (const std::exception&) {
        throw Error(ErrorKind::invalid_argument, "bad header field '" + tok + "'");
      }
    }
  }
  if (!have_dim) throw Error(ErrorKind::invalid_argument, "scheme header lacks dim=");

  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Factor f;
    double re = 0.0;
    double im = 0.0;
    if (!(ls >> f.coord >> re >> im)) {
      throw Error(ErrorKind::invalid_argument, "malformed factor on line " + std::to_string(lineno));
    }
    f.coeff = {re, im};
    s.factors.push_back(f);
  }
  validate(s);
  return s;
}

inline Scheme load_scheme_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open scheme file '" + path + "'");
  return read_scheme(in);
}

// Named schemes used by the experiment columns.
struct NamedBase {
  const char* name;
  char family;
  int k;
};

inline constexpr NamedBase kNamedBases[] = {
    {"3rd", 'u', 1}, {"4th", 'w', 1},  {"6th", 'w', 2},  {"8th", 'w', 3},
    {"10th", 'z', 4}, {"12th", 'z', 5}, {"14th", 'z', 6},
};

inline std::vector<std::string> scheme_names() {
  std::vector<std::string> names{"lie-trotter", "strang"};
  for (const NamedBase& b : kNamedBases) names.emplace_back(b.name);
  return names;
}

struct FamilyMember {
  char family = 0;
  int k = -1;
};

/// Family and level behind a higher-order name ("3rd".."14th", u<k>, w<k>, z<k>).
inline std::optional<FamilyMember> family_member(std::string_view name) {
  for (const NamedBase& b : kNamedBases) {
    if (name == b.name) return FamilyMember{b.family, b.k};
  }
  if (name.size() >= 2 && (name[0] == 'u' || name[0] == 'w' || name[0] == 'z')) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), value);
    if (ec == std::errc{} && ptr == name.data() + name.size()) return FamilyMember{name[0], value};
  }
  return std::nullopt;
}

/// Two-operator base for a higher-order name: "3rd".."14th", or a family
/// member written as u<k>, w<k>, z<k>.
inline Scheme named_two_operator_base(std::string_view name) {
  const std::optional<FamilyMember> m = family_member(name);
  if (!m) throw Error(ErrorKind::invalid_argument, "unknown scheme '" + std::string(name) + "'");
  Scheme s = family_scheme(m->family, m->k);
  s.label = std::string(name);
  return s;
}

inline constexpr std::uint64_t kDefaultMaxFactors = 10'000'000;

/// Resolves a scheme name for a system of dimension `dim`. Higher-order
/// two-operator bases are expanded to `dim` coordinates when dim >= 3.
inline Scheme named_scheme(std::string_view name, int dim, std::uint64_t max_factors = kDefaultMaxFactors) {
  if (name == "lie-trotter") return lie_trotter(dim);
  if (name == "strang") return strang(dim);
  Scheme base = named_two_operator_base(name);
  if (dim < 2) throw Error(ErrorKind::invalid_dimension, "higher-order schemes need dim >= 2");
  if (dim == 2) return base;
  const std::uint64_t count = count_factors(dim, base.factors.size());
  if (count > max_factors) {
    throw Error(ErrorKind::invalid_argument, "scheme '" + std::string(name) + "' in dimension " +
                                                 std::to_string(dim) + " needs " + std::to_string(count) +
                                                 " factors per step");
  }
  return expand_to_dimension(base, dim);
}

}  // namespace cwsplit
