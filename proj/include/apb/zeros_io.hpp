#pragma once

// Zero-archive ingestion.  An archive is a directory of plain-text files, one
// per L-function data set:
//
//   zeros/d<D>_chi<J>.txt
//     # conductor=<D>
//     # index=<J>
//     # real=<0|1>
//     # height=<H>
//     # count=<N>
//     <ordinate>          (one decimal per line, strictly ascending, > 0)
//
// For a real character the body lists the ordinates gamma > 0 only; for a
// non-real character it lists |t| for every zero of ONE member of the
// conjugate pair.  Either way, summing over a file and doubling accounts for
// the full set of zeros of the characters the file represents.
//
// Ordinates are parsed outward into intervals and padded by a small slack so
// that downstream sums remain correct even though the stored decimals are
// approximations of the true ordinates.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "interval.hpp"

namespace apb {

// Uncertainty (in t) attributed to each stored ordinate.
inline constexpr double kOrdinateSlack = 2e-6;

struct ZeroList {
  uint64_t conductor = 0;
  int index = 0;
  bool real_character = true;
  double verified_height = 0;
  std::vector<double> ordinates;  // ascending, > 0, <= verified_height

  // Enclosure of the k-th ordinate (stored decimal +- slack).
  IV ordinate_iv(size_t k) const {
    IV v = IV::dec(ordinates[k]);
    return IV(v.lo - kOrdinateSlack, v.hi + kOrdinateSlack);
  }
  // Zeros with ordinate certainly <= h (outer endpoint below the cut).  A
  // borderline true zero may be left out; the nu bounds stay valid either way.
  size_t count_below(double h) const {
    size_t n = 0;
    while (n < ordinates.size() && ordinate_iv(n).hi <= h) ++n;
    return n;
  }
};

struct ZeroArchive {
  std::map<std::pair<uint64_t, int>, ZeroList> entries;
  std::string provenance;

  bool empty() const { return entries.empty(); }

  std::vector<const ZeroList*> conductor_files(uint64_t d) const {
    std::vector<const ZeroList*> v;
    for (auto it = entries.lower_bound({d, 0}); it != entries.end() && it->first.first == d; ++it)
      v.push_back(&it->second);
    return v;
  }

  // Number of primitive characters the stored files represent (a non-real
  // file stands for a conjugate pair).
  uint64_t characters_covered(uint64_t d) const {
    uint64_t n = 0;
    for (const ZeroList* z : conductor_files(d)) n += z->real_character ? 1 : 2;
    return n;
  }

  // Height to which conductor d is fully covered: the files must jointly
  // account for phi_star_d characters, and the coverage is the smallest
  // verified height among them.  Returns 0 when coverage is incomplete.
  double covered_height(uint64_t d, uint64_t phi_star_d) const {
    if (phi_star_d == 0) return 0;
    auto files = conductor_files(d);
    if (files.empty() || characters_covered(d) != phi_star_d) return 0;
    double h = files.front()->verified_height;
    for (const ZeroList* z : files) h = std::min(h, z->verified_height);
    return h;
  }
};

namespace detail {

inline std::runtime_error ingest_error(const std::filesystem::path& file, int line,
                                       const std::string& what) {
  std::ostringstream os;
  os << file.string() << ":" << line << ": " << what;
  return std::runtime_error(os.str());
}

inline bool parse_header(const std::string& line, const std::string& key, std::string& out) {
  std::string prefix = "# " + key + "=";
  if (line.rfind(prefix, 0) != 0) return false;
  out = line.substr(prefix.size());
  while (!out.empty() && std::isspace((unsigned char)out.back())) out.pop_back();
  return true;
}

}  // namespace detail

inline ZeroList parse_zero_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open zero file " + file.string());
  ZeroList z;
  bool have_conductor = false, have_index = false, have_real = false, have_height = false,
       have_count = false;
  uint64_t declared_count = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string val;
      if (detail::parse_header(line, "conductor", val)) {
        z.conductor = std::stoull(val);
        have_conductor = true;
      } else if (detail::parse_header(line, "index", val)) {
        z.index = std::stoi(val);
        have_index = true;
      } else if (detail::parse_header(line, "real", val)) {
        if (val != "0" && val != "1")
          throw detail::ingest_error(file, lineno, "real flag must be 0 or 1");
        z.real_character = val == "1";
        have_real = true;
      } else if (detail::parse_header(line, "height", val)) {
        z.verified_height = std::stod(val);
        have_height = true;
      } else if (detail::parse_header(line, "count", val)) {
        declared_count = std::stoull(val);
        have_count = true;
      }
      continue;  // unknown comment lines are allowed
    }
    if (!(have_conductor && have_index && have_real && have_height && have_count))
      throw detail::ingest_error(file, lineno, "ordinate before complete header");
    double g = 0;
    try {
      size_t pos = 0;
      g = std::stod(line, &pos);
      while (pos < line.size() && std::isspace((unsigned char)line[pos])) ++pos;
      if (pos != line.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw detail::ingest_error(file, lineno, "malformed ordinate '" + line + "'");
    }
    if (!(g > 0)) throw detail::ingest_error(file, lineno, "ordinate must be positive");
    if (!z.ordinates.empty() && !(g > z.ordinates.back()))
      throw detail::ingest_error(file, lineno, "ordinates not strictly ascending");
    if (g > z.verified_height + kOrdinateSlack)
      throw detail::ingest_error(file, lineno, "ordinate exceeds declared height");
    z.ordinates.push_back(g);
  }
  if (!(have_conductor && have_index && have_real && have_height && have_count))
    throw detail::ingest_error(file, lineno, "missing header line");
  if (declared_count != z.ordinates.size())
    throw detail::ingest_error(file, lineno,
                               "count mismatch: header says " + std::to_string(declared_count) +
                                   ", file has " + std::to_string(z.ordinates.size()));
  return z;
}

inline ZeroArchive ingest_zeros(const std::filesystem::path& dir) {
  ZeroArchive arch;
  arch.provenance = "ingested from " + dir.string();
  if (!std::filesystem::exists(dir)) return arch;  // absent directory = empty archive
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    ZeroList z = parse_zero_file(f);
    auto key = std::make_pair(z.conductor, z.index);
    if (arch.entries.count(key))
      throw std::runtime_error("duplicate archive entry for conductor " +
                               std::to_string(z.conductor) + " index " + std::to_string(z.index) +
                               " in " + f.string());
    arch.entries.emplace(key, std::move(z));
  }
  return arch;
}

inline void write_zero_file(const std::filesystem::path& dir, const ZeroList& z) {
  std::filesystem::create_directories(dir);
  std::ostringstream name;
  name << "d" << z.conductor << "_chi" << z.index << ".txt";
  std::ofstream out(dir / name.str());
  out.precision(12);
  out << std::fixed;
  out << "# conductor=" << z.conductor << "\n";
  out << "# index=" << z.index << "\n";
  out << "# real=" << (z.real_character ? 1 : 0) << "\n";
  out << "# height=" << z.verified_height << "\n";
  out << "# count=" << z.ordinates.size() << "\n";
  for (double g : z.ordinates) out << g << "\n";
}

}  // namespace apb
