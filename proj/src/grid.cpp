#include "meanfield/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace meanfield {

namespace {

double parse_double(const std::string& token, const char* what) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument(std::string("malformed ") + what + ": '" + token + "'");
  }
  return value;
}

int parse_int(const std::string& token, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::invalid_argument(std::string("malformed ") + what + ": '" + token + "'");
  }
  return value;
}

}  // namespace

Point GridSamples::node(std::size_t flat) const {
  Point p = Point::zeros(dim);
  std::size_t rest = flat;
  for (int a = 0; a < dim; ++a) {
    const auto i = static_cast<int>(rest % count[a]);
    rest /= count[a];
    p[a] = lo[a] + i * spacing(a);
  }
  return p;
}

bool GridSamples::covers(const Point& p) const {
  if (p.dim() != dim) return false;
  for (int a = 0; a < dim; ++a) {
    const double slack = 1e-12 * std::max(1.0, hi[a] - lo[a]);
    if (p[a] < lo[a] - slack || p[a] > hi[a] + slack) return false;
  }
  return true;
}

double GridSamples::interpolate(const Point& p) const {
  require_dim(p, dim, "interpolation point");
  std::array<int, kMaxDim> base{0, 0, 0};
  std::array<double, kMaxDim> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    const double s = std::clamp((p[a] - lo[a]) / spacing(a), 0.0, static_cast<double>(count[a] - 1));
    int i = static_cast<int>(s);
    if (i >= count[a] - 1) i = count[a] - 2;
    base[a] = i;
    frac[a] = s - i;
  }
  double sum = 0.0;
  const int corners = 1 << dim;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<int, kMaxDim> idx{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const int bit = (c >> a) & 1;
      idx[a] = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w != 0.0) sum += w * values[index(idx[0], idx[1], idx[2])];
  }
  return sum;
}

void GridSamples::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (count[a] < 2) throw std::invalid_argument("grid needs at least 2 nodes per axis");
    if (!(lo[a] < hi[a])) throw std::invalid_argument("grid bounds must satisfy min < max");
  }
  if (values.size() != size()) {
    throw std::invalid_argument("sample count mismatch: expected " + std::to_string(size()) + ", got " +
                                std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("non-finite value at index " + std::to_string(i));
    }
  }
}

GridSamples read_grid(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("malformed header: empty grid file");
  std::istringstream hs(header);
  std::vector<std::string> tokens;
  for (std::string t; hs >> t;) tokens.push_back(t);
  if (tokens.empty()) throw std::invalid_argument("malformed header: empty first line");

  GridSamples g;
  g.dim = parse_int(tokens[0], "header dimension");
  if (g.dim < 1 || g.dim > kMaxDim) throw std::invalid_argument("malformed header: dimension must be 1, 2 or 3");
  if (tokens.size() != static_cast<std::size_t>(1 + 3 * g.dim)) {
    throw std::invalid_argument("malformed header: expected " + std::to_string(1 + 3 * g.dim) + " fields, got " +
                                std::to_string(tokens.size()));
  }
  for (int a = 0; a < g.dim; ++a) g.count[a] = parse_int(tokens[1 + a], "header node count");
  for (int a = 0; a < g.dim; ++a) {
    g.lo[a] = parse_double(tokens[1 + g.dim + 2 * a], "header bound");
    g.hi[a] = parse_double(tokens[2 + g.dim + 2 * a], "header bound");
  }
  for (int a = 0; a < g.dim; ++a) {
    if (g.count[a] < 2) throw std::invalid_argument("malformed header: need at least 2 nodes per axis");
    if (!(g.lo[a] < g.hi[a])) throw std::invalid_argument("malformed header: bounds must satisfy min < max");
  }

  g.values.reserve(g.size());
  for (std::string t; in >> t;) {
    // from_chars rejects "nan"/"inf" spellings on some libstdc++ versions; strtod does not.
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw std::invalid_argument("malformed sample '" + t + "'");
    g.values.push_back(v);
  }
  g.validate();
  return g;
}

GridSamples read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open grid file '" + path + "'");
  return read_grid(in);
}

void write_grid(std::ostream& out, const GridSamples& grid) {
  char buf[64];
  out << grid.dim;
  for (int a = 0; a < grid.dim; ++a) out << ' ' << grid.count[a];
  for (int a = 0; a < grid.dim; ++a) {
    std::snprintf(buf, sizeof buf, " %.17g %.17g", grid.lo[a], grid.hi[a]);
    out << buf;
  }
  out << '\n';
  const std::size_t row = static_cast<std::size_t>(grid.count[0]);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", grid.values[i]);
    out << buf << ((i + 1) % row == 0 ? '\n' : ' ');
  }
}

}  // namespace meanfield
