#include "robann/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace robann {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Dataset read_dataset(std::istream& in) {
  std::string mode_tok;
  std::size_t dim = 0;
  std::size_t n = 0;
  if (!(in >> mode_tok >> dim >> n)) {
    throw std::runtime_error("dataset header: expected 'mode dim n'");
  }

  SpaceMode mode;
  double p = 2.0;
  if (mode_tok == "hamming") {
    mode = SpaceMode::kHamming;
  } else if (mode_tok.rfind("lp:", 0) == 0) {
    mode = SpaceMode::kLp;
    p = std::stod(mode_tok.substr(3));
    if (!(p >= 1.0)) throw std::runtime_error("dataset header: lp exponent < 1");
  } else {
    throw std::runtime_error("dataset header: unknown mode '" + mode_tok + "'");
  }

  Dataset ds(mode, dim, p);
  for (std::size_t row = 0; row < n; ++row) {
    if (mode == SpaceMode::kHamming) {
      std::vector<int> bits(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        if (!(in >> bits[i])) {
          throw std::runtime_error("dataset: truncated point row");
        }
      }
      ds.append(Point::hamming(bits));
    } else {
      std::vector<double> coords(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        if (!(in >> coords[i])) {
          throw std::runtime_error("dataset: truncated point row");
        }
      }
      ds.append(Point::real(std::move(coords)));
    }
  }
  return ds;
}

Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return read_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& ds) {
  if (ds.mode() == SpaceMode::kHamming) {
    out << "hamming";
  } else {
    out << "lp:" << format_double(ds.lp_exponent());
  }
  out << ' ' << ds.dim() << ' ' << ds.size() << '\n';
  ds.for_each([&](PointId, const Point& pt) {
    for (std::size_t i = 0; i < pt.dim(); ++i) {
      if (i) out << ' ';
      if (pt.mode() == SpaceMode::kHamming) {
        out << (pt.bit(i) ? '1' : '0');
      } else {
        out << format_double(pt.coord(i));
      }
    }
    out << '\n';
  });
}

std::string dataset_to_string(const Dataset& ds) {
  std::ostringstream out;
  write_dataset(out, ds);
  return out.str();
}

}  // namespace robann
