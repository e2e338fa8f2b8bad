#pragma once

#include <iosfwd>
#include <string>

#include "robann/metric.hpp"

namespace robann {

// Text format: first line "mode dim n" with mode in {hamming, lp:<p>},
// then one point per line, coordinates whitespace-separated. Hamming
// round-trips bit-exactly.
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);

void write_dataset(std::ostream& out, const Dataset& ds);
std::string dataset_to_string(const Dataset& ds);

}  // namespace robann
