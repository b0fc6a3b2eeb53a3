#pragma once

#include <iosfwd>
#include <string>

#include "ocql/nnet/mlp.hpp"

namespace ocql {

// Versioned text serialization. Doubles are printed with %.17g so a
// save/load/save cycle is byte identical. Layout (whitespace separated):
//
//   mlpnet 1
//   layers <count> <s_0> ... <s_k>
//   alpha <v>
//   in_mean <s_0 values>     in_std <s_0 values>
//   out_mean <v>             out_std <v>
//   w <l> <rows> <cols> <values row major>   (per layer)
//   b <l> <n> <values>                       (per layer)
//   end
void save_network(std::ostream& out, const MlpNetwork& net);
MlpNetwork load_network(std::istream& in);

std::string format_double(double v);  // %.17g, shared by every writer

}  // namespace ocql
