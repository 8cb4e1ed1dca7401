#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctsn/network.hpp"

namespace ctsn {

// Flat little-endian model file:
//
//   char[8]  magic "CTSNMDL\0"
//   u32      version (1)
//   u32      neuron kind (0 ternary, 1 ctsn_static, 2 ctsn_neuromorphic)
//   u32      reset (0 hard, 1 soft)
//   f64      tau, v_th, a
//   u32      T
//   u32      number of dims n (= hidden layers + 2)
//   u32[n]   dims: input, hidden..., classes
//   per hidden layer: f64 W[in*out] (row-major), f64 b[out], f64 omega[3]
//   readout:          f64 W[in*out], f64 b[out]
//
// Integers are unsigned 32-bit, floats IEEE-754 binary64.
inline constexpr char kModelMagic[8] = {'C', 'T', 'S', 'N', 'M', 'D', 'L', '\0'};
inline constexpr std::uint32_t kModelVersion = 1;

std::vector<std::uint8_t> serialize_model(const Network& net);
Network deserialize_model(const std::vector<std::uint8_t>& bytes);

void save_model(const Network& net, const std::string& path);
// Throws ArgumentError on a bad magic, version or truncated payload.
Network load_model(const std::string& path);

}  // namespace ctsn
