#pragma once

#include "qtt/tensor_train.hpp"

#include <filesystem>
#include <iosfwd>

namespace qtt {

// Binary container layout, all integers little-endian:
//   "QTT1"            4 bytes magic
//   version           u8, currently 1
//   K                 u32
//   dim count         u32 (== K), followed by that many u32 external dims
//   ranks             (K+1) x u32, r_0 .. r_K
//   cores             f64 little-endian, core by core, sigma outermost,
//                     alpha middle, beta innermost
inline constexpr std::uint8_t kContainerVersion = 1;

void tt_write(const TensorTrain& tt, std::ostream& sink);
TensorTrain tt_read(std::istream& source);

void tt_save(const TensorTrain& tt, const std::filesystem::path& path);
TensorTrain tt_load(const std::filesystem::path& path);

} // namespace qtt
