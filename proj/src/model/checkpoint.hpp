#pragma once

#include <filesystem>
#include <iosfwd>

#include "model/model.hpp"

namespace mdne {

// Binary checkpoint, all integers and floats little-endian:
//
//   bytes 0..7   magic "MDNECKPT"
//   u32          format version (1)
//   u8           preprocess flag
//   u64          pre_struct_dim, pre_attr_dim
//   u64          hidden layer count K, then K × u64 widths
//   u64          n, m
//   then for every tensor in for_each_tensor() order:
//   u64 rows, u64 cols, rows*cols × f64 (row-major; biases are 1 × width)

inline constexpr char kCheckpointMagic[8] = {'M', 'D', 'N', 'E', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const ModelParams& params, std::ostream& out);
ModelParams read_checkpoint(std::istream& in);

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace mdne
