#pragma once

#include "rsac/nn/tensor.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace rsac::nn {

/// Checkpoint contents: ordered metadata plus named float tensors.
///
/// On disk a checkpoint is a text manifest of `key = value` lines
///
///     format = rsac-checkpoint/1
///     payload = model.bin
///     meta.<key> = <value>
///     tensor.<name> = <shape> @ <offset>
///
/// plus one payload file holding every tensor back to back as little-endian
/// IEEE-754 binary32, row-major. Shapes are `n` or `rows x cols` written as
/// `RxC`; offsets count elements.
struct Checkpoint {
  std::vector<std::pair<std::string, std::string>> metadata;
  ParamList<float> tensors;

  const std::string& meta(const std::string& key) const;
  bool has_meta(const std::string& key) const;
  const ParamTensor<float>& tensor(const std::string& name) const;
};

/// Writes `<manifest>` and its payload next to it (same stem, `.bin`).
void write_checkpoint(const std::filesystem::path& manifest, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& manifest);

}  // namespace rsac::nn
