#pragma once

#include <filesystem>

#include "rfp/errors.hpp"
#include "rfp/nn/network.hpp"

namespace rfp::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public IoError {
public:
    using IoError::IoError;
};
/// Bad magic, unknown format version or unsupported float width.
class CheckpointVersionError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};
/// Stored tensor shapes disagree with the architecture the header declares.
class CheckpointShapeError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};
class CheckpointTruncatedError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

/// Writes the network (architecture, parameters and batch-norm buffers).
/// Layout is documented in docs/formats.md.
template <typename T>
void save_checkpoint(const Network<T>& net, const std::filesystem::path& path);

/// Reads a checkpoint written with either float width and converts to T.
template <typename T>
Network<T> load_checkpoint(const std::filesystem::path& path);

}  // namespace rfp::nn
