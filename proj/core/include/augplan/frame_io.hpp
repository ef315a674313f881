#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "augplan/frames.hpp"

namespace augplan {

// DFRM: "DFRM" | u8 version=1 | u16 width | u16 height | u32 scale |
//       width*height u16 samples. Little-endian, row-major, 0 = invalid.
// GFRM: "GFRM" | u8 version | u16 width | u16 height | width*height u8.
// PMSK: "PMSK" | u8 version | u16 width | u16 height | width*height u8
//       (0 invalid, 1 measured, 2 predicted).

inline constexpr std::uint32_t kDefaultDepthScale = 1000;

std::vector<std::uint8_t> EncodeDepth(const DepthFrame& depth,
                                      std::uint32_t scale = kDefaultDepthScale);
DepthFrame DecodeDepth(std::span<const std::uint8_t> bytes);

/// Rounds every sample to the file quantization (what a round trip yields).
DepthFrame QuantizeDepth(const DepthFrame& depth,
                         std::uint32_t scale = kDefaultDepthScale);

std::vector<std::uint8_t> EncodeGray(const GrayFrame& gray);
GrayFrame DecodeGray(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> EncodeProvenance(const ProvenanceMask& mask);
ProvenanceMask DecodeProvenance(std::span<const std::uint8_t> bytes);

void WriteDepth(const std::filesystem::path& path, const DepthFrame& depth,
                std::uint32_t scale = kDefaultDepthScale);
DepthFrame ReadDepth(const std::filesystem::path& path);
void WriteGray(const std::filesystem::path& path, const GrayFrame& gray);
GrayFrame ReadGray(const std::filesystem::path& path);
void WriteProvenance(const std::filesystem::path& path,
                     const ProvenanceMask& mask);
ProvenanceMask ReadProvenance(const std::filesystem::path& path);

std::vector<std::uint8_t> ReadBytes(const std::filesystem::path& path);
void WriteBytes(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

/// Sequence manifest (JSON). Relative paths resolve against the manifest's
/// directory.
FrameSequence ReadManifest(const std::filesystem::path& path);
void WriteManifest(const std::filesystem::path& path,
                   const FrameSequence& sequence);

/// Load the files of frame `index`, checking they match the manifest
/// resolution (kResolutionMismatch otherwise).
DepthFrame ReadSequenceDepth(const FrameSequence& sequence, std::size_t index);
GrayFrame ReadSequenceGray(const FrameSequence& sequence, std::size_t index);

}  // namespace augplan
