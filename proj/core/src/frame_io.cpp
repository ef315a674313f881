#include "augplan/frame_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include <nlohmann/json.hpp>

#include "byte_io.hpp"

namespace augplan {
namespace {

using detail::ByteReader;
using detail::ByteWriter;

constexpr std::uint8_t kFormatVersion = 1;
constexpr std::size_t kShortHeader = 9;   // magic + version + width + height
constexpr std::size_t kDepthHeader = 13;  // + u32 scale

std::uint16_t CheckedDimension(int v) {
  if (v < 0 || v > 0xffff) {
    throw Error(ErrorCode::kOutOfRange, "frame dimension exceeds 16 bits");
  }
  return static_cast<std::uint16_t>(v);
}

void ReadVersion(ByteReader& reader) {
  const std::uint8_t version = reader.U8();
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kMalformedHeader,
                "unsupported version " + std::to_string(version));
  }
}

std::uint16_t QuantizeSample(double depth, std::uint32_t scale) {
  if (!std::isfinite(depth) || depth < 0.0) {
    throw Error(ErrorCode::kInvalidDepth, "depth must be finite and >= 0");
  }
  const double q = std::round(depth * static_cast<double>(scale));
  if (q > 65535.0) {
    throw Error(ErrorCode::kOutOfRange,
                "depth " + std::to_string(depth) +
                    " m exceeds the 16-bit payload at scale " +
                    std::to_string(scale));
  }
  return static_cast<std::uint16_t>(q);
}

}  // namespace

std::vector<std::uint8_t> EncodeDepth(const DepthFrame& depth,
                                      std::uint32_t scale) {
  if (scale == 0) throw Error(ErrorCode::kInvalidArgument, "scale must be > 0");
  ByteWriter w(kDepthHeader + 2 * depth.size());
  w.Magic("DFRM");
  w.U8(kFormatVersion);
  w.U16(CheckedDimension(depth.width()));
  w.U16(CheckedDimension(depth.height()));
  w.U32(scale);
  for (const double d : depth.values()) w.U16(QuantizeSample(d, scale));
  return w.Take();
}

DepthFrame DecodeDepth(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectMagic("DFRM");
  ReadVersion(r);
  const int width = r.U16();
  const int height = r.U16();
  const std::uint32_t scale = r.U32();
  if (scale == 0) throw Error(ErrorCode::kMalformedHeader, "zero depth scale");
  DepthFrame depth(width, height);
  r.Need(2 * depth.size());
  for (double& d : depth.values()) {
    d = static_cast<double>(r.U16()) / static_cast<double>(scale);
  }
  r.ExpectEnd();
  return depth;
}

DepthFrame QuantizeDepth(const DepthFrame& depth, std::uint32_t scale) {
  DepthFrame out(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    out[i] = static_cast<double>(QuantizeSample(depth[i], scale)) /
             static_cast<double>(scale);
  }
  return out;
}

std::vector<std::uint8_t> EncodeGray(const GrayFrame& gray) {
  ByteWriter w(kShortHeader + gray.size());
  w.Magic("GFRM");
  w.U8(kFormatVersion);
  w.U16(CheckedDimension(gray.width()));
  w.U16(CheckedDimension(gray.height()));
  for (const double g : gray.values()) {
    w.U8(static_cast<std::uint8_t>(std::lround(std::clamp(g, 0.0, 1.0) * 255.0)));
  }
  return w.Take();
}

GrayFrame DecodeGray(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectMagic("GFRM");
  ReadVersion(r);
  const int width = r.U16();
  const int height = r.U16();
  GrayFrame gray(width, height);
  r.Need(gray.size());
  for (double& g : gray.values()) g = r.U8() / 255.0;
  r.ExpectEnd();
  return gray;
}

std::vector<std::uint8_t> EncodeProvenance(const ProvenanceMask& mask) {
  ByteWriter w(kShortHeader + mask.size());
  w.Magic("PMSK");
  w.U8(kFormatVersion);
  w.U16(CheckedDimension(mask.width()));
  w.U16(CheckedDimension(mask.height()));
  for (const Provenance p : mask.values()) w.U8(static_cast<std::uint8_t>(p));
  return w.Take();
}

ProvenanceMask DecodeProvenance(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectMagic("PMSK");
  ReadVersion(r);
  const int width = r.U16();
  const int height = r.U16();
  ProvenanceMask mask(width, height);
  r.Need(mask.size());
  for (Provenance& p : mask.values()) {
    const std::uint8_t v = r.U8();
    if (v > 2) throw Error(ErrorCode::kMalformedHeader, "bad provenance label");
    p = static_cast<Provenance>(v);
  }
  r.ExpectEnd();
  return mask;
}

std::vector<std::uint8_t> ReadBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

void WriteBytes(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

void WriteDepth(const std::filesystem::path& path, const DepthFrame& depth,
                std::uint32_t scale) {
  WriteBytes(path, EncodeDepth(depth, scale));
}
DepthFrame ReadDepth(const std::filesystem::path& path) {
  return DecodeDepth(ReadBytes(path));
}
void WriteGray(const std::filesystem::path& path, const GrayFrame& gray) {
  WriteBytes(path, EncodeGray(gray));
}
GrayFrame ReadGray(const std::filesystem::path& path) {
  return DecodeGray(ReadBytes(path));
}
void WriteProvenance(const std::filesystem::path& path,
                     const ProvenanceMask& mask) {
  WriteBytes(path, EncodeProvenance(mask));
}
ProvenanceMask ReadProvenance(const std::filesystem::path& path) {
  return DecodeProvenance(ReadBytes(path));
}

namespace {

using nlohmann::json;

const json& Field(const json& object, const char* key,
                  const std::string& where) {
  if (!object.is_object() || !object.contains(key)) {
    throw Error(ErrorCode::kValidation,
                "manifest: missing key '" + std::string(key) + "' in " + where);
  }
  return object.at(key);
}

template <typename T>
T Number(const json& object, const char* key, const std::string& where) {
  const json& v = Field(object, key, where);
  if (!v.is_number()) {
    throw Error(ErrorCode::kValidation, "manifest: '" + std::string(key) +
                                            "' in " + where +
                                            " must be a number");
  }
  return v.get<T>();
}

std::string Text(const json& object, const char* key,
                 const std::string& where) {
  const json& v = Field(object, key, where);
  if (!v.is_string()) {
    throw Error(ErrorCode::kValidation, "manifest: '" + std::string(key) +
                                            "' in " + where +
                                            " must be a string");
  }
  return v.get<std::string>();
}

std::vector<double> Array(const json& object, const char* key,
                          std::size_t size, const std::string& where) {
  const json& v = Field(object, key, where);
  if (!v.is_array() || v.size() != size) {
    throw Error(ErrorCode::kValidation,
                "manifest: '" + std::string(key) + "' in " + where +
                    " must be an array of " + std::to_string(size));
  }
  std::vector<double> out;
  for (const auto& e : v) out.push_back(e.get<double>());
  return out;
}

}  // namespace

FrameSequence ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kValidation,
                "manifest is not valid JSON: " + std::string(e.what()));
  }

  FrameSequence seq;
  seq.base_dir = path.parent_path();
  const json& intr = Field(doc, "intrinsics", "manifest");
  seq.intrinsics.fx = Number<double>(intr, "fx", "intrinsics");
  seq.intrinsics.fy = Number<double>(intr, "fy", "intrinsics");
  seq.intrinsics.cx = Number<double>(intr, "cx", "intrinsics");
  seq.intrinsics.cy = Number<double>(intr, "cy", "intrinsics");
  seq.intrinsics.width = Number<int>(intr, "width", "intrinsics");
  seq.intrinsics.height = Number<int>(intr, "height", "intrinsics");

  const json& frames = Field(doc, "frames", "manifest");
  if (!frames.is_array()) {
    throw Error(ErrorCode::kValidation, "manifest: 'frames' must be an array");
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string where = "frames[" + std::to_string(i) + "]";
    const json& f = frames[i];
    SequenceFrame frame;
    frame.timestamp = Number<double>(f, "timestamp", where);
    const json& pose = Field(f, "pose", where);
    const auto t = Array(pose, "t", 3, where + ".pose");
    const auto q = Array(pose, "q", 4, where + ".pose");
    frame.pose.translation = Vec3(t[0], t[1], t[2]);
    frame.pose.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
    frame.depth_file = Text(f, "depth", where);
    frame.gray_file = Text(f, "gray", where);
    if (f.contains("provenance")) {
      frame.provenance_file = Text(f, "provenance", where);
    }
    seq.frames.push_back(std::move(frame));
  }
  seq.Validate();
  return seq;
}

void WriteManifest(const std::filesystem::path& path,
                   const FrameSequence& sequence) {
  sequence.Validate();
  json doc;
  const Intrinsics& in = sequence.intrinsics;
  doc["intrinsics"] = {{"fx", in.fx},       {"fy", in.fy},
                       {"cx", in.cx},       {"cy", in.cy},
                       {"width", in.width}, {"height", in.height}};
  doc["frames"] = json::array();
  for (const SequenceFrame& f : sequence.frames) {
    const Pose& p = f.pose;
    json frame = {
        {"timestamp", f.timestamp},
        {"pose",
         {{"t", {p.translation.x(), p.translation.y(), p.translation.z()}},
          {"q",
           {p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z()}}}},
        {"depth", f.depth_file},
        {"gray", f.gray_file}};
    if (!f.provenance_file.empty()) frame["provenance"] = f.provenance_file;
    doc["frames"].push_back(std::move(frame));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  out << doc.dump(2) << '\n';
}

namespace {

template <typename Frame>
Frame CheckResolution(Frame frame, const FrameSequence& seq,
                      const std::string& file) {
  if (frame.width() != seq.intrinsics.width ||
      frame.height() != seq.intrinsics.height) {
    throw Error(ErrorCode::kResolutionMismatch,
                file + " does not match the manifest resolution");
  }
  return frame;
}

}  // namespace

DepthFrame ReadSequenceDepth(const FrameSequence& sequence,
                             std::size_t index) {
  const std::string& file = sequence.frames.at(index).depth_file;
  return CheckResolution(ReadDepth(sequence.Resolve(file)), sequence, file);
}

GrayFrame ReadSequenceGray(const FrameSequence& sequence, std::size_t index) {
  const std::string& file = sequence.frames.at(index).gray_file;
  return CheckResolution(ReadGray(sequence.Resolve(file)), sequence, file);
}

}  // namespace augplan
