#include "radlesion/nifti.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace radlesion {
namespace {

constexpr int kHeaderSize = 348;
constexpr int kDefaultOffset = 352;

// Offsets into the 348-byte header.
constexpr int kOffDim = 40;
constexpr int kOffDatatype = 70;
constexpr int kOffBitpix = 72;
constexpr int kOffPixdim = 76;
constexpr int kOffVoxOffset = 108;
constexpr int kOffSclSlope = 112;
constexpr int kOffSclInter = 116;
constexpr int kOffQformCode = 252;
constexpr int kOffQoffset = 268;
constexpr int kOffMagic = 344;

class ByteReader {
 public:
  ByteReader(const std::vector<char>& bytes, bool swap)
      : bytes_(bytes), swap_(swap) {}

  template <typename T>
  T get(std::size_t offset) const {
    if (offset + sizeof(T) > bytes_.size()) {
      throw FormatError("NIfTI: read past end of file");
    }
    std::array<char, sizeof(T)> raw;
    std::memcpy(raw.data(), bytes_.data() + offset, sizeof(T));
    if (swap_) std::reverse(raw.begin(), raw.end());
    T value;
    std::memcpy(&value, raw.data(), sizeof(T));
    return value;
  }

 private:
  const std::vector<char>& bytes_;
  bool swap_;
};

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int type_size(short code) {
  switch (static_cast<NiftiType>(code)) {
    case NiftiType::kUInt8: return 1;
    case NiftiType::kInt16: return 2;
    case NiftiType::kInt32: return 4;
    case NiftiType::kFloat32: return 4;
    case NiftiType::kFloat64: return 8;
  }
  throw UnsupportedTypeError(code);
}

// Raw (unscaled) payload plus geometry and the scaling pair.
struct RawImage {
  std::array<int, 3> dims{};
  Eigen::Vector3d spacing;
  Eigen::Vector3d origin;
  std::vector<double> values;
  double slope = 1.0;
  double inter = 0.0;
};

RawImage read_raw(const std::filesystem::path& path) {
  const std::vector<char> bytes = slurp(path);
  if (bytes.size() < kHeaderSize) {
    throw FormatError("NIfTI: file shorter than header: " + path.string());
  }
  bool swap = false;
  {
    const ByteReader probe(bytes, false);
    const auto sz = probe.get<std::int32_t>(0);
    if (sz != kHeaderSize) {
      const ByteReader swapped(bytes, true);
      if (swapped.get<std::int32_t>(0) != kHeaderSize) {
        throw FormatError("NIfTI: bad sizeof_hdr in " + path.string());
      }
      swap = true;
    }
  }
  if (std::memcmp(bytes.data() + kOffMagic, "n+1\0", 4) != 0) {
    throw FormatError("NIfTI: bad magic in " + path.string());
  }
  const ByteReader hdr(bytes, swap);

  const auto ndim = hdr.get<std::int16_t>(kOffDim);
  if (ndim < 1 || ndim > 7) throw FormatError("NIfTI: bad dim[0]");
  RawImage img;
  std::size_t count = 1;
  for (int k = 0; k < 3; ++k) {
    const int d = k < ndim ? hdr.get<std::int16_t>(kOffDim + 2 * (k + 1)) : 1;
    if (d < 1) throw FormatError("NIfTI: non-positive dimension");
    img.dims[k] = d;
    count *= static_cast<std::size_t>(d);
    const double sp =
        k < ndim ? hdr.get<float>(kOffPixdim + 4 * (k + 1)) : 1.0f;
    if (!(std::isfinite(sp) && sp != 0.0)) {
      throw FormatError("NIfTI: invalid pixdim");
    }
    img.spacing[k] = std::abs(sp);
  }

  const auto code = hdr.get<std::int16_t>(kOffDatatype);
  const int bytes_per = type_size(code);
  const double vox_offset = hdr.get<float>(kOffVoxOffset);
  if (!(vox_offset >= kHeaderSize)) {
    throw FormatError("NIfTI: vox_offset before end of header");
  }
  const auto start = static_cast<std::size_t>(vox_offset);
  if (start + count * bytes_per > bytes.size()) {
    throw FormatError("NIfTI: payload shorter than declared dimensions in " +
                      path.string());
  }

  img.slope = hdr.get<float>(kOffSclSlope);
  img.inter = hdr.get<float>(kOffSclInter);
  if (img.slope == 0.0 || !std::isfinite(img.slope)) img.slope = 1.0;
  if (!std::isfinite(img.inter)) img.inter = 0.0;

  img.origin.setZero();
  if (hdr.get<std::int16_t>(kOffQformCode) > 0) {
    for (int k = 0; k < 3; ++k) img.origin[k] = hdr.get<float>(kOffQoffset + 4 * k);
  }

  img.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = start + i * bytes_per;
    double v = 0.0;
    switch (static_cast<NiftiType>(code)) {
      case NiftiType::kUInt8: v = static_cast<unsigned char>(bytes[at]); break;
      case NiftiType::kInt16: v = hdr.get<std::int16_t>(at); break;
      case NiftiType::kInt32: v = hdr.get<std::int32_t>(at); break;
      case NiftiType::kFloat32: v = hdr.get<float>(at); break;
      case NiftiType::kFloat64: v = hdr.get<double>(at); break;
    }
    if (!std::isfinite(v)) throw FormatError("NIfTI: non-finite voxel value");
    img.values[i] = v;
  }
  return img;
}

template <typename T>
void put(std::vector<char>& out, std::size_t offset, T value) {
  static_assert(std::endian::native == std::endian::little ||
                std::endian::native == std::endian::big);
  std::array<char, sizeof(T)> raw;
  std::memcpy(raw.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(raw.begin(), raw.end());
  }
  std::memcpy(out.data() + offset, raw.data(), sizeof(T));
}

template <typename T>
void put_clamped(std::vector<char>& out, std::size_t offset, double v) {
  const double r = std::nearbyint(v);
  if (r < static_cast<double>(std::numeric_limits<T>::lowest()) ||
      r > static_cast<double>(std::numeric_limits<T>::max())) {
    throw InputError("value " + std::to_string(v) +
                     " does not fit the requested NIfTI datatype");
  }
  put<T>(out, offset, static_cast<T>(r));
}

void write_values(const std::filesystem::path& path,
                  const std::array<int, 3>& dims,
                  const Eigen::Vector3d& spacing,
                  const Eigen::Vector3d& origin,
                  const std::vector<double>& values, NiftiType type) {
  const int bytes_per = type_size(static_cast<short>(type));
  std::vector<char> out(kDefaultOffset + values.size() * bytes_per, 0);
  put<std::int32_t>(out, 0, kHeaderSize);
  put<std::int16_t>(out, kOffDim, 3);
  for (int k = 0; k < 3; ++k) {
    put<std::int16_t>(out, kOffDim + 2 * (k + 1),
                      static_cast<std::int16_t>(dims[k]));
    put<float>(out, kOffPixdim + 4 * (k + 1), static_cast<float>(spacing[k]));
  }
  for (int k = 4; k < 8; ++k) put<std::int16_t>(out, kOffDim + 2 * k, 1);
  put<float>(out, kOffPixdim, 1.0f);
  put<std::int16_t>(out, kOffDatatype, static_cast<std::int16_t>(type));
  put<std::int16_t>(out, kOffBitpix, static_cast<std::int16_t>(8 * bytes_per));
  put<float>(out, kOffVoxOffset, static_cast<float>(kDefaultOffset));
  put<float>(out, kOffSclSlope, 1.0f);
  put<float>(out, kOffSclInter, 0.0f);
  put<std::int16_t>(out, kOffQformCode, 1);
  for (int k = 0; k < 3; ++k) {
    put<float>(out, kOffQoffset + 4 * k, static_cast<float>(origin[k]));
  }
  out[123] = 2;  // xyzt_units: millimetres
  std::memcpy(out.data() + kOffMagic, "n+1\0", 4);

  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t at = kDefaultOffset + i * bytes_per;
    switch (type) {
      case NiftiType::kUInt8: put_clamped<std::uint8_t>(out, at, values[i]); break;
      case NiftiType::kInt16: put_clamped<std::int16_t>(out, at, values[i]); break;
      case NiftiType::kInt32: put_clamped<std::int32_t>(out, at, values[i]); break;
      case NiftiType::kFloat32: put<float>(out, at, static_cast<float>(values[i])); break;
      case NiftiType::kFloat64: put<double>(out, at, values[i]); break;
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw InputError("write failed for " + path.string());
}

}  // namespace

void validate(const VoxelVolume& vol) {
  for (int k = 0; k < 3; ++k) {
    if (vol.dims[k] < 1) throw InputError("volume dims must be positive");
    if (!(vol.spacing[k] > 0.0)) throw InputError("volume spacing must be positive");
  }
  if (vol.data.size() != static_cast<std::size_t>(vol.dims[0]) * vol.dims[1] * vol.dims[2]) {
    throw InputError("volume data length does not match dims");
  }
  for (double v : vol.data) {
    if (!std::isfinite(v)) throw InputError("volume holds non-finite values");
  }
}

VoxelVolume read_volume(const std::filesystem::path& path) {
  RawImage raw = read_raw(path);
  VoxelVolume vol(raw.dims, raw.spacing, raw.origin);
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    vol.data[i] = raw.slope * raw.values[i] + raw.inter;
  }
  return vol;
}

LesionMask read_mask(const std::filesystem::path& path,
                     const std::map<int, int>& class_map) {
  RawImage raw = read_raw(path);
  LesionMask mask;
  mask.labels = LabelVolume(raw.dims, raw.spacing, raw.origin);
  std::set<int> present;
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    const double v = raw.slope * raw.values[i] + raw.inter;
    if (v < 0.0 || v != std::floor(v) ||
        v > std::numeric_limits<std::int32_t>::max()) {
      throw MaskError("mask " + path.string() +
                      " holds a value that is not a non-negative integer");
    }
    const auto label = static_cast<std::int32_t>(v);
    mask.labels.data[i] = label;
    if (label != 0) present.insert(label);
  }
  for (int label : present) {
    const auto it = class_map.find(label);
    if (it == class_map.end()) {
      throw ConfigError("mask " + path.string() + " label " +
                        std::to_string(label) + " has no class assignment");
    }
    if (it->second < 1 || it->second > 3) {
      throw ConfigError("class id " + std::to_string(it->second) +
                        " outside 1..3");
    }
    mask.class_of_label[label] = it->second;
  }
  return mask;
}

void write_nifti(const std::filesystem::path& path, const VoxelVolume& vol,
                 NiftiType type) {
  write_values(path, vol.dims, vol.spacing, vol.origin, vol.data, type);
}

void write_nifti(const std::filesystem::path& path, const LabelVolume& labels,
                 NiftiType type) {
  std::vector<double> values(labels.data.begin(), labels.data.end());
  write_values(path, labels.dims, labels.spacing, labels.origin, values, type);
}

}  // namespace radlesion
