#include "tcnfx/wav.hpp"

#include "tcnfx/error.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace tcnfx {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class Reader {
public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const noexcept { return pos_ + n <= bytes_.size(); }
  std::size_t pos() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  void seek(std::size_t p) { pos_ = p; }

  std::uint32_t u32()
  {
    need(4);
    const auto* p = bytes_.data() + pos_;
    pos_ += 4;
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
  }
  std::uint16_t u16()
  {
    need(2);
    const auto* p = bytes_.data() + pos_;
    pos_ += 2;
    return static_cast<std::uint16_t>(p[0] | p[1] << 8);
  }
  std::string tag()
  {
    need(4);
    std::string t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }
  const std::uint8_t* data() const noexcept { return bytes_.data() + pos_; }

private:
  void need(std::size_t n) const
  {
    if (!has(n))
      throw Error(ErrorKind::Format, "wav", "truncated RIFF data");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

class Writer {
public:
  void tag(const char* t) { out_.insert(out_.end(), t, t + 4); }
  void u32(std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i)
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u16(std::uint16_t v)
  {
    out_.push_back(static_cast<std::uint8_t>(v));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }
  void reserve(std::size_t n) { out_.reserve(n); }

private:
  std::vector<std::uint8_t> out_;
};

} // namespace

std::int16_t float_to_pcm16(float v) noexcept
{
  const double scaled = std::round(static_cast<double>(v) * 32768.0);
  if (!(scaled < 32767.0))
    return scaled != scaled ? 0 : 32767;
  if (scaled < -32768.0)
    return -32768;
  return static_cast<std::int16_t>(scaled);
}

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes)
{
  Reader r(bytes);
  if (r.tag() != "RIFF")
    throw Error(ErrorKind::Format, "wav", "missing RIFF header");
  r.u32();
  if (r.tag() != "WAVE")
    throw Error(ErrorKind::Format, "wav", "missing WAVE form type");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t sample_rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  while (r.has(8)) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    const std::size_t body = r.pos();
    if (id == "fmt ") {
      if (size < 16)
        throw Error(ErrorKind::Format, "wav", "fmt chunk too small");
      format = r.u16();
      channels = r.u16();
      sample_rate = r.u32();
      r.u32(); // byte rate
      block_align = r.u16();
      bits = r.u16();
      if (format == kFormatExtensible) {
        if (size < 40)
          throw Error(ErrorKind::Format, "wav", "extensible fmt chunk too small");
        r.u16(); // cbSize
        r.u16(); // valid bits
        r.u32(); // channel mask
        format = r.u16(); // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      data = r.data();
      data_size = std::min<std::size_t>(size, r.remaining());
    }
    const std::size_t next = body + size + (size & 1u);
    if (next > bytes.size())
      break;
    r.seek(next);
  }

  if (!have_fmt)
    throw Error(ErrorKind::Format, "wav", "missing fmt chunk");
  if (!data)
    throw Error(ErrorKind::Format, "wav", "missing data chunk");
  if (channels < 1 || channels > 2)
    throw Error(ErrorKind::Format, "channels", std::to_string(channels) + " channels; only mono and stereo supported");
  const bool pcm = format == kFormatPcm && (bits == 16 || bits == 24);
  const bool flt = format == kFormatFloat && bits == 32;
  if (!pcm && !flt)
    throw Error(ErrorKind::Format, "codec",
                "unsupported codec " + std::to_string(format) + " at " + std::to_string(bits) + " bits");
  const std::size_t bytes_per_sample = bits / 8u;
  if (block_align != channels * bytes_per_sample)
    throw Error(ErrorKind::Format, "wav", "inconsistent block alignment");
  if (sample_rate == 0)
    throw Error(ErrorKind::Format, "sample_rate", "zero sample rate");

  const std::size_t frames = data_size / block_align;
  AudioBuffer out(channels, frames, static_cast<double>(sample_rate));
  for (std::size_t f = 0; f < frames; ++f) {
    for (int c = 0; c < channels; ++c) {
      const std::uint8_t* p = data + f * block_align + static_cast<std::size_t>(c) * bytes_per_sample;
      float v = 0.0f;
      if (flt) {
        const std::uint32_t u = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
                                std::uint32_t(p[3]) << 24;
        v = std::bit_cast<float>(u);
      } else if (bits == 16) {
        v = pcm16_to_float(static_cast<std::int16_t>(p[0] | p[1] << 8));
      } else {
        std::int32_t s = p[0] | p[1] << 8 | p[2] << 16;
        if (s & 0x800000)
          s -= 0x1000000;
        v = static_cast<float>(s) / 8388608.0f;
      }
      out.channel(c)[f] = v;
    }
  }
  out.require_finite("wav");
  return out;
}

AudioBuffer read_wav(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::Io, "path", "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, WavFormat format)
{
  buffer.require_finite("buffer");
  const int channels = buffer.channels();
  if (channels < 1 || channels > 2)
    throw Error(ErrorKind::Format, "channels", "only mono and stereo can be written");
  const bool flt = format == WavFormat::Float32;
  const std::uint16_t bits = flt ? 32 : 16;
  const std::uint16_t align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::size_t frames = buffer.length();
  const std::uint64_t data_bytes = static_cast<std::uint64_t>(frames) * align;
  const std::uint32_t fmt_size = flt ? 18 : 16;
  const std::uint32_t fact_bytes = flt ? 12 : 0;
  const std::uint64_t riff = 4 + (8 + fmt_size) + fact_bytes + 8 + data_bytes + (data_bytes & 1u);
  if (riff > 0xFFFFFFFFull)
    throw Error(ErrorKind::Format, "buffer", "audio too long for a RIFF file");
  const auto sr = static_cast<std::uint32_t>(std::lround(buffer.sample_rate()));

  Writer w;
  w.reserve(static_cast<std::size_t>(riff + 8));
  w.tag("RIFF");
  w.u32(static_cast<std::uint32_t>(riff));
  w.tag("WAVE");
  w.tag("fmt ");
  w.u32(fmt_size);
  w.u16(flt ? kFormatFloat : kFormatPcm);
  w.u16(static_cast<std::uint16_t>(channels));
  w.u32(sr);
  w.u32(sr * align);
  w.u16(align);
  w.u16(bits);
  if (flt) {
    w.u16(0); // cbSize
    w.tag("fact");
    w.u32(4);
    w.u32(static_cast<std::uint32_t>(frames));
  }
  w.tag("data");
  w.u32(static_cast<std::uint32_t>(data_bytes));
  for (std::size_t f = 0; f < frames; ++f)
    for (int c = 0; c < channels; ++c) {
      const float v = buffer.channel(c)[f];
      if (flt)
        w.u32(std::bit_cast<std::uint32_t>(v));
      else
        w.u16(static_cast<std::uint16_t>(float_to_pcm16(v)));
    }
  auto bytes = w.take();
  if (data_bytes & 1u)
    bytes.push_back(0);
  return bytes;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer, WavFormat format)
{
  const auto bytes = encode_wav(buffer, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorKind::Io, "path", "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw Error(ErrorKind::Io, "path", "write failed for " + path.string());
}

} // namespace tcnfx
