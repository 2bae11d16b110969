// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#include "binharm/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>

#include "binharm/errors.hpp"

namespace binharm {

namespace {

constexpr double kFullScale = 8388607.0;  // 2^23 - 1

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_i24(std::string& out, double x) {
  const double scaled = std::clamp(std::round(x * kFullScale), -kFullScale - 1.0, kFullScale);
  const auto v = static_cast<std::int32_t>(scaled);
  const auto u = static_cast<std::uint32_t>(v);
  out.push_back(static_cast<char>(u & 0xff));
  out.push_back(static_cast<char>((u >> 8) & 0xff));
  out.push_back(static_cast<char>((u >> 16) & 0xff));
}

std::uint32_t get_u32(const std::string& b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + i]);
  return v;
}

std::uint16_t get_u16(const std::string& b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

}  // namespace

std::string encode_wav(const StereoSignal& signal) {
  const std::uint32_t frames = static_cast<std::uint32_t>(signal.size());
  const std::uint32_t data_bytes = frames * 2 * 3;
  const auto rate = static_cast<std::uint32_t>(std::llround(signal.sample_rate()));
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 2);
  put_u32(out, rate);
  put_u32(out, rate * 2 * 3);
  put_u16(out, 2 * 3);
  put_u16(out, 24);
  out += "data";
  put_u32(out, data_bytes);
  for (std::size_t i = 0; i < signal.size(); ++i) {
    put_i24(out, signal.left.samples[i]);
    put_i24(out, signal.right.samples[i]);
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const StereoSignal& signal) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw RuntimeError("cannot open " + path.string() + " for writing");
  const std::string bytes = encode_wav(signal);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw RuntimeError("write failed: " + path.string());
}

StereoSignal decode_wav(const std::string& b) {
  if (b.size() < 44 || b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0)
    throw ValidationError("not a RIFF/WAVE file");
  std::size_t pos = 12;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (pos + 8 <= b.size()) {
    const std::string id = b.substr(pos, 4);
    const std::uint32_t len = get_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (get_u16(b, body) != 1 || get_u16(b, body + 2) != 2 || get_u16(b, body + 14) != 24)
        throw ValidationError("only 24-bit stereo PCM is supported");
      rate = get_u32(b, body + 4);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ValidationError("data chunk before fmt chunk");
      if (body + len > b.size()) throw ValidationError("truncated data chunk");
      const std::size_t frames = len / 6;
      StereoSignal s(frames, static_cast<double>(rate));
      for (std::size_t i = 0; i < frames; ++i) {
        for (int c = 0; c < 2; ++c) {
          const std::size_t at = body + i * 6 + static_cast<std::size_t>(c) * 3;
          std::uint32_t u = static_cast<unsigned char>(b[at]) |
                            (static_cast<unsigned char>(b[at + 1]) << 8) |
                            (static_cast<unsigned char>(b[at + 2]) << 16);
          if (u & 0x800000u) u |= 0xff000000u;
          const double v = static_cast<double>(static_cast<std::int32_t>(u)) / kFullScale;
          (c == 0 ? s.left : s.right).samples[i] = v;
        }
      }
      return s;
    }
    pos = body + len + (len & 1u);
  }
  throw ValidationError("no data chunk");
}

StereoSignal read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw RuntimeError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

}  // namespace binharm
