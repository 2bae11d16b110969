// Copyright 2026 The binharm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "binharm/signal.hpp"

namespace binharm {

// 24-bit integer PCM, two channels. Amplitude 1.0 maps to digital full scale
// (2^23 - 1); values beyond are clipped.
std::string encode_wav(const StereoSignal& signal);
void write_wav(const std::filesystem::path& path, const StereoSignal& signal);

// Reads the files written above (24-bit, stereo, PCM). Throws ValidationError otherwise.
StereoSignal decode_wav(const std::string& bytes);
StereoSignal read_wav(const std::filesystem::path& path);

}  // namespace binharm
