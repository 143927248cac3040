/*
   Copyright 2026 The rlst Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#pragma once

#include <string>

#include "rlst/param_set.hpp"

namespace rlst {

/// Binary container shared by every module. Layout: magic "RLST1", u64
/// record count, then per-tensor records (u32 name length, name bytes, u32
/// rank, u64 dims, little-endian f64 values row-major), trailing u64 FNV-1a
/// checksum of all value bytes in record order. Byte-identical for identical
/// parameter sets.
void save_checkpoint(const std::string& path, const ParameterSet& params);

/// Loads records into an existing set built by the model constructors. Every
/// record must match an existing entry's name and shape and every entry must
/// appear in the file. Throws IoError on missing file, bad magic, truncation,
/// or checksum mismatch; ConfigError on name or shape mismatch.
void load_checkpoint(const std::string& path, ParameterSet& params);

/// Reads a checkpoint into a fresh set (all entries trainable); for
/// inspection tools and embedding-style payloads whose shapes are not known
/// ahead of time.
ParameterSet read_checkpoint(const std::string& path);

}  // namespace rlst
