/* Copyright 2026 The melforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "melforge/nn/checkpoint.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "melforge/error.h"

namespace melforge::nn {
namespace {

constexpr char kMagic[8] = {'M', 'F', 'C', 'K', 'P', 'T', '0', '1'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back((v >> (8 * i)) & 0xff);
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back((v >> (8 * i)) & 0xff);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  const std::vector<std::uint8_t>& buffer() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(std::vector<std::uint8_t> data, std::string origin)
      : data_(std::move(data)), origin_(std::move(origin)) {}

  void need(std::size_t n) {
    if (pos_ + n > data_.size()) {
      throw Error(ErrorCode::kUnsupportedFormat, origin_ + ": truncated checkpoint");
    }
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  bool magic_ok() {
    need(sizeof(kMagic));
    const bool ok = std::memcmp(data_.data(), kMagic, sizeof(kMagic)) == 0;
    pos_ += sizeof(kMagic);
    return ok;
  }
  const std::string& origin() const { return origin_; }

 private:
  std::vector<std::uint8_t> data_;
  std::string origin_;
  std::size_t pos_ = 0;
};

std::vector<Parameter*> all_tensors(Model& model) {
  auto tensors = model.parameters();
  for (auto* b : model.buffers()) tensors.push_back(b);
  return tensors;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, Model& model,
                     const Metadata& metadata) {
  const auto& c = model.config();
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.str(std::string(architecture_name(model.architecture())));
  w.u64(c.input_height);
  w.u64(c.input_width);
  w.u64(c.bands);
  w.f64(c.dropout);
  w.f64(c.leaky_slope);
  w.u32(static_cast<std::uint32_t>(c.conv_filters.size()));
  for (auto f : c.conv_filters) w.u64(f);
  w.u32(static_cast<std::uint32_t>(c.linear_units.size()));
  for (auto u : c.linear_units) w.u64(u);
  w.u32(static_cast<std::uint32_t>(metadata.size()));
  for (const auto& [k, v] : metadata) {
    w.str(k);
    w.str(v);
  }

  const auto params = model.parameters();
  const auto tensors = all_tensors(model);
  std::ostringstream manifest;
  manifest << "arch\t" << architecture_name(model.architecture()) << "\n";
  for (const auto& [k, v] : metadata) manifest << "meta\t" << k << "\t" << v << "\n";
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto* t = tensors[i];
    w.str(t->name);
    w.u32(static_cast<std::uint32_t>(t->value.rank()));
    for (auto d : t->value.shape()) w.u64(d);
    for (double v : t->value.data()) w.f64(v);
    manifest << t->name << "\t" << shape_string(t->value.shape()) << "\t"
             << (i < params.size() ? "param" : "buffer") << "\n";
  }

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(w.buffer().data()),
              static_cast<std::streamsize>(w.buffer().size()));
    if (!out) throw Error(ErrorCode::kIoError, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  auto manifest_path = path;
  manifest_path += ".manifest";
  std::ofstream mout(manifest_path, std::ios::trunc);
  if (!mout) throw Error(ErrorCode::kIoError, "cannot write " + manifest_path.string());
  mout << manifest.str();
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  Reader r({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()},
           path.string());
  if (!r.magic_ok()) {
    throw Error(ErrorCode::kUnsupportedFormat, path.string() + ": bad checkpoint magic");
  }
  const Architecture arch = parse_architecture(r.str());
  ArchitectureConfig c;
  c.input_height = r.u64();
  c.input_width = r.u64();
  c.bands = r.u64();
  c.dropout = r.f64();
  c.leaky_slope = r.f64();
  c.conv_filters.resize(r.u32());
  for (auto& f : c.conv_filters) f = r.u64();
  c.linear_units.resize(r.u32());
  for (auto& u : c.linear_units) u = r.u64();

  LoadedCheckpoint out;
  const std::uint32_t n_meta = r.u32();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    auto k = r.str();
    out.metadata[k] = r.str();
  }
  out.model = std::make_unique<Model>(arch, c);
  const auto tensors = all_tensors(*out.model);
  const std::uint32_t count = r.u32();
  if (count != tensors.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                path.string() + ": checkpoint holds " + std::to_string(count) +
                    " tensors, model expects " + std::to_string(tensors.size()));
  }
  for (auto* t : tensors) {
    const std::string name = r.str();
    if (name != t->name) {
      throw Error(ErrorCode::kShapeMismatch,
                  path.string() + ": expected tensor " + t->name + ", found " + name);
    }
    Shape shape(r.u32());
    for (auto& d : shape) d = r.u64();
    if (shape != t->value.shape()) {
      throw Error(ErrorCode::kShapeMismatch,
                  path.string() + ": tensor " + name + " has shape " +
                      shape_string(shape) + ", expected " +
                      shape_string(t->value.shape()));
    }
    for (double& v : t->value.data()) v = r.f64();
  }
  return out;
}

}  // namespace melforge::nn
