// Copyright 2026 The pcqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pcqa/ply.h"

#include <charconv>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "pcqa/error.h"
#include "pcqa/file_util.h"

namespace pcqa {
namespace {

enum class ScalarType { kI8, kU8, kI16, kU16, kI32, kU32, kF32, kF64 };

std::optional<ScalarType> ParseScalarType(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::kI8;
  if (name == "uchar" || name == "uint8") return ScalarType::kU8;
  if (name == "short" || name == "int16") return ScalarType::kI16;
  if (name == "ushort" || name == "uint16") return ScalarType::kU16;
  if (name == "int" || name == "int32") return ScalarType::kI32;
  if (name == "uint" || name == "uint32") return ScalarType::kU32;
  if (name == "float" || name == "float32") return ScalarType::kF32;
  if (name == "double" || name == "float64") return ScalarType::kF64;
  return std::nullopt;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kF32;
  bool is_list = false;
  ScalarType count_type = ScalarType::kU8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

struct Header {
  PlyFormat format = PlyFormat::kAscii;
  std::vector<Element> elements;
  std::size_t body_offset = 0;
};

std::vector<std::string_view> SplitWords(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

Header ParseHeader(std::string_view bytes) {
  Header header;
  std::size_t pos = 0;
  bool saw_format = false;
  bool first = true;
  while (true) {
    const std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) {
      Fail(ErrorCode::kMalformedHeader, "missing end_header");
    }
    std::string_view line = bytes.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;

    const auto words = SplitWords(line);
    if (first) {
      if (words.size() != 1 || words[0] != "ply") {
        Fail(ErrorCode::kMalformedHeader, "missing 'ply' magic line");
      }
      first = false;
      continue;
    }
    if (words.empty() || words[0] == "comment" || words[0] == "obj_info") {
      continue;
    }
    if (words[0] == "end_header") break;
    if (words[0] == "format") {
      if (words.size() != 3) Fail(ErrorCode::kMalformedHeader, "bad format line");
      if (words[2] != "1.0") {
        Fail(ErrorCode::kUnsupportedFormat, "version " + std::string(words[2]));
      }
      if (words[1] == "ascii") {
        header.format = PlyFormat::kAscii;
      } else if (words[1] == "binary_little_endian") {
        header.format = PlyFormat::kBinaryLittleEndian;
      } else {
        Fail(ErrorCode::kUnsupportedFormat, std::string(words[1]));
      }
      saw_format = true;
    } else if (words[0] == "element") {
      if (words.size() != 3) Fail(ErrorCode::kMalformedHeader, "bad element line");
      Element e;
      e.name = std::string(words[1]);
      auto [ptr, ec] = std::from_chars(words[2].data(),
                                       words[2].data() + words[2].size(), e.count);
      if (ec != std::errc() || ptr != words[2].data() + words[2].size()) {
        Fail(ErrorCode::kMalformedHeader, "bad element count");
      }
      header.elements.push_back(std::move(e));
    } else if (words[0] == "property") {
      if (header.elements.empty()) {
        Fail(ErrorCode::kMalformedHeader, "property before element");
      }
      Property p;
      if (words.size() == 5 && words[1] == "list") {
        auto ct = ParseScalarType(words[2]);
        auto vt = ParseScalarType(words[3]);
        if (!ct || !vt) Fail(ErrorCode::kMalformedHeader, "bad list types");
        p.is_list = true;
        p.count_type = *ct;
        p.type = *vt;
        p.name = std::string(words[4]);
      } else if (words.size() == 3) {
        auto t = ParseScalarType(words[1]);
        if (!t) Fail(ErrorCode::kMalformedHeader, "bad property type");
        p.type = *t;
        p.name = std::string(words[2]);
      } else {
        Fail(ErrorCode::kMalformedHeader, "bad property line");
      }
      header.elements.back().properties.push_back(std::move(p));
    } else {
      Fail(ErrorCode::kMalformedHeader, "unknown keyword " + std::string(words[0]));
    }
  }
  if (!saw_format) Fail(ErrorCode::kMalformedHeader, "missing format line");
  header.body_offset = pos;
  return header;
}

double ReadBinaryScalar(ByteReader& in, ScalarType t) {
  switch (t) {
    case ScalarType::kI8: return static_cast<std::int8_t>(in.U8());
    case ScalarType::kU8: return in.U8();
    case ScalarType::kI16: return static_cast<std::int16_t>(in.U16());
    case ScalarType::kU16: return in.U16();
    case ScalarType::kI32: return static_cast<std::int32_t>(in.U32());
    case ScalarType::kU32: return in.U32();
    case ScalarType::kF32: return in.F32();
    case ScalarType::kF64: return in.F64();
  }
  return 0.0;
}

// Whitespace tokenizer over the ascii body.
class AsciiTokens {
 public:
  explicit AsciiTokens(std::string_view body) : body_(body) {}

  double Next() {
    while (pos_ < body_.size() && IsSpace(body_[pos_])) ++pos_;
    if (pos_ >= body_.size()) {
      Fail(ErrorCode::kCountMismatch, "fewer data records than declared");
    }
    std::size_t end = pos_;
    while (end < body_.size() && !IsSpace(body_[end])) ++end;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(body_.data() + pos_, body_.data() + end, v);
    if (ec != std::errc() || ptr != body_.data() + end) {
      Fail(ErrorCode::kBadProperty,
           "unparsable value '" + std::string(body_.substr(pos_, end - pos_)) + "'");
    }
    pos_ = end;
    return v;
  }

 private:
  static bool IsSpace(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  }

  std::string_view body_;
  std::size_t pos_ = 0;
};

struct VertexLayout {
  int xyz[3] = {-1, -1, -1};
  int rgb[3] = {-1, -1, -1};
};

VertexLayout ResolveVertexLayout(const Element& vertex) {
  static constexpr const char* kPos[3] = {"x", "y", "z"};
  static constexpr const char* kCol[3] = {"red", "green", "blue"};
  VertexLayout layout;
  for (int i = 0; i < static_cast<int>(vertex.properties.size()); ++i) {
    const Property& p = vertex.properties[i];
    for (int a = 0; a < 3; ++a) {
      if (p.name == kPos[a]) {
        if (p.is_list || (p.type != ScalarType::kF32 && p.type != ScalarType::kF64)) {
          Fail(ErrorCode::kBadProperty, p.name + " must be float or double");
        }
        layout.xyz[a] = i;
      }
      if (p.name == kCol[a]) {
        if (p.is_list || p.type != ScalarType::kU8) {
          Fail(ErrorCode::kBadProperty, p.name + " must be uchar");
        }
        layout.rgb[a] = i;
      }
    }
  }
  for (int a = 0; a < 3; ++a) {
    if (layout.xyz[a] < 0) {
      Fail(ErrorCode::kBadProperty, std::string("missing property ") + kPos[a]);
    }
    if (layout.rgb[a] < 0) {
      Fail(ErrorCode::kBadProperty, std::string("missing property ") + kCol[a]);
    }
  }
  return layout;
}

template <typename ReadScalar>
void ReadElements(const Header& header, ReadScalar&& read, PointCloud& cloud) {
  std::vector<double> record;
  for (const Element& e : header.elements) {
    const bool is_vertex = e.name == "vertex";
    VertexLayout layout;
    if (is_vertex) {
      layout = ResolveVertexLayout(e);
      cloud.positions.reserve(e.count);
      cloud.colors.reserve(e.count);
    }
    record.assign(e.properties.size(), 0.0);
    for (std::size_t r = 0; r < e.count; ++r) {
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const Property& p = e.properties[k];
        if (p.is_list) {
          const double n = read(p.count_type);
          if (n < 0) Fail(ErrorCode::kBadProperty, "negative list length");
          for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) read(p.type);
        } else {
          record[k] = read(p.type);
        }
      }
      if (is_vertex) {
        cloud.positions.push_back(
            {record[layout.xyz[0]], record[layout.xyz[1]], record[layout.xyz[2]]});
        Rgb c;
        for (int a = 0; a < 3; ++a) {
          const double v = record[layout.rgb[a]];
          if (v < 0 || v > 255 || v != static_cast<int>(v)) {
            Fail(ErrorCode::kBadProperty, "color out of uchar range");
          }
          c[a] = static_cast<std::uint8_t>(v);
        }
        cloud.colors.push_back(c);
      }
    }
  }
}

}  // namespace

PointCloud ParsePly(std::string_view bytes) {
  const Header header = ParseHeader(bytes);
  bool has_vertex = false;
  for (const Element& e : header.elements) has_vertex |= e.name == "vertex";
  if (!has_vertex) Fail(ErrorCode::kBadProperty, "no vertex element");

  PointCloud cloud;
  const std::string_view body = bytes.substr(header.body_offset);
  if (header.format == PlyFormat::kAscii) {
    AsciiTokens tokens(body);
    ReadElements(header, [&](ScalarType) { return tokens.Next(); }, cloud);
  } else {
    ByteReader in(body, static_cast<int>(ErrorCode::kCountMismatch));
    ReadElements(header, [&](ScalarType t) { return ReadBinaryScalar(in, t); },
                 cloud);
  }
  cloud.Validate();
  return cloud;
}

std::string WritePly(const PointCloud& cloud, PlyFormat format) {
  cloud.Validate();
  std::string out;
  out += "ply\n";
  out += format == PlyFormat::kAscii ? "format ascii 1.0\n"
                                     : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "end_header\n";

  if (format == PlyFormat::kAscii) {
    char buf[32];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      for (int a = 0; a < 3; ++a) {
        auto res = std::to_chars(buf, buf + sizeof(buf), cloud.positions[i][a]);
        out.append(buf, res.ptr);
        out += ' ';
      }
      const Rgb& c = cloud.colors[i];
      out += std::to_string(c[0]) + ' ' + std::to_string(c[1]) + ' ' +
             std::to_string(c[2]) + '\n';
    }
  } else {
    out.reserve(out.size() + cloud.size() * 27);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      for (int a = 0; a < 3; ++a) AppendF64(out, cloud.positions[i][a]);
      const Rgb& c = cloud.colors[i];
      out.append(reinterpret_cast<const char*>(c.data()), 3);
    }
  }
  return out;
}

PointCloud ReadPlyFile(const std::filesystem::path& path) {
  return ParsePly(ReadFileBytes(path));
}

void WritePlyFile(const std::filesystem::path& path, const PointCloud& cloud,
                  PlyFormat format) {
  WriteFileBytes(path, WritePly(cloud, format));
}

}  // namespace pcqa
