#include "graspforge/geometry/obj_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "graspforge/core/error.hpp"

namespace graspforge::geometry {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("malformed number '" + std::string(tok) + "'", line_no);
  return v;
}

std::uint32_t parse_index(std::string_view tok, std::size_t vertex_count, std::size_t line_no) {
  const std::string_view head = tok.substr(0, tok.find('/'));
  long long idx = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0)
    throw ParseError("malformed face index '" + std::string(tok) + "'", line_no);
  const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertex_count) + idx;
  if (resolved < 0 || resolved >= static_cast<long long>(vertex_count))
    throw ParseError("face index " + std::to_string(idx) + " out of range", line_no);
  return static_cast<std::uint32_t>(resolved);
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

TriangleMesh parse_obj(std::string_view text) {
  TriangleMesh mesh;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (tok[0] == "v") {
      if (tok.size() < 4 || tok.size() > 5) throw ParseError("vertex needs 3 coordinates", line_no);
      mesh.vertices.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                                 parse_double(tok[3], line_no));
    } else if (tok[0] == "f") {
      const std::size_t corners = tok.size() - 1;
      if (corners < 3) throw ParseError("face needs at least 3 vertices", line_no);
      if (corners != 3)
        throw ParseError("face " + std::to_string(mesh.faces.size() + 1) + " has " + std::to_string(corners) +
                             " vertices; only triangles are supported",
                         line_no);
      Face f{};
      for (int k = 0; k < 3; ++k) f[k] = parse_index(tok[k + 1], mesh.vertices.size(), line_no);
      if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
        throw ParseError("face " + std::to_string(mesh.faces.size() + 1) + " is degenerate", line_no);
      mesh.faces.push_back(f);
    }
    if (end == text.size()) break;
  }
  return mesh;
}

std::string format_obj(const TriangleMesh& mesh) {
  std::string out;
  out.reserve(mesh.vertices.size() * 48 + mesh.faces.size() * 24);
  for (const auto& v : mesh.vertices) {
    out += "v ";
    append_double(out, v.x());
    out += ' ';
    append_double(out, v.y());
    out += ' ';
    append_double(out, v.z());
    out += '\n';
  }
  for (const auto& f : mesh.faces) {
    out += "f ";
    out += std::to_string(f[0] + 1);
    out += ' ';
    out += std::to_string(f[1] + 1);
    out += ' ';
    out += std::to_string(f[2] + 1);
    out += '\n';
  }
  return out;
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open mesh " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_obj(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  mesh.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write mesh " + path.string());
  out << format_obj(mesh);
  if (!out) throw DataError("failed writing mesh " + path.string());
}

}  // namespace graspforge::geometry
