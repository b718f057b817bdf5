#include "graspkit/frame_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "graspkit/error.hpp"

namespace graspkit {

namespace fs = std::filesystem;

LabelId LabeledFrame::label_for(const std::string& name) const {
  for (const auto& [id, n] : names) {
    if (n == name) return id;
  }
  return 0;
}

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + p.string());
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + p.string());
  return in;
}

// Reads a netpbm header and positions `in` at the first raster byte.
void read_header(std::istream& in, const std::string& magic, int& w, int& h, int& maxval, const fs::path& p) {
  std::string m;
  in >> m;
  auto next_int = [&] {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string skip;
      std::getline(in, skip);
      in >> std::ws;
    }
    int v = -1;
    in >> v;
    return v;
  };
  if (m != magic) throw Error(ErrorCode::kParseError, p.string() + ": expected " + magic);
  w = next_int();
  h = next_int();
  maxval = next_int();
  if (!in || w <= 0 || h <= 0 || maxval <= 0) throw Error(ErrorCode::kParseError, p.string() + ": bad header");
  in.get();
}

void write_pgm16(const fs::path& p, int w, int h, const std::vector<std::uint16_t>& values) {
  auto out = open_out(p);
  out << "P5\n" << w << ' ' << h << "\n65535\n";
  for (std::uint16_t v : values) {
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
    out.write(bytes, 2);
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + p.string());
}

std::vector<std::uint16_t> read_pgm16(const fs::path& p, int w, int h) {
  auto in = open_in(p);
  int fw = 0, fh = 0, maxval = 0;
  read_header(in, "P5", fw, fh, maxval, p);
  if (fw != w || fh != h) throw Error(ErrorCode::kParseError, p.string() + ": size differs from meta.txt");
  if (maxval < 256) throw Error(ErrorCode::kParseError, p.string() + ": expected 16-bit samples");
  std::vector<std::uint16_t> out(static_cast<size_t>(w) * h);
  for (auto& v : out) {
    unsigned char b[2];
    if (!in.read(reinterpret_cast<char*>(b), 2)) throw Error(ErrorCode::kParseError, p.string() + ": truncated");
    v = static_cast<std::uint16_t>(b[0] << 8 | b[1]);
  }
  return out;
}

}  // namespace

void save_frame(const LabeledFrame& lf, const std::string& dir) {
  const RGBDFrame& f = lf.frame;
  f.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  const fs::path root(dir);
  const int w = f.width();
  const int h = f.height();

  {
    auto out = open_out(root / "color.ppm");
    out << "P6\n" << w << ' ' << h << "\n255\n";
    for (const Rgb& c : f.color.data()) out.write(reinterpret_cast<const char*>(c.data()), 3);
  }
  std::vector<std::uint16_t> depth_mm(f.depth.size());
  for (size_t i = 0; i < depth_mm.size(); ++i) {
    const double d = f.depth[i];
    depth_mm[i] = is_valid_depth(d) ? static_cast<std::uint16_t>(std::clamp(std::lround(d * 1000.0), 1L, 65535L)) : 0;
  }
  write_pgm16(root / "depth.pgm", w, h, depth_mm);
  write_pgm16(root / "labels.pgm", w, h, f.labels.data());

  auto meta = open_out(root / "meta.txt");
  meta.precision(17);
  const auto& in = f.intrinsics;
  meta << "graspkit-frame v1\n";
  meta << "size " << w << ' ' << h << '\n';
  meta << "intrinsics " << in.fx << ' ' << in.fy << ' ' << in.cx << ' ' << in.cy << '\n';
  meta << "pose";
  const Eigen::Matrix<double, 3, 4> m = f.pose.matrix().topRows<3>();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) meta << ' ' << m(r, c);
  }
  meta << '\n';
  for (const auto& [id, name] : lf.names) meta << "label " << id << ' ' << name << '\n';
  if (!meta) throw Error(ErrorCode::kIoError, "write failed for meta.txt");
}

LabeledFrame load_frame(const std::string& dir) {
  const fs::path root(dir);
  LabeledFrame lf;
  RGBDFrame& f = lf.frame;

  auto meta = open_in(root / "meta.txt");
  std::string line;
  std::getline(meta, line);
  if (line != "graspkit-frame v1") throw Error(ErrorCode::kParseError, "meta.txt: unknown header '" + line + "'");
  bool have_size = false, have_intr = false;
  int lineno = 1;
  while (std::getline(meta, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::kParseError, "meta.txt:" + std::to_string(lineno) + ": " + why);
    };
    if (key == "size") {
      ls >> f.intrinsics.width >> f.intrinsics.height;
      have_size = static_cast<bool>(ls);
      if (!have_size) fail("bad size");
    } else if (key == "intrinsics") {
      ls >> f.intrinsics.fx >> f.intrinsics.fy >> f.intrinsics.cx >> f.intrinsics.cy;
      have_intr = static_cast<bool>(ls);
      if (!have_intr) fail("bad intrinsics");
    } else if (key == "pose") {
      Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 4; ++c) ls >> m(r, c);
      }
      if (!ls) fail("pose needs 12 numbers");
      f.pose.matrix() = m;
    } else if (key == "label") {
      int id = 0;
      std::string name;
      ls >> id >> name;
      if (!ls || id <= 0 || id > 65535) fail("bad label line");
      lf.names[static_cast<LabelId>(id)] = name;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!have_size || !have_intr) throw Error(ErrorCode::kParseError, "meta.txt: size and intrinsics are required");
  const int w = f.intrinsics.width;
  const int h = f.intrinsics.height;
  if (w <= 0 || h <= 0) throw Error(ErrorCode::kParseError, "meta.txt: non-positive size");

  {
    const fs::path p = root / "color.ppm";
    auto in = open_in(p);
    int fw = 0, fh = 0, maxval = 0;
    read_header(in, "P6", fw, fh, maxval, p);
    if (fw != w || fh != h || maxval != 255) throw Error(ErrorCode::kParseError, p.string() + ": unexpected format");
    f.color = Image<Rgb>(w, h);
    if (!in.read(reinterpret_cast<char*>(f.color.data().data()), static_cast<std::streamsize>(3) * w * h)) {
      throw Error(ErrorCode::kParseError, p.string() + ": truncated");
    }
  }
  const auto depth_mm = read_pgm16(root / "depth.pgm", w, h);
  f.depth = Image<double>(w, h);
  for (size_t i = 0; i < depth_mm.size(); ++i) f.depth[i] = depth_mm[i] ? depth_mm[i] / 1000.0 : kInvalidDepth;
  f.labels = Image<LabelId>(w, h);
  f.labels.data() = read_pgm16(root / "labels.pgm", w, h);
  f.validate();
  return lf;
}

}  // namespace graspkit
