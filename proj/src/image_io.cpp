#include "pgvba/image_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pgvba {

namespace {

void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

// Reads the next whitespace-separated PNM header token, skipping # comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

Image read_pgm(std::istream& in, const std::string& path) {
  const int width = std::stoi(next_token(in));
  const int height = std::stoi(next_token(in));
  const long maxval = std::stol(next_token(in));
  if (width <= 0 || height <= 0) fail(path, "bad PGM dimensions");
  if (maxval <= 0 || maxval > 65535) fail(path, "unsupported PGM maxval");
  Image img(width, height);
  const std::size_t n = img.size();
  if (maxval < 256) {
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (!in) fail(path, "truncated PGM payload");
    for (std::size_t i = 0; i < n; ++i) img.data[i] = buf[i];
  } else {
    std::vector<unsigned char> buf(2 * n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(2 * n));
    if (!in) fail(path, "truncated PGM payload");
    for (std::size_t i = 0; i < n; ++i)
      img.data[i] = static_cast<double>((buf[2 * i] << 8) | buf[2 * i + 1]);
  }
  return img;
}

Image read_pfm(std::istream& in, const std::string& path) {
  const int width = std::stoi(next_token(in));
  const int height = std::stoi(next_token(in));
  const double scale = std::stod(next_token(in));
  if (width <= 0 || height <= 0) fail(path, "bad PFM dimensions");
  const bool little_endian = scale < 0.0;
  Image img(width, height);
  std::vector<float> row(width);
  // PFM stores rows bottom-to-top.
  for (int r = height - 1; r >= 0; --r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(float) * width));
    if (!in) fail(path, "truncated PFM payload");
    for (int c = 0; c < width; ++c) {
      float v = row[c];
      if (!little_endian) {
        unsigned char* p = reinterpret_cast<unsigned char*>(&v);
        std::swap(p[0], p[3]);
        std::swap(p[1], p[2]);
      }
      img.at(r, c) = v;
    }
  }
  return img;
}

}  // namespace

Image read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  const std::string magic = next_token(in);
  if (magic == "P5") return read_pgm(in, path);
  if (magic == "Pf") return read_pfm(in, path);
  fail(path, "unsupported image format (expected P5 or Pf)");
  return {};
}

void write_pfm(const std::string& path, const Image& img) {
  validate(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "Pf\n" << img.width << " " << img.height << "\n-1.0\n";
  std::vector<float> row(img.width);
  for (int r = img.height - 1; r >= 0; --r) {
    for (int c = 0; c < img.width; ++c) row[c] = static_cast<float>(img.at(r, c));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(float) * img.width));
  }
  if (!out) fail(path, "write failed");
}

void write_pgm16(const std::string& path, const Image& img) {
  validate(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "P5\n" << img.width << " " << img.height << "\n65535\n";
  std::vector<unsigned char> row(2 * static_cast<std::size_t>(img.width));
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const long v = std::lround(std::min(65535.0, std::max(0.0, img.at(r, c))));
      row[2 * c] = static_cast<unsigned char>(v >> 8);
      row[2 * c + 1] = static_cast<unsigned char>(v & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) fail(path, "write failed");
}

void write_image(const std::string& path, const Image& img) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".pgm")
    write_pgm16(path, img);
  else
    write_pfm(path, img);
}

Metadata read_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  Metadata meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(path, "malformed metadata line: " + line);
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

void write_metadata(const std::string& path, const Metadata& meta) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  for (const auto& [key, value] : meta) out << key << "=" << value << "\n";
  if (!out) fail(path, "write failed");
}

namespace {
constexpr char kWeightMagic[] = "NLTVW1";
}

WeightFile read_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  std::string magic = next_token(in);
  if (magic != kWeightMagic) fail(path, "not a weight tensor file");
  WeightFile wf;
  wf.width = std::stoi(next_token(in));
  wf.height = std::stoi(next_token(in));
  wf.directions = std::stoi(next_token(in));
  if (wf.width <= 0 || wf.height <= 0 || wf.directions <= 0) fail(path, "bad weight shape");
  const std::size_t n =
      static_cast<std::size_t>(wf.width) * wf.height * wf.directions;
  wf.weights.resize(n);
  in.read(reinterpret_cast<char*>(wf.weights.data()),
          static_cast<std::streamsize>(sizeof(double) * n));
  if (!in) fail(path, "truncated weight payload");
  return wf;
}

void write_weights(const std::string& path, const WeightFile& wf) {
  if (wf.weights.size() !=
      static_cast<std::size_t>(wf.width) * wf.height * wf.directions)
    throw std::invalid_argument("write_weights: shape mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << kWeightMagic << "\n" << wf.width << " " << wf.height << " " << wf.directions << "\n";
  out.write(reinterpret_cast<const char*>(wf.weights.data()),
            static_cast<std::streamsize>(sizeof(double) * wf.weights.size()));
  if (!out) fail(path, "write failed");
}

}  // namespace pgvba
