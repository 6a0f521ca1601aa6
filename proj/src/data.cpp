#include "polynet/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace polynet {

SyntheticKind synthetic_kind_from_string(const std::string& name) {
  if (name == "swiss_roll") return SyntheticKind::SwissRoll;
  if (name == "xor") return SyntheticKind::Xor;
  if (name == "two_circles") return SyntheticKind::TwoCircles;
  if (name == "two_moons") return SyntheticKind::TwoMoons;
  if (name == "two_triangles") return SyntheticKind::TwoTriangles;
  if (name == "hexagon_pentagon") return SyntheticKind::HexagonPentagon;
  throw Error(ErrorCode::InvalidArgument, "unknown synthetic kind: " + name);
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::SwissRoll: return "swiss_roll";
    case SyntheticKind::Xor: return "xor";
    case SyntheticKind::TwoCircles: return "two_circles";
    case SyntheticKind::TwoMoons: return "two_moons";
    case SyntheticKind::TwoTriangles: return "two_triangles";
    case SyntheticKind::HexagonPentagon: return "hexagon_pentagon";
  }
  throw Error(ErrorCode::InvalidArgument, "unknown synthetic kind");
}

namespace {

double clamped_normal(Rng& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  double v = rng.normal();
  if (v > 3.0) v = 3.0;
  if (v < -3.0) v = -3.0;
  return sigma * v;
}

// Spiral arms share the radius law R(u) = 0.35 + 0.5 * u / pi; the positive
// arm spans u in [0, 3pi] and the negative arm, rotated by pi, spans
// [0, 2pi]. Bands of the two arms alternate with radial gap 0.5, so classes
// stay disjoint for noise < ~0.08 (3-sigma clamp).
constexpr double kRollBase = 0.35;
constexpr double kRollSlope = 0.5 / M_PI;
constexpr double kRollSpanPos = 3.0 * M_PI;
constexpr double kRollSpanNeg = 2.0 * M_PI;

Vec roll_point(double u, int label) {
  double r = kRollBase + kRollSlope * u;
  double phase = label == 1 ? 0.0 : M_PI;
  return Vec{r * std::cos(u + phase), r * std::sin(u + phase)};
}

void gen_swiss_roll(const SyntheticSpec& spec, LabeledDataset& out, Rng& rng) {
  for (size_t i = 0; i < spec.n; ++i) {
    int label = i % 2 == 0 ? 1 : 0;
    double span = label == 1 ? kRollSpanPos : kRollSpanNeg;
    Vec p = roll_point(rng.uniform() * span, label);
    p[0] += clamped_normal(rng, spec.noise);
    p[1] += clamped_normal(rng, spec.noise);
    out.push_back(p, label);
  }
}

// Four blobs at (+-1, +-1); the diagonal pairs share a label. Disjoint for
// noise < 0.2.
void gen_xor(const SyntheticSpec& spec, LabeledDataset& out, Rng& rng) {
  const double cx[4] = {1.0, -1.0, 1.0, -1.0};
  const double cy[4] = {1.0, -1.0, -1.0, 1.0};
  for (size_t i = 0; i < spec.n; ++i) {
    size_t blob = i % 4;
    int label = blob < 2 ? 1 : 0;
    Vec p{cx[blob] + clamped_normal(rng, spec.noise),
          cy[blob] + clamped_normal(rng, spec.noise)};
    out.push_back(p, label);
  }
}

// Concentric circles of radius 0.6 (label 1) and 1.3 (label 0); disjoint for
// noise < 0.11.
void gen_two_circles(const SyntheticSpec& spec, LabeledDataset& out, Rng& rng) {
  for (size_t i = 0; i < spec.n; ++i) {
    int label = i % 2 == 0 ? 1 : 0;
    double r = label == 1 ? 0.6 : 1.3;
    double a = rng.uniform() * 2.0 * M_PI;
    Vec p{r * std::cos(a) + clamped_normal(rng, spec.noise),
          r * std::sin(a) + clamped_normal(rng, spec.noise)};
    out.push_back(p, label);
  }
}

// Interleaved half circles; disjoint for noise < 0.08.
void gen_two_moons(const SyntheticSpec& spec, LabeledDataset& out, Rng& rng) {
  for (size_t i = 0; i < spec.n; ++i) {
    int label = i % 2 == 0 ? 1 : 0;
    double t = rng.uniform() * M_PI;
    Vec p = label == 0 ? Vec{std::cos(t), std::sin(t)}
                       : Vec{1.0 - std::cos(t), 0.5 - std::sin(t)};
    p[0] += clamped_normal(rng, spec.noise);
    p[1] += clamped_normal(rng, spec.noise);
    out.push_back(p, label);
  }
}

const std::vector<Vec>& triangle_left() {
  static const std::vector<Vec> v{{-2.0, -1.0}, {-0.5, -1.0}, {-1.25, 1.0}};
  return v;
}
const std::vector<Vec>& triangle_right() {
  static const std::vector<Vec> v{{0.5, -1.0}, {2.0, -1.0}, {1.25, 1.0}};
  return v;
}

ConvexPolytope triangle_hrep(const std::vector<Vec>& v) {
  std::vector<Hyperplane> faces;
  for (size_t i = 0; i < 3; ++i) {
    const Vec& a = v[i];
    const Vec& b = v[(i + 1) % 3];
    const Vec& c = v[(i + 2) % 3];
    Vec n{b[1] - a[1], a[0] - b[0]};
    double off = -(n[0] * a[0] + n[1] * a[1]);
    if (n[0] * c[0] + n[1] * c[1] + off > 0.0) {
      n[0] = -n[0];
      n[1] = -n[1];
      off = -off;
    }
    faces.emplace_back(std::move(n), off);
  }
  return ConvexPolytope(std::move(faces));
}

Vec sample_triangle(const std::vector<Vec>& v, Rng& rng) {
  double a = rng.uniform(), b = rng.uniform();
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return Vec{v[0][0] + a * (v[1][0] - v[0][0]) + b * (v[2][0] - v[0][0]),
             v[0][1] + a * (v[1][1] - v[0][1]) + b * (v[2][1] - v[0][1])};
}

double dist_point_segment(const Vec& p, const Vec& a, const Vec& b) {
  double vx = b[0] - a[0], vy = b[1] - a[1];
  double t = ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / (vx * vx + vy * vy);
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * vx, p[1] - a[1] - t * vy);
}

double dist_to_triangle(const Vec& p, const std::vector<Vec>& v,
                        const ConvexPolytope& hrep) {
  if (hrep.contains(p)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < 3; ++i)
    d = std::min(d, dist_point_segment(p, v[i], v[(i + 1) % 3]));
  return d;
}

// Uniform inside the two triangles (label 1) and in the enclosing box at
// margin >= 0.15 from both (label 0).
void gen_two_triangles(const SyntheticSpec& spec, LabeledDataset& out, Rng& rng) {
  const auto& tl = triangle_left();
  const auto& tr = triangle_right();
  ConvexPolytope hl = triangle_hrep(tl);
  ConvexPolytope hr = triangle_hrep(tr);
  for (size_t i = 0; i < spec.n; ++i) {
    if (i % 2 == 0) {
      out.push_back(i % 4 == 0 ? sample_triangle(tl, rng) : sample_triangle(tr, rng), 1);
    } else {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec p{rng.uniform(-3.0, 3.0), rng.uniform(-2.0, 2.0)};
        if (dist_to_triangle(p, tl, hl) >= 0.15 && dist_to_triangle(p, tr, hr) >= 0.15) {
          out.push_back(p, 0);
          break;
        }
      }
    }
  }
}

ConvexPolytope regular_polygon(size_t k, double apothem, double phase) {
  std::vector<Hyperplane> faces;
  for (size_t i = 0; i < k; ++i) {
    double a = phase + 2.0 * M_PI * double(i) / double(k);
    faces.emplace_back(Vec{std::cos(a), std::sin(a)}, -apothem);
  }
  return ConvexPolytope(std::move(faces));
}

// Label 1 on the hexagon-minus-pentagon annulus; points near either boundary
// (band 0.12) are rejected, so classes keep margin 0.24.
void gen_hexagon_pentagon(const SyntheticSpec& spec, LabeledDataset& out, Rng& rng) {
  const double band = 0.12;
  ConvexPolytope hex_in = regular_polygon(6, 1.732 - band, 0.0);
  ConvexPolytope hex_out = regular_polygon(6, 1.732 + band, 0.0);
  ConvexPolytope pent_in = regular_polygon(5, 0.647 - band, 0.3);
  ConvexPolytope pent_out = regular_polygon(5, 0.647 + band, 0.3);
  size_t added = 0;
  while (added < spec.n) {
    Vec p{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    bool in_hex_core = hex_in.contains(p);
    bool in_hex_wide = hex_out.contains(p);
    bool in_pent_core = pent_in.contains(p);
    bool in_pent_wide = pent_out.contains(p);
    if (in_hex_core && !in_pent_wide) {
      out.push_back(p, 1);
      ++added;
    } else if (!in_hex_wide || in_pent_core) {
      out.push_back(p, 0);
      ++added;
    }
  }
}

// Convex k-gon from support offsets: face i has direction
// phase + 2 pi i / k and offset max_x(w.x) + margin.
ConvexPolytope fit_polygon(const std::vector<Vec>& pts, size_t k, double margin,
                           double phase) {
  std::vector<Hyperplane> faces;
  for (size_t i = 0; i < k; ++i) {
    double a = phase + 2.0 * M_PI * double(i) / double(k);
    Vec w{std::cos(a), std::sin(a)};
    double support = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts) support = std::max(support, w[0] * p[0] + w[1] * p[1]);
    faces.emplace_back(std::move(w), -(support + margin));
  }
  return ConvexPolytope(std::move(faces));
}

std::vector<Vec> roll_arm_samples(int label, size_t count) {
  std::vector<Vec> pts;
  double span = label == 1 ? kRollSpanPos : kRollSpanNeg;
  for (size_t i = 0; i < count; ++i)
    pts.push_back(roll_point(span * double(i) / double(count - 1), label));
  return pts;
}

// Nested-chain cover of the swiss roll: C1 wraps the whole positive arm,
// each later polygon wraps the opposite-arm points captured by the previous
// one, and the innermost polygon must be clean of the positive arm. Face
// counts 6+5+5+4 = 20. The phase grid below picks the first orientation
// whose chain validates on dense noise-free arm samples.
PolytopeBasisCover swiss_roll_cover() {
  const size_t kSamples = 800;
  std::vector<Vec> arm_pos = roll_arm_samples(1, kSamples);
  std::vector<Vec> arm_neg = roll_arm_samples(0, kSamples);
  const double margin = 0.13;  // absorbs default noise (3 sigma = 0.12)
  const size_t faces[4] = {6, 5, 5, 4};

  for (int trial = 0; trial < 64; ++trial) {
    double ph1 = 2.0 * M_PI * double(trial % 8) / 48.0;
    double ph2 = 2.0 * M_PI * double(trial / 8) / 40.0;
    std::vector<ConvexPolytope> chain;
    std::vector<Vec> target = arm_pos;
    bool ok = true;
    for (size_t level = 0; level < 4; ++level) {
      if (target.empty()) {
        ok = false;
        break;
      }
      double phase = level % 2 == 0 ? ph1 : ph2;
      ConvexPolytope poly = fit_polygon(target, faces[level], margin, phase);
      const auto& other = level % 2 == 0 ? arm_neg : arm_pos;
      std::vector<Vec> next;
      for (const auto& p : other)
        if (poly.contains(p)) next.push_back(p);
      chain.push_back(std::move(poly));
      target = std::move(next);
    }
    if (!ok || !target.empty()) continue;  // innermost polygon must be clean

    PolytopeBasisCover cover;
    cover.dim = 2;
    cover.positives = {chain[0], chain[2]};
    cover.negatives = {chain[1], chain[3]};

    // final safety: exact voting semantics on the noise-free samples
    bool valid = true;
    for (const auto& p : arm_pos)
      if (cover_vote(cover, p) <= 0) {
        valid = false;
        break;
      }
    for (const auto& p : arm_neg)
      if (valid && cover_vote(cover, p) > 0) {
        valid = false;
        break;
      }
    if (valid) return cover;
  }
  throw Error(ErrorCode::NumericError, "swiss roll cover construction failed");
}

}  // namespace

LabeledDataset gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  LabeledDataset out;
  out.dim = 2;
  Rng rng(spec.seed);
  switch (spec.kind) {
    case SyntheticKind::SwissRoll: gen_swiss_roll(spec, out, rng); break;
    case SyntheticKind::Xor: gen_xor(spec, out, rng); break;
    case SyntheticKind::TwoCircles: gen_two_circles(spec, out, rng); break;
    case SyntheticKind::TwoMoons: gen_two_moons(spec, out, rng); break;
    case SyntheticKind::TwoTriangles: gen_two_triangles(spec, out, rng); break;
    case SyntheticKind::HexagonPentagon: gen_hexagon_pentagon(spec, out, rng); break;
  }
  out.validate();
  return out;
}

double min_interclass_distance(const LabeledDataset& data) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] != 1) continue;
    for (size_t j = 0; j < data.size(); ++j) {
      if (data.labels[j] != 0) continue;
      double d2 = 0.0;
      for (size_t k = 0; k < data.dim; ++k) {
        double diff = data.point(i)[k] - data.point(j)[k];
        d2 += diff * diff;
      }
      best = std::min(best, d2);
    }
  }
  return std::sqrt(best);
}

PolytopeBasisCover reference_cover(SyntheticKind kind) {
  PolytopeBasisCover cover;
  cover.dim = 2;
  switch (kind) {
    case SyntheticKind::TwoTriangles:
      cover.positives = {triangle_hrep(triangle_left()), triangle_hrep(triangle_right())};
      return cover;
    case SyntheticKind::HexagonPentagon:
      cover.positives = {regular_polygon(6, 1.732, 0.0)};
      cover.negatives = {regular_polygon(5, 0.647, 0.3)};
      return cover;
    case SyntheticKind::Xor: {
      double s = 1.0 / std::sqrt(2.0);
      std::vector<Hyperplane> faces;
      faces.emplace_back(Vec{s, -s}, -s);  // x - y <= 1
      faces.emplace_back(Vec{-s, s}, -s);  // y - x <= 1
      cover.positives.emplace_back(ConvexPolytope(std::move(faces)));
      return cover;
    }
    case SyntheticKind::TwoCircles:
      cover.positives = {regular_polygon(6, 0.9, 0.0)};
      return cover;
    case SyntheticKind::SwissRoll:
      return swiss_roll_cover();
    case SyntheticKind::TwoMoons:
      throw Error(ErrorCode::InvalidArgument, "no reference cover for two_moons");
  }
  throw Error(ErrorCode::InvalidArgument, "unknown synthetic kind");
}

void save_csv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  out.precision(17);
  for (size_t i = 0; i < data.size(); ++i) {
    for (size_t k = 0; k < data.dim; ++k) out << data.point(i)[k] << ",";
    out << data.labels[i] << "\n";
  }
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot read " + path);
  LabeledDataset data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    require(row.size() >= 2, ErrorCode::IoError, "csv row too short in " + path);
    int label = int(std::lround(row.back()));
    row.pop_back();
    if (data.dim == 0) data.dim = row.size();
    check_dim(data.dim, row.size(), "csv row");
    data.push_back(row, label);
  }
  data.validate();
  return data;
}

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& path, size_t offset) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  require(in.gcount() == 4, ErrorCode::IoError,
          path + ": truncated at offset " + std::to_string(offset));
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

RawDataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  require(img.good(), ErrorCode::IoError, "cannot read " + images_path);
  std::uint32_t magic = read_be32(img, images_path, 0);
  require(magic == 0x00000803u, ErrorCode::IoError,
          images_path + ": bad magic at offset 0 (expected 0x00000803)");
  std::uint32_t n = read_be32(img, images_path, 4);
  std::uint32_t rows = read_be32(img, images_path, 8);
  std::uint32_t cols = read_be32(img, images_path, 12);

  RawDataset out;
  out.dim = size_t(rows) * size_t(cols);
  out.points.resize(size_t(n) * out.dim);
  std::vector<unsigned char> buf(out.dim);
  for (std::uint32_t i = 0; i < n; ++i) {
    img.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    require(size_t(img.gcount()) == buf.size(), ErrorCode::IoError,
            images_path + ": truncated at image " + std::to_string(i));
    for (size_t k = 0; k < out.dim; ++k)
      out.points[size_t(i) * out.dim + k] = double(buf[k]) / 255.0;
  }

  std::ifstream lab(labels_path, std::ios::binary);
  require(lab.good(), ErrorCode::IoError, "cannot read " + labels_path);
  magic = read_be32(lab, labels_path, 0);
  require(magic == 0x00000801u, ErrorCode::IoError,
          labels_path + ": bad magic at offset 0 (expected 0x00000801)");
  std::uint32_t nl = read_be32(lab, labels_path, 4);
  require(nl == n, ErrorCode::IoError,
          "image/label count mismatch: " + std::to_string(n) + " vs " +
              std::to_string(nl));
  out.labels.resize(nl);
  for (std::uint32_t i = 0; i < nl; ++i) {
    unsigned char b;
    lab.read(reinterpret_cast<char*>(&b), 1);
    require(lab.gcount() == 1, ErrorCode::IoError,
            labels_path + ": truncated at label " + std::to_string(i));
    out.labels[i] = int(b);
  }
  return out;
}

RawDataset load_cifar_binary(const std::vector<std::string>& paths) {
  constexpr size_t kRecord = 3073;
  constexpr size_t kPixels = 3072;
  RawDataset out;
  out.dim = kPixels;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    require(in.good(), ErrorCode::IoError, "cannot read " + path);
    auto size = size_t(in.tellg());
    require(size % kRecord == 0, ErrorCode::IoError,
            path + ": size " + std::to_string(size) + " is not a multiple of 3073");
    in.seekg(0);
    size_t count = size / kRecord;
    std::vector<unsigned char> rec(kRecord);
    for (size_t i = 0; i < count; ++i) {
      in.read(reinterpret_cast<char*>(rec.data()), kRecord);
      require(size_t(in.gcount()) == kRecord, ErrorCode::IoError,
              path + ": truncated at record " + std::to_string(i));
      require(rec[0] <= 9, ErrorCode::IoError,
              path + ": label byte out of range at record " + std::to_string(i));
      out.labels.push_back(int(rec[0]));
      for (size_t k = 0; k < kPixels; ++k)
        out.points.push_back(double(rec[1 + k]) / 255.0);
    }
  }
  return out;
}

LabeledDataset binarize(const RawDataset& raw, int cls, bool complement,
                        double noise_rate, std::uint64_t seed) {
  require(cls >= 0 && cls <= 9, ErrorCode::InvalidArgument, "class must be 0..9");
  require(noise_rate >= 0.0 && noise_rate < 1.0, ErrorCode::InvalidArgument,
          "noise rate must be in [0,1)");

  std::vector<size_t> members, others;
  for (size_t i = 0; i < raw.size(); ++i) {
    bool positive = (raw.labels[i] == cls) != complement;
    (positive ? members : others).push_back(i);
  }
  require(!members.empty(), ErrorCode::InvalidArgument,
          "class " + std::to_string(cls) + " absent from dataset");

  size_t swap_count = size_t(std::floor(noise_rate * double(members.size())));
  require(swap_count <= others.size(), ErrorCode::InvalidArgument,
          "not enough other-class images for the requested noise rate");

  Rng rng(seed);
  auto shuffle = [&](std::vector<size_t>& v) {
    for (size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[size_t(rng.uniform_int(i))]);
  };
  shuffle(members);
  shuffle(others);

  LabeledDataset out;
  out.dim = raw.dim;
  for (size_t i = swap_count; i < members.size(); ++i) {
    size_t idx = members[i];
    out.points.insert(out.points.end(), raw.point(idx), raw.point(idx) + raw.dim);
    out.labels.push_back(1);
  }
  for (size_t i = 0; i < others.size(); ++i) {
    size_t idx = others[i];
    out.points.insert(out.points.end(), raw.point(idx), raw.point(idx) + raw.dim);
    out.labels.push_back(i < swap_count ? 1 : 0);
  }
  out.validate();
  return out;
}

}  // namespace polynet
