#include "skelwarp/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "skelwarp/error.hpp"
#include "skelwarp/random.hpp"

namespace skelwarp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Person-centric rest pose (hip midpoint at origin, facing +y, z up) in
// OpenNI 15-joint order.
constexpr std::array<Point3, 15> kRestPose{{
    {0.0, 0.0, 0.65},     // HEAD
    {0.0, 0.0, 0.50},     // NECK
    {0.0, 0.0, 0.28},     // TORSO
    {-0.18, 0.0, 0.48},   // LEFT_SHOULDER
    {-0.22, 0.02, 0.22},  // LEFT_ELBOW
    {0.18, 0.0, 0.48},    // RIGHT_SHOULDER
    {0.22, 0.02, 0.22},   // RIGHT_ELBOW
    {-0.10, 0.0, 0.0},    // LEFT_HIP
    {-0.10, 0.02, -0.45}, // LEFT_KNEE
    {0.10, 0.0, 0.0},     // RIGHT_HIP
    {0.10, 0.02, -0.45},  // RIGHT_KNEE
    {-0.24, 0.06, 0.0},   // LEFT_HAND
    {0.24, 0.06, 0.0},    // RIGHT_HAND
    {-0.10, 0.0, -0.88},  // LEFT_FOOT
    {0.10, 0.0, -0.88},   // RIGHT_FOOT
}};

struct Wave {
  int shape = 0;
  double amplitude = 0.0;
  double frequency = 1.0;
  double phase = 0.0;

  double operator()(double u) const {
    switch (shape) {
      case 0: return amplitude * std::sin(kTwoPi * frequency * u + phase);
      case 1: return amplitude * (2.0 * u - 1.0);
      case 2: return amplitude * std::sin(std::numbers::pi * u);
      default: {
        const double s = std::sin(std::numbers::pi * u);
        return amplitude * s * s * std::cos(phase);
      }
    }
  }
};

using Driver = std::array<Wave, 3>;

Driver random_driver(Rng& rng, double amp_lo, double amp_hi) {
  Driver d;
  for (auto& w : d) {
    w.shape = static_cast<int>(rng.index(4));
    w.amplitude = rng.uniform(amp_lo, amp_hi) * (rng.index(2) == 0 ? 1.0 : -1.0);
    w.frequency = 0.5 * static_cast<double>(1 + rng.index(4));
    w.phase = rng.uniform(0.0, kTwoPi);
  }
  return d;
}

Point3 eval(const Driver& d, double u, double scale) {
  return {scale * d[0](u), scale * d[1](u), scale * d[2](u)};
}

struct ClassMotion {
  Driver dominant_hand;
  Driver other_hand;
  Driver sway;
  Driver legs;
};

Point3 add(Point3 a, const Point3& b, double w = 1.0) {
  a.x += w * b.x;
  a.y += w * b.y;
  a.z += w * b.z;
  return a;
}

// Pose at phase u for a right-handed performer.
std::array<Point3, 15> pose(const ClassMotion& m, double u, double amp) {
  std::array<Point3, 15> p = kRestPose;
  const Point3 right = eval(m.dominant_hand, u, amp);
  const Point3 left = eval(m.other_hand, u, amp);
  const Point3 sway = eval(m.sway, u, amp);
  const Point3 legs = eval(m.legs, u, amp);
  p[12] = add(p[12], right);
  p[6] = add(p[6], right, 0.5);
  p[5] = add(p[5], right, 0.1);
  p[11] = add(p[11], left);
  p[4] = add(p[4], left, 0.5);
  p[3] = add(p[3], left, 0.1);
  p[0] = add(p[0], sway);
  p[1] = add(p[1], sway, 0.8);
  p[2] = add(p[2], sway, 0.4);
  p[10] = add(p[10], legs);
  p[14] = add(p[14], legs, 1.3);
  p[8] = add(p[8], legs, -0.6);
  p[13] = add(p[13], legs, -0.8);
  return p;
}

std::array<Point3, 15> mirrored(const std::array<Point3, 15>& p) {
  constexpr std::array<std::size_t, 15> swap{0, 1, 2, 5, 6, 3, 4, 9, 10, 7, 8, 12, 11, 14, 13};
  std::array<Point3, 15> out;
  for (std::size_t j = 0; j < 15; ++j) {
    out[j] = p[swap[j]];
    out[j].x = -out[j].x;
  }
  return out;
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  if (spec.n_classes < 1 || spec.n_subjects < 1 || spec.reps < 1) {
    throw Error(ErrorKind::InvalidSpec, "classes, subjects and reps must be >= 1");
  }
  if (!(spec.noise >= 0.0) || !(spec.style >= 0.0)) {
    throw Error(ErrorKind::InvalidSpec, "noise and style must be >= 0");
  }
  if (!(spec.speed_min > 0.0) || !(spec.speed_max >= spec.speed_min)) {
    throw Error(ErrorKind::InvalidSpec, "speed range must satisfy 0 < min <= max");
  }
  if (spec.base_length < 4) throw Error(ErrorKind::InvalidSpec, "base_length must be >= 4");
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  validate(spec);
  Dataset ds;
  ds.format = DatasetFormat::GenericCsv;
  ds.layout = openni15_layout();

  std::vector<ClassMotion> motions;
  for (int c = 0; c < spec.n_classes; ++c) {
    Rng rng(derive_seed(seed, 1000 + static_cast<std::uint64_t>(c)));
    ClassMotion m;
    m.dominant_hand = random_driver(rng, 0.12, 0.35);
    m.other_hand = random_driver(rng, 0.0, 0.08);
    m.sway = random_driver(rng, 0.02, 0.08);
    m.legs = random_driver(rng, 0.0, 0.05);
    motions.push_back(m);
    ds.class_names.push_back("class" + std::to_string(c + 1));
  }

  struct Style {
    std::array<Point3, 15> offset{};
    double amplitude = 1.0;
    bool left_handed = false;
  };
  std::vector<Style> styles;
  for (int s = 0; s < spec.n_subjects; ++s) {
    Rng rng(derive_seed(seed, 2000 + static_cast<std::uint64_t>(s)));
    Style st;
    if (spec.style > 0.0) {
      for (auto& o : st.offset) o = {rng.normal(0, spec.style), rng.normal(0, spec.style),
                                     rng.normal(0, spec.style)};
      // Keep the hips symmetric so the body frame stays well defined.
      st.offset[7] = st.offset[9] = Point3{};
      st.amplitude = 1.0 + rng.uniform(-5.0, 5.0) * spec.style;
    }
    st.left_handed = spec.balanced_handedness && s % 2 == 1;
    styles.push_back(st);
  }

  std::uint64_t uid = 1;
  std::uint64_t stream = 0;
  for (int c = 0; c < spec.n_classes; ++c) {
    for (int s = 0; s < spec.n_subjects; ++s) {
      for (int r = 0; r < spec.reps; ++r) {
        Rng rng(derive_seed(seed, 100000 + stream++));
        const double speed = rng.uniform(spec.speed_min, spec.speed_max);
        const int frames = std::max(8, static_cast<int>(std::lround(spec.base_length / speed)));
        const double heading = rng.uniform(0.0, kTwoPi);
        const Point3 origin{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(0.8, 1.0)};
        const double ch = std::cos(heading);
        const double sh = std::sin(heading);

        RawSequence seq;
        seq.class_label = c + 1;
        seq.subject_id = s + 1;
        seq.sample_index = r + 1;
        seq.uid = uid++;
        for (int t = 0; t < frames; ++t) {
          const double u = static_cast<double>(t) / (frames - 1);
          auto p = pose(motions[static_cast<std::size_t>(c)], u, styles[static_cast<std::size_t>(s)].amplitude);
          for (std::size_t j = 0; j < p.size(); ++j) p[j] = add(p[j], styles[static_cast<std::size_t>(s)].offset[j]);
          if (styles[static_cast<std::size_t>(s)].left_handed) p = mirrored(p);
          Frame f;
          f.timestamp_index = t;
          for (auto q : p) {
            if (spec.noise > 0.0) {
              q = add(q, Point3{rng.normal(0, spec.noise), rng.normal(0, spec.noise),
                                rng.normal(0, spec.noise)});
            }
            f.joints.push_back({origin.x + ch * q.x - sh * q.y, origin.y + sh * q.x + ch * q.y,
                                origin.z + q.z});
          }
          seq.frames.push_back(std::move(f));
        }
        ds.sequences.push_back(std::move(seq));
      }
    }
  }
  return ds;
}

RawSequence reparameterize(const RawSequence& seq, double speed_factor) {
  if (seq.frames.empty()) throw Error(ErrorKind::EmptySequence, "sequence has no frames");
  if (!(speed_factor > 0.0)) throw Error(ErrorKind::InvalidArgument, "speed factor must be > 0");
  const std::size_t n = seq.frames.size();
  const auto m = static_cast<std::size_t>(
      std::max<long>(2, std::lround(static_cast<double>(n) / speed_factor)));
  RawSequence out = seq;
  out.frames.clear();
  auto lerp = [](const Point3& a, const Point3& b, double w) {
    return Point3{a.x + w * (b.x - a.x), a.y + w * (b.y - a.y), a.z + w * (b.z - a.z)};
  };
  for (std::size_t t = 0; t < m; ++t) {
    const double pos = n == 1 ? 0.0 : static_cast<double>(t) * static_cast<double>(n - 1) / static_cast<double>(m - 1);
    const auto lo = std::min(static_cast<std::size_t>(pos), n - 1);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double w = pos - static_cast<double>(lo);
    Frame f;
    f.timestamp_index = static_cast<int>(t);
    for (std::size_t j = 0; j < seq.frames[lo].joints.size(); ++j) {
      f.joints.push_back(lerp(seq.frames[lo].joints[j], seq.frames[hi].joints[j], w));
    }
    for (std::size_t o = 0; o < seq.frames[lo].objects.size(); ++o) {
      f.objects.push_back(lerp(seq.frames[lo].objects[o], seq.frames[hi].objects[o], w));
    }
    out.frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace skelwarp
