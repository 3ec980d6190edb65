#pragma once

// Load motion, wrench and nullspace coordinates that are all smooth in time
// with closed-form derivatives, for finite-difference checks of the
// allocation and velocity-prediction chain.

#include <cmath>

#include "nonstop/model.hpp"
#include "support/test_support.hpp"

namespace nonstop::testing {

struct SmoothCase {
  SystemGeometry geom;
  SmoothAttitude path;
  Vec3 p0, v0, a0;
  Vec6 w0, w1;
  VecX l0, l1;
  double freq;

  static SmoothCase random(Gen& gen) {
    SmoothCase c;
    c.geom = gen.geometry(gen.integer(3, 6));
    c.path = SmoothAttitude::random(gen);
    c.path.a *= 0.3;
    c.path.b *= 0.3;
    c.p0 = gen.vec3(1);
    c.v0 = gen.vec3(0.3);
    c.a0 = gen.vec3(0.2);
    c.w0 = gen.vecx(6, 0.5);
    c.w0(2) += 2.0 * c.geom.load_mass * c.geom.gravity;
    c.w1 = gen.vecx(6, 0.5);
    const int k = 3 * c.geom.count() - 6;
    c.l0 = gen.vecx(k, 0.3);
    c.l1 = gen.vecx(k, 0.3);
    c.freq = gen.uniform(0.5, 2.0);
    return c;
  }
  LoadState load(double t) const {
    LoadState s;
    s.position = p0 + v0 * t + 0.5 * a0 * t * t;
    s.velocity = v0 + a0 * t;
    s.attitude = path.at(t);
    s.angular_velocity = path.body_rate(t);
    return s;
  }
  Vec6 wrench(double t) const { return w0 + w1 * std::sin(freq * t); }
  Vec6 wrench_rate(double t) const { return w1 * freq * std::cos(freq * t); }
  VecX lambda(double t) const { return l0 + l1 * std::cos(freq * t); }
  VecX lambda_rate(double t) const { return -l1 * freq * std::sin(freq * t); }
};

}  // namespace nonstop::testing
