// Copyright 2026 The semiq Authors
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

#include "semiq/protocol.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

namespace {

using namespace semiq;

ProtocolParams<double> base_params(double R, double r) {
  ProtocolParams<double> p;
  p.reflectivity = R;
  p.squeezing = r;
  p.input_mean = {2.0, -1.0};
  return p;
}

TEST_CASE("lossless kept output: input untouched, EPR noise at sqrt(R)") {
  for (double R : {0.1, 0.5, 0.8}) {
    const auto proto = build_transfer(base_params(R, 0.4));
    const auto& out1 = proto.out1();
    const double rt = std::sqrt(R);

    // Annihilation-type blocks are diagonal (c, c); creation-type (d, -d).
    const auto in_block = out1.mode_block(mode_ids::input);
    CHECK(in_block(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(in_block(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(in_block(0, 1) == 0.0);

    const auto e1_block = out1.mode_block(mode_ids::epr_half_1);
    CHECK(e1_block(0, 0) == doctest::Approx(-rt).epsilon(1e-14));
    CHECK(e1_block(1, 1) == doctest::Approx(rt).epsilon(1e-14));

    const auto e2_block = out1.mode_block(mode_ids::epr_half_2);
    CHECK(e2_block(0, 0) == doctest::Approx(rt).epsilon(1e-14));
    CHECK(e2_block(1, 1) == doctest::Approx(rt).epsilon(1e-14));

    // The empty-port vacuum is cancelled by the feedforward gain.
    CHECK(out1.mode_block(mode_ids::input_vacuum).cwiseAbs().maxCoeff() <
          1e-14);
  }
}

TEST_CASE("kept-output variance is Vin + 2 R e^{-2r}") {
  for (double R : {0.0, 0.3, 0.5, 0.9}) {
    for (double r : {0.0, 0.5, 1.2}) {
      const auto proto = build_transfer(base_params(R, r));
      const auto var = variance(proto.out1(), proto.state);
      const double expected = 1.0 + 2.0 * R * std::exp(-2.0 * r);
      CHECK(var[0] == doctest::Approx(expected).epsilon(1e-12));
      CHECK(var[1] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  // Frozen spot value: R = 0.5, r = 0 gives variance 2 exactly.
  const auto proto = build_transfer(base_params(0.5, 0.0));
  CHECK(variance(proto.out1(), proto.state)[0] ==
        doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("channel mode amplifies the input by 1/sqrt(1-R)") {
  const auto proto = build_transfer(base_params(0.5, 0.3));
  REQUIRE(proto.channel.has_value());
  const auto& channel = *proto.channel;

  const double amp = 1.0 / std::sqrt(0.5);
  const auto in_block = channel.mode_block(mode_ids::input);
  CHECK(in_block(0, 0) == doctest::Approx(amp).epsilon(1e-14));
  CHECK(in_block(1, 1) == doctest::Approx(amp).epsilon(1e-14));

  const double noise = -std::sqrt(0.5 / 0.5);
  const auto e1_block = channel.mode_block(mode_ids::epr_half_1);
  CHECK(e1_block(0, 0) == doctest::Approx(noise).epsilon(1e-14));
  CHECK(e1_block(1, 1) == doctest::Approx(-noise).epsilon(1e-14));
  CHECK(channel.mode_block(mode_ids::input_vacuum).cwiseAbs().maxCoeff() <
        1e-14);

  // Frozen: input mean (2, 0) maps to (2 sqrt 2, 0) on the channel.
  auto p = base_params(0.5, 0.3);
  p.input_mean = {2.0, 0.0};
  const auto proto2 = build_transfer(p);
  const auto m = mean(*proto2.channel, proto2.state);
  CHECK(m[0] == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(m[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("kept output keeps the input mean at compensated gain") {
  for (double eta : {1.0, 0.8, 0.55}) {
    auto p = base_params(0.4, 0.6);
    p.transmission = eta;
    p.gain_policy = eta < 1.0 ? GainPolicy::LossCompensated
                              : GainPolicy::Cancellation;
    const auto proto = build_transfer(p);
    const auto m = mean(proto.out1(), proto.state);
    CHECK(m[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("lossy channel coefficients of the kept output") {
  const double R = 0.3;
  const double eta = 0.6;
  auto p = base_params(R, 0.4);
  p.transmission = eta;
  p.gain_policy = GainPolicy::LossCompensated;
  const auto proto = build_transfer(p);
  const auto& out1 = proto.out1();
  const double rt = std::sqrt(R);

  CHECK(out1.mode_block(mode_ids::input)(0, 0) ==
        doctest::Approx(1.0).epsilon(1e-13));
  const double e1 = -(rt + (1 - eta) * (1 - R) / rt);
  CHECK(out1.mode_block(mode_ids::epr_half_1)(0, 0) ==
        doctest::Approx(e1).epsilon(1e-13));
  CHECK(out1.mode_block(mode_ids::epr_half_1)(1, 1) ==
        doctest::Approx(-e1).epsilon(1e-13));
  const double v1 = -(1 - eta) * std::sqrt(1 - R) / rt;
  CHECK(out1.mode_block(mode_ids::input_vacuum)(0, 0) ==
        doctest::Approx(v1).epsilon(1e-13));
  CHECK(out1.mode_block(mode_ids::input_vacuum)(1, 1) ==
        doctest::Approx(v1).epsilon(1e-13));
  CHECK(out1.mode_block(mode_ids::epr_half_2)(0, 0) ==
        doctest::Approx(rt).epsilon(1e-13));
  const double vc = std::sqrt((1 - eta * eta) * (1 - R));
  CHECK(out1.mode_block(mode_ids::channel_loss)(0, 0) ==
        doctest::Approx(vc).epsilon(1e-13));
}

TEST_CASE("all outputs commute canonically, with and without extras") {
  SUBCASE("plain transfer") {
    const auto proto = build_transfer(base_params(0.5, 0.7));
    CHECK(proto.outputs.size() == 2);
    CHECK(check_commutators(proto.outputs));
  }
  SUBCASE("lossy transfer") {
    auto p = base_params(0.7, 0.7);
    p.transmission = 0.6;
    p.gain_policy = GainPolicy::LossCompensated;
    const auto proto = build_transfer(p);
    CHECK(check_commutators(proto.outputs));
  }
  SUBCASE("cloning run") {
    auto p = base_params(0.0, 0.4);
    p.clone_count = 5;
    const auto proto = build_transfer(p);
    CHECK(proto.outputs.size() == 5);
    CHECK(check_commutators(proto.outputs));
  }
}

TEST_CASE("gain policies") {
  SUBCASE("cancellation matches the closed form") {
    const auto proto = build_transfer(base_params(0.5, 0.0));
    CHECK(proto.gain == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  }
  SUBCASE("loss compensation reduces to cancellation at eta = 1") {
    auto p = base_params(0.4, 0.0);
    p.gain_policy = GainPolicy::LossCompensated;
    const auto proto = build_transfer(p);
    CHECK(proto.gain ==
          doctest::Approx(cancellation_gain(0.4)).epsilon(1e-14));
  }
  SUBCASE("manual gain is used verbatim") {
    auto p = base_params(0.4, 0.0);
    p.gain_policy = GainPolicy::Manual;
    p.manual_gain = 0.123;
    CHECK(build_transfer(p).gain == 0.123);
  }
  SUBCASE("zero gain: kept output mean shrinks to (1-R) of the input") {
    auto p = base_params(0.3, 0.5);
    p.gain_policy = GainPolicy::Manual;
    p.manual_gain = 0.0;
    const auto proto = build_transfer(p);
    const auto m = mean(proto.out1(), proto.state);
    CHECK(m[0] == doctest::Approx(0.7 * 2.0).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(0.7 * -1.0).epsilon(1e-12));
  }
}

TEST_CASE("cloning derives the reflectivity and splits uniformly") {
  auto p = base_params(0.123, 0.0);  // reflectivity overridden by M
  p.clone_count = 4;
  const auto proto = build_transfer(p);
  CHECK(proto.params.reflectivity == doctest::Approx(0.75).epsilon(1e-15));
  REQUIRE(proto.outputs.size() == 4);

  // Kept output: same structure as the transfer at R = 3/4.
  const double rt = std::sqrt(0.75);
  CHECK(proto.out1().mode_block(mode_ids::input)(0, 0) ==
        doctest::Approx(1.0).epsilon(1e-13));

  // Every clone: input at +1, EPR1 dagger at -sqrt((M-1)/M), EPR2 at
  // -1/sqrt(M(M-1)), leading split ancilla at +sqrt((M-2)/(M-1)).
  const int m = 4;
  for (std::size_t k = 1; k < proto.outputs.size(); ++k) {
    const auto& clone = proto.outputs[k];
    CHECK(clone.mode_block(mode_ids::input)(0, 0) ==
          doctest::Approx(1.0).epsilon(1e-13));
    CHECK(clone.mode_block(mode_ids::epr_half_1)(0, 0) ==
          doctest::Approx(-std::sqrt((m - 1.0) / m)).epsilon(1e-13));
    CHECK(clone.mode_block(mode_ids::epr_half_1)(1, 1) ==
          doctest::Approx(std::sqrt((m - 1.0) / m)).epsilon(1e-13));
    CHECK(clone.mode_block(mode_ids::epr_half_2)(0, 0) ==
          doctest::Approx(-1.0 / std::sqrt(m * (m - 1.0))).epsilon(1e-13));
  }
  CHECK(proto.outputs[1].mode_block(mode_ids::split_ancilla(0))(0, 0) ==
        doctest::Approx(std::sqrt((m - 2.0) / (m - 1.0))).epsilon(1e-13));
  // All clones share one mean: input_mean, since the amplitude is 1.
  for (std::size_t k = 1; k < proto.outputs.size(); ++k) {
    const auto mu = mean(proto.outputs[k], proto.state);
    CHECK(mu[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mu[1] == doctest::Approx(-1.0).epsilon(1e-12));
  }
  (void)rt;
}

TEST_CASE("cloning with M = 2 reduces to the balanced transfer") {
  auto p = base_params(0.0, 0.6);
  p.clone_count = 2;
  const auto cloning = build_transfer(p);
  const auto plain = build_transfer(base_params(0.5, 0.6));
  REQUIRE(cloning.outputs.size() == 2);
  CHECK((cloning.out1().coeffs() - plain.out1().coeffs())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK((cloning.out2().coeffs() - plain.out2().coeffs())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("teleportation reference: unity-gain EPR teleportation") {
  auto p = base_params(0.5, 0.8);
  const auto tele = teleport_limit_outputs(p);
  REQUIRE(tele.outputs.size() == 1);
  const auto& out = tele.outputs[0];

  CHECK(out.mode_block(mode_ids::input)(0, 0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(out.mode_block(mode_ids::epr_half_1)(0, 0) ==
        doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(out.mode_block(mode_ids::epr_half_1)(1, 1) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(out.mode_block(mode_ids::epr_half_2)(0, 0) ==
        doctest::Approx(1.0).epsilon(1e-14));

  const auto m = mean(out, tele.state);
  CHECK(m[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m[1] == doctest::Approx(-1.0).epsilon(1e-12));
  const auto var = variance(out, tele.state);
  const double expected = 1.0 + 2.0 * std::exp(-1.6);
  CHECK(var[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(var[1] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(check_commutators(tele.outputs));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(build_transfer(base_params(1.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(build_transfer(base_params(-0.1, 0.0)), std::domain_error);
  CHECK_THROWS_AS(build_transfer(base_params(0.5, -0.2)), std::domain_error);
  {
    auto p = base_params(0.5, 0.0);
    p.transmission = 0.0;
    CHECK_THROWS_AS(build_transfer(p), std::domain_error);
    p.transmission = 1.2;
    CHECK_THROWS_AS(build_transfer(p), std::domain_error);
  }
  {
    auto p = base_params(0.5, 0.0);
    p.clone_count = 1;
    CHECK_THROWS_AS(build_transfer(p), std::domain_error);
  }
  {
    auto p = base_params(0.5, 0.0);
    p.input_mean[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(build_transfer(p), std::domain_error);
  }
  {
    auto p = base_params(0.5, 0.0);
    p.gain_policy = GainPolicy::Manual;
    p.manual_gain = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(build_transfer(p), std::domain_error);
  }
}

TEST_CASE("builds are deterministic value types") {
  const auto a = build_transfer(base_params(0.37, 0.91));
  const auto b = build_transfer(base_params(0.37, 0.91));
  REQUIRE(a.outputs.size() == b.outputs.size());
  for (std::size_t k = 0; k < a.outputs.size(); ++k) {
    CHECK((a.outputs[k].coeffs() - b.outputs[k].coeffs())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  CHECK(a.gain == b.gain);
}

}  // namespace
