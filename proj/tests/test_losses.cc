// tests/test_losses.cc

// Copyright 2026  isvkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isv/loss/losses.h"
#include "isv/num/gradcheck.h"
#include "isv/rng.h"
#include "oracles.h"

using namespace isv;
using num::Graph;
using num::Tensor;

TEST_CASE("bce: maximum-entropy point is ln 2") {
  std::vector<double> p(10, 0.5), y;
  Rng rng(1);
  for (int i = 0; i < 10; ++i) y.push_back(rng.uniform() < 0.5 ? 0.0 : 1.0);
  CHECK(loss::bce_value(p, y) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("bce: perfect prediction is (near) zero") {
  std::vector<double> y = {0, 1, 1, 0, 1};
  CHECK(loss::bce_value(y, y) <= 1e-6);
}

TEST_CASE("bce: random batches match the scalar loop oracle") {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform_int(30));
    std::vector<double> p, y;
    for (int i = 0; i < n; ++i) {
      p.push_back(rng.uniform());
      y.push_back(rng.uniform() < 0.5 ? 0.0 : 1.0);
    }
    CHECK(std::fabs(loss::bce_value(p, y) - oracle::bce(p, y)) < 1e-12);
  }
}

TEST_CASE("bce: labels outside {0,1} are a label error") {
  CHECK_THROWS_WITH_AS(loss::bce_value<double>({0.5}, {0.7}), doctest::Contains("outside {0,1}"),
                       DataError);
}

TEST_CASE("bce: exact 0/1 probabilities stay finite via clamping") {
  const double v = loss::bce_value<double>({0.0, 1.0}, {1.0, 0.0});
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
}

TEST_CASE("cce: uniform logits give ln C") {
  for (int c : {2, 3, 10}) {
    Tensor<double> logits({4, c});
    logits.fill(0.123);
    std::vector<int> y = {0, c - 1, c / 2, 0};
    CHECK(loss::cce_value(logits, y) == doctest::Approx(std::log(double(c))).epsilon(1e-12));
  }
}

TEST_CASE("cce: growing margin toward the true class drives the loss to zero") {
  double prev = 1e9;
  for (double margin : {2.0, 5.0, 10.0, 30.0}) {
    Tensor<double> logits({1, 3});
    logits.data = {margin, 0.0, 0.0};
    const double v = loss::cce_value(logits, {0});
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-12);
}

TEST_CASE("cce: random batches match the log-sum-exp oracle") {
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform_int(20));
    const int c = 2 + static_cast<int>(rng.uniform_int(6));
    Tensor<double> logits({n, c});
    for (auto& v : logits.data) v = rng.gaussian(0.0, 30.0);  // large: exercises stabilization
    std::vector<int> y;
    for (int i = 0; i < n; ++i) y.push_back(static_cast<int>(rng.uniform_int(c)));
    CHECK(std::fabs(loss::cce_value(logits, y) - oracle::cce(logits.data, n, c, y)) < 1e-10);
  }
}

TEST_CASE("cce: out-of-range label is a label error") {
  Tensor<double> logits({1, 3});
  CHECK_THROWS_WITH_AS(loss::cce_value(logits, {3}), doctest::Contains("out of range"),
                       DataError);
}

TEST_CASE("e2e_loss: total is the exact unit-weight sum of components") {
  Rng rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 4 + static_cast<int>(rng.uniform_int(8));
    const int s = 3;
    Graph<double> g;
    Tensor<double> sid({n, s}), pad({n, 1}), isv({n, 2});
    for (auto& v : sid.data) v = rng.gaussian();
    for (auto& v : pad.data) v = rng.uniform(0.05, 0.95);
    for (auto& v : isv.data) v = rng.gaussian();
    std::vector<int> sid_y, isv_y;
    std::vector<double> pad_y;
    for (int i = 0; i < n; ++i) {
      sid_y.push_back(static_cast<int>(rng.uniform_int(s)));
      isv_y.push_back(static_cast<int>(rng.uniform_int(2)));
      pad_y.push_back(rng.uniform() < 0.5 ? 0.0 : 1.0);
    }
    auto sid_ref = g.input(sid);
    auto pad_ref = g.input(pad);
    auto isv_ref = g.input(isv);
    auto ln = loss::e2e_loss(g, sid_ref, sid_y, pad_ref, pad_y, isv_ref, isv_y);
    // component-sum oracle via independently invoked value functions
    const double want =
        oracle::cce(sid.data, n, s, sid_y) + oracle::bce(pad.data, pad_y) +
        oracle::cce(isv.data, n, 2, isv_y);
    CHECK(std::fabs(ln.report.total - want) < 1e-12);
    CHECK(std::fabs(ln.report.total - (*ln.report.sid + *ln.report.pad + *ln.report.isv)) <
          1e-9);
    CHECK(*ln.report.sid >= 0.0);
    CHECK(*ln.report.pad >= 0.0);
    CHECK(*ln.report.isv >= 0.0);
    CHECK(std::isfinite(ln.report.total));
  }
}

TEST_CASE("modular_loss: alpha-weighted composition") {
  Rng rng(19);
  const int n = 12;
  Graph<double> g;
  Tensor<double> sv({n, 1}), isv({n, 2});
  for (auto& v : sv.data) v = rng.uniform(0.05, 0.95);
  for (auto& v : isv.data) v = rng.gaussian();
  std::vector<double> sv_y;
  std::vector<int> isv_y;
  for (int i = 0; i < n; ++i) {
    sv_y.push_back(rng.uniform() < 0.5 ? 0.0 : 1.0);
    isv_y.push_back(static_cast<int>(rng.uniform_int(2)));
  }
  auto ln = loss::modular_loss(g, g.input(sv), sv_y, g.input(isv), isv_y, 20.0);
  const double want = 20.0 * oracle::bce(sv.data, sv_y) + oracle::cce(isv.data, n, 2, isv_y);
  CHECK(std::fabs(ln.report.total - want) < 1e-12);
  CHECK(std::fabs(ln.report.total - (20.0 * *ln.report.sv + *ln.report.isv)) < 1e-9);

  Graph<double> g0;
  auto ln0 = loss::modular_loss(g0, g0.input(sv), sv_y, g0.input(isv), isv_y, 0.0);
  CHECK(ln0.report.total == doctest::Approx(*ln0.report.isv).epsilon(1e-15));
}

TEST_CASE("loss gradients pass finite-difference checks") {
  Rng rng(23);
  // bce on a sigmoid output
  {
    num::ParamTensor<double> w("w", Tensor<double>({4, 1}));
    for (auto& v : w.value.data) v = rng.gaussian(0.0, 0.5);
    Tensor<double> x({6, 4});
    for (auto& v : x.data) v = rng.gaussian();
    std::vector<double> y = {1, 0, 1, 1, 0, 0};
    auto build = [&](Graph<double>& g) {
      auto probs = g.sigmoid(g.matmul(g.input(x), g.param(w)));
      return loss::bce(g, probs, y);
    };
    w.zero_grad();
    {
      Graph<double> g;
      g.backward(build(g));
    }
    auto forward = [&]() {
      Graph<double> g;
      return g.value(build(g)).ptr()[0];
    };
    CHECK(num::finite_diff_check({&w}, forward) < 1e-4);
  }
  // cce on raw logits
  {
    num::ParamTensor<double> w("w", Tensor<double>({5, 3}));
    for (auto& v : w.value.data) v = rng.gaussian(0.0, 0.5);
    Tensor<double> x({7, 5});
    for (auto& v : x.data) v = rng.gaussian();
    std::vector<int> y = {0, 1, 2, 0, 1, 2, 0};
    auto build = [&](Graph<double>& g) {
      return loss::cce(g, g.matmul(g.input(x), g.param(w)), y);
    };
    w.zero_grad();
    {
      Graph<double> g;
      g.backward(build(g));
    }
    auto forward = [&]() {
      Graph<double> g;
      return g.value(build(g)).ptr()[0];
    };
    CHECK(num::finite_diff_check({&w}, forward) < 1e-4);
  }
}
