#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "ecmsim/crossbar.hpp"
#include "ecmsim/dataset.hpp"

// Single-crossbar current-signature classifier: a J x J register of
// class-conditional mean readout currents, trained by iterative averaging
// and read out by an L1 nearest-signature rule.

namespace ecmsim {

struct SignatureRegister {
  std::size_t num_classes = 0;
  std::vector<double> means;        // [c * J + j]: mean current of neuron j over class c
  std::vector<std::size_t> counts;  // examples folded in per class

  double mean(std::size_t cls, std::size_t neuron) const {
    return means[cls * num_classes + neuron];
  }
};

// Folds one labeled current vector into its class row:
// mean += (I - mean) / count.
inline void fold_example(SignatureRegister& reg, std::uint8_t label,
                         std::span<const double> currents) {
  if (label >= reg.num_classes) throw std::out_of_range("register: label out of range");
  if (currents.size() != reg.num_classes)
    throw std::invalid_argument("register: current vector length != J");
  auto& n = ++reg.counts[label];
  double* row = reg.means.data() + std::size_t(label) * reg.num_classes;
  for (std::size_t j = 0; j < reg.num_classes; ++j)
    row[j] += (currents[j] - row[j]) / static_cast<double>(n);
}

// Presents examples 0..N-1 of `source` in read mode and averages the
// currents per true class. The crossbar must already be imprinted and
// waited; reads are non-mutating and the clock does not advance.
inline SignatureRegister train_register(const Crossbar& cb, const LabeledSource& source,
                                        std::size_t n_examples, std::size_t num_classes) {
  SignatureRegister reg;
  reg.num_classes = num_classes;
  reg.means.assign(num_classes * num_classes, 0.0);
  reg.counts.assign(num_classes, 0);
  std::vector<std::uint8_t> img;
  for (std::size_t i = 0; i < n_examples; ++i) {
    const auto label = source(i, img);
    const auto currents = cb.read_currents(img);
    fold_example(reg, label, currents);
  }
  return reg;
}

// Predicted class = argmin_c sum_j |means[c][j] - I_test[j]|, ties broken by
// the lowest class index.
inline std::uint8_t classify(const SignatureRegister& reg,
                             std::span<const double> currents) {
  if (currents.size() != reg.num_classes)
    throw std::invalid_argument("classify: current vector length != J");
  for (std::size_t c = 0; c < reg.num_classes; ++c)
    if (reg.counts[c] == 0)
      throw std::runtime_error("classify: register has an untrained class row");
  std::size_t best = 0;
  double best_err = 0.0;
  for (std::size_t c = 0; c < reg.num_classes; ++c) {
    double err = 0.0;
    const double* row = reg.means.data() + c * reg.num_classes;
    for (std::size_t j = 0; j < reg.num_classes; ++j)
      err += std::abs(row[j] - currents[j]);
    if (c == 0 || err < best_err) {
      best = c;
      best_err = err;
    }
  }
  return static_cast<std::uint8_t>(best);
}

// Correct fraction over examples 0..K-1 of `source`.
inline double evaluate(const SignatureRegister& reg, const Crossbar& cb,
                       const LabeledSource& source, std::size_t k_examples) {
  if (k_examples == 0) throw std::invalid_argument("evaluate: K must be >= 1");
  std::size_t correct = 0;
  std::vector<std::uint8_t> img;
  for (std::size_t i = 0; i < k_examples; ++i) {
    const auto label = source(i, img);
    const auto currents = cb.read_currents(img);
    if (classify(reg, currents) == label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(k_examples);
}

// J x J CSV in Amperes, one class row per line.
inline void write_register_csv(const SignatureRegister& reg, std::ostream& out) {
  char buf[32];
  for (std::size_t c = 0; c < reg.num_classes; ++c) {
    for (std::size_t j = 0; j < reg.num_classes; ++j) {
      std::snprintf(buf, sizeof buf, "%.12e", reg.mean(c, j));
      out << buf << (j + 1 < reg.num_classes ? "," : "");
    }
    out << '\n';
  }
}

}  // namespace ecmsim
