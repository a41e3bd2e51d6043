#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "ecmsim/dataset.hpp"
#include "ecmsim/device.hpp"
#include "ecmsim/rng.hpp"

// An L-input x M-output grid of ECM cells with a shared clock. Rows are
// input lines (pixels), columns are output neurons. Device state is lazy:
// a cell is only reconciled with the clock when it spikes or is read, so
// advancing time is O(1) and a pattern presentation is O(active pixels).

namespace ecmsim {

struct VariabilitySpec {
  double cv = 0.0;        // sigma/mu applied to efficiency, g_max, tau_prefactor
  std::uint64_t seed = 0;
};

class Crossbar {
 public:
  // Per-device (efficiency, g_max, tau_prefactor) are drawn from
  // Normal(mu, cv*mu), resampled while out of range (<= 0, or efficiency > 1).
  // tau_exponent and g_ref are shared. cv = 0 gives exact nominals everywhere.
  Crossbar(std::size_t rows, std::size_t cols, const DeviceParams& nominal,
           const VariabilitySpec& var = {}, double g_init = 10e-6)
      : rows_(rows), cols_(cols), nominal_(nominal), g_init_(g_init) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("crossbar: dimensions must be >= 1");
    validate(nominal);
    if (!(var.cv >= 0.0)) throw std::invalid_argument("crossbar: cv must be >= 0");
    if (!(g_init > 0.0) || g_init > nominal.g_max)
      throw std::invalid_argument("crossbar: g_init must be in (0, g_max]");

    const std::size_t n = rows * cols;
    efficiency_.assign(n, nominal.efficiency);
    g_max_.assign(n, nominal.g_max);
    tau_prefactor_.assign(n, nominal.tau_prefactor);
    if (var.cv > 0.0) {
      Rng rng(derive_seed(var.seed, StreamTag::variability));
      auto draw = [&](double mu, bool cap_at_one) {
        double v = rng.normal(mu, var.cv * mu);
        while (v <= 0.0 || (cap_at_one && v > 1.0)) v = rng.normal(mu, var.cv * mu);
        return v;
      };
      for (std::size_t i = 0; i < n; ++i) {
        efficiency_[i] = draw(nominal.efficiency, true);
        g_max_[i] = draw(nominal.g_max, false);
        tau_prefactor_[i] = draw(nominal.tau_prefactor, false);
      }
    }
    g_.assign(n, g_init);
    t_.assign(n, 0.0);
    tau_.resize(n);
    for (std::size_t i = 0; i < n; ++i) tau_[i] = tau_at(i, g_init);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double clock() const { return clock_; }
  double v_read() const { return v_read_; }
  double v_prog() const { return v_prog_; }
  double pulse_width() const { return pulse_width_; }
  double g_init() const { return g_init_; }
  const DeviceParams& nominal() const { return nominal_; }

  void set_v_read(double v) {
    if (!(v > 0.0)) throw std::invalid_argument("crossbar: v_read must be > 0");
    v_read_ = v;
  }
  void set_programming_pulse(double v_prog, double width) {
    if (!(v_prog > nominal_.v_threshold))
      throw std::invalid_argument("crossbar: v_prog must exceed the device threshold");
    if (!(width > 0.0)) throw std::invalid_argument("crossbar: pulse width must be > 0");
    v_prog_ = v_prog;
    pulse_width_ = width;
  }

  DeviceParams params_at(std::size_t row, std::size_t col) const {
    const std::size_t i = index(row, col);
    DeviceParams p = nominal_;
    p.efficiency = efficiency_[i];
    p.g_max = g_max_[i];
    p.tau_prefactor = tau_prefactor_[i];
    return p;
  }

  DeviceState state_at(std::size_t row, std::size_t col) const {
    const std::size_t i = index(row, col);
    return DeviceState{g_[i], t_[i], tau_[i]};
  }

  // One pattern presentation: advance the clock by dt, then spike every cell
  // of `column` whose input line is active. All other cells merely age.
  void imprint_pattern(std::span<const std::uint8_t> pixels, std::size_t column,
                       double dt) {
    if (pixels.size() != rows_)
      throw std::invalid_argument("crossbar: pixel vector length != rows");
    if (column >= cols_) throw std::out_of_range("crossbar: column out of range");
    if (!(dt > 0.0)) throw std::invalid_argument("crossbar: dt must be > 0");
    clock_ += dt;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (!pixels[r]) continue;
      const std::size_t i = index(r, column);
      const double dtr = clock_ - t_[i];
      double relaxed = g_[i] * std::exp(-dtr / tau_[i]);
      if (relaxed < kConductanceFloor) relaxed = kConductanceFloor;
      const double g = relaxed + efficiency_[i] * (g_max_[i] - relaxed);
      g_[i] = g;
      t_[i] = clock_;
      tau_[i] = tau_at(i, g);
    }
  }

  // Spike-free interval. Lazy states make this a clock bump.
  void wait(double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("crossbar: wait must be >= 0");
    clock_ += t;
  }

  // Relaxed conductance of (row, col) at the current clock. Pure.
  double conductance_at(std::size_t row, std::size_t col) const {
    const std::size_t i = index(row, col);
    const double g = g_[i] * std::exp(-(clock_ - t_[i]) / tau_[i]);
    return g < kConductanceFloor ? kConductanceFloor : g;
  }

  // All conductances at the current clock, row-major (rows x cols). This is
  // the read-phase working form: reads are non-mutating and do not advance
  // the clock, so one snapshot serves any number of reads.
  std::vector<double> conductance_snapshot() const {
    std::vector<double> out(rows_ * cols_);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double g = g_[i] * std::exp(-(clock_ - t_[i]) / tau_[i]);
      out[i] = g < kConductanceFloor ? kConductanceFloor : g;
    }
    return out;
  }

  // Read-mode output currents: I_j = v_read * sum_i pixels[i] * G[i][j].
  std::vector<double> read_currents(std::span<const std::uint8_t> pixels) const {
    if (pixels.size() != rows_)
      throw std::invalid_argument("crossbar: pixel vector length != rows");
    std::vector<double> currents(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (!pixels[r]) continue;
      const std::size_t base = r * cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        const std::size_t i = base + c;
        const double g = g_[i] * std::exp(-(clock_ - t_[i]) / tau_[i]);
        currents[c] += g < kConductanceFloor ? kConductanceFloor : g;
      }
    }
    for (auto& v : currents) v *= v_read_;
    return currents;
  }

  // CSV matrix export (row = input line, column = output neuron, Siemens).
  void write_conductance_csv(std::ostream& out) const {
    const auto snap = conductance_snapshot();
    char buf[32];
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        std::snprintf(buf, sizeof buf, "%.12e", snap[r * cols_ + c]);
        out << buf << (c + 1 < cols_ ? "," : "");
      }
      out << '\n';
    }
  }

 private:
  std::size_t index(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_)
      throw std::out_of_range("crossbar: device index out of range");
    return row * cols_ + col;
  }

  double tau_at(std::size_t i, double g) const {
    const double r = g / nominal_.g_ref;
    if (nominal_.tau_exponent == 4.0) {
      const double r2 = r * r;
      return tau_prefactor_[i] * r2 * r2;
    }
    return tau_prefactor_[i] * std::pow(r, nominal_.tau_exponent);
  }

  std::size_t rows_, cols_;
  DeviceParams nominal_;
  double g_init_;
  std::vector<double> efficiency_, g_max_, tau_prefactor_;  // per device
  std::vector<double> g_, t_, tau_;                         // lazy state
  double clock_ = 0.0;
  double v_prog_ = 0.42;
  double pulse_width_ = 100e-6;
  double v_read_ = 0.1;
};

inline Crossbar build_crossbar(std::size_t rows, std::size_t cols,
                               const DeviceParams& nominal,
                               const VariabilitySpec& var = {},
                               double g_init = 10e-6) {
  return Crossbar(rows, cols, nominal, var, g_init);
}

// One imprinting epoch: which column is selected and which class it learns.
struct Epoch {
  std::size_t column;
  std::uint8_t label;
};

// Column j learns class j (the supervised selector convention).
inline std::vector<Epoch> identity_epochs(std::size_t count) {
  std::vector<Epoch> epochs(count);
  for (std::size_t i = 0; i < count; ++i)
    epochs[i] = Epoch{i, static_cast<std::uint8_t>(i)};
  return epochs;
}

// Epoch m targets column m and learns class m mod num_classes.
inline std::vector<Epoch> round_robin_epochs(std::size_t count, std::size_t num_classes) {
  std::vector<Epoch> epochs(count);
  for (std::size_t i = 0; i < count; ++i)
    epochs[i] = Epoch{i, static_cast<std::uint8_t>(i % num_classes)};
  return epochs;
}

// Supervised imprinting: each epoch presents n noisy exemplars of its class
// to its column, each presentation advancing the clock by dt. Total clock
// advance is epochs.size() * n * dt.
inline void run_imprint_phase(Crossbar& cb, std::span<const Epoch> epochs,
                              std::size_t n, double dt, const PatternSource& source) {
  std::vector<std::uint8_t> img;
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    for (std::size_t p = 0; p < n; ++p) {
      source(e, p, epochs[e].label, img);
      cb.imprint_pattern(img, epochs[e].column, dt);
    }
  }
}

}  // namespace ecmsim
