#pragma once

// Static three-diode short-parallel clamp. The forward conduction path sets
// the clamp threshold; the rest of the network only shows up through the
// junction capacitance count used for stored-energy bounds.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gsc::clamp {

struct DiodeSpec {
  double vf;   // forward drop, V
  double i_s;  // reverse saturation current, A
  double n;    // ideality factor
  double v_t;  // thermal voltage, V
  double c_j;  // junction capacitance, F

  /// Throws DomainError when a field violates its physical range.
  void validate() const;

  bool operator==(const DiodeSpec&) const = default;
};

/// 1N5408 rectifier. vf and c_j are datasheet-level values; i_s, n and v_t
/// are generic silicon defaults meant to be overridden from config.
DiodeSpec diode_1n5408();

/// Looks up a named preset ("1N5408", case-insensitive).
std::optional<DiodeSpec> diode_preset(std::string_view name);

class ClampNetwork {
 public:
  ClampNetwork(std::vector<DiodeSpec> conduction_path, double r_dyn,
               int n_clamp_diodes);

  /// D1 + D3 of the 1N5408 network with no dynamic resistance.
  static ClampNetwork standard();

  const std::vector<DiodeSpec>& conduction_path() const noexcept { return path_; }
  double r_dyn() const noexcept { return r_dyn_; }
  int n_clamp_diodes() const noexcept { return n_clamp_diodes_; }

  /// True when every conduction-path diode shares (i_s, n, v_t).
  bool homogeneous() const noexcept;

 private:
  std::vector<DiodeSpec> path_;
  double r_dyn_;
  int n_clamp_diodes_;
};

struct NetworkCurrent {
  double amperes;
  std::optional<std::string> warning;
};

/// Sum of forward drops along the conduction path.
double stabilized_voltage(const ClampNetwork& net);

/// min(v_s, sum(vf) + i_sc * r_dyn).
double clamp_output(const ClampNetwork& net, double v_s, double i_sc);

/// Shockley conduction of D1 and D3 using the first diode's (i_s, n, v_t):
///   i_s (e^{v_d1/(n v_t)} + e^{v_d3/(n v_t)} - 2)
/// A warning is attached when the path mixes diode parameters.
NetworkCurrent network_current(const ClampNetwork& net, double v_d1, double v_d3);

/// Diode clamping efficiency: 1 - delta_v_out / delta_v_source.
double dcei(double delta_v_cb1, double delta_v_s);

}  // namespace gsc::clamp
