#include "gsc/clamp_network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "gsc/error.hpp"

namespace gsc::clamp {

void DiodeSpec::validate() const {
  if (!(vf > 0.0)) throw DomainError("DiodeSpec: vf must be > 0");
  if (!(i_s > 0.0)) throw DomainError("DiodeSpec: i_s must be > 0");
  if (!(n >= 1.0)) throw DomainError("DiodeSpec: ideality factor must be >= 1");
  if (!(v_t > 0.0)) throw DomainError("DiodeSpec: v_t must be > 0");
  if (!(c_j >= 0.0)) throw DomainError("DiodeSpec: c_j must be >= 0");
}

DiodeSpec diode_1n5408() {
  return DiodeSpec{.vf = 1.2, .i_s = 1e-9, .n = 1.0, .v_t = 0.02585, .c_j = 40e-12};
}

std::optional<DiodeSpec> diode_preset(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "1N5408") return diode_1n5408();
  return std::nullopt;
}

ClampNetwork::ClampNetwork(std::vector<DiodeSpec> conduction_path, double r_dyn,
                           int n_clamp_diodes)
    : path_(std::move(conduction_path)), r_dyn_(r_dyn), n_clamp_diodes_(n_clamp_diodes) {
  if (path_.empty()) throw DomainError("ClampNetwork: conduction path is empty");
  for (const auto& d : path_) d.validate();
  if (!(r_dyn_ >= 0.0)) throw DomainError("ClampNetwork: r_dyn must be >= 0");
  if (n_clamp_diodes_ < 1) throw DomainError("ClampNetwork: need at least one clamp diode");
}

ClampNetwork ClampNetwork::standard() {
  return ClampNetwork({diode_1n5408(), diode_1n5408()}, 0.0, 2);
}

bool ClampNetwork::homogeneous() const noexcept {
  const auto& first = path_.front();
  return std::all_of(path_.begin(), path_.end(), [&](const DiodeSpec& d) {
    return d.i_s == first.i_s && d.n == first.n && d.v_t == first.v_t;
  });
}

double stabilized_voltage(const ClampNetwork& net) {
  double sum = 0.0;
  for (const auto& d : net.conduction_path()) sum += d.vf;
  return sum;
}

double clamp_output(const ClampNetwork& net, double v_s, double i_sc) {
  if (!(v_s >= 0.0)) throw DomainError("clamp_output: source voltage must be >= 0");
  if (!(i_sc >= 0.0)) throw DomainError("clamp_output: fault current must be >= 0");
  return std::min(v_s, stabilized_voltage(net) + i_sc * net.r_dyn());
}

NetworkCurrent network_current(const ClampNetwork& net, double v_d1, double v_d3) {
  const DiodeSpec& d = net.conduction_path().front();
  const double scale = d.n * d.v_t;
  const double max_exponent = std::log(std::numeric_limits<double>::max());
  for (double v : {v_d1, v_d3}) {
    if (!std::isfinite(v) || v / scale > max_exponent) {
      throw DomainError("network_current: diode exponent overflows at " +
                        std::to_string(v) + " V");
    }
  }
  // Each branch contributes e^x - 1, computed with expm1 so tiny biases keep
  // their precision.
  const double amps = d.i_s * (std::expm1(v_d1 / scale) + std::expm1(v_d3 / scale));
  if (!std::isfinite(amps)) {
    throw DomainError("network_current: current overflows at v_d1=" + std::to_string(v_d1) +
                      " V, v_d3=" + std::to_string(v_d3) + " V");
  }
  NetworkCurrent out{amps, std::nullopt};
  if (!net.homogeneous()) {
    out.warning = "conduction path mixes diode parameters; using the first diode's i_s, n, v_t";
  }
  return out;
}

double dcei(double delta_v_cb1, double delta_v_s) {
  if (delta_v_s == 0.0) throw DomainError("dcei: source variation is zero");
  if (!(delta_v_s > 0.0)) throw DomainError("dcei: source variation must be > 0");
  return 1.0 - delta_v_cb1 / delta_v_s;
}

}  // namespace gsc::clamp
