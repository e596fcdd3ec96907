#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsnkit/resistors.hpp"
#include "bsnkit/rng.hpp"

// 3T-1SR binary stochastic neuron: the stochastic resistor sits between V_DD
// and the drain node of an NMOS whose gate is the input V_IN; an inverter
// thresholds the drain node at V_DD/2. Voltages are referenced to the NMOS
// source.
namespace bsnkit::circuit {

// Behavioral NMOS:
//
//   I_D = (1 + lambda V_DS) k F / (1 + k F / L)
//   F   = softplus(u_f)^2 - softplus(u_r)^2
//   u_f = (V_GS - V_T) / (n phi_t),  u_r = (V_GS - V_T - n V_DS) / (n phi_t)
//
// F is exponential below threshold and square-law above; L caps the drive.
// k and L are fitted so that I_D = I_Dsat at V_GS = V_DS = V_DD/2 and
// I_D = I_plus_max at V_GS = V_DD, V_DS = V_DD/2.
struct FetModel {
  double vdd = 0.8;
  double vt = 0.32;
  double slope_factor = 1.3;
  double thermal_voltage = 0.025852;
  double clm = 0.05;  // lambda, 1/V
  double i_dsat = 15e-6;
  double i_plus_max = 40e-6;
  double gain = 0.0;       // k, A
  double inv_limit = 0.0;  // 1/L, 1/A

  // Fits gain and inv_limit to the anchors. Throws ConfigError if they are
  // not reachable with the shape parameters.
  void calibrate();
  void validate() const;

  double current(double vgs, double vds) const;
  double output_conductance(double vgs, double vds) const;  // dI/dV_DS, S
};

FetModel default_fet();

// Throws ConfigError for voltages outside [0, V_DD].
double fet_current(const FetModel& fet, double vgs, double vds);

struct BsnCircuit {
  resistors::ResistorParams resistor;
  FetModel fet = default_fet();
  double c_load = 10e-18;  // F

  double threshold() const { return 0.5 * fet.vdd; }
  void validate() const;
};

// Non-tunable kinds get the R_P, R_AP of a 50 mV stochastic region on the
// default FET; tunable kinds get R_P = 15 kOhm, R_AP = 45 kOhm,
// I50 = I_Dsat and I0 = 5 uA.
BsnCircuit default_circuit(resistors::ResistorKind kind, double tau_fluct = 1e-9);

struct NodeSolution {
  double v_node = 0.0;
  double current = 0.0;   // load-line current (V_DD - V_node) / R
  double residual = 0.0;  // I_FET - load-line current
};

// Root of I_FET(V_IN, V) = (V_DD - V)/R on [0, V_DD]: bisection to 1e-6 V then
// Newton steps kept inside the bracket until the residual is at round-off.
NodeSolution solve_node(const FetModel& fet, double r, double v_in);

class BsnSimulator {
 public:
  BsnSimulator(const BsnCircuit& circuit, Rng rng, double v_in);

  void set_input(double v_in);
  // Resistor step with the previous branch current, node solve, inverter
  // low-pass, threshold. Returns the output m.
  int step(double dt);

  int output() const { return output_; }
  double v_in() const { return v_in_; }
  double v_node() const { return node_.v_node; }
  double v_filtered() const { return v_filtered_; }
  double current() const { return node_.current; }
  double residual() const { return node_.residual; }
  double resistance() const { return resistor_.resistance(); }
  bool inverter_active() const { return inverter_active_; }
  double power() const;  // V_DD (I_branch + inverter current), W
  const resistors::StochasticResistor& resistor() const { return resistor_; }

 private:
  BsnCircuit circuit_;
  resistors::StochasticResistor resistor_;
  double v_in_ = 0.0;
  NodeSolution node_;
  double v_filtered_ = 0.0;
  int output_ = -1;
  bool inverter_active_ = false;
};

struct Trace {
  double dt = 0.0;
  double v_in = 0.0;
  std::vector<double> resistance;
  std::vector<double> v_node;
  std::vector<double> current;
  std::vector<double> output;
  std::vector<double> power;
};

Trace simulate_trace(const BsnCircuit& circuit, double v_in, double duration, double dt,
                     std::uint64_t seed, double burn_in = 0.0);

enum class CurveClass { sigmoid, staircase, nonmonotone, unclassified };
std::string_view to_string(CurveClass c);

struct TanhFit {
  double v0 = 0.0;
  double vs = 0.0;
  double rmse = 0.0;
};

struct TransferCurve {
  std::vector<double> v_in;
  std::vector<double> mean_out;
  std::vector<double> error;
  TanhFit fit;
  CurveClass classification = CurveClass::unclassified;
  bool averaging_sufficient = true;  // duration >= 1000 tau_fluct per point
};

struct SweepSettings {
  double duration = 0.0;  // s per point; 0 selects 1000 tau_fluct
  double dt = 0.0;        // 0 selects tau_fluct / 50
  double burn_in = 0.05;  // fraction of duration
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

std::vector<double> linear_grid(double lo, double hi, std::size_t points);

TransferCurve transfer_characteristic(const BsnCircuit& circuit, std::span<const double> v_in,
                                      const SweepSettings& settings);

// Least-squares fit of tanh((V - V0)/Vs).
TanhFit fit_tanh(std::span<const double> v, std::span<const double> m);

// nonmonotone if the largest rise and the largest fall both exceed 0.2;
// staircase if a flat run of >= 2 points with |m| < 0.1 separates saturated
// ends and the tanh fit is poor; sigmoid if the fit rmse < 0.05.
CurveClass classify(std::span<const double> v, std::span<const double> m, const TanhFit& fit);

struct StochasticRegion {
  double v_minus = 0.0;
  double v_plus = 0.0;
  double delta_v = 0.0;
};

// Crossings of <m> = -0.95 and +0.95. Throws NumericalError when the curve
// does not saturate on both sides of the sweep.
StochasticRegion stochastic_region(const TransferCurve& curve);

struct ResistanceDesign {
  double n = 0.0;
  double i_plus = 0.0;
  double i_minus = 0.0;
  double r_p = 0.0;
  double r_ap = 0.0;
  double v_minus = 0.0;
  double v_plus = 0.0;
};

// Region centred where the FET carries I_Dsat at V_DS = V_DD/2. The node sits
// at V_DD/2 when R = (V_DD/2)/I, so R_P = (V_DD/2)/I+ and R_AP = (V_DD/2)/I-.
ResistanceDesign design_resistance_ratio(const FetModel& fet, double delta_v);

// Inverse of design_resistance_ratio: the design whose ratio is n.
ResistanceDesign design_for_ratio(const FetModel& fet, double n);

struct DriveReport {
  bool pass = false;
  bool i50_matched = false;  // within 20% of I_Dsat
  double required_drive = 0.0;  // 6 I0
  std::string message;
};

DriveReport check_tunable_drive(const FetModel& fet, const resistors::ResistorParams& resistor);

struct CorrelationTimes {
  double tau_c = 0.0;     // binary output
  double tau_corr = 0.0;  // resistance in the same run
};

CorrelationTimes measure_tau_C(const BsnCircuit& circuit, double v_in, double dt, double duration,
                               std::uint64_t seed);

struct StepSpec {
  double v_from = 0.0;
  double v_to = 0.4;
  double settle = 0.0;  // s held at v_from before the step
  double window = 0.0;  // s recorded after the step
};

struct ResponseTime {
  double tau_n = 0.0;
  double final_mean = 0.0;
  double band = 0.0;
  std::vector<double> time;
  std::vector<double> mean;
};

// Ensemble-mean output after the input step; tau_N is the first time the
// smoothed mean enters and stays within two standard errors of its value over
// the last quarter of the window.
ResponseTime measure_tau_N(const BsnCircuit& circuit, const StepSpec& step, std::size_t ensemble,
                           double dt, std::uint64_t seed, unsigned threads = 1);

struct PowerBreakdown {
  double total = 0.0;
  double resistor_branch = 0.0;
  double inverter_branch = 0.0;
};

PowerBreakdown average_power(const BsnCircuit& circuit, const Trace& trace);

struct EnergyMetrics {
  double e_c = 0.0;
  double e_n = 0.0;
};

EnergyMetrics energy_metrics(double tau_c, double tau_n, double avg_power);

struct RunMetrics {
  double tau_c = 0.0;
  double tau_n = 0.0;
  double avg_power = 0.0;
  double e_c = 0.0;
  double e_n = 0.0;
};

}  // namespace bsnkit::circuit
