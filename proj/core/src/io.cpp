#include "cqed/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cqed/dynamics.hpp"

namespace cqed::io {
namespace {

using nlohmann::json;

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::string_view header) { out_ << header << '\n'; }

  CsvWriter& num(double v) { return cell(format_double(v)); }
  CsvWriter& integer(long long v) { return cell(std::to_string(v)); }
  CsvWriter& text(std::string_view v) { return cell(csv_field(v)); }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  CsvWriter& cell(const std::string& v) {
    if (!first_) out_ << ',';
    out_ << v;
    first_ = false;
    return *this;
  }

  std::ostringstream out_;
  bool first_ = true;
};

void append_le(std::vector<std::byte>& out, std::uint64_t bits, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xffu));
}

std::uint64_t read_le(std::span<const std::byte> in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
  return v;
}

constexpr std::array<char, 4> state_magic{'C', 'Q', 'S', '1'};

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("failed to format double");
  return std::string(buf.data(), end);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string state_to_json(const SystemState& state) {
  json j;
  j["tau"] = state.tau;
  j["x"] = state.x();
  j["p"] = state.p();
  j["N"] = state.truncation();
  j["alpha"] = std::vector<double>(state.alpha().begin(), state.alpha().end());
  j["beta"] = std::vector<double>(state.beta().begin(), state.beta().end());
  j["rho"] = std::vector<double>(state.rho().begin(), state.rho().end());
  j["eta"] = std::vector<double>(state.eta().begin(), state.eta().end());
  return j.dump();
}

SystemState state_from_json(std::string_view text) {
  const json j = json::parse(text);
  const int n = j.at("N").get<int>();
  SystemState state(n);
  state.tau = j.at("tau").get<double>();
  state.x() = j.at("x").get<double>();
  state.p() = j.at("p").get<double>();
  auto fill = [&](const char* key, std::span<double> dst) {
    const auto v = j.at(key).get<std::vector<double>>();
    if (v.size() != dst.size()) throw std::invalid_argument(std::string("state JSON: '") + key + "' has wrong length");
    std::copy(v.begin(), v.end(), dst.begin());
  };
  fill("alpha", state.alpha());
  fill("beta", state.beta());
  fill("rho", state.rho());
  fill("eta", state.eta());
  return state;
}

std::vector<std::byte> state_to_bytes(const SystemState& state) {
  std::vector<std::byte> out;
  out.reserve(8 + 8 * (1 + state.coords().size()));
  for (char c : state_magic) out.push_back(static_cast<std::byte>(c));
  append_le(out, static_cast<std::uint32_t>(state.truncation()), 4);
  append_le(out, std::bit_cast<std::uint64_t>(state.tau), 8);
  for (double v : state.coords()) append_le(out, std::bit_cast<std::uint64_t>(v), 8);
  return out;
}

SystemState state_from_bytes(std::span<const std::byte> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), state_magic.data(), state_magic.size()) != 0) {
    throw std::invalid_argument("not a binary state snapshot");
  }
  const auto n = static_cast<int>(static_cast<std::int32_t>(read_le(bytes, 4, 4)));
  if (n < 1) throw std::invalid_argument("binary state snapshot has invalid truncation");
  const std::size_t count = Layout::size(n);
  if (bytes.size() != 8 + 8 * (1 + count)) throw std::invalid_argument("binary state snapshot has wrong length");
  std::vector<double> coords(count);
  const double tau = std::bit_cast<double>(read_le(bytes, 8, 8));
  for (std::size_t i = 0; i < count; ++i) coords[i] = std::bit_cast<double>(read_le(bytes, 16 + 8 * i, 8));
  return SystemState(tau, std::move(coords), n);
}

std::string digest_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf.data(), 16);
}

std::string artifact_stem(std::string_view experiment, std::string_view canonical_spec) {
  return std::string(experiment) + "-" + digest_hex(canonical_spec);
}

std::string trajectory_csv(const Trajectory& traj, const ModelParams& params) {
  CsvWriter csv("tau,x,p,z,P,S,W,norm");
  for (const auto& s : traj.samples) {
    csv.num(s.tau).num(s.x()).num(s.p()).num(inversion(s)).num(purity(s)).num(entropy(s));
    csv.num(energy_W(s, params)).num(norm2(s));
    csv.end_row();
  }
  return csv.str();
}

std::string series_csv(const ObservableSeries& series) {
  CsvWriter csv("tau,value");
  for (std::size_t i = 0; i < series.size(); ++i) {
    csv.num(series.taus()[i]).num(series.values()[i]);
    csv.end_row();
  }
  return csv.str();
}

std::string series_sidecar_json(const ObservableSeries& series, std::string_view preset_hash,
                                std::string_view extra_json_object) {
  json j = json::parse(extra_json_object);
  j["observable"] = series.name();
  j["preset_hash"] = std::string(preset_hash);
  j["samples"] = series.size();
  j["columns"] = {"tau", "value"};
  return j.dump(2) + "\n";
}

std::string lyapunov_estimate_json(const Preset& preset, const LyapunovEstimate& estimate,
                                   const LyapunovOptions& opts) {
  json j;
  j["delta"] = preset.model.delta;
  j["kappa"] = preset.model.kappa;
  j["p0"] = preset.p0;
  j["nbar"] = preset.nbar;
  j["z0"] = preset.prep.z0;
  j["lambda"] = estimate.lambda;
  j["stderr"] = estimate.std_error;
  j["converged"] = estimate.converged;
  j["first_half"] = estimate.first_half;
  j["second_half"] = estimate.second_half;
  j["renormalizations"] = estimate.renormalizations;
  j["options"] = {{"d0", opts.d0},
                  {"renorm_interval", opts.renorm_interval},
                  {"transient", opts.transient},
                  {"total_time", opts.total_time},
                  {"perturbation_target", to_string(opts.target)},
                  {"metric", to_string(opts.metric)},
                  {"bootstrap_block", opts.bootstrap_block},
                  {"bootstrap_resamples", opts.bootstrap_resamples},
                  {"seed", opts.seed}};
  return j.dump(2) + "\n";
}

std::string delta_sweep_csv(const std::vector<LyapunovRecord>& lyapunov,
                            const std::vector<PurityVarianceRecord>& purity) {
  if (lyapunov.size() != purity.size()) throw std::invalid_argument("sweep tables differ in length");
  CsvWriter csv("delta,lambda,std_error,converged,sigma_P,sigma_S,mean_P,error");
  for (std::size_t i = 0; i < lyapunov.size(); ++i) {
    const auto& l = lyapunov[i];
    const auto& p = purity[i];
    std::string error = l.error;
    if (!p.error.empty()) error += (error.empty() ? "" : "; ") + p.error;
    csv.num(l.delta).num(l.estimate.lambda).num(l.estimate.std_error).integer(l.estimate.converged ? 1 : 0);
    csv.num(p.sigma_purity).num(p.sigma_entropy).num(p.mean_purity).text(error);
    csv.end_row();
  }
  return csv.str();
}

std::string scatter_csv(const std::vector<ScatterRecord>& records) {
  CsvWriter csv("p0,T,m,side,error");
  for (const auto& r : records) {
    csv.num(r.p0).num(r.escape_time).integer(r.turns).text(to_string(r.side)).text(r.error);
    csv.end_row();
  }
  return csv.str();
}

std::string position_csv(const std::vector<PositionRecord>& records) {
  CsvWriter csv("p0,x,error");
  for (const auto& r : records) {
    csv.num(r.p0).num(r.x).text(r.error);
    csv.end_row();
  }
  return csv.str();
}

std::string inversion_csv(const std::vector<InversionRecord>& records) {
  CsvWriter csv("z_in,z_out,error");
  for (const auto& r : records) {
    csv.num(r.z_in).num(r.z_out).text(r.error);
    csv.end_row();
  }
  return csv.str();
}

std::string fidelity_summary_csv(const std::vector<FidelityRun>& runs) {
  CsvWriter csv("z0,rate,log10_slope,goodness,fit_begin,fit_end,one_minus_f_at_report,error");
  for (const auto& r : runs) {
    csv.num(r.z0).num(r.fit.rate).num(2.0 * r.fit.rate / std::log(10.0)).num(r.fit.goodness);
    csv.num(r.fitted.begin).num(r.fitted.end).num(r.one_minus_f_at_report).text(r.error);
    csv.end_row();
  }
  return csv.str();
}

}  // namespace cqed::io
