// Model persistence: one JSON document per model. Numbers are written with 17
// significant digits so every double survives the round trip exactly.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "chainorder/error.hpp"
#include "chainorder/training.hpp"

namespace chainorder {

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) fail(ErrorCode::numeric, "cannot serialise a non-finite parameter");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string size_list(const Mlp& mlp) {
  std::string out = "[";
  if (mlp.num_layers() > 0) {
    out += std::to_string(mlp.input_dim());
    for (const LayerShape& l : mlp.layers()) out += ", " + std::to_string(l.out);
  }
  return out + "]";
}

std::vector<std::size_t> sizes_of(const Mlp& mlp) {
  std::vector<std::size_t> out;
  if (mlp.num_layers() == 0) return out;
  out.push_back(mlp.input_dim());
  for (const LayerShape& l : mlp.layers()) out.push_back(l.out);
  return out;
}

}  // namespace

void save_model(const TransitionModel& model, const std::filesystem::path& path) {
  const GatedTransitionNet& net = model.net;
  std::ostringstream os;
  os << "{\n";
  os << "  \"format_version\": " << kModelFormatVersion << ",\n";
  os << "  \"kind\": \"" << kind_name(net.kind()) << "\",\n";
  os << "  \"state_dim\": " << net.state_dim() << ",\n";
  os << "  \"dropout_rate\": " << num(net.architecture().dropout_rate) << ",\n";
  os << "  \"layer_sizes\": {\n";
  os << "    \"encoder\": " << size_list(net.encoder()) << ",\n";
  os << "    \"gate\": " << size_list(net.gate_head()) << ",\n";
  os << "    \"candidate\": " << size_list(net.candidate_head()) << ",\n";
  os << "    \"variance\": " << size_list(net.variance_head()) << "\n";
  os << "  },\n";
  os << "  \"parameter_order\": \"encoder, gate, candidate, variance; per layer row-major weights then bias\",\n";
  os << "  \"seed\": " << model.seed << ",\n";
  os << "  \"training_steps\": " << model.training_steps << ",\n";
  os << "  \"parameters\": [";
  const auto params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    os << (i % 4 == 0 ? "\n    " : " ") << num(params[i]);
    if (i + 1 < params.size()) os << ",";
  }
  os << "\n  ]\n}\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  out << os.str();
  if (!out) fail(ErrorCode::io, "failed writing '" + path.string() + "'");
}

TransitionModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open model file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::parse, "malformed model file '" + path.string() + "': " + e.what());
  }

  try {
    if (!doc.is_object() || !doc.contains("format_version"))
      fail(ErrorCode::parse, "model file has no format_version field");
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      fail(ErrorCode::version, "model format version " + std::to_string(version) + " is not supported (expected " +
                                   std::to_string(kModelFormatVersion) + ")");

    TransitionArchitecture arch;
    arch.kind = parse_kind(doc.at("kind").get<std::string>());
    arch.state_dim = doc.at("state_dim").get<std::size_t>();
    arch.dropout_rate = doc.at("dropout_rate").get<double>();
    const auto& sizes = doc.at("layer_sizes");
    const auto encoder = sizes.at("encoder").get<std::vector<std::size_t>>();
    if (encoder.size() < 2 || encoder.front() != arch.state_dim)
      fail(ErrorCode::dimension, "encoder layer sizes do not start at the state dimension");
    arch.hidden_sizes.assign(encoder.begin() + 1, encoder.end());

    std::vector<double> params = doc.at("parameters").get<std::vector<double>>();
    TransitionModel model{GatedTransitionNet(arch, std::move(params)), doc.at("seed").get<std::uint64_t>(),
                          doc.at("training_steps").get<std::uint64_t>()};

    const GatedTransitionNet& net = model.net;
    if (sizes.at("gate").get<std::vector<std::size_t>>() != sizes_of(net.gate_head()) ||
        sizes.at("candidate").get<std::vector<std::size_t>>() != sizes_of(net.candidate_head()) ||
        sizes.at("variance").get<std::vector<std::size_t>>() != sizes_of(net.variance_head()))
      fail(ErrorCode::dimension, "head layer sizes are inconsistent with the encoder and state dimension");
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, "malformed model file '" + path.string() + "': " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::version || e.code() == ErrorCode::parse || e.code() == ErrorCode::dimension) throw;
    fail(ErrorCode::dimension, "model file '" + path.string() + "' is inconsistent: " + e.what());
  }
}

}  // namespace chainorder
